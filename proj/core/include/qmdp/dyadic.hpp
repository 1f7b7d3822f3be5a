#pragma once

// Dyadic probability tables and the amplitude-level quantum generative model
// built from them. Every p(s'|s,a) is k_{s'} / 2^m with integer k_{s'}.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <span>
#include <vector>

#include "qmdp/mdp.hpp"

namespace qmdp {

inline constexpr unsigned kMaxDyadicBits = 24;
inline constexpr unsigned kDefaultDyadicBits = 20;

struct DyadicMdpRow {
  unsigned denominator_bits = 0;
  std::vector<std::uint64_t> counts;

  /// Throws PreconditionError unless m <= kMaxDyadicBits and sum(counts) == 2^m.
  void validate() const;
  double probability(std::size_t next) const;
};

/// x -> s' with consecutive blocks of x assigned to successors in increasing
/// order; |{x : map[x] == s'}| == counts[s'].
std::vector<std::size_t> build_reversible_map(const DyadicMdpRow& row);

/// Preimage sizes of a reversible map, one per successor.
std::vector<std::uint64_t> preimage_counts(std::span<const std::size_t> map, std::size_t num_states);

/// Largest-remainder rounding of p * 2^m (ties to the lower index).
DyadicMdpRow quantize_row(std::span<const double> probabilities, unsigned m);

/// An Mdp whose transition rows are all dyadic with a shared m.
struct DyadicMdp {
  std::size_t num_states = 0;
  std::size_t num_actions = 0;
  double discount = 0.0;
  std::vector<double> rewards;      // S*A
  std::vector<DyadicMdpRow> rows;   // S*A, row-major by state
  double max_distortion = 0.0;      // max |quantized - original| over all entries

  const DyadicMdpRow& row(std::size_t s, std::size_t a) const { return rows[s * num_actions + a]; }
  Mdp to_mdp() const;
};

/// Quantizes every row of `mdp` to m bits and records the distortion.
DyadicMdp quantize_mdp(const Mdp& mdp, unsigned m = kDefaultDyadicBits);

/// Reads rows that are already exactly dyadic at m bits; any row needing
/// rounding is rejected so quantization is never silent.
DyadicMdp dyadic_from_exact(const Mdp& mdp, unsigned m);

/// sqrt(k / 2^m) stored exactly as (k, m) alongside its float rendering.
struct DyadicAmplitude {
  std::uint64_t numerator = 0;
  unsigned denominator_bits = 0;
  double value = 0.0;
};

/// Amplitudes of O|s,a>|0> on the successor register; the garbage register
/// is left abstract.
struct QuantumGenerativeState {
  std::size_t num_states = 0;
  std::size_t num_actions = 0;
  std::vector<std::vector<DyadicAmplitude>> amplitudes;  // S*A rows of length S

  const std::vector<DyadicAmplitude>& at(std::size_t s, std::size_t a) const {
    return amplitudes[s * num_actions + a];
  }
  /// Sum of squared amplitudes per row equals 1 in exact integer arithmetic.
  bool normalized_exactly() const;
};

/// Uniform superposition over x in {0,1}^m pushed through the reversible
/// map: the amplitude on s' is sqrt(|preimage(s')| / 2^m).
QuantumGenerativeState build_quantum_oracle(const DyadicMdp& mdp);

/// Standard MDP JSON plus "m", an integer "counts" tensor and the
/// quantization distortion.
nlohmann::json dyadic_mdp_to_json(const DyadicMdp& mdp);
nlohmann::json quantum_oracle_to_json(const QuantumGenerativeState& state);

}  // namespace qmdp
