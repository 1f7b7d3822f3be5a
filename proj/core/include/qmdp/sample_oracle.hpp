#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "qmdp/ledger.hpp"
#include "qmdp/mdp.hpp"
#include "qmdp/rng.hpp"

namespace qmdp {

/// Classical generative model over an Mdp: draws s' ~ p(.|s,a) for any
/// chosen (s,a) and charges the ledger one classical sample per draw.
///
/// Randomness comes from a single counter-based stream. select_stream()
/// repositions it at a stream derived from (seed, path); solvers use this to
/// give every (k, l, s, a) estimate its own stream so results do not depend
/// on evaluation order. The Mdp must outlive the oracle.
class SampleOracle {
 public:
  SampleOracle(const Mdp& mdp, std::uint64_t seed);

  const Mdp& mdp() const noexcept { return *mdp_; }
  std::uint64_t seed() const noexcept { return seed_; }

  QueryLedger& ledger() noexcept { return ledger_; }
  const QueryLedger& ledger() const noexcept { return ledger_; }

  /// One draw; +1 classical sample.
  std::size_t sample(std::size_t s, std::size_t a);

  /// Histogram of n draws; +n classical samples. Large n is drawn through
  /// sequential conditional binomials, which is distributionally identical
  /// to n independent draws.
  std::vector<std::uint64_t> sample_counts(std::size_t s, std::size_t a, std::uint64_t n);

  /// Empirical mean of v over n draws; +n classical samples.
  double sample_mean(std::size_t s, std::size_t a, std::span<const double> v, std::uint64_t n);

  /// Randomness for backends that need noise but draw no samples (mock
  /// estimators, simulated quantum measurements).
  CounterRng& rng() noexcept { return rng_; }

  void select_stream(std::initializer_list<std::uint64_t> path) noexcept;

  /// Independent oracle on the same Mdp with a derived seed and an empty
  /// ledger.
  SampleOracle child(std::initializer_list<std::uint64_t> path) const;

 private:
  void check_pair(std::size_t s, std::size_t a) const;

  const Mdp* mdp_;
  std::uint64_t seed_;
  CounterRng rng_;
  QueryLedger ledger_;
};

}  // namespace qmdp
