#pragma once

// Measurement-level simulation of canonical amplitude estimation and of
// Durr-Hoyer maximum finding. Both sample from exact outcome distributions
// instead of evolving a statevector.

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qmdp/ledger.hpp"
#include "qmdp/rng.hpp"

namespace qmdp {

inline constexpr unsigned kMaxPhaseBits = 24;
inline constexpr double kDefaultCmax = 4.0;

struct AmplitudeEstimationConfig {
  unsigned phase_bits = 10;       // t; the grid has M = 2^t points
  double target_amplitude = 0.0;  // a = sin^2(theta)

  void validate() const;
};

/// Pr[y] for y in [0, 2^t): 1/2 [F(y - M w) + F(y + M w)] with w = theta/pi
/// and the Fejer kernel F(x) = sin^2(pi x) / (M^2 sin^2(pi x / M)).
double ae_outcome_probability(const AmplitudeEstimationConfig& cfg, std::uint64_t y);

/// Full outcome distribution; intended for t small enough to enumerate.
std::vector<double> ae_outcome_distribution(const AmplitudeEstimationConfig& cfg);

/// sin^2(pi y / 2^t).
double ae_estimate_from_outcome(unsigned phase_bits, std::uint64_t y);

/// Error radius that one run meets with probability >= 8/pi^2:
/// 2 pi sqrt(a(1-a)) / M + pi^2 / M^2.
double ae_single_run_radius(double a, unsigned phase_bits);

/// One measurement; charges 2^t - 1 oracle calls when a ledger is given.
double amplitude_estimation_sample(const AmplitudeEstimationConfig& cfg, CounterRng& rng,
                                   QueryLedger* ledger = nullptr);

/// 18 * ceil(log2(1/delta)) repetitions for a median with failure <= delta.
std::size_t ae_median_repeats(double delta);

/// Median of `repeats` independent runs (repeats must be odd or the lower
/// middle element is used).
double amplitude_estimation_median(const AmplitudeEstimationConfig& cfg, std::size_t repeats,
                                   CounterRng& rng, QueryLedger* ledger = nullptr);

struct MaxFindingTrace {
  std::vector<std::pair<std::size_t, double>> threshold_history;
  std::uint64_t grover_queries_charged = 0;

  nlohmann::json to_json() const;
};

struct MaxFindingResult {
  std::size_t index = 0;
  MaxFindingTrace trace;
};

/// floor(c_max * sqrt(n) * log2(1/delta)).
std::uint64_t qargmax_budget(std::size_t n, double delta, double c_max = kDefaultCmax);

/// Durr-Hoyer threshold search over `values` under the order "larger value,
/// then lower index", so the unique maximum of that order is the lowest-index
/// argmax. Each threshold improvement runs the randomized Grover schedule
/// (growth factor 6/5) with exact success probabilities sin^2((2j+1) theta).
/// Never charges more than qargmax_budget(n, delta, c_max).
MaxFindingResult qargmax_simulate(std::span<const double> values, double delta, CounterRng& rng,
                                  double c_max = kDefaultCmax, QueryLedger* ledger = nullptr);

}  // namespace qmdp
