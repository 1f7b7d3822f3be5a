#include "qmdp/quantum_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qmdp/error.hpp"

namespace qmdp {
namespace {

using std::numbers::pi;

// Fejer kernel F(x) = sin^2(pi x) / (M^2 sin^2(pi x / M)), period M. The
// offset is reduced to [-M/2, M/2] first so every multiple of M hits the
// removable singularity exactly; the numerator uses the fractional part,
// which keeps it accurate for large M.
double fejer(double x, double M) {
  const double r = x - M * std::round(x / M);
  if (r == 0.0) {
    return 1.0;
  }
  const double num = std::sin(pi * (r - std::round(r)));
  const double den = std::sin(pi * r / M);
  return (num * num) / (M * M * den * den);
}

// Draws y from Pr[y] = F(y - x0) by walking outward from the nearest grid
// point. The kernel decays like 1/d^2, so the expected walk is O(log M).
std::uint64_t sample_fejer(double x0, std::uint64_t M, CounterRng& rng) {
  const double Md = static_cast<double>(M);
  const double nearest = std::round(x0);
  const double frac = nearest - x0;  // offset of the nearest grid point
  const double u = rng.uniform();
  double acc = 0.0;
  std::int64_t last = 0;
  for (std::uint64_t step = 0; step < M; ++step) {
    // 0, +1, -1, +2, -2, ...
    const auto half = static_cast<std::int64_t>((step + 1) / 2);
    const std::int64_t d = step == 0 ? 0 : (step % 2 == 1 ? half : -half);
    acc += fejer(static_cast<double>(d) + frac, Md);
    last = d;
    if (u < acc) {
      break;
    }
  }
  const auto base = static_cast<std::int64_t>(nearest) + last;
  const auto m = static_cast<std::int64_t>(M);
  return static_cast<std::uint64_t>(((base % m) + m) % m);
}

}  // namespace

void AmplitudeEstimationConfig::validate() const {
  if (phase_bits == 0 || phase_bits > kMaxPhaseBits) {
    throw PreconditionError("amplitude estimation: phase_bits must lie in [1, " +
                            std::to_string(kMaxPhaseBits) + "]");
  }
  if (!(target_amplitude >= 0.0 && target_amplitude <= 1.0)) {
    throw PreconditionError("amplitude estimation: target amplitude must lie in [0, 1]");
  }
}

double ae_outcome_probability(const AmplitudeEstimationConfig& cfg, std::uint64_t y) {
  cfg.validate();
  const std::uint64_t M = std::uint64_t{1} << cfg.phase_bits;
  if (y >= M) {
    throw PreconditionError("amplitude estimation: outcome out of range");
  }
  const double Md = static_cast<double>(M);
  const double omega = std::asin(std::sqrt(cfg.target_amplitude)) / pi;
  double total = 0.0;
  for (double sign : {-1.0, 1.0}) {
    const double x = static_cast<double>(y) + sign * Md * omega;
    total += fejer(x, Md);
  }
  return 0.5 * total;
}

std::vector<double> ae_outcome_distribution(const AmplitudeEstimationConfig& cfg) {
  cfg.validate();
  const std::uint64_t M = std::uint64_t{1} << cfg.phase_bits;
  std::vector<double> out(M);
  for (std::uint64_t y = 0; y < M; ++y) {
    out[y] = ae_outcome_probability(cfg, y);
  }
  return out;
}

double ae_estimate_from_outcome(unsigned phase_bits, std::uint64_t y) {
  const double s = std::sin(pi * static_cast<double>(y) / std::ldexp(1.0, static_cast<int>(phase_bits)));
  return s * s;
}

double ae_single_run_radius(double a, unsigned phase_bits) {
  const double M = std::ldexp(1.0, static_cast<int>(phase_bits));
  return 2.0 * pi * std::sqrt(a * (1.0 - a)) / M + pi * pi / (M * M);
}

double amplitude_estimation_sample(const AmplitudeEstimationConfig& cfg, CounterRng& rng,
                                   QueryLedger* ledger) {
  cfg.validate();
  const std::uint64_t M = std::uint64_t{1} << cfg.phase_bits;
  if (ledger != nullptr) {
    ledger->charge_quantum(M - 1);
  }
  const double omega = std::asin(std::sqrt(cfg.target_amplitude)) / pi;
  const double sign = (rng() >> 63) != 0 ? 1.0 : -1.0;
  const std::uint64_t y = sample_fejer(sign * static_cast<double>(M) * omega, M, rng);
  return ae_estimate_from_outcome(cfg.phase_bits, y);
}

std::size_t ae_median_repeats(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw PreconditionError("ae_median_repeats: delta must lie in (0, 1)");
  }
  return 18 * static_cast<std::size_t>(std::ceil(std::log2(1.0 / delta)));
}

double amplitude_estimation_median(const AmplitudeEstimationConfig& cfg, std::size_t repeats,
                                   CounterRng& rng, QueryLedger* ledger) {
  if (repeats == 0) {
    throw PreconditionError("amplitude_estimation_median: need at least one repeat");
  }
  std::vector<double> draws(repeats);
  for (auto& d : draws) {
    d = amplitude_estimation_sample(cfg, rng, ledger);
  }
  const auto mid = draws.begin() + static_cast<std::ptrdiff_t>((repeats - 1) / 2);
  std::nth_element(draws.begin(), mid, draws.end());
  return *mid;
}

nlohmann::json MaxFindingTrace::to_json() const {
  nlohmann::json history = nlohmann::json::array();
  for (const auto& [index, value] : threshold_history) {
    history.push_back({{"index", index}, {"value", value}});
  }
  return {{"threshold_history", std::move(history)}, {"grover_queries_charged", grover_queries_charged}};
}

std::uint64_t qargmax_budget(std::size_t n, double delta, double c_max) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw PreconditionError("qargmax: delta must lie in (0, 1)");
  }
  if (!(c_max > 0.0)) {
    throw PreconditionError("qargmax: c_max must be positive");
  }
  return static_cast<std::uint64_t>(
      std::floor(c_max * std::sqrt(static_cast<double>(n)) * std::log2(1.0 / delta)));
}

MaxFindingResult qargmax_simulate(std::span<const double> values, double delta, CounterRng& rng,
                                  double c_max, QueryLedger* ledger) {
  if (values.empty()) {
    throw PreconditionError("qargmax: empty input");
  }
  const std::uint64_t budget = qargmax_budget(values.size(), delta, c_max);
  MaxFindingResult result;
  const std::size_t n = values.size();
  if (n == 1) {
    result.trace.threshold_history.emplace_back(0, values[0]);
    return result;
  }
  auto better = [&](std::size_t i, std::size_t j) {
    return values[i] > values[j] || (values[i] == values[j] && i < j);
  };
  std::uint64_t charged = 0;
  auto charge = [&](std::uint64_t q) {
    charged += q;
    if (ledger != nullptr) {
      ledger->charge_quantum(q);
    }
  };

  if (budget == 0) {
    result.index = rng.below(n);
    result.trace.threshold_history.emplace_back(result.index, values[result.index]);
    return result;
  }
  std::size_t y = rng.below(n);
  charge(1);
  result.trace.threshold_history.emplace_back(y, values[y]);

  constexpr double kGrowth = 6.0 / 5.0;
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  std::vector<std::size_t> marked;
  bool exhausted = false;
  while (!exhausted) {
    marked.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (better(i, y)) {
        marked.push_back(i);
      }
    }
    const double theta =
        std::asin(std::sqrt(static_cast<double>(marked.size()) / static_cast<double>(n)));
    double m = 1.0;
    for (;;) {
      const std::uint64_t j = rng.below(static_cast<std::size_t>(std::ceil(m)));
      const std::uint64_t cost = j + 1;
      if (charged + cost > budget) {
        exhausted = true;
        break;
      }
      charge(cost);
      const double amp = std::sin((2.0 * static_cast<double>(j) + 1.0) * theta);
      if (!marked.empty() && rng.uniform() < amp * amp) {
        y = marked[rng.below(marked.size())];
        result.trace.threshold_history.emplace_back(y, values[y]);
        break;
      }
      m = std::min(kGrowth * m, sqrt_n);
    }
  }
  result.index = y;
  result.trace.grover_queries_charged = charged;
  return result;
}

}  // namespace qmdp
