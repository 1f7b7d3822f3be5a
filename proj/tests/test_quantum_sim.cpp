#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "qmdp/error.hpp"
#include "qmdp/quantum_sim.hpp"

using namespace qmdp;

namespace {

// Phase estimation on the two Grover eigenphases +-theta/pi, summed directly.
double direct_outcome_probability(double a, unsigned t, std::uint64_t y) {
  const double M = std::ldexp(1.0, static_cast<int>(t));
  const double w = std::asin(std::sqrt(a)) / std::numbers::pi;
  double p = 0.0;
  for (double phase : {w, -w}) {
    std::complex<double> amp = 0.0;
    for (std::uint64_t j = 0; j < static_cast<std::uint64_t>(M); ++j) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) * (phase - y / M);
      amp += std::polar(1.0, angle);
    }
    p += 0.5 * std::norm(amp / M);
  }
  return p;
}

}  // namespace

TEST(AmplitudeEstimation, ClosedFormMatchesDirectSum) {
  for (double a : {0.0, 0.1, 0.3, 0.5, 0.77, 1.0}) {
    for (unsigned t : {1u, 3u, 6u}) {
      const AmplitudeEstimationConfig cfg{t, a};
      const auto dist = ae_outcome_distribution(cfg);
      ASSERT_EQ(dist.size(), std::size_t{1} << t);
      for (std::uint64_t y = 0; y < dist.size(); ++y) {
        EXPECT_NEAR(dist[y], direct_outcome_probability(a, t, y), 1e-10) << a << " " << t << " " << y;
      }
    }
  }
}

TEST(AmplitudeEstimation, DistributionSumsToOne) {
  for (double a : {0.0, 1e-6, 0.05, 0.3, 0.5, 0.9, 1.0}) {
    for (unsigned t : {1u, 2u, 5u, 10u, 14u}) {
      const auto dist = ae_outcome_distribution({t, a});
      EXPECT_NEAR(std::accumulate(dist.begin(), dist.end(), 0.0), 1.0, 1e-10);
      for (double p : dist) EXPECT_GE(p, -1e-15);
    }
  }
}

TEST(AmplitudeEstimation, MirrorSymmetry) {
  const unsigned t = 8;
  const std::uint64_t M = 256;
  for (double a : {0.1, 0.3, 0.45}) {
    const auto p = ae_outcome_distribution({t, a});
    const auto q = ae_outcome_distribution({t, 1.0 - a});
    for (std::uint64_t y = 0; y < M; ++y) {
      EXPECT_NEAR(p[y], q[(M / 2 + M - y) % M], 1e-12);
    }
  }
}

TEST(AmplitudeEstimation, EdgeAmplitudesAreExact) {
  CounterRng rng(1);
  QueryLedger ledger;
  for (int i = 0; i < 200; ++i) {
    EXPECT_EQ(amplitude_estimation_sample({6, 0.0}, rng, &ledger), 0.0);
    EXPECT_NEAR(amplitude_estimation_sample({1, 1.0}, rng), 1.0, 1e-15);
  }
  EXPECT_EQ(ledger.quantum_oracle_calls(), 200u * 63u);
}

TEST(AmplitudeEstimation, SingleRunSuccessAtLeastEightOverPiSquared) {
  CounterRng rng(2024);
  const double a = 0.3;
  const unsigned t = 10;
  const double radius = ae_single_run_radius(a, t);
  EXPECT_NEAR(radius, 2 * std::numbers::pi * std::sqrt(a * (1 - a)) / 1024 +
                          std::numbers::pi * std::numbers::pi / (1024.0 * 1024.0),
              1e-15);
  int hits = 0;
  for (int i = 0; i < 20000; ++i) hits += std::abs(amplitude_estimation_sample({t, a}, rng) - a) <= radius;
  EXPECT_GE(hits / 20000.0, 0.81);
}

TEST(AmplitudeEstimation, EmpiricalFrequenciesFollowDistribution) {
  CounterRng rng(5);
  const AmplitudeEstimationConfig cfg{4, 0.37};
  const auto dist = ae_outcome_distribution(cfg);
  std::vector<int> seen(16, 0);
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double est = amplitude_estimation_sample(cfg, rng);
    // Outcomes y and M - y give the same estimate; bin by estimate.
    for (std::uint64_t y = 0; y < 16; ++y) {
      if (std::abs(ae_estimate_from_outcome(4, y) - est) < 1e-12) {
        ++seen[y];
        break;
      }
    }
  }
  for (std::uint64_t y = 0; y <= 8; ++y) {
    const double p = (y == 0 || y == 8) ? dist[y] : dist[y] + dist[16 - y];
    EXPECT_NEAR(seen[y] / static_cast<double>(n), p, 5.0 * std::sqrt(p * (1 - p) / n) + 1e-9);
  }
}

TEST(AmplitudeEstimation, MedianAmplification) {
  CounterRng rng(77);
  const double delta = 0.05;
  const std::size_t repeats = ae_median_repeats(delta);
  EXPECT_EQ(repeats, 18u * 5u);
  const double a = 0.3;
  const unsigned t = 8;
  const double radius = ae_single_run_radius(a, t);
  int hits = 0;
  for (int i = 0; i < 5000; ++i) {
    hits += std::abs(amplitude_estimation_median({t, a}, repeats, rng) - a) <= radius;
  }
  EXPECT_GE(hits / 5000.0, 1.0 - delta);
}

TEST(AmplitudeEstimation, RejectsBadConfig) {
  CounterRng rng(1);
  EXPECT_THROW(amplitude_estimation_sample({0, 0.5}, rng), PreconditionError);
  EXPECT_THROW(amplitude_estimation_sample({kMaxPhaseBits + 1, 0.5}, rng), PreconditionError);
  EXPECT_THROW(amplitude_estimation_sample({4, 1.5}, rng), PreconditionError);
}

TEST(MaxFinding, SingletonAndTies) {
  CounterRng rng(3);
  const double delta = 0.1;
  QueryLedger ledger;
  const std::vector<double> one{0.4};
  const auto r = qargmax_simulate(one, delta, rng, kDefaultCmax, &ledger);
  EXPECT_EQ(r.index, 0u);
  EXPECT_LE(static_cast<double>(ledger.quantum_oracle_calls()), kDefaultCmax * std::log2(1.0 / delta));
  const std::vector<double> flat(9, 2.5);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(qargmax_simulate(flat, delta, rng).index, 0u);
  EXPECT_THROW(qargmax_simulate(std::vector<double>{}, delta, rng), PreconditionError);
}

TEST(MaxFinding, FindsMaximumOfRamp) {
  CounterRng rng(2024);
  std::vector<double> values(16);
  std::iota(values.begin(), values.end(), 0.0);
  const double delta = 0.1;
  const double cap = kDefaultCmax * 4.0 * std::log2(10.0);
  int correct = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto r = qargmax_simulate(values, delta, rng);
    correct += r.index == 15;
    EXPECT_LE(static_cast<double>(r.trace.grover_queries_charged), cap);
    for (std::size_t h = 1; h < r.trace.threshold_history.size(); ++h) {
      EXPECT_GT(r.trace.threshold_history[h].second, r.trace.threshold_history[h - 1].second);
    }
  }
  EXPECT_GE(correct / 2000.0, 0.9);
}

TEST(MaxFinding, BudgetNeverExceededOnRandomInputs) {
  CounterRng rng(9);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.below(300);
    std::vector<double> values(n);
    for (double& v : values) v = std::floor(rng.uniform() * 20.0);
    const double delta = 0.01 + 0.5 * rng.uniform();
    QueryLedger ledger;
    const auto r = qargmax_simulate(values, delta, rng, kDefaultCmax, &ledger);
    EXPECT_LT(r.index, n);
    EXPECT_LE(ledger.quantum_oracle_calls(), qargmax_budget(n, delta));
    EXPECT_EQ(ledger.quantum_oracle_calls(), r.trace.grover_queries_charged);
  }
}

TEST(MaxFinding, BudgetFormula) {
  EXPECT_EQ(qargmax_budget(16, 0.1), static_cast<std::uint64_t>(std::floor(4.0 * 4.0 * std::log2(10.0))));
  EXPECT_EQ(qargmax_budget(100, 0.5, 2.0), 20u);
}
