#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "qmdp/error.hpp"
#include "qmdp/estimators.hpp"
#include "qmdp/hard_instances.hpp"
#include "qmdp/random_instances.hpp"

using namespace qmdp;

namespace {

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

double mean_of(const Mdp& mdp, std::size_t s, std::size_t a, const std::vector<double>& v) {
  double m = 0;
  for (std::size_t t = 0; t < mdp.num_states(); ++t) m += mdp.probability(s, a, t) * v[t];
  return m;
}

}  // namespace

TEST(Charges, SpecArithmetic) {
  EXPECT_EQ(powering_factor(1.0 / 3.0), 9u);
  EXPECT_EQ(powering_factor(0.1), 11u);
  EXPECT_EQ(qest1_charge(1.0, 0.01, 1.0 / 3.0), 110u * 9u);
  EXPECT_EQ(qest2_charge(1.0, 1.0, 1.0 / 3.0, 1.0), 1u * 9u);
  EXPECT_EQ(qest2_charge(1.0, 1.0, 1.0 / 3.0, 2.5), 3u * 9u);
  EXPECT_EQ(hoeffding_samples(1.0, 0.1, 0.05), 185u);
  // sigma = 0 leaves only the range term.
  EXPECT_EQ(bernstein_samples(1.0, 0.0, 0.1, 0.1),
            static_cast<std::uint64_t>(std::ceil(2.0 * std::log(30.0) / 0.3)));
  const double n = static_cast<double>(bernstein_samples(1e-9, 1.0, 0.1, 0.1));
  EXPECT_NEAR(n, 200.0 * std::log(30.0), 1.0);
}

TEST(Charges, MonotoneInParameters) {
  for (double eps : {0.01, 0.05, 0.2}) {
    EXPECT_GE(qest1_charge(1, eps, 0.1), qest1_charge(1, 2 * eps, 0.1));
    EXPECT_LE(qest1_charge(1, eps, 0.1), qest1_charge(2, eps, 0.1));
    EXPECT_LE(qest1_charge(1, eps, 0.1), qest1_charge(1, eps, 0.01));
    EXPECT_GE(qest2_charge(1, eps, 0.1), qest2_charge(1, 2 * eps, 0.1));
    EXPECT_LE(qest2_charge(1, eps, 0.1), qest2_charge(3, eps, 0.1));
    EXPECT_LE(qest2_charge(1, eps, 0.1), qest2_charge(1, eps, 0.001));
    EXPECT_GE(hoeffding_samples(1, eps, 0.1), hoeffding_samples(1, 2 * eps, 0.1));
    EXPECT_LE(hoeffding_samples(1, eps, 0.1), hoeffding_samples(1, eps, 0.01));
    EXPECT_LE(bernstein_samples(1, 0.1, eps, 0.1), bernstein_samples(1, 0.3, eps, 0.1));
  }
}

TEST(Charges, HoeffdingQuartersWhenEpsDoubles) {
  for (double eps : {0.01, 0.02, 0.05}) {
    const double r = static_cast<double>(hoeffding_samples(1, eps, 0.05)) /
                     static_cast<double>(hoeffding_samples(1, 2 * eps, 0.05));
    EXPECT_NEAR(r, 4.0, 0.02);
  }
}

TEST(Charges, SeparationSlopes) {
  std::vector<double> inv, q, c, base;
  for (double eps : {0.1, 0.05, 0.025, 0.0125}) {
    inv.push_back(1 / eps);
    q.push_back(static_cast<double>(qest1_charge(1, eps, 0.1)));
    c.push_back(static_cast<double>(hoeffding_samples(1, eps, 0.1)));
    base.push_back(std::ceil(1 / eps + std::sqrt(1 / eps)));
  }
  // The sqrt(u/eps) term still pulls the exponent below 1 at these ratios.
  EXPECT_NEAR(slope(inv, q), slope(inv, base), 0.01);
  EXPECT_NEAR(slope(inv, q), 0.892, 0.01);
  EXPECT_NEAR(slope(inv, c), 2.0, 0.1);
  EXPECT_GT(slope(inv, c) - slope(inv, q), 1.0);

  std::vector<double> far_inv, far_q;
  for (double eps : {1e-3, 5e-4, 2.5e-4, 1.25e-4}) {
    far_inv.push_back(1 / eps);
    far_q.push_back(static_cast<double>(qest1_charge(1, eps, 0.1)));
  }
  EXPECT_NEAR(slope(far_inv, far_q), 1.0, 0.02);
}

TEST(Qest1, ConstantVariableNeverFails) {
  CounterRng rng(1);
  const Mdp mdp = random_mdp(5, 2, 0.9, rng);
  SampleOracle oracle(mdp, 4);
  EstimatorConfig cfg;
  const std::vector<double> v(5, 0.6);
  for (auto mode : {MockFailureMode::adversarial_edge, MockFailureMode::uniform_noise}) {
    cfg.mock_failure_mode = mode;
    for (int i = 0; i < 500; ++i) {
      const MeanEstimate e = qest1(oracle, i % 5, i % 2, v, 1.0, 0.05, 0.5, cfg);
      EXPECT_GT(e.value, 0.55);
      EXPECT_LT(e.value, 0.65);
      EXPECT_TRUE(e.within_radius);
    }
  }
}

TEST(Qest1, PointMassWithinEps) {
  const Mdp mdp = two_state(0.9, 1.0);
  SampleOracle oracle(mdp, 4);
  const std::vector<double> v{0.7, 0.2};
  for (auto backend : {EstimatorBackend::contract_mock, EstimatorBackend::statevector}) {
    EstimatorConfig cfg;
    cfg.quantum_backend = backend;
    for (int i = 0; i < 50; ++i) {
      const MeanEstimate e = qest1(oracle, 0, 0, v, 1.0, 0.05, 0.1, cfg);
      EXPECT_NEAR(e.value, 0.7, 0.05);
    }
  }
}

TEST(Qest1, RejectsBrokenPromiseAndBadArgs) {
  const Mdp mdp = two_state(0.9, 0.5);
  SampleOracle oracle(mdp, 4);
  EstimatorConfig cfg;
  EXPECT_THROW(qest1(oracle, 0, 0, std::vector<double>{1.5, 0.0}, 1.0, 0.1, 0.1, cfg), PreconditionError);
  EXPECT_THROW(qest1(oracle, 0, 0, std::vector<double>{-0.1, 0.0}, 1.0, 0.1, 0.1, cfg), PreconditionError);
  EXPECT_THROW(qest1(oracle, 0, 0, std::vector<double>{0.5, 0.0}, 1.0, 0.0, 0.1, cfg), PreconditionError);
  EXPECT_THROW(qest1(oracle, 0, 0, std::vector<double>{0.5, 0.0}, 1.0, 0.1, 1.0, cfg), PreconditionError);
}

TEST(Qest1, ChargesLedgerExactly) {
  const Mdp mdp = two_state(0.9, 0.5);
  SampleOracle oracle(mdp, 4);
  const MeanEstimate e = qest1(oracle, 0, 0, std::vector<double>{1.0, 0.0}, 1.0, 0.01, 1.0 / 3.0, {});
  EXPECT_EQ(e.queries_charged, 990u);
  EXPECT_EQ(oracle.ledger().quantum_oracle_calls(), 990u);
  EXPECT_EQ(oracle.ledger().classical_samples(), 0u);
  EXPECT_GT(e.error_radius, 0.0);
  EXPECT_GT(e.confidence, 0.0);
  EXPECT_LT(e.confidence, 1.0);
}

TEST(Qest1, MockUniformNoiseSoundness) {
  const Mdp mdp = Mdp::from_nested(0.9, {{0.0}, {0.0}, {0.0}, {0.0}},
                                   {{{0.2, 0.3, 0.1, 0.4}}, {{1, 0, 0, 0}}, {{0, 1, 0, 0}}, {{0, 0, 1, 0}}});
  SampleOracle oracle(mdp, 9);
  EstimatorConfig cfg;
  cfg.mock_failure_mode = MockFailureMode::uniform_noise;
  const std::vector<double> v{0.0, 0.3, 0.8, 1.0};
  const double mu = mean_of(mdp, 0, 0, v);
  const double delta = 0.1;
  int ok = 0;
  for (int i = 0; i < 10000; ++i) {
    const MeanEstimate e = qest1(oracle, 0, 0, v, 1.0, 0.02, delta, cfg);
    ok += std::abs(e.value - mu) < 0.02;
    EXPECT_EQ(e.within_radius, std::abs(e.value - mu) < 0.02);
  }
  // Expected 1 - delta; uniform failures can land inside the radius too.
  EXPECT_GE(ok / 10000.0, 1.0 - delta - 3.0 * std::sqrt(delta * (1 - delta) / 10000));
  EXPECT_LE(ok / 10000.0, 1.0 - delta + 0.02 + 3.0 * std::sqrt(delta * (1 - delta) / 10000));
}

TEST(Qest1, MockAdversarialFailuresSitAtScaledEdge) {
  const Mdp mdp = Mdp::from_nested(0.9, {{0.0}, {0.0}, {0.0}, {0.0}},
                                   {{{0.2, 0.3, 0.1, 0.4}}, {{1, 0, 0, 0}}, {{0, 1, 0, 0}}, {{0, 0, 1, 0}}});
  SampleOracle oracle(mdp, 10);
  EstimatorConfig cfg;
  const std::vector<double> v{0.0, 0.3, 0.8, 1.0};
  const double mu = mean_of(mdp, 0, 0, v);
  int failures = 0;
  for (int i = 0; i < 4000; ++i) {
    const MeanEstimate e = qest1(oracle, 0, 0, v, 1.0, 0.01, 0.2, cfg);
    if (!e.within_radius) {
      ++failures;
      EXPECT_NEAR(std::abs(e.value - mu), 10 * 0.01, 1e-12);
    }
  }
  EXPECT_NEAR(failures / 4000.0, 0.2, 0.03);
}

TEST(Qest1, StatevectorSoundness) {
  CounterRng rng(4);
  const Mdp mdp = random_mdp(3, 1, 0.9, rng);
  SampleOracle oracle(mdp, 11);
  EstimatorConfig cfg;
  cfg.quantum_backend = EstimatorBackend::statevector;
  const std::vector<double> v{0.1, 0.9, 0.45};
  const double mu = mean_of(mdp, 0, 0, v);
  const double delta = 0.1;
  int ok = 0;
  for (int i = 0; i < 2000; ++i) {
    const MeanEstimate e = qest1(oracle, 0, 0, v, 1.0, 0.05, delta, cfg);
    ok += std::abs(e.value - mu) < 0.05;
    EXPECT_EQ(e.backend, EstimatorBackend::statevector);
  }
  EXPECT_GE(ok / 2000.0, 1.0 - delta);
}

TEST(Qest2, PreconditionBoundary) {
  const Mdp mdp = two_state(0.9, 0.5);
  SampleOracle oracle(mdp, 4);
  const std::vector<double> v{1.0, 0.0};
  EXPECT_THROW(qest2(oracle, 0, 0, v, 0.5, 2.0, 0.1, {}), PreconditionError);
  EXPECT_THROW(qest2(oracle, 0, 0, v, 0.0, 0.1, 0.1, {}), PreconditionError);
  EXPECT_NO_THROW(qest2(oracle, 0, 0, v, 0.5, 1.99, 0.1, {}));
}

TEST(Qest2, ConstantVariableAndPromiseFlag) {
  const Mdp mdp = two_state(0.9, 0.5);
  SampleOracle oracle(mdp, 4);
  for (int i = 0; i < 200; ++i) {
    const MeanEstimate e = qest2(oracle, 0, 0, std::vector<double>{3.0, 3.0}, 0.7, 0.1, 0.3, {});
    EXPECT_NEAR(e.value, 3.0, 0.1);
    EXPECT_FALSE(e.promise_violated);
  }
  // Variance 0.25 exceeds sigma^2 = 0.01.
  const MeanEstimate bad = qest2(oracle, 0, 0, std::vector<double>{1.0, 0.0}, 0.1, 0.05, 0.3, {});
  EXPECT_TRUE(bad.promise_violated);
  const MeanEstimate good = qest2(oracle, 0, 0, std::vector<double>{1.0, 0.0}, 0.5, 0.05, 0.3, {});
  EXPECT_FALSE(good.promise_violated);
}

TEST(Classical, HoeffdingSoundnessAndCharge) {
  CounterRng rng(5);
  const Mdp mdp = random_mdp(5, 1, 0.9, rng);
  SampleOracle oracle(mdp, 12);
  const std::vector<double> v{0.0, 1.0, 0.2, 0.6, 0.9};
  const double mu = mean_of(mdp, 0, 0, v);
  int ok = 0;
  for (int i = 0; i < 1000; ++i) {
    const MeanEstimate e = classical_hoeffding_mean(oracle, 0, 0, v, 1.0, 0.05, 0.1);
    ok += std::abs(e.value - mu) < 0.05;
    EXPECT_EQ(e.queries_charged, hoeffding_samples(1.0, 0.05, 0.1));
  }
  EXPECT_EQ(oracle.ledger().classical_samples(), 1000 * hoeffding_samples(1.0, 0.05, 0.1));
  EXPECT_EQ(oracle.ledger().quantum_oracle_calls(), 0u);
  EXPECT_GE(ok / 1000.0, 0.9);
}

TEST(Classical, DeterministicTransitionIsExact) {
  const Mdp mdp = two_state(0.9, 1.0);
  SampleOracle oracle(mdp, 4);
  const std::vector<double> v{0.35, 0.0};
  EXPECT_DOUBLE_EQ(classical_hoeffding_mean(oracle, 0, 0, v, 1.0, 0.1, 0.1).value, 0.35);
  EXPECT_DOUBLE_EQ(classical_bernstein_mean(oracle, 0, 0, v, 1.0, 0.0, 0.1, 0.1).value, 0.35);
}

TEST(Classical, BernsteinSoundness) {
  const Mdp mdp = two_state(0.9, 0.5);
  SampleOracle oracle(mdp, 13);
  const std::vector<double> v{1.0, 0.0};
  int ok = 0;
  for (int i = 0; i < 1000; ++i) {
    ok += std::abs(classical_bernstein_mean(oracle, 0, 0, v, 1.0, 0.5, 0.05, 0.1).value - 0.5) < 0.05;
  }
  EXPECT_GE(ok / 1000.0, 0.9);
}

TEST(EstimatorConfig, JsonRoundTripAndValidation) {
  EstimatorConfig cfg;
  cfg.C1 = 2.0;
  cfg.mock_failure_mode = MockFailureMode::uniform_noise;
  cfg.quantum_backend = EstimatorBackend::statevector;
  const EstimatorConfig back = EstimatorConfig::from_json(cfg.to_json());
  EXPECT_EQ(back.to_json(), cfg.to_json());
  EstimatorConfig bad;
  bad.C2 = 0.0;
  EXPECT_THROW(bad.validate(), PreconditionError);
  EXPECT_THROW(backend_from_string("magic"), PreconditionError);
}
