#pragma once

// Mean estimation of (P v)[s,a]: quantum contracts qest1 (range-bounded)
// and qest2 (variance-bounded) plus Hoeffding / Bernstein sampling
// baselines. Every estimator charges the oracle's ledger.

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "qmdp/sample_oracle.hpp"

namespace qmdp {

enum class EstimatorBackend { contract_mock, statevector, classical_hoeffding, classical_bernstein };
enum class MockFailureMode { uniform_noise, adversarial_edge };

std::string to_string(EstimatorBackend backend);
std::string to_string(MockFailureMode mode);
EstimatorBackend backend_from_string(const std::string& name);
MockFailureMode failure_mode_from_string(const std::string& name);

struct EstimatorConfig {
  double C1 = 1.0;
  double C2 = 1.0;
  MockFailureMode mock_failure_mode = MockFailureMode::adversarial_edge;
  double adversarial_scale = 10.0;  // T
  /// Backend behind qest1 / qest2: contract_mock or statevector.
  EstimatorBackend quantum_backend = EstimatorBackend::contract_mock;

  void validate() const;
  nlohmann::json to_json() const;
  static EstimatorConfig from_json(const nlohmann::json& doc);
};

struct MeanEstimate {
  double value = 0.0;
  double error_radius = 0.0;
  double confidence = 0.0;
  std::uint64_t queries_charged = 0;
  EstimatorBackend backend = EstimatorBackend::contract_mock;
  double true_mean = 0.0;         // exact p_{s,a}^T v, for diagnostics only
  bool within_radius = true;      // |value - true_mean| < error_radius
  bool promise_violated = false;  // variance promise of qest2 / bernstein broken
};

/// 2 * ceil(log2(3/delta)) + 1 median repetitions.
std::uint64_t powering_factor(double delta);
std::uint64_t qest1_charge(double u, double eps, double delta, double C1 = 1.0);
std::uint64_t qest2_charge(double sigma, double eps, double delta, double C2 = 1.0);
std::uint64_t hoeffding_samples(double u, double eps, double delta);
std::uint64_t bernstein_samples(double u, double sigma, double eps, double delta);

/// Smallest t with u (pi / 2^t + pi^2 / 4^t) < eps, the phase register the
/// statevector backend uses for qest1.
unsigned qest1_phase_bits(double u, double eps);

/// Range-bounded estimate; requires 0 <= v <= u on every state.
MeanEstimate qest1(SampleOracle& oracle, std::size_t s, std::size_t a, std::span<const double> v,
                   double u, double eps, double delta, const EstimatorConfig& cfg);

/// Variance-bounded estimate; requires 0 < eps < 4 sigma. A broken variance
/// promise is flagged on the result, not thrown.
MeanEstimate qest2(SampleOracle& oracle, std::size_t s, std::size_t a, std::span<const double> v,
                   double sigma, double eps, double delta, const EstimatorConfig& cfg);

MeanEstimate classical_hoeffding_mean(SampleOracle& oracle, std::size_t s, std::size_t a,
                                      std::span<const double> v, double u, double eps, double delta);

MeanEstimate classical_bernstein_mean(SampleOracle& oracle, std::size_t s, std::size_t a,
                                      std::span<const double> v, double u, double sigma, double eps,
                                      double delta);

}  // namespace qmdp
