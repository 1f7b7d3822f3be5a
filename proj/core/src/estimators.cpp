#include "qmdp/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qmdp/error.hpp"
#include "qmdp/quantum_sim.hpp"

namespace qmdp {
namespace {

// Value maps built by the solvers carry rounding noise of a few ulps.
constexpr double kPromiseSlack = 1e-9;

std::uint64_t to_count(double x, const char* what) {
  if (!std::isfinite(x) || x >= 0x1.0p63) {
    throw PreconditionError(std::string(what) + ": query count overflows 64 bits");
  }
  return static_cast<std::uint64_t>(x);
}

void check_common(const SampleOracle& oracle, std::size_t s, std::size_t a,
                  std::span<const double> v, double eps, double delta, const char* what) {
  const Mdp& mdp = oracle.mdp();
  if (s >= mdp.num_states() || a >= mdp.num_actions()) {
    throw PreconditionError(std::string(what) + ": (s, a) out of range");
  }
  if (v.size() != mdp.num_states()) {
    throw PreconditionError(std::string(what) + ": value map must have length S");
  }
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw PreconditionError(std::string(what) + ": eps must be positive");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw PreconditionError(std::string(what) + ": delta must lie in (0, 1)");
  }
}

void check_range(std::span<const double> v, double u, const char* what) {
  if (!(u >= 0.0)) {
    throw PreconditionError(std::string(what) + ": range bound u must be non-negative");
  }
  const double slack = kPromiseSlack * std::max(1.0, u);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] >= -slack && v[i] <= u + slack)) {
      throw PreconditionError(std::string(what) + ": promise 0 <= v <= u violated at state " +
                              std::to_string(i) + " (v = " + std::to_string(v[i]) +
                              ", u = " + std::to_string(u) + ")");
    }
  }
}

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  bool constant = true;  // v takes one value on the support of p_{s,a}
};

Moments moments(const Mdp& mdp, std::size_t s, std::size_t a, std::span<const double> v) {
  const auto p = mdp.transition(s, a);
  Moments m;
  double first = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) {
      continue;
    }
    m.mean += p[i] * v[i];
    if (std::isnan(first)) {
      first = v[i];
    } else if (v[i] != first) {
      m.constant = false;
    }
  }
  if (m.constant) {
    m.mean = first;
    return m;
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = v[i] - m.mean;
    m.variance += p[i] * d * d;
  }
  return m;
}

// Returns an estimate honouring the (eps, delta) contract: within eps with
// probability 1 - delta, otherwise an injected failure. A variable that is
// constant on the support cannot be mis-estimated by any backend, so it
// never fails.
double mock_draw(const Moments& m, double eps, double delta, const EstimatorConfig& cfg,
                 CounterRng& rng) {
  const double fail_draw = rng.uniform();
  const double noise = 2.0 * rng.uniform_open() - 1.0;
  if (m.constant) {
    return m.mean + noise * eps;
  }
  if (fail_draw >= delta) {
    return m.mean + noise * eps;
  }
  const double T = cfg.adversarial_scale;
  if (cfg.mock_failure_mode == MockFailureMode::adversarial_edge) {
    return m.mean + (noise < 0.0 ? -T * eps : T * eps);
  }
  return m.mean + noise * T * eps;
}

MeanEstimate finish(double value, double eps, double delta, std::uint64_t charged,
                    EstimatorBackend backend, const Moments& m) {
  MeanEstimate e;
  e.value = value;
  e.error_radius = eps;
  e.confidence = 1.0 - delta;
  e.queries_charged = charged;
  e.backend = backend;
  e.true_mean = m.mean;
  e.within_radius = std::abs(value - m.mean) < eps;
  return e;
}

}  // namespace

std::string to_string(EstimatorBackend backend) {
  switch (backend) {
    case EstimatorBackend::contract_mock:
      return "contract_mock";
    case EstimatorBackend::statevector:
      return "statevector";
    case EstimatorBackend::classical_hoeffding:
      return "classical_hoeffding";
    case EstimatorBackend::classical_bernstein:
      return "classical_bernstein";
  }
  return "unknown";
}

std::string to_string(MockFailureMode mode) {
  return mode == MockFailureMode::uniform_noise ? "uniform_noise" : "adversarial_edge";
}

EstimatorBackend backend_from_string(const std::string& name) {
  for (auto b : {EstimatorBackend::contract_mock, EstimatorBackend::statevector,
                 EstimatorBackend::classical_hoeffding, EstimatorBackend::classical_bernstein}) {
    if (to_string(b) == name) {
      return b;
    }
  }
  throw PreconditionError("unknown estimator backend '" + name + "'");
}

MockFailureMode failure_mode_from_string(const std::string& name) {
  if (name == "uniform_noise") {
    return MockFailureMode::uniform_noise;
  }
  if (name == "adversarial_edge") {
    return MockFailureMode::adversarial_edge;
  }
  throw PreconditionError("unknown mock failure mode '" + name + "'");
}

void EstimatorConfig::validate() const {
  if (!(C1 > 0.0) || !(C2 > 0.0)) {
    throw PreconditionError("estimator: C1 and C2 must be positive");
  }
  if (!(adversarial_scale >= 1.0)) {
    throw PreconditionError("estimator: adversarial_scale must be at least 1");
  }
  if (quantum_backend != EstimatorBackend::contract_mock &&
      quantum_backend != EstimatorBackend::statevector) {
    throw PreconditionError("estimator: quantum backend must be contract_mock or statevector");
  }
}

nlohmann::json EstimatorConfig::to_json() const {
  return {{"C1", C1},
          {"C2", C2},
          {"mock_failure_mode", to_string(mock_failure_mode)},
          {"adversarial_scale", adversarial_scale},
          {"backend", to_string(quantum_backend)}};
}

EstimatorConfig EstimatorConfig::from_json(const nlohmann::json& doc) {
  EstimatorConfig cfg;
  if (!doc.is_object()) {
    throw PreconditionError("/estimator must be an object");
  }
  try {
    cfg.C1 = doc.value("C1", cfg.C1);
    cfg.C2 = doc.value("C2", cfg.C2);
    cfg.adversarial_scale = doc.value("adversarial_scale", cfg.adversarial_scale);
    if (doc.contains("mock_failure_mode")) {
      cfg.mock_failure_mode = failure_mode_from_string(doc.at("mock_failure_mode").get<std::string>());
    }
    if (doc.contains("backend")) {
      cfg.quantum_backend = backend_from_string(doc.at("backend").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("/estimator: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::uint64_t powering_factor(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw PreconditionError("powering_factor: delta must lie in (0, 1)");
  }
  return 2 * static_cast<std::uint64_t>(std::ceil(std::log2(3.0 / delta))) + 1;
}

std::uint64_t qest1_charge(double u, double eps, double delta, double C1) {
  const double ratio = u / eps;
  const double base = std::max(1.0, std::ceil(C1 * (ratio + std::sqrt(ratio))));
  return to_count(base, "qest1") * powering_factor(delta);
}

std::uint64_t qest2_charge(double sigma, double eps, double delta, double C2) {
  const double ratio = sigma / eps;
  const double lg = std::log2(std::max(ratio, 2.0));
  const double base = std::max(1.0, std::ceil(C2 * ratio * lg * lg));
  return to_count(base, "qest2") * powering_factor(delta);
}

std::uint64_t hoeffding_samples(double u, double eps, double delta) {
  const double n = std::ceil(u * u * std::log(2.0 / delta) / (2.0 * eps * eps));
  return std::max<std::uint64_t>(1, to_count(n, "hoeffding"));
}

std::uint64_t bernstein_samples(double u, double sigma, double eps, double delta) {
  const double n =
      std::ceil(2.0 * (sigma * sigma / (eps * eps) + u / (3.0 * eps)) * std::log(3.0 / delta));
  return std::max<std::uint64_t>(1, to_count(n, "bernstein"));
}

unsigned qest1_phase_bits(double u, double eps) {
  for (unsigned t = 1; t <= kMaxPhaseBits; ++t) {
    const double M = std::ldexp(1.0, static_cast<int>(t));
    if (u * (std::numbers::pi / M + std::numbers::pi * std::numbers::pi / (M * M)) < eps) {
      return t;
    }
  }
  throw PreconditionError("qest1 statevector: u/eps = " + std::to_string(u / eps) +
                          " needs more than " + std::to_string(kMaxPhaseBits) + " phase bits");
}

MeanEstimate qest1(SampleOracle& oracle, std::size_t s, std::size_t a, std::span<const double> v,
                   double u, double eps, double delta, const EstimatorConfig& cfg) {
  check_common(oracle, s, a, v, eps, delta, "qest1");
  check_range(v, u, "qest1");
  const Moments m = moments(oracle.mdp(), s, a, v);

  if (cfg.quantum_backend == EstimatorBackend::statevector && u > 0.0) {
    const unsigned t = qest1_phase_bits(u, eps);
    const std::uint64_t repeats = powering_factor(delta);
    const AmplitudeEstimationConfig ae{t, std::clamp(m.mean / u, 0.0, 1.0)};
    QueryLedger local;
    const double median = amplitude_estimation_median(ae, repeats, oracle.rng(), &local);
    oracle.ledger().charge_quantum(local.quantum_oracle_calls());
    return finish(u * median, eps, delta, local.quantum_oracle_calls(), EstimatorBackend::statevector, m);
  }

  const std::uint64_t charged = qest1_charge(u, eps, delta, cfg.C1);
  oracle.ledger().charge_quantum(charged);
  const double value = mock_draw(m, eps, delta, cfg, oracle.rng());
  return finish(value, eps, delta, charged, EstimatorBackend::contract_mock, m);
}

MeanEstimate qest2(SampleOracle& oracle, std::size_t s, std::size_t a, std::span<const double> v,
                   double sigma, double eps, double delta, const EstimatorConfig& cfg) {
  check_common(oracle, s, a, v, eps, delta, "qest2");
  if (!(sigma > 0.0) || !(eps < 4.0 * sigma)) {
    throw PreconditionError("qest2: requires sigma > 0 and eps in (0, 4 sigma); got sigma = " +
                            std::to_string(sigma) + ", eps = " + std::to_string(eps));
  }
  const Moments m = moments(oracle.mdp(), s, a, v);
  // The variance-bounded estimator is only available as a contract mock.
  const std::uint64_t charged = qest2_charge(sigma, eps, delta, cfg.C2);
  oracle.ledger().charge_quantum(charged);
  const double value = mock_draw(m, eps, delta, cfg, oracle.rng());
  MeanEstimate e = finish(value, eps, delta, charged, EstimatorBackend::contract_mock, m);
  e.promise_violated = m.variance > sigma * sigma * (1.0 + kPromiseSlack) + kPromiseSlack;
  return e;
}

MeanEstimate classical_hoeffding_mean(SampleOracle& oracle, std::size_t s, std::size_t a,
                                      std::span<const double> v, double u, double eps, double delta) {
  check_common(oracle, s, a, v, eps, delta, "classical_hoeffding_mean");
  check_range(v, u, "classical_hoeffding_mean");
  const Moments m = moments(oracle.mdp(), s, a, v);
  const std::uint64_t n = hoeffding_samples(u, eps, delta);
  const double value = oracle.sample_mean(s, a, v, n);
  return finish(value, eps, delta, n, EstimatorBackend::classical_hoeffding, m);
}

MeanEstimate classical_bernstein_mean(SampleOracle& oracle, std::size_t s, std::size_t a,
                                      std::span<const double> v, double u, double sigma, double eps,
                                      double delta) {
  check_common(oracle, s, a, v, eps, delta, "classical_bernstein_mean");
  check_range(v, u, "classical_bernstein_mean");
  if (!(sigma >= 0.0)) {
    throw PreconditionError("classical_bernstein_mean: sigma must be non-negative");
  }
  const Moments m = moments(oracle.mdp(), s, a, v);
  const std::uint64_t n = bernstein_samples(u, sigma, eps, delta);
  const double value = oracle.sample_mean(s, a, v, n);
  MeanEstimate e = finish(value, eps, delta, n, EstimatorBackend::classical_bernstein, m);
  e.promise_violated = m.variance > sigma * sigma * (1.0 + kPromiseSlack) + kPromiseSlack;
  return e;
}

}  // namespace qmdp
