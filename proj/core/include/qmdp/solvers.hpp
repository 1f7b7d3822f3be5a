#pragma once

// Sampled value-iteration solvers over the estimator layer:
//  - solve_mdp1: monotone, variance-reduced, total-variance value iteration
//    with quantum mean estimation (outputs v, pi and q);
//  - solve_mdp2: monotone value iteration with quantum maximum finding over
//    actions (outputs v and pi);
//  - standard_sampled_vi: plain sampled Bellman iteration, the baseline.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qmdp/estimators.hpp"
#include "qmdp/mdp.hpp"
#include "qmdp/quantum_sim.hpp"
#include "qmdp/sample_oracle.hpp"

namespace qmdp {

struct SolveParams1 {
  double eps = 0.1;
  double delta = 0.1;
  double b = 1.0;
  double c = 0.01;
  bool record_snapshots = false;

  // Derived by derive().
  std::size_t K = 0;
  std::size_t L = 0;
  double f = 0.0;

  /// K = ceil(log2(H/eps)), L = ceil(H * ceil(ln(4H/eps)) + 1),
  /// f = delta / (4 K L S A). Throws unless eps in (0, sqrt(H)].
  void derive(const Mdp& mdp);
  nlohmann::json to_json() const;
};

enum class ArgmaxBackend { contract_mock, statevector };

struct SolveParams2 {
  double eps = 0.1;
  double delta = 0.1;
  double c_max = kDefaultCmax;
  ArgmaxBackend argmax_backend = ArgmaxBackend::contract_mock;
  bool record_snapshots = false;

  std::size_t L = 0;
  double f = 0.0;

  /// L = ceil(H * ceil(ln(4H/eps)) + 1),
  /// f = delta / (4 c_max L S A^1.5 log2(1/delta)). Throws unless eps in (0, H].
  void derive(const Mdp& mdp);
  nlohmann::json to_json() const;
};

enum class BaselineMode { classical, quantum_mean, quantum_mean_and_max };
std::string to_string(BaselineMode mode);
BaselineMode baseline_mode_from_string(const std::string& name);

struct BaselineParams {
  double eps = 0.1;
  double delta = 0.1;
  BaselineMode mode = BaselineMode::classical;
  double c_max = kDefaultCmax;
  bool record_snapshots = false;

  std::size_t iterations = 0;  // ceil(H ln(4H/eps)) + 1
  double per_estimate_delta = 0.0;

  void derive(const Mdp& mdp);
  nlohmann::json to_json() const;
};

struct Snapshot {
  std::size_t iteration = 0;  // (k-1) L + l for solve_mdp1, l otherwise
  ValueVec v;
  Policy pi;
};

struct SolveDiagnostics {
  bool monotone = true;             // every iterate >= its predecessor entrywise
  bool greedy_dominance = true;     // v_{k,l} >= v(q_{k,l-1}) entrywise
  std::uint64_t estimator_failures = 0;
  std::uint64_t argmax_failures = 0;
  std::uint64_t one_sided_violations = 0;  // x + Delta > P v_{k,l}
  std::uint64_t promise_clamps = 0;        // value-map entries clamped into [0, u]
  std::uint64_t variance_promise_violations = 0;
  double max_variance_gap = 0.0;           // max |y_k - sigma^2(v_{k,0})|
  bool variance_within_3b = true;
  std::vector<ValueVec> epoch_end_values;  // v_{k,L} per epoch
  std::vector<Snapshot> snapshots;

  nlohmann::json to_json(bool include_snapshots) const;
};

struct SolveReport {
  std::string solver;
  ValueVec v_hat;
  Policy pi_hat;
  std::optional<QVec> q_hat;
  QueryLedger ledger;
  nlohmann::json params;
  nlohmann::json estimator;
  std::uint64_t seed = 0;
  SolveDiagnostics diagnostics;
  std::string timestamp;  // the only non-deterministic field

  nlohmann::json to_json(bool include_snapshots = false) const;
};

SolveReport solve_mdp1(SampleOracle& oracle, SolveParams1 params, const EstimatorConfig& cfg);
SolveReport solve_mdp2(SampleOracle& oracle, SolveParams2 params, const EstimatorConfig& cfg);
SolveReport standard_sampled_vi(SampleOracle& oracle, BaselineParams params,
                                const EstimatorConfig& cfg);

/// Ground-truth comparison of a report against exact solutions.
struct SandwichCheck {
  bool value_lower = true;   // v* - eps <= v_hat
  bool value_policy = true;  // v_hat <= v^{pi_hat} + 1e-9
  bool policy_upper = true;  // v^{pi_hat} <= v* + 1e-8
  bool q_checked = false;
  bool q_sandwich = true;    // q* - eps <= q_hat <= q^{pi_hat} + 1e-9 <= q* + 1e-8
  double value_error = 0.0;  // ||v_hat - v*||_inf

  bool value_ok() const { return value_lower && value_policy && policy_upper; }
  bool ok() const { return value_ok() && (!q_checked || q_sandwich); }
  nlohmann::json to_json() const;
};

SandwichCheck check_sandwich(const Mdp& mdp, const SolveReport& report, double eps,
                             const OptimalSolution& optimal);

/// ISO-8601 UTC wall-clock time, for SolveReport::timestamp.
std::string utc_timestamp();

/// Snapshot rows "iteration,s,v,pi" with a header line.
std::string snapshots_csv(const SolveReport& report);

}  // namespace qmdp
