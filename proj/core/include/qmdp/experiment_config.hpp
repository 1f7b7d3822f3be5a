#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qmdp/estimators.hpp"
#include "qmdp/hard_instances.hpp"
#include "qmdp/mdp.hpp"
#include "qmdp/solvers.hpp"

namespace qmdp {

/// Exactly one of the three sources is set.
struct InstanceSource {
  std::optional<std::string> mdp_path;  // resolved against the config's directory
  std::optional<nlohmann::json> inline_mdp;
  std::optional<HardInstanceSpec> hard;
  std::optional<double> gamma_override;  // set by gamma sweeps on file/inline MDPs

  Mdp build(const std::string& base_dir) const;
  nlohmann::json to_json() const;
};

enum class SolverKind { mdp1, mdp2, baseline };
std::string to_string(SolverKind kind);

struct SolverConfig {
  SolverKind kind = SolverKind::mdp1;
  double eps = 0.1;
  double delta = 0.1;
  double b = 1.0;
  double c = 0.01;
  double c_max = kDefaultCmax;
  ArgmaxBackend argmax_backend = ArgmaxBackend::contract_mock;
  BaselineMode mode = BaselineMode::classical;
  bool record_snapshots = false;

  nlohmann::json to_json() const;
};

/// eps = coefficient * horizon^horizon_power, used when a sweep changes gamma.
struct EpsRule {
  double coefficient = 1.0;
  double horizon_power = 0.0;
  double eps(double horizon) const;
};

struct SweepConfig {
  std::string axis;  // eps | gamma | num_actions | copies
  std::vector<double> values;
  std::size_t seeds = 20;
  std::optional<EpsRule> eps_rule;
  std::size_t threads = 0;  // 0: hardware concurrency
};

struct OutputConfig {
  std::string report;
  std::string snapshots_csv;
  std::string sweep_csv;
  std::string fit;
};

struct ExperimentConfig {
  InstanceSource instance;
  SolverConfig solver;
  EstimatorConfig estimator;
  std::uint64_t seed = 0;
  std::size_t runs = 1;
  std::optional<SweepConfig> sweep;
  OutputConfig output;
  std::string base_dir = ".";

  /// Errors carry the JSON path of the offending key.
  static ExperimentConfig from_json(const nlohmann::json& doc, const std::string& base_dir = ".");
  static ExperimentConfig load(const std::string& path);
  nlohmann::json to_json() const;

  Mdp build_mdp() const { return instance.build(base_dir); }
};

/// Runs the configured solver once with a fresh oracle seeded by `seed`.
SolveReport run_solver(const Mdp& mdp, const SolverConfig& solver, const EstimatorConfig& estimator,
                       std::uint64_t seed);

/// Exact-oracle success criterion per solver: the full (v, q) sandwich for
/// solve_mdp1, the value sandwich for solve_mdp2, ||v_hat - v*|| <= eps for
/// the baseline.
bool run_succeeded(const Mdp& mdp, const SolveReport& report, double eps,
                   const OptimalSolution& optimal);

/// Tolerance used for every exact reference solution.
inline constexpr double kExactTolerance = 1e-10;

/// Report document for `qmdp solve`: the solver report plus the exact
/// reference (and closed form for generated instances). Deterministic except
/// for the "timestamp" field(s). When `snapshot_csv` is given it receives
/// the first run's snapshot rows.
nlohmann::json solve_document(const ExperimentConfig& cfg, std::string* snapshot_csv = nullptr);

}  // namespace qmdp
