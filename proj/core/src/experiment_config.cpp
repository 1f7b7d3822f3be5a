#include "qmdp/experiment_config.hpp"

#include <cmath>
#include <filesystem>

#include "qmdp/error.hpp"
#include "qmdp/mdp_io.hpp"

namespace qmdp {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw PreconditionError("config " + path + ": " + what);
}

const json& object_at(const json& doc, const char* key, const std::string& path) {
  if (!doc.contains(key)) {
    fail(path + "/" + key, "missing");
  }
  const json& v = doc.at(key);
  if (!v.is_object()) {
    fail(path + "/" + key, "must be an object");
  }
  return v;
}

double number_or(const json& doc, const char* key, double fallback, const std::string& path) {
  if (!doc.contains(key)) {
    return fallback;
  }
  if (!doc.at(key).is_number()) {
    fail(path + "/" + key, "must be a number");
  }
  return doc.at(key).get<double>();
}

std::uint64_t count_or(const json& doc, const char* key, std::uint64_t fallback, const std::string& path) {
  if (!doc.contains(key)) {
    return fallback;
  }
  const json& value = doc.at(key);
  // Programmatically built documents store small integers as signed.
  if (!value.is_number_integer() || (!value.is_number_unsigned() && value.get<std::int64_t>() < 0)) {
    fail(path + "/" + key, "must be a non-negative integer");
  }
  return value.get<std::uint64_t>();
}

std::string string_or(const json& doc, const char* key, const std::string& fallback, const std::string& path) {
  if (!doc.contains(key)) {
    return fallback;
  }
  if (!doc.at(key).is_string()) {
    fail(path + "/" + key, "must be a string");
  }
  return doc.at(key).get<std::string>();
}

template <typename Fn>
auto wrap(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const PreconditionError& e) {
    fail(path, e.what());
  } catch (const json::exception& e) {
    fail(path, e.what());
  }
}

SolverKind solver_from_string(const std::string& name, const std::string& path) {
  if (name == "solve_mdp1") return SolverKind::mdp1;
  if (name == "solve_mdp2") return SolverKind::mdp2;
  if (name == "standard_sampled_vi") return SolverKind::baseline;
  fail(path, "unknown solver '" + name + "' (expected solve_mdp1, solve_mdp2 or standard_sampled_vi)");
}

InstanceSource parse_instance(const json& doc) {
  const std::string path = "/instance";
  InstanceSource src;
  int sources = 0;
  if (doc.contains("mdp_path")) {
    if (!doc.at("mdp_path").is_string()) {
      fail(path + "/mdp_path", "must be a string");
    }
    src.mdp_path = doc.at("mdp_path").get<std::string>();
    ++sources;
  }
  if (doc.contains("mdp")) {
    src.inline_mdp = doc.at("mdp");
    ++sources;
  }
  if (doc.contains("hard")) {
    src.hard = wrap(path + "/hard", [&] { return HardInstanceSpec::from_json(doc.at("hard")); });
    ++sources;
  }
  if (sources != 1) {
    fail(path, "exactly one of mdp_path, mdp or hard is required");
  }
  return src;
}

SolverConfig parse_solver(const json& doc) {
  const std::string path = "/solver";
  SolverConfig s;
  s.kind = solver_from_string(string_or(doc, "name", "solve_mdp1", path), path + "/name");
  s.eps = number_or(doc, "eps", s.eps, path);
  s.delta = number_or(doc, "delta", s.delta, path);
  s.b = number_or(doc, "b", s.b, path);
  s.c = number_or(doc, "c", s.c, path);
  s.c_max = number_or(doc, "c_max", s.c_max, path);
  const std::string argmax = string_or(doc, "argmax_backend", "contract_mock", path);
  if (argmax == "statevector") {
    s.argmax_backend = ArgmaxBackend::statevector;
  } else if (argmax != "contract_mock") {
    fail(path + "/argmax_backend", "expected contract_mock or statevector");
  }
  s.mode = wrap(path + "/mode", [&] { return baseline_mode_from_string(string_or(doc, "mode", "classical", path)); });
  if (doc.contains("record_snapshots")) {
    s.record_snapshots = doc.at("record_snapshots").get<bool>();
  }
  return s;
}

SweepConfig parse_sweep(const json& doc) {
  const std::string path = "/sweep";
  SweepConfig sw;
  sw.axis = string_or(doc, "axis", "", path);
  if (doc.contains("values")) {
    sw.values = wrap(path + "/values", [&] { return doc.at("values").get<std::vector<double>>(); });
    if (sw.values.empty()) {
      fail(path + "/values", "must not be empty");
    }
  }
  sw.seeds = count_or(doc, "seeds", sw.seeds, path);
  sw.threads = count_or(doc, "threads", sw.threads, path);
  if (doc.contains("eps_rule")) {
    const json& rule = object_at(doc, "eps_rule", path);
    sw.eps_rule = EpsRule{number_or(rule, "coefficient", 1.0, path + "/eps_rule"),
                          number_or(rule, "horizon_power", 0.0, path + "/eps_rule")};
  }
  return sw;
}

}  // namespace

Mdp InstanceSource::build(const std::string& base_dir) const {
  if (hard) {
    return copies(*hard);
  }
  auto with_gamma = [&](const Mdp& mdp) {
    if (!gamma_override) {
      return mdp;
    }
    return Mdp(mdp.num_states(), mdp.num_actions(), *gamma_override, mdp.rewards(), mdp.transitions());
  };
  if (inline_mdp) {
    return with_gamma(mdp_from_json(*inline_mdp));
  }
  std::filesystem::path p(*mdp_path);
  if (p.is_relative()) {
    p = std::filesystem::path(base_dir) / p;
  }
  return with_gamma(load_mdp(p.string()));
}

json InstanceSource::to_json() const {
  json out = json::object();
  if (mdp_path) out["mdp_path"] = *mdp_path;
  if (inline_mdp) out["mdp"] = *inline_mdp;
  if (hard) out["hard"] = hard->to_json();
  if (gamma_override) out["gamma_override"] = *gamma_override;
  return out;
}

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::mdp1:
      return "solve_mdp1";
    case SolverKind::mdp2:
      return "solve_mdp2";
    case SolverKind::baseline:
      return "standard_sampled_vi";
  }
  return "unknown";
}

json SolverConfig::to_json() const {
  return {{"name", to_string(kind)},
          {"eps", eps},
          {"delta", delta},
          {"b", b},
          {"c", c},
          {"c_max", c_max},
          {"argmax_backend", argmax_backend == ArgmaxBackend::statevector ? "statevector" : "contract_mock"},
          {"mode", to_string(mode)},
          {"record_snapshots", record_snapshots}};
}

double EpsRule::eps(double horizon) const { return coefficient * std::pow(horizon, horizon_power); }

ExperimentConfig ExperimentConfig::from_json(const json& doc, const std::string& base_dir) {
  if (!doc.is_object()) {
    fail("/", "must be an object");
  }
  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  cfg.instance = parse_instance(object_at(doc, "instance", ""));
  if (doc.contains("solver")) {
    cfg.solver = parse_solver(object_at(doc, "solver", ""));
  }
  if (doc.contains("estimator")) {
    cfg.estimator = wrap("/estimator", [&] { return EstimatorConfig::from_json(doc.at("estimator")); });
  }
  cfg.seed = count_or(doc, "seed", cfg.seed, "");
  cfg.runs = count_or(doc, "runs", cfg.runs, "");
  if (cfg.runs == 0) {
    fail("/runs", "must be at least 1");
  }
  if (doc.contains("sweep")) {
    cfg.sweep = parse_sweep(object_at(doc, "sweep", ""));
  }
  if (doc.contains("output")) {
    const json& out = object_at(doc, "output", "");
    cfg.output.report = string_or(out, "report", "", "/output");
    cfg.output.snapshots_csv = string_or(out, "snapshots_csv", "", "/output");
    cfg.output.sweep_csv = string_or(out, "sweep_csv", "", "/output");
    cfg.output.fit = string_or(out, "fit", "", "/output");
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  const json doc = load_json(path);
  const auto dir = std::filesystem::path(path).parent_path();
  return from_json(doc, dir.empty() ? "." : dir.string());
}

json ExperimentConfig::to_json() const {
  json out = {{"instance", instance.to_json()},
              {"solver", solver.to_json()},
              {"estimator", estimator.to_json()},
              {"seed", seed},
              {"runs", runs}};
  if (sweep) {
    json sw = {{"axis", sweep->axis}, {"values", sweep->values}, {"seeds", sweep->seeds}};
    if (sweep->eps_rule) {
      sw["eps_rule"] = {{"coefficient", sweep->eps_rule->coefficient},
                        {"horizon_power", sweep->eps_rule->horizon_power}};
    }
    out["sweep"] = std::move(sw);
  }
  return out;
}

SolveReport run_solver(const Mdp& mdp, const SolverConfig& solver, const EstimatorConfig& estimator,
                       std::uint64_t seed) {
  SampleOracle oracle(mdp, seed);
  switch (solver.kind) {
    case SolverKind::mdp1: {
      SolveParams1 p;
      p.eps = solver.eps;
      p.delta = solver.delta;
      p.b = solver.b;
      p.c = solver.c;
      p.record_snapshots = solver.record_snapshots;
      return solve_mdp1(oracle, p, estimator);
    }
    case SolverKind::mdp2: {
      SolveParams2 p;
      p.eps = solver.eps;
      p.delta = solver.delta;
      p.c_max = solver.c_max;
      p.argmax_backend = solver.argmax_backend;
      p.record_snapshots = solver.record_snapshots;
      return solve_mdp2(oracle, p, estimator);
    }
    case SolverKind::baseline: {
      BaselineParams p;
      p.eps = solver.eps;
      p.delta = solver.delta;
      p.mode = solver.mode;
      p.c_max = solver.c_max;
      p.record_snapshots = solver.record_snapshots;
      return standard_sampled_vi(oracle, p, estimator);
    }
  }
  throw InternalError("run_solver: unknown solver kind");
}

bool run_succeeded(const Mdp& mdp, const SolveReport& report, double eps,
                   const OptimalSolution& optimal) {
  const SandwichCheck check = check_sandwich(mdp, report, eps, optimal);
  if (report.solver == "solve_mdp1") {
    return check.ok();
  }
  if (report.solver == "solve_mdp2") {
    return check.value_ok();
  }
  return check.value_error <= eps;
}

json solve_document(const ExperimentConfig& cfg, std::string* snapshot_csv) {
  const Mdp mdp = cfg.build_mdp();
  const OptimalSolution optimal = exact_value_iteration(mdp, kExactTolerance);
  json reference = {{"v_star", optimal.values}, {"pi_star", optimal.policy}};
  if (cfg.instance.hard) {
    reference["closed_form_v_star"] = hard_instance_values(*cfg.instance.hard);
  }

  json runs = json::array();
  std::size_t successes = 0;
  for (std::size_t i = 0; i < cfg.runs; ++i) {
    const std::uint64_t seed = cfg.runs == 1 ? cfg.seed : derive_seed(cfg.seed, {i});
    SolveReport report = run_solver(mdp, cfg.solver, cfg.estimator, seed);
    report.timestamp = utc_timestamp();
    if (snapshot_csv != nullptr && i == 0) {
      *snapshot_csv = snapshots_csv(report);
    }
    json doc = report.to_json(cfg.solver.record_snapshots);
    const SandwichCheck check = check_sandwich(mdp, report, cfg.solver.eps, optimal);
    const bool success = run_succeeded(mdp, report, cfg.solver.eps, optimal);
    successes += success ? 1 : 0;
    doc["sandwich"] = check.to_json();
    doc["success"] = success;
    runs.push_back(std::move(doc));
  }
  if (cfg.runs == 1) {
    json doc = std::move(runs.front());
    doc["reference"] = std::move(reference);
    doc["config"] = cfg.to_json();
    return doc;
  }
  return {{"config", cfg.to_json()},
          {"reference", std::move(reference)},
          {"runs", std::move(runs)},
          {"success_fraction", static_cast<double>(successes) / static_cast<double>(cfg.runs)}};
}

}  // namespace qmdp
