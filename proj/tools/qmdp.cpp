// qmdp: run solvers, parameter sweeps, invariant suites and oracle builds
// from JSON configs.
//
// Exit codes: 0 success, 1 verify failure, 2 precondition error (bad input
// or config), 3 internal error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qmdp/dyadic.hpp"
#include "qmdp/error.hpp"
#include "qmdp/experiment_config.hpp"
#include "qmdp/mdp_io.hpp"
#include "qmdp/sweep.hpp"
#include "qmdp/verify.hpp"

namespace {

constexpr int kExitVerifyFailed = 1;
constexpr int kExitPrecondition = 2;
constexpr int kExitInternal = 3;
constexpr std::size_t kMinSweepSeeds = 20;

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw qmdp::PreconditionError("cannot write " + path);
  }
  out << text;
}

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) {
        throw std::invalid_argument(item);
      }
    } catch (const std::exception&) {
      throw qmdp::PreconditionError("--values: '" + item + "' is not a number");
    }
  }
  return out;
}

int cmd_solve(const std::string& config_path, std::string out_path, std::string snapshots_path) {
  const auto cfg = qmdp::ExperimentConfig::load(config_path);
  if (out_path.empty()) {
    out_path = cfg.output.report;
  }
  if (snapshots_path.empty()) {
    snapshots_path = cfg.output.snapshots_csv;
  }
  std::string csv;
  const auto doc = qmdp::solve_document(cfg, snapshots_path.empty() ? nullptr : &csv);
  if (out_path.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    qmdp::save_json(doc, out_path);
  }
  if (!snapshots_path.empty()) {
    write_text(snapshots_path, csv);
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& axis, const std::string& values,
              std::size_t seeds, std::size_t threads, std::string csv_path, std::string fit_path) {
  const auto cfg = qmdp::ExperimentConfig::load(config_path);
  qmdp::SweepConfig sweep = cfg.sweep.value_or(qmdp::SweepConfig{});
  if (!axis.empty()) {
    sweep.axis = axis;
  }
  if (!values.empty()) {
    sweep.values = parse_values(values);
  }
  if (seeds != 0) {
    sweep.seeds = seeds;
  }
  if (threads != 0) {
    sweep.threads = threads;
  }
  if (sweep.seeds < kMinSweepSeeds) {
    throw qmdp::PreconditionError("sweep: need at least " + std::to_string(kMinSweepSeeds) +
                                  " seeds per point, got " + std::to_string(sweep.seeds));
  }
  if (csv_path.empty()) {
    csv_path = cfg.output.sweep_csv;
  }
  if (fit_path.empty()) {
    fit_path = cfg.output.fit;
  }
  const auto result = qmdp::run_sweep(cfg, sweep);
  if (!csv_path.empty()) {
    write_text(csv_path, qmdp::sweep_csv(result.rows));
  }
  nlohmann::json fit = result.fit.to_json();
  fit["solver"] = qmdp::to_string(cfg.solver.kind);
  fit["seeds"] = sweep.seeds;
  if (fit_path.empty()) {
    std::cout << fit.dump(2) << '\n';
  } else {
    qmdp::save_json(fit, fit_path);
  }
  std::cerr << "slope " << result.fit.slope << " (r^2 " << result.fit.r_squared << ")\n";
  return 0;
}

int cmd_verify(const std::string& suite, std::size_t trials, std::uint64_t seed, const std::string& json_path) {
  const auto summary = qmdp::run_verify_suite(suite, trials, seed);
  std::cout << summary.text();
  if (!json_path.empty()) {
    qmdp::save_json(summary.to_json(), json_path);
  }
  return summary.ok() ? 0 : kExitVerifyFailed;
}

int cmd_oracle_build(const std::string& mdp_path, unsigned m, bool quantize, const std::string& out_path) {
  const qmdp::Mdp mdp = qmdp::load_mdp(mdp_path);
  const qmdp::DyadicMdp dyadic = quantize ? qmdp::quantize_mdp(mdp, m) : qmdp::dyadic_from_exact(mdp, m);
  const qmdp::QuantumGenerativeState state = qmdp::build_quantum_oracle(dyadic);
  const nlohmann::json doc = {{"dyadic_mdp", qmdp::dyadic_mdp_to_json(dyadic)},
                              {"oracle", qmdp::quantum_oracle_to_json(state)},
                              {"normalized_exactly", state.normalized_exactly()}};
  if (out_path.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    qmdp::save_json(doc, out_path);
  }
  if (dyadic.max_distortion > 0.0) {
    std::cerr << "quantized to m = " << m << " bits, max distortion " << dyadic.max_distortion << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum-accelerated MDP solvers: simulation and experiment harness"};
  app.require_subcommand(1);

  std::string config, out, snapshots;
  auto* solve = app.add_subcommand("solve", "Run the configured solver and write a report");
  solve->add_option("--config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  solve->add_option("--out", out, "Report path (default: config output.report, else stdout)");
  solve->add_option("--snapshots-csv", snapshots, "Write per-iteration snapshots as CSV");

  std::string axis, values, out_csv, out_fit;
  std::size_t seeds = 0, threads = 0;
  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter and fit a log-log scaling exponent");
  sweep->add_option("--config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--axis", axis, "eps | gamma | num_actions | copies");
  sweep->add_option("--values", values, "Comma-separated axis values");
  sweep->add_option("--seeds", seeds, "Seeds per point (at least 20)");
  sweep->add_option("--threads", threads, "Worker threads (default: all cores)");
  sweep->add_option("--out-csv", out_csv, "Per-run CSV");
  sweep->add_option("--out-fit", out_fit, "Fit JSON (default: stdout)");

  std::string suite, verify_json;
  std::size_t trials = 0;
  std::uint64_t seed = 1;
  auto* verify = app.add_subcommand("verify", "Run an invariant suite");
  verify->add_option("--suite", suite, "Suite name")->required()->check(CLI::IsMember(qmdp::verify_suite_names()));
  verify->add_option("--trials", trials, "Trials (default: suite-specific)");
  verify->add_option("--seed", seed, "Base seed");
  verify->add_option("--json", verify_json, "Also write the summary as JSON");

  std::string mdp_path;
  unsigned bits = qmdp::kDefaultDyadicBits;
  bool quantize = false;
  auto* oracle = app.add_subcommand("oracle-build", "Build the amplitude-level quantum generative model");
  oracle->add_option("--mdp", mdp_path, "MDP JSON")->required()->check(CLI::ExistingFile);
  oracle->add_option("--m", bits, "Denominator bits (dyadic precision)");
  oracle->add_flag("--quantize", quantize, "Round non-dyadic rows to m bits instead of rejecting them");
  oracle->add_option("--out", out, "Output JSON (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitPrecondition;
  }

  try {
    if (*solve) return cmd_solve(config, out, snapshots);
    if (*sweep) return cmd_sweep(config, axis, values, seeds, threads, out_csv, out_fit);
    if (*verify) return cmd_verify(suite, trials, seed, verify_json);
    if (*oracle) return cmd_oracle_build(mdp_path, bits, quantize, out);
  } catch (const qmdp::PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPrecondition;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << '\n';
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
