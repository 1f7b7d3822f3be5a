#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qmdp/experiment_config.hpp"

namespace qmdp {

struct SweepRow {
  double axis_value = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t classical_samples = 0;
  std::uint64_t quantum_oracle_calls = 0;
  bool success = false;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// Least-squares line through (log x, log y).
struct ScalingFit {
  std::string axis;
  std::string x_label;  // what x is: "1/eps", "horizon", "A" or "copies"
  std::vector<std::pair<double, double>> points;  // (x, median total queries)
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;

  nlohmann::json to_json() const;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  ScalingFit fit;
};

/// Requires >= 3 points with positive coordinates.
ScalingFit fit_loglog(std::string axis, std::string x_label,
                      std::vector<std::pair<double, double>> points);

/// Copy of `cfg` with the sweep axis set to `value`. The eps axis sets the
/// solver's eps; the gamma axis sets the instance discount and, when an
/// eps rule is given, the solver's eps; num_actions and copies reshape a
/// generated instance.
ExperimentConfig apply_axis(const ExperimentConfig& cfg, const SweepConfig& sweep, double value);

/// Fit abscissa for an axis value: 1/eps, horizon, A or copies.
double axis_abscissa(const std::string& axis, double value);

/// Runs `sweep.seeds` seeds per value (seed i uses derive_seed(cfg.seed, {i})
/// at every point) and fits median total queries against the abscissa.
SweepResult run_sweep(const ExperimentConfig& cfg, const SweepConfig& sweep);

/// "axis_value,seed,classical_samples,quantum_oracle_calls,success" with LF
/// line endings.
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::vector<SweepRow> parse_sweep_csv(const std::string& text);

double median(std::vector<double> xs);

}  // namespace qmdp
