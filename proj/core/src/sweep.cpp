#include "qmdp/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "qmdp/error.hpp"

namespace qmdp {
namespace {

const char* kCsvHeader = "axis_value,seed,classical_samples,quantum_oracle_calls,success";

std::string x_label(const std::string& axis) {
  if (axis == "eps") return "1/eps";
  if (axis == "gamma") return "horizon";
  if (axis == "num_actions") return "A";
  return "copies";
}

void check_axis(const std::string& axis) {
  if (axis != "eps" && axis != "gamma" && axis != "num_actions" && axis != "copies") {
    throw PreconditionError("sweep: unknown axis '" + axis +
                            "' (expected eps, gamma, num_actions or copies)");
  }
}

std::size_t as_count(double value, const char* what) {
  if (!(value >= 1.0) || value != std::floor(value)) {
    throw PreconditionError(std::string("sweep: ") + what + " values must be positive integers");
  }
  return static_cast<std::size_t>(value);
}

}  // namespace

double median(std::vector<double> xs) {
  if (xs.empty()) {
    throw PreconditionError("median of an empty set");
  }
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

nlohmann::json ScalingFit::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& [x, y] : points) {
    pts.push_back({{"x", x}, {"median_queries", y}});
  }
  return {{"axis", axis},       {"x", x_label},          {"points", std::move(pts)},
          {"slope", slope},     {"intercept", intercept}, {"r_squared", r_squared}};
}

ScalingFit fit_loglog(std::string axis, std::string label, std::vector<std::pair<double, double>> points) {
  if (points.size() < 3) {
    throw PreconditionError("fit: need at least 3 points, got " + std::to_string(points.size()));
  }
  const double n = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) {
      throw PreconditionError("fit: log-log fit needs positive coordinates");
    }
    sx += std::log(x);
    sy += std::log(y);
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : points) {
    const double dx = std::log(x) - mx;
    const double dy = std::log(y) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) {
    throw PreconditionError("fit: abscissae must not all coincide");
  }
  ScalingFit fit;
  fit.axis = std::move(axis);
  fit.x_label = std::move(label);
  fit.points = std::move(points);
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  // A flat series is fitted perfectly by slope 0.
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

double axis_abscissa(const std::string& axis, double value) {
  check_axis(axis);
  if (axis == "eps") return 1.0 / value;
  if (axis == "gamma") return 1.0 / (1.0 - value);
  return value;
}

ExperimentConfig apply_axis(const ExperimentConfig& cfg, const SweepConfig& sweep, double value) {
  check_axis(sweep.axis);
  ExperimentConfig out = cfg;
  if (sweep.axis == "eps") {
    out.solver.eps = value;
    return out;
  }
  if (sweep.axis == "gamma") {
    if (!(value >= 0.0 && value < 1.0)) {
      throw PreconditionError("sweep: gamma values must lie in [0, 1)");
    }
    if (out.instance.hard) {
      out.instance.hard->gamma = value;
    } else {
      out.instance.gamma_override = value;
    }
    if (sweep.eps_rule) {
      out.solver.eps = sweep.eps_rule->eps(1.0 / (1.0 - value));
    }
    return out;
  }
  if (!out.instance.hard) {
    throw PreconditionError("sweep: axis '" + sweep.axis + "' needs a generated (hard) instance");
  }
  if (sweep.axis == "num_actions") {
    out.instance.hard->num_actions = as_count(value, "num_actions");
  } else {
    out.instance.hard->copies = as_count(value, "copies");
    out.instance.hard->copy_large_arms.clear();
  }
  return out;
}

SweepResult run_sweep(const ExperimentConfig& cfg, const SweepConfig& sweep) {
  check_axis(sweep.axis);
  if (sweep.values.size() < 3) {
    throw PreconditionError("sweep: need at least 3 axis values, got " + std::to_string(sweep.values.size()));
  }
  if (sweep.seeds == 0) {
    throw PreconditionError("sweep: need at least one seed per point");
  }

  struct Point {
    ExperimentConfig cfg;
    Mdp mdp;
    OptimalSolution optimal;
  };
  std::vector<Point> points;
  points.reserve(sweep.values.size());
  for (double value : sweep.values) {
    ExperimentConfig pc = apply_axis(cfg, sweep, value);
    Mdp mdp = pc.build_mdp();
    OptimalSolution optimal = exact_value_iteration(mdp, kExactTolerance);
    points.push_back({std::move(pc), std::move(mdp), std::move(optimal)});
  }

  const std::size_t tasks = sweep.values.size() * sweep.seeds;
  std::vector<SweepRow> rows(tasks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks; t = next++) {
      const std::size_t pi = t / sweep.seeds;
      const std::size_t si = t % sweep.seeds;
      try {
        const Point& p = points[pi];
        const std::uint64_t seed = derive_seed(cfg.seed, {si});
        const SolveReport report = run_solver(p.mdp, p.cfg.solver, p.cfg.estimator, seed);
        rows[t] = {sweep.values[pi], seed, report.ledger.classical_samples(),
                   report.ledger.quantum_oracle_calls(),
                   run_succeeded(p.mdp, report, p.cfg.solver.eps, p.optimal)};
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) {
          error = std::current_exception();
        }
        next = tasks;
      }
    }
  };
  std::size_t threads = sweep.threads != 0 ? sweep.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, tasks);
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < threads; ++i) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto& th : pool) {
    th.join();
  }
  if (error) {
    std::rethrow_exception(error);
  }

  std::vector<std::pair<double, double>> fit_points;
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    std::vector<double> totals;
    for (std::size_t si = 0; si < sweep.seeds; ++si) {
      const SweepRow& r = rows[pi * sweep.seeds + si];
      totals.push_back(static_cast<double>(r.classical_samples) + static_cast<double>(r.quantum_oracle_calls));
    }
    fit_points.emplace_back(axis_abscissa(sweep.axis, sweep.values[pi]), median(std::move(totals)));
  }
  return {std::move(rows), fit_loglog(sweep.axis, x_label(sweep.axis), std::move(fit_points))};
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out.precision(17);
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.axis_value << ',' << r.seed << ',' << r.classical_samples << ',' << r.quantum_oracle_calls
        << ',' << (r.success ? 1 : 0) << '\n';
  }
  return out.str();
}

std::vector<SweepRow> parse_sweep_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw PreconditionError("sweep CSV: unexpected header");
  }
  std::vector<SweepRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      continue;
    }
    std::istringstream fields(line);
    std::string cell[5];
    for (auto& c : cell) {
      if (!std::getline(fields, c, ',')) {
        throw PreconditionError("sweep CSV: line " + std::to_string(lineno) + " has too few columns");
      }
    }
    try {
      rows.push_back({std::stod(cell[0]), std::stoull(cell[1]), std::stoull(cell[2]),
                      std::stoull(cell[3]), cell[4] == "1"});
    } catch (const std::exception&) {
      throw PreconditionError("sweep CSV: line " + std::to_string(lineno) + " is malformed");
    }
  }
  return rows;
}

}  // namespace qmdp
