#include <chrono>
#include <ctime>
#include <sstream>

#include "qmdp/solvers.hpp"

namespace qmdp {
namespace {

nlohmann::json qvec_to_json(const QVec& q) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t s = 0; s < q.num_states(); ++s) {
    const auto row = q.row(s);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

}  // namespace

nlohmann::json SolveDiagnostics::to_json(bool include_snapshots) const {
  nlohmann::json out = {{"monotone", monotone},
                        {"greedy_dominance", greedy_dominance},
                        {"estimator_failures", estimator_failures},
                        {"argmax_failures", argmax_failures},
                        {"one_sided_violations", one_sided_violations},
                        {"promise_clamps", promise_clamps},
                        {"variance_promise_violations", variance_promise_violations},
                        {"max_variance_gap", max_variance_gap},
                        {"variance_within_3b", variance_within_3b},
                        {"epoch_end_values", epoch_end_values}};
  if (include_snapshots) {
    nlohmann::json snaps = nlohmann::json::array();
    for (const auto& snap : snapshots) {
      snaps.push_back({{"iteration", snap.iteration}, {"v", snap.v}, {"pi", snap.pi}});
    }
    out["snapshots"] = std::move(snaps);
  }
  return out;
}

nlohmann::json SolveReport::to_json(bool include_snapshots) const {
  return {{"solver", solver},
          {"seed", seed},
          {"params", params},
          {"estimator", estimator},
          {"v_hat", v_hat},
          {"pi_hat", pi_hat},
          {"q_hat", q_hat ? qvec_to_json(*q_hat) : nlohmann::json(nullptr)},
          {"ledger", ledger.to_json()},
          {"diagnostics", diagnostics.to_json(include_snapshots)},
          {"timestamp", timestamp}};
}

nlohmann::json SandwichCheck::to_json() const {
  return {{"value_lower", value_lower},   {"value_policy", value_policy},
          {"policy_upper", policy_upper}, {"q_checked", q_checked},
          {"q_sandwich", q_sandwich},     {"value_error", value_error},
          {"ok", ok()}};
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string snapshots_csv(const SolveReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "iteration,s,v,pi\n";
  for (const auto& snap : report.diagnostics.snapshots) {
    for (std::size_t s = 0; s < snap.v.size(); ++s) {
      out << snap.iteration << ',' << s << ',' << snap.v[s] << ',' << snap.pi[s] << '\n';
    }
  }
  return out.str();
}

}  // namespace qmdp
