#include "qmdp/hard_instances.hpp"

#include <algorithm>
#include <sstream>
#include <string>

#include "qmdp/error.hpp"
#include "qmdp/mdp_io.hpp"

namespace qmdp {
namespace {

void check_promise(double gamma, double eps, double c_alpha) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw PreconditionError("hard instance: gamma must lie in [0, 1)");
  }
  if (!(eps > 0.0)) {
    throw PreconditionError("hard instance: eps must be positive");
  }
  if (!(c_alpha >= 0.0)) {
    throw PreconditionError("hard instance: c_alpha must be non-negative");
  }
  const double H = 1.0 / (1.0 - gamma);
  const double p0 = 1.0 - 1.0 / H;
  const double alpha = c_alpha * eps / (H * H);
  if (!(p0 + alpha < 1.0)) {
    std::ostringstream msg;
    msg << "hard instance: p0 + alpha = " << p0 + alpha
        << " must stay below 1, i.e. eps < horizon / c_alpha = " << H / c_alpha;
    throw PreconditionError(msg.str());
  }
}

// Transition rows for one source/sink gadget placed at states (src, src+1).
void add_gadget(std::size_t S, std::size_t A, std::size_t src, const std::vector<double>& p_arm,
                std::vector<double>& rewards, std::vector<double>& transitions) {
  for (std::size_t a = 0; a < A; ++a) {
    rewards[src * A + a] = 1.0;
    double* row = transitions.data() + (src * A + a) * S;
    row[src] = p_arm[a];
    row[src + 1] = 1.0 - p_arm[a];
    double* sink_row = transitions.data() + ((src + 1) * A + a) * S;
    sink_row[src + 1] = 1.0;
  }
}

}  // namespace

std::vector<std::size_t> HardInstanceSpec::large_arms_of(std::size_t copy) const {
  const auto& raw = copy_large_arms.empty() ? large_arms : copy_large_arms.at(copy);
  const auto A = static_cast<long long>(num_actions);
  std::vector<std::size_t> out;
  for (long long idx : raw) {
    const long long resolved = idx < 0 ? A + idx : idx;
    if (resolved < 0 || resolved >= A) {
      throw PreconditionError("hard instance: large arm index " + std::to_string(idx) +
                              " is outside [-A, A)");
    }
    out.push_back(static_cast<std::size_t>(resolved));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void HardInstanceSpec::validate() const {
  if (num_actions == 0) {
    throw PreconditionError("hard instance: num_actions must be at least 1");
  }
  if (copies == 0) {
    throw PreconditionError("hard instance: copies must be at least 1");
  }
  if (!copy_large_arms.empty() && copy_large_arms.size() != copies) {
    throw PreconditionError("hard instance: copy_large_arms must list one entry per copy");
  }
  if (!(gamma >= 0.9 - 1e-12)) {
    throw PreconditionError("hard instance: gamma must be at least 0.9 (horizon >= 10)");
  }
  check_promise(gamma, eps, c_alpha);
  for (std::size_t j = 0; j < copies; ++j) {
    (void)large_arms_of(j);
  }
  if (enforce_gap) {
    const double gap = gap_check(gamma, eps, c_alpha);
    if (gap < 2.0 * eps) {
      std::ostringstream msg;
      msg << "hard instance: value gap " << gap << " is below 2 eps = " << 2.0 * eps
          << " (raise c_alpha, or set enforce_gap = false to build it anyway)";
      throw PreconditionError(msg.str());
    }
  }
}

nlohmann::json HardInstanceSpec::to_json() const {
  nlohmann::json out = {{"gamma", gamma},           {"num_actions", num_actions},
                        {"eps", eps},               {"large_arms", large_arms},
                        {"c_alpha", c_alpha},       {"copies", copies},
                        {"enforce_gap", enforce_gap}};
  if (!copy_large_arms.empty()) {
    out["copy_large_arms"] = copy_large_arms;
  }
  return out;
}

HardInstanceSpec HardInstanceSpec::from_json(const nlohmann::json& doc) {
  HardInstanceSpec spec;
  try {
    spec.gamma = doc.at("gamma").get<double>();
    spec.num_actions = doc.value("num_actions", spec.num_actions);
    spec.eps = doc.at("eps").get<double>();
    spec.large_arms = doc.value("large_arms", spec.large_arms);
    spec.copy_large_arms = doc.value("copy_large_arms", spec.copy_large_arms);
    spec.c_alpha = doc.value("c_alpha", spec.c_alpha);
    spec.copies = doc.value("copies", spec.copies);
    spec.enforce_gap = doc.value("enforce_gap", spec.enforce_gap);
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("hard instance spec: ") + e.what());
  }
  return spec;
}

Mdp two_state(double gamma, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw PreconditionError("two_state: p must lie in [0, 1]");
  }
  std::vector<double> rewards(2, 0.0);
  std::vector<double> transitions(4, 0.0);
  add_gadget(2, 1, 0, {p}, rewards, transitions);
  return Mdp(2, 1, gamma, std::move(rewards), std::move(transitions));
}

Mdp copies(const HardInstanceSpec& spec) {
  spec.validate();
  const std::size_t A = spec.num_actions;
  const std::size_t S = 2 * spec.copies;
  std::vector<double> rewards(S * A, 0.0);
  std::vector<double> transitions(S * A * S, 0.0);
  for (std::size_t j = 0; j < spec.copies; ++j) {
    std::vector<double> p_arm(A, spec.p0());
    for (std::size_t a : spec.large_arms_of(j)) {
      p_arm[a] = spec.p0() + spec.alpha();
    }
    add_gadget(S, A, 2 * j, p_arm, rewards, transitions);
  }
  return Mdp(S, A, spec.gamma, std::move(rewards), std::move(transitions));
}

Mdp multi_action(const HardInstanceSpec& spec) {
  HardInstanceSpec single = spec;
  single.copies = 1;
  if (!single.copy_large_arms.empty()) {
    single.large_arms.assign(spec.copy_large_arms.front().begin(), spec.copy_large_arms.front().end());
    single.copy_large_arms.clear();
  }
  return copies(single);
}

double source_value(double gamma, double p) { return 1.0 / (1.0 - gamma * p); }

ValueVec hard_instance_values(const HardInstanceSpec& spec) {
  spec.validate();
  ValueVec v(2 * spec.copies, 0.0);
  for (std::size_t j = 0; j < spec.copies; ++j) {
    const bool has_large = !spec.large_arms_of(j).empty();
    v[2 * j] = source_value(spec.gamma, spec.p0() + (has_large ? spec.alpha() : 0.0));
  }
  return v;
}

double gap_check(double gamma, double eps, double c_alpha) {
  check_promise(gamma, eps, c_alpha);
  const double H = 1.0 / (1.0 - gamma);
  const double p0 = 1.0 - 1.0 / H;
  const double alpha = c_alpha * eps / (H * H);
  return source_value(gamma, p0 + alpha) - source_value(gamma, p0);
}

nlohmann::json hard_instance_to_json(const HardInstanceSpec& spec) {
  nlohmann::json doc = mdp_to_json(copies(spec));
  nlohmann::json prov = spec.to_json();
  prov["p0"] = spec.p0();
  prov["alpha"] = spec.alpha();
  prov["gap"] = gap_check(spec.gamma, spec.eps, spec.c_alpha);
  doc["provenance"] = std::move(prov);
  return doc;
}

}  // namespace qmdp
