#pragma once

// Source/sink MDP family with closed-form optimal values. From the source
// every action pays 1 and returns to the source with probability p_a,
// otherwise falls into an absorbing zero-reward sink, so the source value
// of always playing a is 1 / (1 - gamma p_a).

#include <nlohmann/json.hpp>

#include <cstddef>
#include <vector>

#include "qmdp/mdp.hpp"

namespace qmdp {

inline constexpr double kDefaultGapConstant = 9.0;

struct HardInstanceSpec {
  double gamma = 0.9;
  std::size_t num_actions = 2;
  double eps = 0.5;
  /// Indices of arms with p = p0 + alpha; negative values count from the
  /// end (-1 is the last arm).
  std::vector<long long> large_arms;
  /// Optional per-copy override of large_arms; empty means every copy uses
  /// large_arms.
  std::vector<std::vector<long long>> copy_large_arms;
  double c_alpha = kDefaultGapConstant;
  std::size_t copies = 1;
  /// Reject specs whose value gap is below 2 eps. Switch off to build the
  /// c_alpha = 3 instances, whose gap falls short.
  bool enforce_gap = true;

  double horizon() const { return 1.0 / (1.0 - gamma); }
  /// p0 = 1 - 1/horizon.
  double p0() const { return 1.0 - 1.0 / horizon(); }
  /// alpha = c_alpha eps / horizon^2.
  double alpha() const { return c_alpha * eps / (horizon() * horizon()); }

  /// Resolved, sorted, de-duplicated large arms of copy j.
  std::vector<std::size_t> large_arms_of(std::size_t copy) const;

  void validate() const;
  nlohmann::json to_json() const;
  static HardInstanceSpec from_json(const nlohmann::json& doc);
};

/// Source (state 0) / sink (state 1), one action.
Mdp two_state(double gamma, double p);

/// Two states, A source arms with p_a = p0 + alpha on large arms, p0 else.
Mdp multi_action(const HardInstanceSpec& spec);

/// `copies` independent gadgets; copy j owns states 2j (source) and 2j+1 (sink).
Mdp copies(const HardInstanceSpec& spec);

/// 1 / (1 - gamma p).
double source_value(double gamma, double p);

/// Exact v* of copies(spec) from the closed form.
ValueVec hard_instance_values(const HardInstanceSpec& spec);

/// 1/(1 - gamma (p0 + alpha)) - 1/(1 - gamma p0).
double gap_check(double gamma, double eps, double c_alpha);

/// Standard MDP JSON plus a "provenance" block with the generating spec.
nlohmann::json hard_instance_to_json(const HardInstanceSpec& spec);

}  // namespace qmdp
