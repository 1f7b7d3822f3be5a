#pragma once

// Exact tabular-MDP mathematics: the model type, the P / sigma^2 / Bellman /
// policy-value operators, and exact solvers that serve as ground truth for
// every probabilistic check in the project.

#include <cstddef>
#include <span>
#include <vector>

namespace qmdp {

/// Value function over states, length S.
using ValueVec = std::vector<double>;

/// Deterministic stationary policy: one action index per state.
using Policy = std::vector<std::size_t>;

/// A vector indexed by state-action pairs (s, a), stored row-major by state.
/// Holds Q-functions as well as images of P, sigma^2 and sigma.
class QVec {
 public:
  QVec() = default;
  QVec(std::size_t num_states, std::size_t num_actions, double fill = 0.0)
      : num_states_(num_states), num_actions_(num_actions), data_(num_states * num_actions, fill) {}

  std::size_t num_states() const noexcept { return num_states_; }
  std::size_t num_actions() const noexcept { return num_actions_; }
  std::size_t size() const noexcept { return data_.size(); }

  double operator()(std::size_t s, std::size_t a) const { return data_[s * num_actions_ + a]; }
  double& operator()(std::size_t s, std::size_t a) { return data_[s * num_actions_ + a]; }

  std::span<const double> row(std::size_t s) const {
    return {data_.data() + s * num_actions_, num_actions_};
  }
  std::span<double> row(std::size_t s) { return {data_.data() + s * num_actions_, num_actions_}; }

  const std::vector<double>& values() const noexcept { return data_; }
  std::vector<double>& values() noexcept { return data_; }

  friend bool operator==(const QVec&, const QVec&) = default;

 private:
  std::size_t num_states_ = 0;
  std::size_t num_actions_ = 0;
  std::vector<double> data_;
};

/// Tabular discounted MDP (S, A, p, r, gamma).
///
/// Construction validates every invariant: rows of p are distributions
/// (sum to 1 within 1e-12, entries in [0,1]), rewards lie in [0,1] and
/// gamma in [0,1). Violations throw PreconditionError naming the offending
/// entry.
class Mdp {
 public:
  static constexpr double kRowSumTolerance = 1e-12;

  /// `rewards` is S*A row-major; `transitions` is S*A*S with p[s][a][s'] at
  /// ((s * A) + a) * S + s'.
  Mdp(std::size_t num_states, std::size_t num_actions, double discount,
      std::vector<double> rewards, std::vector<double> transitions);

  /// Convenience constructor from nested r[s][a] and p[s][a][s'].
  static Mdp from_nested(double discount, const std::vector<std::vector<double>>& rewards,
                         const std::vector<std::vector<std::vector<double>>>& transitions);

  std::size_t num_states() const noexcept { return num_states_; }
  std::size_t num_actions() const noexcept { return num_actions_; }
  double discount() const noexcept { return discount_; }
  /// Effective horizon 1 / (1 - gamma).
  double horizon() const noexcept { return 1.0 / (1.0 - discount_); }

  double reward(std::size_t s, std::size_t a) const { return rewards_[s * num_actions_ + a]; }
  std::span<const double> transition(std::size_t s, std::size_t a) const {
    return {transitions_.data() + (s * num_actions_ + a) * num_states_, num_states_};
  }
  double probability(std::size_t s, std::size_t a, std::size_t next) const {
    return transitions_[(s * num_actions_ + a) * num_states_ + next];
  }

  const std::vector<double>& rewards() const noexcept { return rewards_; }
  const std::vector<double>& transitions() const noexcept { return transitions_; }

  /// Rewards as a QVec.
  QVec reward_vector() const;

  friend bool operator==(const Mdp&, const Mdp&) = default;

 private:
  std::size_t num_states_;
  std::size_t num_actions_;
  double discount_;
  std::vector<double> rewards_;
  std::vector<double> transitions_;
};

/// Throws PreconditionError unless `pi` has length S and every action < A.
void validate_policy(const Mdp& mdp, const Policy& pi);

/// (Pu)[s,a] = p_{s,a}^T u.
QVec apply_P(const Mdp& mdp, std::span<const double> u);

/// sigma^2(u)[s,a] = Var[u[s'] | s' ~ p(.|s,a)], computed in centred form so
/// every entry is non-negative.
QVec sigma_sq(const Mdp& mdp, std::span<const double> u);

/// Bellman optimality backup: max_a { r[s,a] + gamma (Pv)[s,a] }.
ValueVec bellman(const Mdp& mdp, std::span<const double> v);

/// Value operator of a fixed policy: r[s,pi(s)] + gamma p_{s,pi(s)}^T u.
ValueVec value_operator_pi(const Mdp& mdp, const Policy& pi, std::span<const double> u);

/// Exact v^pi by solving (I - gamma P_pi) v = r_pi.
ValueVec policy_value_exact(const Mdp& mdp, const Policy& pi);

/// Exact q^pi = r + gamma P v^pi.
QVec policy_q_exact(const Mdp& mdp, const Policy& pi);

/// Row-wise max and argmax; ties go to the lowest action index.
struct Greedy {
  ValueVec values;
  Policy policy;
};
Greedy greedy(const QVec& q);

struct OptimalSolution {
  ValueVec values;
  Policy policy;
  QVec q;
  std::size_t iterations = 0;
};

/// Value iteration from zero, stopped once successive iterates differ by at
/// most tol (1 - gamma) / (2 gamma); the returned values are then within tol
/// of v*. q* = r + gamma P v*, pi* = argmax q*.
OptimalSolution exact_value_iteration(const Mdp& mdp, double tol);

/// || (I - gamma P^pi)^{-1} sigma(v^pi) ||_inf over the (S*A)-dimensional
/// state-action space. Bounded above by sqrt(2) * horizon^1.5.
double total_variance_norm(const Mdp& mdp, const Policy& pi);

/// max_i |a_i - b_i|; lengths must agree.
double max_abs_diff(std::span<const double> a, std::span<const double> b);

}  // namespace qmdp
