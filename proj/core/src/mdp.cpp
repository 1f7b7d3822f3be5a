#include "qmdp/mdp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "qmdp/error.hpp"

namespace qmdp {
namespace {

void check_length(std::span<const double> u, std::size_t expected, const char* what) {
  if (u.size() != expected) {
    std::ostringstream msg;
    msg << what << ": expected a vector of length " << expected << ", got " << u.size();
    throw PreconditionError(msg.str());
  }
}

}  // namespace

Mdp::Mdp(std::size_t num_states, std::size_t num_actions, double discount,
         std::vector<double> rewards, std::vector<double> transitions)
    : num_states_(num_states),
      num_actions_(num_actions),
      discount_(discount),
      rewards_(std::move(rewards)),
      transitions_(std::move(transitions)) {
  if (num_states_ == 0 || num_actions_ == 0) {
    throw PreconditionError("Mdp: S and A must be positive");
  }
  if (!(discount_ >= 0.0 && discount_ < 1.0)) {
    throw PreconditionError("Mdp: discount must lie in [0, 1), got " + std::to_string(discount_));
  }
  if (rewards_.size() != num_states_ * num_actions_) {
    throw PreconditionError("Mdp: reward table must have S*A entries");
  }
  if (transitions_.size() != num_states_ * num_actions_ * num_states_) {
    throw PreconditionError("Mdp: transition tensor must have S*A*S entries");
  }
  for (std::size_t s = 0; s < num_states_; ++s) {
    for (std::size_t a = 0; a < num_actions_; ++a) {
      const double r = reward(s, a);
      if (!(r >= 0.0 && r <= 1.0)) {
        std::ostringstream msg;
        msg << "Mdp: reward r[" << s << "][" << a << "] = " << r << " is outside [0, 1]";
        throw PreconditionError(msg.str());
      }
      double total = 0.0;
      for (std::size_t next = 0; next < num_states_; ++next) {
        const double p = probability(s, a, next);
        if (!(p >= 0.0 && p <= 1.0)) {
          std::ostringstream msg;
          msg << "Mdp: probability p[" << s << "][" << a << "][" << next << "] = " << p
              << " is outside [0, 1]";
          throw PreconditionError(msg.str());
        }
        total += p;
      }
      if (std::abs(total - 1.0) > kRowSumTolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "Mdp: transition row p[" << s << "][" << a << "] sums to " << total
            << " (expected 1 within " << kRowSumTolerance << ")";
        throw PreconditionError(msg.str());
      }
    }
  }
}

Mdp Mdp::from_nested(double discount, const std::vector<std::vector<double>>& rewards,
                     const std::vector<std::vector<std::vector<double>>>& transitions) {
  const std::size_t num_states = rewards.size();
  const std::size_t num_actions = num_states == 0 ? 0 : rewards.front().size();
  if (transitions.size() != num_states) {
    throw PreconditionError("Mdp: reward and transition tables disagree on S");
  }
  std::vector<double> r;
  std::vector<double> p;
  r.reserve(num_states * num_actions);
  p.reserve(num_states * num_actions * num_states);
  for (std::size_t s = 0; s < num_states; ++s) {
    if (rewards[s].size() != num_actions || transitions[s].size() != num_actions) {
      throw PreconditionError("Mdp: ragged reward or transition table at state " + std::to_string(s));
    }
    for (std::size_t a = 0; a < num_actions; ++a) {
      r.push_back(rewards[s][a]);
      if (transitions[s][a].size() != num_states) {
        throw PreconditionError("Mdp: transition row p[" + std::to_string(s) + "][" +
                                std::to_string(a) + "] must have S entries");
      }
      p.insert(p.end(), transitions[s][a].begin(), transitions[s][a].end());
    }
  }
  return Mdp(num_states, num_actions, discount, std::move(r), std::move(p));
}

QVec Mdp::reward_vector() const {
  QVec q(num_states_, num_actions_);
  q.values() = rewards_;
  return q;
}

void validate_policy(const Mdp& mdp, const Policy& pi) {
  if (pi.size() != mdp.num_states()) {
    throw PreconditionError("policy length " + std::to_string(pi.size()) + " does not match S = " +
                            std::to_string(mdp.num_states()));
  }
  for (std::size_t s = 0; s < pi.size(); ++s) {
    if (pi[s] >= mdp.num_actions()) {
      throw PreconditionError("policy action at state " + std::to_string(s) + " is out of range");
    }
  }
}

QVec apply_P(const Mdp& mdp, std::span<const double> u) {
  check_length(u, mdp.num_states(), "apply_P");
  QVec out(mdp.num_states(), mdp.num_actions());
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
      const auto p = mdp.transition(s, a);
      double acc = 0.0;
      for (std::size_t next = 0; next < p.size(); ++next) {
        acc += p[next] * u[next];
      }
      out(s, a) = acc;
    }
  }
  return out;
}

QVec sigma_sq(const Mdp& mdp, std::span<const double> u) {
  check_length(u, mdp.num_states(), "sigma_sq");
  const QVec mean = apply_P(mdp, u);
  QVec out(mdp.num_states(), mdp.num_actions());
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
      const auto p = mdp.transition(s, a);
      const double mu = mean(s, a);
      double acc = 0.0;
      for (std::size_t next = 0; next < p.size(); ++next) {
        const double d = u[next] - mu;
        acc += p[next] * d * d;
      }
      out(s, a) = acc;
    }
  }
  return out;
}

ValueVec bellman(const Mdp& mdp, std::span<const double> v) {
  check_length(v, mdp.num_states(), "bellman");
  const QVec pv = apply_P(mdp, v);
  ValueVec out(mdp.num_states(), -std::numeric_limits<double>::infinity());
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
      out[s] = std::max(out[s], mdp.reward(s, a) + mdp.discount() * pv(s, a));
    }
  }
  return out;
}

ValueVec value_operator_pi(const Mdp& mdp, const Policy& pi, std::span<const double> u) {
  validate_policy(mdp, pi);
  check_length(u, mdp.num_states(), "value_operator_pi");
  ValueVec out(mdp.num_states());
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    const auto p = mdp.transition(s, pi[s]);
    double acc = 0.0;
    for (std::size_t next = 0; next < p.size(); ++next) {
      acc += p[next] * u[next];
    }
    out[s] = mdp.reward(s, pi[s]) + mdp.discount() * acc;
  }
  return out;
}

ValueVec policy_value_exact(const Mdp& mdp, const Policy& pi) {
  validate_policy(mdp, pi);
  const auto n = static_cast<Eigen::Index>(mdp.num_states());
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index s = 0; s < n; ++s) {
    const auto a = pi[static_cast<std::size_t>(s)];
    const auto p = mdp.transition(static_cast<std::size_t>(s), a);
    for (Eigen::Index next = 0; next < n; ++next) {
      system(s, next) -= mdp.discount() * p[static_cast<std::size_t>(next)];
    }
    rhs(s) = mdp.reward(static_cast<std::size_t>(s), a);
  }
  const Eigen::VectorXd v = system.partialPivLu().solve(rhs);
  const double residual = (system * v - rhs).lpNorm<Eigen::Infinity>();
  if (!std::isfinite(residual) || residual > 1e-10 * mdp.horizon()) {
    throw InternalError("policy_value_exact: linear solve residual " + std::to_string(residual) +
                        " exceeds 1e-10 * horizon");
  }
  return ValueVec(v.data(), v.data() + n);
}

QVec policy_q_exact(const Mdp& mdp, const Policy& pi) {
  const ValueVec v = policy_value_exact(mdp, pi);
  QVec q = apply_P(mdp, v);
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
      q(s, a) = mdp.reward(s, a) + mdp.discount() * q(s, a);
    }
  }
  return q;
}

Greedy greedy(const QVec& q) {
  if (q.num_actions() == 0) {
    throw PreconditionError("greedy: Q-vector has no actions");
  }
  Greedy g{ValueVec(q.num_states()), Policy(q.num_states())};
  for (std::size_t s = 0; s < q.num_states(); ++s) {
    const auto row = q.row(s);
    std::size_t best = 0;
    for (std::size_t a = 1; a < row.size(); ++a) {
      if (row[a] > row[best]) {
        best = a;
      }
    }
    g.values[s] = row[best];
    g.policy[s] = best;
  }
  return g;
}

OptimalSolution exact_value_iteration(const Mdp& mdp, double tol) {
  if (!(tol > 0.0)) {
    throw PreconditionError("exact_value_iteration: tol must be positive");
  }
  const double gamma = mdp.discount();
  const double stop_gap = gamma == 0.0 ? std::numeric_limits<double>::infinity()
                                       : tol * (1.0 - gamma) / (2.0 * gamma);
  const double horizon = mdp.horizon();
  const auto iteration_bound = static_cast<std::size_t>(
      std::ceil(horizon * std::log(std::max(horizon / tol, 1.0)))) + 1;
  // The contraction bound guarantees termination well within this cap; the
  // slack absorbs floating-point stagnation near the fixed point.
  const std::size_t cap = 4 * iteration_bound + 16;

  OptimalSolution out;
  ValueVec v(mdp.num_states(), 0.0);
  for (std::size_t it = 1;; ++it) {
    ValueVec next = bellman(mdp, v);
    const double gap = max_abs_diff(next, v);
    v = std::move(next);
    if (gap <= stop_gap) {
      out.iterations = it;
      break;
    }
    if (it >= cap) {
      throw InternalError("exact_value_iteration: no convergence within iteration cap");
    }
  }
  out.values = v;
  out.q = apply_P(mdp, v);
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
      out.q(s, a) = mdp.reward(s, a) + gamma * out.q(s, a);
    }
  }
  out.policy = greedy(out.q).policy;
  return out;
}

double total_variance_norm(const Mdp& mdp, const Policy& pi) {
  validate_policy(mdp, pi);
  const std::size_t num_states = mdp.num_states();
  const std::size_t num_actions = mdp.num_actions();
  const ValueVec v = policy_value_exact(mdp, pi);
  const QVec var = sigma_sq(mdp, v);

  const auto n = static_cast<Eigen::Index>(num_states * num_actions);
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd sigma(n);
  for (std::size_t s = 0; s < num_states; ++s) {
    for (std::size_t a = 0; a < num_actions; ++a) {
      const auto row = static_cast<Eigen::Index>(s * num_actions + a);
      sigma(row) = std::sqrt(var(s, a));
      const auto p = mdp.transition(s, a);
      // P^pi couples (s,a) to (s', pi(s')) only.
      for (std::size_t next = 0; next < num_states; ++next) {
        const auto col = static_cast<Eigen::Index>(next * num_actions + pi[next]);
        system(row, col) -= mdp.discount() * p[next];
      }
    }
  }
  const Eigen::VectorXd x = system.partialPivLu().solve(sigma);
  return x.lpNorm<Eigen::Infinity>();
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw PreconditionError("max_abs_diff: length mismatch");
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

}  // namespace qmdp
