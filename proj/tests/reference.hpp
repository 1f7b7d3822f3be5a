#pragma once

// Brute-force reference computations used as test oracles. They share no
// code with the library beyond the Mdp accessors.

#include <cmath>
#include <cstddef>
#include <vector>

#include "qmdp/mdp.hpp"

namespace qmdp::ref {

/// v^pi by iterating v <- r_pi + gamma P_pi v until the update is below tol.
inline ValueVec policy_value_by_iteration(const Mdp& mdp, const Policy& pi, double tol = 1e-13) {
  const std::size_t S = mdp.num_states();
  ValueVec v(S, 0.0);
  for (int iter = 0; iter < 1000000; ++iter) {
    ValueVec next(S, 0.0);
    double diff = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      double acc = 0.0;
      for (std::size_t t = 0; t < S; ++t) acc += mdp.probability(s, pi[s], t) * v[t];
      next[s] = mdp.reward(s, pi[s]) + mdp.discount() * acc;
      diff = std::max(diff, std::abs(next[s] - v[s]));
    }
    v = next;
    if (diff <= tol) break;
  }
  return v;
}

/// All deterministic policies, enumerated in mixed radix A.
inline std::vector<Policy> all_policies(const Mdp& mdp) {
  const std::size_t S = mdp.num_states();
  const std::size_t A = mdp.num_actions();
  std::vector<Policy> out;
  Policy pi(S, 0);
  while (true) {
    out.push_back(pi);
    std::size_t i = 0;
    while (i < S && ++pi[i] == A) pi[i++] = 0;
    if (i == S) break;
  }
  return out;
}

/// v* as the entrywise max over every deterministic policy.
inline ValueVec optimal_by_enumeration(const Mdp& mdp) {
  ValueVec best(mdp.num_states(), -1.0);
  for (const Policy& pi : all_policies(mdp)) {
    const ValueVec v = policy_value_by_iteration(mdp, pi);
    for (std::size_t s = 0; s < v.size(); ++s) best[s] = std::max(best[s], v[s]);
  }
  return best;
}

/// E[v^2] - (E v)^2 under p(.|s,a), naive form.
inline double variance(const Mdp& mdp, std::size_t s, std::size_t a, const ValueVec& v) {
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t t = 0; t < mdp.num_states(); ++t) {
    m1 += mdp.probability(s, a, t) * v[t];
    m2 += mdp.probability(s, a, t) * v[t] * v[t];
  }
  return std::max(0.0, m2 - m1 * m1);
}

/// || sum_t (gamma P^pi)^t sigma(v^pi) ||_inf by truncated Neumann series over
/// state-action pairs.
inline double total_variance_by_series(const Mdp& mdp, const Policy& pi) {
  const std::size_t S = mdp.num_states();
  const std::size_t A = mdp.num_actions();
  const ValueVec v = policy_value_by_iteration(mdp, pi);
  std::vector<double> sigma(S * A);
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t a = 0; a < A; ++a) sigma[s * A + a] = std::sqrt(variance(mdp, s, a, v));
  std::vector<double> x = sigma;
  for (int iter = 0; iter < 1000000; ++iter) {
    std::vector<double> next(S * A);
    double diff = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t a = 0; a < A; ++a) {
        double acc = 0.0;
        for (std::size_t t = 0; t < S; ++t) acc += mdp.probability(s, a, t) * x[t * A + pi[t]];
        next[s * A + a] = sigma[s * A + a] + mdp.discount() * acc;
        diff = std::max(diff, std::abs(next[s * A + a] - x[s * A + a]));
      }
    }
    x = next;
    if (diff <= 1e-12) break;
  }
  double m = 0.0;
  for (double e : x) m = std::max(m, e);
  return m;
}

}  // namespace qmdp::ref
