#include "qmdp/random_instances.hpp"

#include <algorithm>
#include <cmath>

#include "qmdp/error.hpp"

namespace qmdp {

Mdp random_mdp(std::size_t num_states, std::size_t num_actions, double gamma, CounterRng& rng) {
  if (num_states == 0 || num_actions == 0) {
    throw PreconditionError("random_mdp: S and A must be positive");
  }
  const std::size_t S = num_states;
  const std::size_t A = num_actions;
  std::vector<double> rewards(S * A);
  std::vector<double> transitions(S * A * S, 0.0);
  for (auto& r : rewards) {
    r = rng.uniform();
  }
  for (std::size_t sa = 0; sa < S * A; ++sa) {
    double* row = transitions.data() + sa * S;
    const std::size_t support = 1 + rng.below(S);
    double total = 0.0;
    for (std::size_t i = 0; i < support; ++i) {
      const std::size_t next = rng.below(S);
      const double w = -std::log(rng.uniform_open());
      row[next] += w;
      total += w;
    }
    for (std::size_t next = 0; next < S; ++next) {
      row[next] /= total;
    }
  }
  return Mdp(S, A, gamma, std::move(rewards), std::move(transitions));
}

Policy random_policy(const Mdp& mdp, CounterRng& rng) {
  Policy pi(mdp.num_states());
  for (auto& a : pi) {
    a = rng.below(mdp.num_actions());
  }
  return pi;
}

DyadicMdp random_dyadic_mdp(std::size_t num_states, std::size_t num_actions, double gamma,
                            unsigned m, CounterRng& rng) {
  if (m > kMaxDyadicBits) {
    throw PreconditionError("random_dyadic_mdp: m too large");
  }
  const std::uint64_t scale = std::uint64_t{1} << m;
  DyadicMdp out{num_states, num_actions, gamma, std::vector<double>(num_states * num_actions), {}, 0.0};
  for (auto& r : out.rewards) {
    r = rng.uniform();
  }
  for (std::size_t sa = 0; sa < num_states * num_actions; ++sa) {
    std::vector<std::uint64_t> cuts(num_states - 1);
    for (auto& c : cuts) {
      c = rng.below(scale + 1);
    }
    std::sort(cuts.begin(), cuts.end());
    DyadicMdpRow row{m, std::vector<std::uint64_t>(num_states)};
    std::uint64_t prev = 0;
    for (std::size_t i = 0; i + 1 < num_states; ++i) {
      row.counts[i] = cuts[i] - prev;
      prev = cuts[i];
    }
    row.counts[num_states - 1] = scale - prev;
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace qmdp
