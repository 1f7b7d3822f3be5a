#pragma once

#include <cstddef>

#include "qmdp/dyadic.hpp"
#include "qmdp/mdp.hpp"
#include "qmdp/rng.hpp"

namespace qmdp {

/// Rewards uniform on [0,1]; each transition row puts exponential weights on
/// a random non-empty subset of successors, so rows range from point masses
/// to dense distributions.
Mdp random_mdp(std::size_t num_states, std::size_t num_actions, double gamma, CounterRng& rng);

Policy random_policy(const Mdp& mdp, CounterRng& rng);

/// Random rows with integer counts summing to 2^m (a uniformly random
/// composition, built from sorted cut points).
DyadicMdp random_dyadic_mdp(std::size_t num_states, std::size_t num_actions, double gamma,
                            unsigned m, CounterRng& rng);

}  // namespace qmdp
