#include "qmdp/sample_oracle.hpp"

#include <random>
#include <string>

#include "qmdp/error.hpp"

namespace qmdp {
namespace {

constexpr std::uint64_t kLiteralDrawLimit = 64;

std::size_t inverse_cdf(std::span<const double> p, double u) {
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) {
      continue;
    }
    acc += p[i];
    last_positive = i;
    if (u < acc) {
      return i;
    }
  }
  // Rounding can leave the cumulative sum a hair below 1.
  return last_positive;
}

}  // namespace

SampleOracle::SampleOracle(const Mdp& mdp, std::uint64_t seed)
    : mdp_(&mdp), seed_(seed), rng_(derive_seed(seed, {})) {}

void SampleOracle::check_pair(std::size_t s, std::size_t a) const {
  if (s >= mdp_->num_states() || a >= mdp_->num_actions()) {
    throw PreconditionError("SampleOracle: (s, a) = (" + std::to_string(s) + ", " +
                            std::to_string(a) + ") out of range");
  }
}

std::size_t SampleOracle::sample(std::size_t s, std::size_t a) {
  check_pair(s, a);
  ledger_.charge_classical(1);
  return inverse_cdf(mdp_->transition(s, a), rng_.uniform());
}

std::vector<std::uint64_t> SampleOracle::sample_counts(std::size_t s, std::size_t a,
                                                       std::uint64_t n) {
  check_pair(s, a);
  const auto p = mdp_->transition(s, a);
  std::vector<std::uint64_t> counts(p.size(), 0);
  ledger_.charge_classical(n);
  if (n <= kLiteralDrawLimit) {
    for (std::uint64_t i = 0; i < n; ++i) {
      ++counts[inverse_cdf(p, rng_.uniform())];
    }
    return counts;
  }
  std::uint64_t remaining = n;
  double mass = 1.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) {
      last_positive = i;
    }
  }
  for (std::size_t i = 0; i < p.size() && remaining > 0; ++i) {
    if (p[i] <= 0.0) {
      continue;
    }
    if (i == last_positive || p[i] >= mass) {
      counts[i] += remaining;
      remaining = 0;
      break;
    }
    std::binomial_distribution<long long> draw(static_cast<long long>(remaining), p[i] / mass);
    const auto k = static_cast<std::uint64_t>(draw(rng_));
    counts[i] = k;
    remaining -= k;
    mass -= p[i];
  }
  return counts;
}

double SampleOracle::sample_mean(std::size_t s, std::size_t a, std::span<const double> v,
                                 std::uint64_t n) {
  if (v.size() != mdp_->num_states()) {
    throw PreconditionError("SampleOracle::sample_mean: value map must have length S");
  }
  if (n == 0) {
    throw PreconditionError("SampleOracle::sample_mean: need at least one sample");
  }
  const auto counts = sample_counts(s, a, n);
  long double acc = 0.0L;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    acc += static_cast<long double>(counts[i]) * v[i];
  }
  return static_cast<double>(acc / static_cast<long double>(n));
}

void SampleOracle::select_stream(std::initializer_list<std::uint64_t> path) noexcept {
  rng_ = CounterRng(derive_seed(seed_, path));
}

SampleOracle SampleOracle::child(std::initializer_list<std::uint64_t> path) const {
  return SampleOracle(*mdp_, derive_seed(seed_, path));
}

}  // namespace qmdp
