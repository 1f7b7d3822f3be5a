#include "qmdp/rng.hpp"

namespace qmdp {

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = splitmix64(seed ^ 0x6A09E667F3BCC909ULL);
  for (std::uint64_t p : path) {
    h = splitmix64(h ^ splitmix64(p + 0x3C6EF372FE94F82BULL));
  }
  return h;
}

std::size_t CounterRng::below(std::size_t n) noexcept {
  // Rejection on the top of the range keeps the draw unbiased.
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = max() - (max() % bound);
  std::uint64_t x = (*this)();
  while (x >= limit) {
    x = (*this)();
  }
  return static_cast<std::size_t>(x % bound);
}

}  // namespace qmdp
