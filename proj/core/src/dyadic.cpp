#include "qmdp/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qmdp/error.hpp"
#include "qmdp/mdp_io.hpp"

namespace qmdp {
namespace {

void check_bits(unsigned m) {
  if (m > kMaxDyadicBits) {
    throw PreconditionError("dyadic: m = " + std::to_string(m) + " exceeds the supported maximum " +
                            std::to_string(kMaxDyadicBits));
  }
}

}  // namespace

void DyadicMdpRow::validate() const {
  check_bits(denominator_bits);
  const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (total != (std::uint64_t{1} << denominator_bits)) {
    throw PreconditionError("dyadic row: counts sum to " + std::to_string(total) + ", expected 2^" +
                            std::to_string(denominator_bits));
  }
}

double DyadicMdpRow::probability(std::size_t next) const {
  return std::ldexp(static_cast<double>(counts.at(next)), -static_cast<int>(denominator_bits));
}

std::vector<std::size_t> build_reversible_map(const DyadicMdpRow& row) {
  row.validate();
  std::vector<std::size_t> map;
  map.reserve(std::size_t{1} << row.denominator_bits);
  for (std::size_t next = 0; next < row.counts.size(); ++next) {
    map.insert(map.end(), row.counts[next], next);
  }
  return map;
}

std::vector<std::uint64_t> preimage_counts(std::span<const std::size_t> map, std::size_t num_states) {
  std::vector<std::uint64_t> counts(num_states, 0);
  for (std::size_t next : map) {
    if (next >= num_states) {
      throw PreconditionError("preimage_counts: map value out of range");
    }
    ++counts[next];
  }
  return counts;
}

DyadicMdpRow quantize_row(std::span<const double> probabilities, unsigned m) {
  check_bits(m);
  double total = 0.0;
  std::size_t nonzero = 0;
  for (double p : probabilities) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw PreconditionError("quantize_row: probabilities must lie in [0, 1]");
    }
    total += p;
    nonzero += p > 0.0 ? 1 : 0;
  }
  if (std::abs(total - 1.0) > Mdp::kRowSumTolerance) {
    throw PreconditionError("quantize_row: probabilities must sum to 1");
  }
  const std::uint64_t scale = std::uint64_t{1} << m;
  if (nonzero > scale) {
    throw PreconditionError("quantize_row: m = " + std::to_string(m) + " cannot represent " +
                            std::to_string(nonzero) + " nonzero entries");
  }

  DyadicMdpRow row{m, std::vector<std::uint64_t>(probabilities.size(), 0)};
  std::vector<double> remainder(probabilities.size());
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const double scaled = std::ldexp(probabilities[i], static_cast<int>(m));
    const double whole = std::floor(scaled);
    row.counts[i] = static_cast<std::uint64_t>(whole);
    remainder[i] = scaled - whole;
    assigned += row.counts[i];
  }
  if (assigned > scale) {
    throw InternalError("quantize_row: floor counts exceed 2^m");
  }
  std::vector<std::size_t> order(probabilities.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return remainder[x] > remainder[y]; });
  std::uint64_t deficit = scale - assigned;
  for (std::size_t i = 0; deficit > 0; i = (i + 1) % order.size()) {
    ++row.counts[order[i]];
    --deficit;
  }
  return row;
}

Mdp DyadicMdp::to_mdp() const {
  std::vector<double> transitions;
  transitions.reserve(rows.size() * num_states);
  for (const auto& r : rows) {
    for (std::size_t next = 0; next < r.counts.size(); ++next) {
      transitions.push_back(r.probability(next));
    }
  }
  return Mdp(num_states, num_actions, discount, rewards, std::move(transitions));
}

DyadicMdp quantize_mdp(const Mdp& mdp, unsigned m) {
  DyadicMdp out{mdp.num_states(), mdp.num_actions(), mdp.discount(), mdp.rewards(), {}, 0.0};
  out.rows.reserve(mdp.num_states() * mdp.num_actions());
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
      const auto p = mdp.transition(s, a);
      DyadicMdpRow row = quantize_row(p, m);
      for (std::size_t next = 0; next < p.size(); ++next) {
        out.max_distortion = std::max(out.max_distortion, std::abs(row.probability(next) - p[next]));
      }
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

DyadicMdp dyadic_from_exact(const Mdp& mdp, unsigned m) {
  DyadicMdp out = quantize_mdp(mdp, m);
  if (out.max_distortion != 0.0) {
    throw PreconditionError("MDP is not dyadic at m = " + std::to_string(m) +
                            " bits; quantize it explicitly (max distortion would be " +
                            std::to_string(out.max_distortion) + ")");
  }
  return out;
}

bool QuantumGenerativeState::normalized_exactly() const {
  for (const auto& row : amplitudes) {
    if (row.empty()) {
      return false;
    }
    const unsigned m = row.front().denominator_bits;
    std::uint64_t total = 0;
    for (const auto& amp : row) {
      if (amp.denominator_bits != m) {
        return false;
      }
      total += amp.numerator;
    }
    if (total != (std::uint64_t{1} << m)) {
      return false;
    }
  }
  return true;
}

QuantumGenerativeState build_quantum_oracle(const DyadicMdp& mdp) {
  if (mdp.rows.size() != mdp.num_states * mdp.num_actions) {
    throw PreconditionError("build_quantum_oracle: expected S*A dyadic rows");
  }
  QuantumGenerativeState state{mdp.num_states, mdp.num_actions, {}};
  state.amplitudes.reserve(mdp.rows.size());
  for (const auto& row : mdp.rows) {
    if (row.counts.size() != mdp.num_states) {
      throw PreconditionError("build_quantum_oracle: dyadic row must have S entries");
    }
    const auto map = build_reversible_map(row);
    const auto preimages = preimage_counts(map, mdp.num_states);
    std::vector<DyadicAmplitude> amps;
    amps.reserve(mdp.num_states);
    for (std::uint64_t k : preimages) {
      const double value = std::sqrt(std::ldexp(static_cast<double>(k), -static_cast<int>(row.denominator_bits)));
      amps.push_back({k, row.denominator_bits, value});
    }
    state.amplitudes.push_back(std::move(amps));
  }
  if (!state.normalized_exactly()) {
    throw InternalError("build_quantum_oracle: amplitudes are not normalized");
  }
  return state;
}

nlohmann::json dyadic_mdp_to_json(const DyadicMdp& mdp) {
  nlohmann::json doc = mdp_to_json(mdp.to_mdp());
  nlohmann::json counts = nlohmann::json::array();
  for (std::size_t s = 0; s < mdp.num_states; ++s) {
    nlohmann::json block = nlohmann::json::array();
    for (std::size_t a = 0; a < mdp.num_actions; ++a) {
      block.push_back(mdp.row(s, a).counts);
    }
    counts.push_back(std::move(block));
  }
  doc["m"] = mdp.rows.empty() ? 0u : mdp.rows.front().denominator_bits;
  doc["counts"] = std::move(counts);
  doc["quantization"] = {{"max_distortion", mdp.max_distortion}};
  return doc;
}

nlohmann::json quantum_oracle_to_json(const QuantumGenerativeState& state) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t s = 0; s < state.num_states; ++s) {
    for (std::size_t a = 0; a < state.num_actions; ++a) {
      nlohmann::json amps = nlohmann::json::array();
      for (const auto& amp : state.at(s, a)) {
        amps.push_back({{"k", amp.numerator}, {"m", amp.denominator_bits}, {"amplitude", amp.value}});
      }
      rows.push_back({{"s", s}, {"a", a}, {"amplitudes", std::move(amps)}});
    }
  }
  return {{"S", state.num_states}, {"A", state.num_actions}, {"rows", std::move(rows)}};
}

}  // namespace qmdp
