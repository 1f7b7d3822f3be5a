#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "qmdp/dyadic.hpp"
#include "qmdp/error.hpp"
#include "qmdp/hard_instances.hpp"
#include "qmdp/ledger.hpp"
#include "qmdp/random_instances.hpp"
#include "qmdp/sample_oracle.hpp"

using namespace qmdp;

namespace {

std::uint64_t phase_sum(const QueryLedger& l) {
  std::uint64_t t = 0;
  for (const auto& [label, n] : l.phases()) t += n;
  return t;
}

}  // namespace

TEST(SampleOracle, DeterministicRowAlwaysHitsSuccessor) {
  const Mdp mdp = two_state(0.9, 1.0);
  SampleOracle oracle(mdp, 5);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(oracle.sample(0, 0), 0u);
  EXPECT_EQ(oracle.ledger().classical_samples(), 100u);
  EXPECT_EQ(oracle.ledger().quantum_oracle_calls(), 0u);
}

TEST(SampleOracle, FairRowFrequency) {
  const Mdp mdp = two_state(0.9, 0.5);
  SampleOracle oracle(mdp, 2024);
  int zeros = 0;
  for (int i = 0; i < 10000; ++i) zeros += oracle.sample(0, 0) == 0 ? 1 : 0;
  EXPECT_NEAR(zeros / 10000.0, 0.5, 0.02);
}

TEST(SampleOracle, EqualSeedsGiveEqualSequences) {
  const Mdp mdp = two_state(0.9, 0.3);
  SampleOracle a(mdp, 99), b(mdp, 99), c(mdp, 100);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t x = a.sample(0, 0);
    EXPECT_EQ(x, b.sample(0, 0));
    differs |= x != c.sample(0, 0);
  }
  EXPECT_TRUE(differs);
}

TEST(SampleOracle, SelectStreamReplays) {
  const Mdp mdp = two_state(0.9, 0.5);
  SampleOracle oracle(mdp, 1);
  oracle.select_stream({3, 1, 4});
  std::vector<std::size_t> first;
  for (int i = 0; i < 50; ++i) first.push_back(oracle.sample(0, 0));
  oracle.select_stream({2});
  oracle.sample(0, 0);
  oracle.select_stream({3, 1, 4});
  for (int i = 0; i < 50; ++i) EXPECT_EQ(oracle.sample(0, 0), first[i]);
}

TEST(SampleOracle, ChildHasFreshLedgerAndDifferentStream) {
  const Mdp mdp = two_state(0.9, 0.5);
  SampleOracle parent(mdp, 1);
  parent.sample(0, 0);
  SampleOracle child = parent.child({7});
  EXPECT_EQ(child.ledger().total(), 0u);
  EXPECT_NE(child.seed(), parent.seed());
}

TEST(SampleOracle, CountsMatchMultinomialMoments) {
  CounterRng rng(3);
  const Mdp mdp = random_mdp(6, 1, 0.9, rng);
  SampleOracle oracle(mdp, 8);
  const std::uint64_t n = 1000000;
  const auto counts = oracle.sample_counts(0, 0, n);
  EXPECT_EQ(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}), n);
  EXPECT_EQ(oracle.ledger().classical_samples(), n);
  for (std::size_t t = 0; t < 6; ++t) {
    const double p = mdp.probability(0, 0, t);
    const double sd = std::sqrt(n * p * (1 - p));
    EXPECT_NEAR(static_cast<double>(counts[t]), n * p, 6.0 * sd + 1e-9);
  }
}

TEST(SampleOracle, RejectsOutOfRange) {
  const Mdp mdp = two_state(0.9, 0.5);
  SampleOracle oracle(mdp, 1);
  EXPECT_THROW(oracle.sample(2, 0), PreconditionError);
  EXPECT_THROW(oracle.sample(0, 1), PreconditionError);
}

TEST(Ledger, PhasesConserveTotals) {
  QueryLedger l;
  l.charge_classical(5);
  {
    PhaseScope scope(l, "epoch-1-line-8");
    l.charge_quantum(7);
    {
      PhaseScope inner(l, "line-6");
      l.charge_quantum(11);
    }
    EXPECT_EQ(l.phase(), "epoch-1-line-8");
  }
  EXPECT_EQ(l.phase(), QueryLedger::kDefaultPhase);
  EXPECT_EQ(l.total(), 23u);
  EXPECT_EQ(phase_sum(l), l.total());
  EXPECT_EQ(l.phases().at("line-6"), 11u);
}

TEST(Ledger, MergeIsCommutativeAssociative) {
  QueryLedger a, b, c;
  a.charge_classical(1);
  b.set_phase("x");
  b.charge_quantum(2);
  c.set_phase("y");
  c.charge_classical(3);
  c.charge_quantum(4);
  QueryLedger ab = a;
  ab.merge(b);
  QueryLedger ba = b;
  ba.merge(a);
  EXPECT_EQ(ab.to_json(), ba.to_json());
  QueryLedger ab_c = ab;
  ab_c.merge(c);
  QueryLedger bc = b;
  bc.merge(c);
  QueryLedger a_bc = a;
  a_bc.merge(bc);
  EXPECT_EQ(ab_c.to_json(), a_bc.to_json());
  EXPECT_EQ(phase_sum(ab_c), ab_c.total());
  EXPECT_EQ(QueryLedger::from_json(ab_c.to_json()), ab_c);
}

TEST(Ledger, OverflowIsRejected) {
  QueryLedger l;
  l.charge_quantum(std::numeric_limits<std::uint64_t>::max() - 1);
  EXPECT_ANY_THROW(l.charge_quantum(5));
}

TEST(Dyadic, ReversibleMapExamples) {
  DyadicMdpRow r1{1, {1, 1}};
  EXPECT_EQ(build_reversible_map(r1), (std::vector<std::size_t>{0, 1}));
  DyadicMdpRow r2{2, {3, 1}};
  EXPECT_EQ(build_reversible_map(r2), (std::vector<std::size_t>{0, 0, 0, 1}));
  DyadicMdpRow r0{0, {1}};
  EXPECT_EQ(build_reversible_map(r0), (std::vector<std::size_t>{0}));
  DyadicMdpRow bad{2, {3, 2}};
  EXPECT_THROW(build_reversible_map(bad), PreconditionError);
}

TEST(Dyadic, PreimageCountsHoldOnRandomRows) {
  CounterRng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const DyadicMdp d = random_dyadic_mdp(1 + rng.below(6), 1 + rng.below(3), 0.9, 10, rng);
    for (const DyadicMdpRow& row : d.rows) {
      const auto map = build_reversible_map(row);
      ASSERT_EQ(map.size(), 1024u);
      EXPECT_EQ(preimage_counts(map, d.num_states), row.counts);
    }
  }
}

TEST(Dyadic, QuantizeExamples) {
  EXPECT_EQ(quantize_row(std::vector<double>{0.5, 0.5}, 1).counts, (std::vector<std::uint64_t>{1, 1}));
  EXPECT_EQ(quantize_row(std::vector<double>{1.0 / 3.0, 2.0 / 3.0}, 4).counts,
            (std::vector<std::uint64_t>{5, 11}));
  for (unsigned m : {0u, 3u, 20u}) {
    EXPECT_EQ(quantize_row(std::vector<double>{1.0, 0.0}, m).counts,
              (std::vector<std::uint64_t>{std::uint64_t{1} << m, 0}));
  }
}

TEST(Dyadic, QuantizationDistortionShrinks) {
  CounterRng rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const Mdp mdp = random_mdp(8, 3, 0.9, rng);
    const DyadicMdp coarse = quantize_mdp(mdp, 8);
    const DyadicMdp fine = quantize_mdp(mdp, 16);
    EXPECT_LE(coarse.max_distortion, 8.0 * std::ldexp(1.0, -8));
    EXPECT_LE(fine.max_distortion, 8.0 * std::ldexp(1.0, -16));
    EXPECT_GE(coarse.max_distortion, 64.0 * fine.max_distortion);
    for (const DyadicMdpRow& row : fine.rows) {
      EXPECT_EQ(std::accumulate(row.counts.begin(), row.counts.end(), std::uint64_t{0}),
                std::uint64_t{1} << 16);
    }
  }
}

TEST(Dyadic, ExactReadRejectsRounding) {
  EXPECT_NO_THROW(dyadic_from_exact(two_state(0.9, 0.25), 2));
  EXPECT_THROW(dyadic_from_exact(two_state(0.9, 0.3), 4), PreconditionError);
}

TEST(QuantumOracle, AmplitudesForThreeQuarters) {
  const Mdp mdp = two_state(0.9, 0.75);
  const QuantumGenerativeState q = build_quantum_oracle(dyadic_from_exact(mdp, 2));
  const auto& row = q.at(0, 0);
  EXPECT_NEAR(row[0].value, std::sqrt(0.75), 1e-15);
  EXPECT_NEAR(row[1].value, 0.5, 1e-15);
  EXPECT_EQ(row[0].numerator, 3u);
  EXPECT_EQ(row[1].numerator, 1u);
  // Sink row is a point mass.
  EXPECT_EQ(q.at(1, 0)[1].numerator, 4u);
  EXPECT_EQ(q.at(1, 0)[1].value, 1.0);
  EXPECT_EQ(q.at(1, 0)[0].value, 0.0);
  EXPECT_TRUE(q.normalized_exactly());
}

TEST(QuantumOracle, SquaredAmplitudesReproduceCountsExactly) {
  CounterRng rng(47);
  for (int trial = 0; trial < 30; ++trial) {
    const DyadicMdp d = random_dyadic_mdp(1 + rng.below(5), 1 + rng.below(3), 0.9, 10, rng);
    const QuantumGenerativeState q = build_quantum_oracle(d);
    EXPECT_TRUE(q.normalized_exactly());
    for (std::size_t s = 0; s < d.num_states; ++s) {
      for (std::size_t a = 0; a < d.num_actions; ++a) {
        std::uint64_t total = 0;
        for (std::size_t t = 0; t < d.num_states; ++t) {
          const DyadicAmplitude& amp = q.at(s, a)[t];
          EXPECT_EQ(amp.denominator_bits, 10u);
          EXPECT_EQ(amp.numerator, d.row(s, a).counts[t]);
          EXPECT_NEAR(amp.value * amp.value, d.row(s, a).probability(t), 1e-15);
          total += amp.numerator;
        }
        EXPECT_EQ(total, 1024u);
      }
    }
  }
}
