#include "qmdp/verify.hpp"

#include <cmath>
#include <sstream>

#include "qmdp/dyadic.hpp"
#include "qmdp/error.hpp"
#include "qmdp/experiment_config.hpp"
#include "qmdp/hard_instances.hpp"
#include "qmdp/random_instances.hpp"
#include "qmdp/solvers.hpp"

namespace qmdp {
namespace {

std::size_t or_default(std::size_t trials, std::size_t fallback) { return trials == 0 ? fallback : trials; }

VerifySummary total_variance(std::size_t trials, std::uint64_t seed) {
  CounterRng rng(derive_seed(seed, {1}));
  VerifyCheck check{"total_variance_norm <= sqrt(2) horizon^1.5", 0, 0};
  const double gammas[] = {0.9, 0.95, 0.99};
  for (std::size_t i = 0; i < trials; ++i) {
    const Mdp mdp = random_mdp(1 + rng.below(8), 1 + rng.below(8), gammas[rng.below(3)], rng);
    const Policy pi = random_policy(mdp, rng);
    const double bound = std::sqrt(2.0) * std::pow(mdp.horizon(), 1.5);
    ++check.total;
    check.passed += total_variance_norm(mdp, pi) <= bound ? 1 : 0;
  }
  return {"total-variance", {check}};
}

VerifySummary oracle_normalization(std::size_t trials, std::uint64_t seed) {
  CounterRng rng(derive_seed(seed, {2}));
  VerifyCheck norm{"amplitudes normalized exactly", 0, 0};
  VerifyCheck squares{"squared amplitudes equal dyadic probabilities", 0, 0};
  VerifyCheck preimages{"preimage counts equal 2^m p", 0, 0};
  for (std::size_t i = 0; i < trials; ++i) {
    const DyadicMdp dm = random_dyadic_mdp(1 + rng.below(6), 1 + rng.below(4), 0.9, 10, rng);
    const QuantumGenerativeState state = build_quantum_oracle(dm);
    ++norm.total;
    norm.passed += state.normalized_exactly() ? 1 : 0;
    for (std::size_t s = 0; s < dm.num_states; ++s) {
      for (std::size_t a = 0; a < dm.num_actions; ++a) {
        const DyadicMdpRow& row = dm.row(s, a);
        bool same = true;
        for (std::size_t next = 0; next < dm.num_states; ++next) {
          const DyadicAmplitude& amp = state.at(s, a)[next];
          same = same && amp.numerator == row.counts[next] && amp.denominator_bits == row.denominator_bits;
        }
        ++squares.total;
        squares.passed += same ? 1 : 0;
        const auto map = build_reversible_map(row);
        ++preimages.total;
        preimages.passed += preimage_counts(map, dm.num_states) == row.counts ? 1 : 0;
      }
    }
  }
  return {"oracle-normalization", {norm, squares, preimages}};
}

HardInstanceSpec arm_gadget(std::size_t A) {
  HardInstanceSpec spec;
  spec.gamma = 0.9;
  spec.num_actions = A;
  spec.eps = 0.5;
  spec.large_arms = {-1};
  return spec;
}

VerifySummary monotone_iterates(std::size_t trials, std::uint64_t seed) {
  const Mdp mdp = copies(arm_gadget(2));
  VerifyCheck mdp1{"solve_mdp1 iterates nondecreasing", 0, 0};
  VerifyCheck mdp2{"solve_mdp2 iterates nondecreasing", 0, 0};
  VerifyCheck dominance{"iterates dominate greedy values", 0, 0};
  SolverConfig s1;
  s1.kind = SolverKind::mdp1;
  s1.eps = 1.0;
  SolverConfig s2 = s1;
  s2.kind = SolverKind::mdp2;
  EstimatorConfig est;
  for (std::size_t i = 0; i < trials; ++i) {
    const auto r1 = run_solver(mdp, s1, est, derive_seed(seed, {3, i}));
    const auto r2 = run_solver(mdp, s2, est, derive_seed(seed, {4, i}));
    ++mdp1.total;
    mdp1.passed += r1.diagnostics.monotone ? 1 : 0;
    ++mdp2.total;
    mdp2.passed += r2.diagnostics.monotone ? 1 : 0;
    dominance.total += 2;
    dominance.passed += (r1.diagnostics.greedy_dominance ? 1 : 0) + (r2.diagnostics.greedy_dominance ? 1 : 0);
  }
  return {"monotone-iterates", {mdp1, mdp2, dominance}};
}

VerifySummary sandwich(std::size_t trials, std::uint64_t seed) {
  VerifySummary out{"sandwich", {}};
  EstimatorConfig est;
  for (std::size_t A : {2u, 8u}) {
    const Mdp mdp = copies(arm_gadget(A));
    const OptimalSolution optimal = exact_value_iteration(mdp, kExactTolerance);
    for (double eps : {0.3, 1.0}) {
      for (SolverKind kind : {SolverKind::mdp1, SolverKind::mdp2}) {
        SolverConfig sc;
        sc.kind = kind;
        sc.eps = eps;
        sc.delta = 0.1;
        std::ostringstream name;
        name << to_string(kind) << " sandwich A=" << A << " eps=" << eps;
        VerifyCheck check{name.str(), 0, 0, 0.9};
        for (std::size_t i = 0; i < trials; ++i) {
          const auto r = run_solver(mdp, sc, est, derive_seed(seed, {5, A, i}));
          ++check.total;
          check.passed += run_succeeded(mdp, r, eps, optimal) ? 1 : 0;
        }
        out.checks.push_back(check);
      }
    }
  }
  return out;
}

VerifySummary gap_checks() {
  VerifyCheck gap{"gap >= 2 eps with c_alpha = 9", 0, 0};
  VerifyCheck promise{"p0 + alpha < 1", 0, 0};
  VerifyCheck closed{"exact values match 1/(1 - gamma p_a)", 0, 0};
  for (double gamma : {0.9, 0.95, 0.99}) {
    for (double eps : {0.1, 0.5, 1.0}) {
      HardInstanceSpec spec;
      spec.gamma = gamma;
      spec.eps = eps;
      spec.num_actions = 3;
      spec.large_arms = {1};
      if (!(eps < spec.horizon() / spec.c_alpha)) {
        continue;
      }
      ++gap.total;
      gap.passed += gap_check(gamma, eps, spec.c_alpha) >= 2.0 * eps ? 1 : 0;
      ++promise.total;
      promise.passed += spec.p0() + spec.alpha() < 1.0 ? 1 : 0;
      const OptimalSolution opt = exact_value_iteration(copies(spec), kExactTolerance);
      const ValueVec expect = hard_instance_values(spec);
      ++closed.total;
      closed.passed += max_abs_diff(opt.values, expect) <= 1e-8 ? 1 : 0;
    }
  }
  VerifyCheck small_constant{"c_alpha = 3 gap at gamma 0.9, eps 1 is 0.8718 (< 2 eps)", 0, 1};
  const double g3 = gap_check(0.9, 1.0, 3.0);
  small_constant.passed = std::abs(g3 - 0.8718) <= 1e-3 && g3 < 2.0 ? 1 : 0;
  return {"gap-checks", {gap, promise, closed, small_constant}};
}

VerifySummary closed_form(std::size_t trials) {
  VerifyCheck check{"exact value iteration matches 1/(1 - gamma p)", 0, 0};
  const double gammas[] = {0.9, 0.95, 0.99};
  for (std::size_t i = 0; i < trials; ++i) {
    const double gamma = gammas[i % 3];
    const double H = 1.0 / (1.0 - gamma);
    const double p0 = 1.0 - 1.0 / H;
    const double alpha = kDefaultGapConstant * 0.1 / (H * H);
    const double ps[] = {0.0, 0.25, 0.5, 0.75, p0, p0 + alpha};
    const double p = ps[(i / 3) % 6];
    const Mdp mdp = two_state(gamma, p);
    const OptimalSolution opt = exact_value_iteration(mdp, kExactTolerance);
    ++check.total;
    check.passed += std::abs(opt.values[0] - source_value(gamma, p)) <= 1e-8 && std::abs(opt.values[1]) <= 1e-8 ? 1 : 0;
  }
  return {"closed-form", {check}};
}

}  // namespace

bool VerifySummary::ok() const {
  for (const auto& c : checks) {
    if (!c.ok()) {
      return false;
    }
  }
  return !checks.empty();
}

nlohmann::json VerifySummary::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& c : checks) {
    list.push_back({{"name", c.name}, {"passed", c.passed}, {"total", c.total},
                    {"required_fraction", c.required_fraction}, {"ok", c.ok()}});
  }
  return {{"suite", suite}, {"checks", std::move(list)}, {"ok", ok()}};
}

std::string VerifySummary::text() const {
  std::ostringstream out;
  for (const auto& c : checks) {
    out << (c.ok() ? "PASS " : "FAIL ") << suite << ": " << c.name << "  " << c.passed << '/' << c.total << '\n';
  }
  return out.str();
}

std::vector<std::string> verify_suite_names() {
  return {"total-variance", "oracle-normalization", "monotone-iterates", "sandwich", "gap-checks", "closed-form"};
}

VerifySummary run_verify_suite(const std::string& suite, std::size_t trials, std::uint64_t seed) {
  if (suite == "total-variance") return total_variance(or_default(trials, 1000), seed);
  if (suite == "oracle-normalization") return oracle_normalization(or_default(trials, 100), seed);
  if (suite == "monotone-iterates") return monotone_iterates(or_default(trials, 50), seed);
  if (suite == "sandwich") return sandwich(or_default(trials, 200), seed);
  if (suite == "gap-checks") return gap_checks();
  if (suite == "closed-form") return closed_form(or_default(trials, 200));
  throw PreconditionError("unknown verify suite '" + suite + "'");
}

}  // namespace qmdp
