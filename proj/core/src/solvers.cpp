#include "qmdp/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qmdp/error.hpp"

namespace qmdp {
namespace {

// Stream tags: every estimate draws from derive_seed(seed, {tag, ...}).
enum : std::uint64_t {
  kTagVarianceSquare = 1,
  kTagVarianceMean = 2,
  kTagAnchor = 3,
  kTagIncrement = 4,
  kTagMdp2Estimate = 5,
  kTagMdp2Argmax = 6,
  kTagBaselineEstimate = 7,
  kTagBaselineArgmax = 8,
};

// ceil() that ignores representation noise: 1/(1-0.9) is 10.000000000000002,
// and an iteration count must not jump by one because of it.
double snapped_ceil(double x) {
  return std::ceil(x - 1e-9 * std::max(1.0, std::abs(x)));
}

std::size_t iteration_count(double horizon, double eps) {
  return static_cast<std::size_t>(
      snapped_ceil(horizon * snapped_ceil(std::log(4.0 * horizon / eps)) + 1.0));
}

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw PreconditionError("solver: delta must lie in (0, 1)");
  }
}

// Copies `v` clamped into [lo, hi], counting the entries that moved.
ValueVec clamped(const ValueVec& v, double lo, double hi, std::uint64_t& clamps) {
  ValueVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::clamp(v[i], lo, hi);
    clamps += out[i] != v[i] ? 1 : 0;
  }
  return out;
}

std::string where(std::size_t k, std::size_t l, std::size_t s, std::size_t a) {
  return " (k=" + std::to_string(k) + ", l=" + std::to_string(l) + ", s=" + std::to_string(s) +
         ", a=" + std::to_string(a) + ")";
}

template <typename Fn>
MeanEstimate with_context(Fn&& fn, std::size_t k, std::size_t l, std::size_t s, std::size_t a) {
  try {
    return fn();
  } catch (const PreconditionError& e) {
    throw PreconditionError(e.what() + where(k, l, s, a));
  }
}

// Lowest-index argmax of a row.
std::size_t row_argmax(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < row.size(); ++i) {
    if (row[i] > row[best]) {
      best = i;
    }
  }
  return best;
}

std::uint64_t argmax_probes(std::size_t num_actions, double delta, double c_max) {
  if (num_actions == 1) {
    return 1;
  }
  return static_cast<std::uint64_t>(std::ceil(
      c_max * std::sqrt(static_cast<double>(num_actions)) * std::log2(1.0 / delta)));
}

struct ArgmaxOutcome {
  std::size_t index = 0;
  bool failed = false;
};

// Maximum finding over one row of an estimated Q-oracle. Every probe of the
// row costs one qest1 call's worth of queries, because the oracle for the
// row is itself built from mean estimation.
ArgmaxOutcome quantum_argmax(std::span<const double> values, ArgmaxBackend backend, double f,
                             double delta, double c_max, std::uint64_t per_probe,
                             CounterRng& rng, QueryLedger& ledger) {
  const std::size_t best = row_argmax(values);
  ArgmaxOutcome out{best, false};
  if (values.size() == 1) {
    ledger.charge_quantum(per_probe);
    return out;
  }
  if (backend == ArgmaxBackend::statevector) {
    const MaxFindingResult r = qargmax_simulate(values, f, rng, c_max, nullptr);
    ledger.charge_quantum(std::max<std::uint64_t>(r.trace.grover_queries_charged, 1) * per_probe);
    out.index = r.index;
  } else {
    ledger.charge_quantum(argmax_probes(values.size(), delta, c_max) * per_probe);
    if (rng.uniform() < f) {
      const std::size_t other = rng.below(values.size() - 1);
      out.index = other >= best ? other + 1 : other;
    }
  }
  out.failed = values[out.index] < values[best];
  return out;
}

void monotone_step(const ValueVec& before, const ValueVec& after, SolveDiagnostics& diag) {
  for (std::size_t s = 0; s < before.size(); ++s) {
    if (after[s] < before[s]) {
      diag.monotone = false;
    }
  }
}

void record_snapshot(bool enabled, std::size_t iteration, const ValueVec& v, const Policy& pi,
                     SolveDiagnostics& diag) {
  if (enabled) {
    diag.snapshots.push_back({iteration, v, pi});
  }
}

SolveReport start_report(const char* solver, const SampleOracle& oracle, nlohmann::json params,
                         const EstimatorConfig& cfg) {
  SolveReport report;
  report.solver = solver;
  report.seed = oracle.seed();
  report.params = std::move(params);
  report.estimator = cfg.to_json();
  return report;
}

}  // namespace

void SolveParams1::derive(const Mdp& mdp) {
  check_delta(delta);
  const double H = mdp.horizon();
  if (!(eps > 0.0 && eps <= std::sqrt(H) * (1.0 + 1e-12))) {
    throw PreconditionError("solve_mdp1: eps must lie in (0, sqrt(horizon)] = (0, " +
                            std::to_string(std::sqrt(H)) + "]");
  }
  if (!(b > 0.0) || !(c > 0.0)) {
    throw PreconditionError("solve_mdp1: b and c must be positive");
  }
  K = static_cast<std::size_t>(std::max(1.0, snapped_ceil(std::log2(H / eps))));
  L = iteration_count(H, eps);
  f = delta / (4.0 * static_cast<double>(K * L * mdp.num_states() * mdp.num_actions()));
}

nlohmann::json SolveParams1::to_json() const {
  return {{"eps", eps}, {"delta", delta}, {"b", b}, {"c", c}, {"K", K}, {"L", L}, {"f", f}};
}

void SolveParams2::derive(const Mdp& mdp) {
  check_delta(delta);
  const double H = mdp.horizon();
  if (!(eps > 0.0 && eps <= H)) {
    throw PreconditionError("solve_mdp2: eps must lie in (0, horizon]");
  }
  if (!(c_max > 0.0)) {
    throw PreconditionError("solve_mdp2: c_max must be positive");
  }
  L = iteration_count(H, eps);
  const double A = static_cast<double>(mdp.num_actions());
  f = delta / (4.0 * c_max * static_cast<double>(L * mdp.num_states()) * std::pow(A, 1.5) *
               std::log2(1.0 / delta));
  if (!(f > 0.0 && f < 1.0)) {
    throw PreconditionError("solve_mdp2: derived failure probability f is outside (0, 1)");
  }
  if (argmax_backend == ArgmaxBackend::statevector && mdp.num_actions() > 64) {
    throw PreconditionError("solve_mdp2: statevector maximum finding supports at most 64 actions");
  }
}

nlohmann::json SolveParams2::to_json() const {
  return {{"eps", eps},
          {"delta", delta},
          {"c_max", c_max},
          {"argmax_backend", argmax_backend == ArgmaxBackend::statevector ? "statevector" : "contract_mock"},
          {"L", L},
          {"f", f}};
}

std::string to_string(BaselineMode mode) {
  switch (mode) {
    case BaselineMode::classical:
      return "classical";
    case BaselineMode::quantum_mean:
      return "quantum_mean";
    case BaselineMode::quantum_mean_and_max:
      return "quantum_mean_and_max";
  }
  return "unknown";
}

BaselineMode baseline_mode_from_string(const std::string& name) {
  for (auto m : {BaselineMode::classical, BaselineMode::quantum_mean, BaselineMode::quantum_mean_and_max}) {
    if (to_string(m) == name) {
      return m;
    }
  }
  throw PreconditionError("unknown baseline mode '" + name + "'");
}

void BaselineParams::derive(const Mdp& mdp) {
  check_delta(delta);
  const double H = mdp.horizon();
  if (!(eps > 0.0 && eps <= H)) {
    throw PreconditionError("standard_sampled_vi: eps must lie in (0, horizon]");
  }
  iterations = static_cast<std::size_t>(snapped_ceil(H * std::log(4.0 * H / eps))) + 1;
  per_estimate_delta =
      delta / static_cast<double>(iterations * mdp.num_states() * mdp.num_actions());
}

nlohmann::json BaselineParams::to_json() const {
  return {{"eps", eps},
          {"delta", delta},
          {"mode", to_string(mode)},
          {"c_max", c_max},
          {"iterations", iterations},
          {"per_estimate_delta", per_estimate_delta}};
}

SolveReport solve_mdp1(SampleOracle& oracle, SolveParams1 params, const EstimatorConfig& cfg) {
  cfg.validate();
  const Mdp& mdp = oracle.mdp();
  params.derive(mdp);
  const std::size_t S = mdp.num_states();
  const std::size_t A = mdp.num_actions();
  const double gamma = mdp.discount();
  const double H = mdp.horizon();
  const double b = params.b;
  const double c = params.c;
  const double f = params.f;

  SolveReport report = start_report("solve_mdp1", oracle, params.to_json(), cfg);
  SolveDiagnostics& diag = report.diagnostics;
  QueryLedger& ledger = oracle.ledger();

  ValueVec v(S, 0.0);
  Policy pi(S, 0);
  QVec q(S, A, 0.0);
  QVec y(S, A);
  QVec x(S, A);
  auto note = [&](const MeanEstimate& e) {
    if (!e.within_radius) {
      ++diag.estimator_failures;
    }
    if (e.promise_violated) {
      ++diag.variance_promise_violations;
    }
  };
  record_snapshot(params.record_snapshots, 0, v, pi, diag);

  for (std::size_t k = 1; k <= params.K; ++k) {
    const double eps_k = H / std::ldexp(1.0, static_cast<int>(k));
    const std::string epoch = "epoch-" + std::to_string(k);
    const ValueVec v0 = v;
    const ValueVec v0c = clamped(v0, 0.0, H, diag.promise_clamps);
    ValueVec v0sq(S);
    for (std::size_t i = 0; i < S; ++i) {
      v0sq[i] = v0c[i] * v0c[i];
    }

    // y_k ~ sigma^2(v_{k,0}) from a second moment and a squared mean.
    {
      PhaseScope phase(ledger, epoch + "-line-8");
      const QVec exact_var = sigma_sq(mdp, v0);
      for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t a = 0; a < A; ++a) {
          oracle.select_stream({kTagVarianceSquare, k, 0, s, a});
          const MeanEstimate second = with_context(
              [&] { return qest1(oracle, s, a, v0sq, H * H, b, f, cfg); }, k, 0, s, a);
          oracle.select_stream({kTagVarianceMean, k, 0, s, a});
          const MeanEstimate mean = with_context(
              [&] { return qest1(oracle, s, a, v0c, H, (1.0 - gamma) * b, f, cfg); }, k, 0, s, a);
          note(second);
          note(mean);
          y(s, a) = std::max(second.value - mean.value * mean.value, 0.0);
          const double gap = std::abs(y(s, a) - exact_var(s, a));
          diag.max_variance_gap = std::max(diag.max_variance_gap, gap);
          if (gap > 3.0 * b + std::pow((1.0 - gamma) * b, 2) + 1e-9) {
            diag.variance_within_3b = false;
          }
        }
      }
    }

    // One-sided anchor x_k <= P v_{k,0}, accuracy scaled by sigma.
    {
      PhaseScope phase(ledger, epoch + "-line-9");
      for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t a = 0; a < A; ++a) {
          const double sigma = std::sqrt(y(s, a) + b);
          const double err = c * std::pow(1.0 - gamma, 1.5) * params.eps * sigma;
          if (!(err < 4.0 * sigma)) {
            throw InternalError("solve_mdp1: line-9 error bound violates eps < 4 sigma" + where(k, 0, s, a));
          }
          oracle.select_stream({kTagAnchor, k, 0, s, a});
          const MeanEstimate e = with_context(
              [&] { return qest2(oracle, s, a, v0, sigma, err, f, cfg); }, k, 0, s, a);
          note(e);
          x(s, a) = e.value - err;
        }
      }
    }

    for (std::size_t l = 1; l <= params.L; ++l) {
      // Accept the greedy value only where it does not decrease.
      const Greedy g = greedy(q);
      const ValueVec before = v;
      for (std::size_t s = 0; s < S; ++s) {
        if (g.values[s] >= v[s]) {
          v[s] = g.values[s];
          pi[s] = g.policy[s];
        }
        if (v[s] < g.values[s]) {
          diag.greedy_dominance = false;
        }
      }
      monotone_step(before, v, diag);
      record_snapshot(params.record_snapshots, (k - 1) * params.L + l, v, pi, diag);

      // One-sided estimate of P(v_{k,l} - v_{k,0}), range 2 eps_k.
      PhaseScope phase(ledger, epoch + "-line-13");
      ValueVec diff(S);
      for (std::size_t i = 0; i < S; ++i) {
        diff[i] = v[i] - v0[i];
      }
      diff = clamped(diff, 0.0, 2.0 * eps_k, diag.promise_clamps);
      const QVec pv = apply_P(mdp, v);
      const double err = c * (1.0 - gamma) * eps_k;
      for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t a = 0; a < A; ++a) {
          oracle.select_stream({kTagIncrement, k, l, s, a});
          const MeanEstimate e = with_context(
              [&] { return qest1(oracle, s, a, diff, 2.0 * eps_k, err, f, cfg); }, k, l, s, a);
          note(e);
          const double shifted = e.value - err;
          if (x(s, a) + shifted > pv(s, a) + 1e-9 * std::max(1.0, H)) {
            ++diag.one_sided_violations;
          }
          // Q update, clipped at zero.
          q(s, a) = std::max(mdp.reward(s, a) + gamma * (x(s, a) + shifted), 0.0);
        }
      }
    }
    diag.epoch_end_values.push_back(v);
  }

  report.v_hat = v;
  report.pi_hat = pi;
  report.q_hat = q;
  report.ledger = ledger;
  return report;
}

SolveReport solve_mdp2(SampleOracle& oracle, SolveParams2 params, const EstimatorConfig& cfg) {
  cfg.validate();
  const Mdp& mdp = oracle.mdp();
  params.derive(mdp);
  const std::size_t S = mdp.num_states();
  const std::size_t A = mdp.num_actions();
  const double gamma = mdp.discount();
  const double H = mdp.horizon();
  const double shift = (1.0 - gamma) * params.eps / 4.0;

  SolveReport report = start_report("solve_mdp2", oracle, params.to_json(), cfg);
  SolveDiagnostics& diag = report.diagnostics;
  QueryLedger& ledger = oracle.ledger();
  // Entries of the Q-oracle are estimated once per (l, s, a) on a side
  // oracle; the main ledger is charged per maximum-finding probe instead.
  SampleOracle side = oracle.child({kTagMdp2Estimate});
  const std::uint64_t per_probe = qest1_charge(H, shift, params.f, cfg.C1);

  ValueVec v(S, 0.0);
  Policy pi(S, 0);
  QVec q(S, A, 0.0);  // q_{l-1}; q_0 = 0 is known without estimation
  record_snapshot(params.record_snapshots, 0, v, pi, diag);

  for (std::size_t l = 1; l <= params.L; ++l) {
    const ValueVec before = v;
    {
      PhaseScope phase(ledger, "line-6");
      for (std::size_t s = 0; s < S; ++s) {
        std::size_t a_star = 0;
        if (l > 1) {
          oracle.select_stream({kTagMdp2Argmax, l, s});
          const ArgmaxOutcome out = quantum_argmax(q.row(s), params.argmax_backend, params.f,
                                                   params.delta, params.c_max, per_probe,
                                                   oracle.rng(), ledger);
          a_star = out.index;
          diag.argmax_failures += out.failed ? 1 : 0;
        }
        const double v_tilde = q(s, a_star);
        // Keep the larger of the old value and the argmax estimate.
        if (v_tilde >= v[s]) {
          v[s] = v_tilde;
          pi[s] = a_star;
        }
        if (v[s] < v_tilde) {
          diag.greedy_dominance = false;
        }
      }
    }
    monotone_step(before, v, diag);
    record_snapshot(params.record_snapshots, l, v, pi, diag);
    if (l == params.L) {
      break;
    }

    // Refresh Q estimates for the next iteration's argmax.
    const ValueVec vc = clamped(v, 0.0, H, diag.promise_clamps);
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t a = 0; a < A; ++a) {
        side.select_stream({kTagMdp2Estimate, l, s, a});
        const MeanEstimate e = with_context(
            [&] { return qest1(side, s, a, vc, H, shift, params.f, cfg); }, 0, l, s, a);
        if (!e.within_radius) {
          ++diag.estimator_failures;
        }
        q(s, a) = std::max(mdp.reward(s, a) + gamma * (e.value - shift), 0.0);
      }
    }
  }

  report.v_hat = v;
  report.pi_hat = pi;
  report.ledger = ledger;
  return report;
}

SolveReport standard_sampled_vi(SampleOracle& oracle, BaselineParams params,
                                const EstimatorConfig& cfg) {
  cfg.validate();
  const Mdp& mdp = oracle.mdp();
  params.derive(mdp);
  const std::size_t S = mdp.num_states();
  const std::size_t A = mdp.num_actions();
  const double gamma = mdp.discount();
  const double H = mdp.horizon();
  const double err = (1.0 - gamma) * params.eps / 4.0;
  const double dp = params.per_estimate_delta;

  SolveReport report = start_report("standard_sampled_vi", oracle, params.to_json(), cfg);
  SolveDiagnostics& diag = report.diagnostics;
  QueryLedger& ledger = oracle.ledger();
  SampleOracle side = oracle.child({kTagBaselineEstimate});
  const bool with_max = params.mode == BaselineMode::quantum_mean_and_max;
  const std::uint64_t per_probe = with_max ? qest1_charge(H, err, dp, cfg.C1) : 0;

  ValueVec v(S, 0.0);
  Policy pi(S, 0);
  QVec q(S, A);
  record_snapshot(params.record_snapshots, 0, v, pi, diag);
  PhaseScope phase(ledger, "backup");

  for (std::size_t i = 1; i <= params.iterations; ++i) {
    const ValueVec vc = clamped(v, 0.0, H, diag.promise_clamps);
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t a = 0; a < A; ++a) {
        MeanEstimate e;
        if (with_max) {
          side.select_stream({kTagBaselineEstimate, i, s, a});
          e = with_context([&] { return qest1(side, s, a, vc, H, err, dp, cfg); }, 0, i, s, a);
        } else {
          oracle.select_stream({kTagBaselineEstimate, i, s, a});
          e = with_context(
              [&] {
                return params.mode == BaselineMode::classical
                           ? classical_hoeffding_mean(oracle, s, a, vc, H, err, dp)
                           : qest1(oracle, s, a, vc, H, err, dp, cfg);
              },
              0, i, s, a);
        }
        if (!e.within_radius) {
          ++diag.estimator_failures;
        }
        q(s, a) = mdp.reward(s, a) + gamma * e.value;
      }
    }
    const ValueVec before = v;
    for (std::size_t s = 0; s < S; ++s) {
      std::size_t a_star = row_argmax(q.row(s));
      if (with_max) {
        oracle.select_stream({kTagBaselineArgmax, i, s});
        const ArgmaxOutcome out = quantum_argmax(q.row(s), ArgmaxBackend::contract_mock, dp,
                                                 params.delta, params.c_max, per_probe,
                                                 oracle.rng(), ledger);
        a_star = out.index;
        diag.argmax_failures += out.failed ? 1 : 0;
      }
      v[s] = std::clamp(q(s, a_star), 0.0, H);
      pi[s] = a_star;
    }
    monotone_step(before, v, diag);
    record_snapshot(params.record_snapshots, i, v, pi, diag);
  }

  report.v_hat = v;
  report.pi_hat = pi;
  report.ledger = ledger;
  return report;
}

SandwichCheck check_sandwich(const Mdp& mdp, const SolveReport& report, double eps,
                             const OptimalSolution& optimal) {
  constexpr double kPolicyTol = 1e-9;
  constexpr double kOptTol = 1e-8;
  SandwichCheck out;
  const ValueVec v_pi = policy_value_exact(mdp, report.pi_hat);
  out.value_error = max_abs_diff(report.v_hat, optimal.values);
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    out.value_lower = out.value_lower && optimal.values[s] - eps <= report.v_hat[s];
    out.value_policy = out.value_policy && report.v_hat[s] <= v_pi[s] + kPolicyTol;
    out.policy_upper = out.policy_upper && v_pi[s] <= optimal.values[s] + kOptTol;
  }
  if (report.q_hat) {
    out.q_checked = true;
    const QVec q_pi = policy_q_exact(mdp, report.pi_hat);
    const auto& qh = report.q_hat->values();
    for (std::size_t i = 0; i < qh.size(); ++i) {
      const double qs = optimal.q.values()[i];
      const double qp = q_pi.values()[i];
      out.q_sandwich = out.q_sandwich && qs - eps <= qh[i] && qh[i] <= qp + kPolicyTol &&
                       qp <= qs + kOptTol;
    }
  }
  return out;
}

}  // namespace qmdp
