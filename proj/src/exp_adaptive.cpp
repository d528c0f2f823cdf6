#include <cmath>

#include "opdyn/experiments.hpp"

namespace opdyn {

AdaptiveCase adaptive_case_from_name(const std::string& name) {
  if (name == "symmetric") return AdaptiveCase::Symmetric;
  if (name == "case1") return AdaptiveCase::Case1;
  if (name == "case2") return AdaptiveCase::Case2;
  throw InvalidInput("unknown adaptive case '" + name + "' (valid: symmetric, case1, case2)");
}

std::string to_string(AdaptiveCase c) {
  switch (c) {
    case AdaptiveCase::Symmetric: return "symmetric";
    case AdaptiveCase::Case1: return "case1";
    case AdaptiveCase::Case2: return "case2";
  }
  return "symmetric";
}

Vec adaptive_case_beta(AdaptiveCase c, int n_agents) {
  Vec b = Vec::Zero(n_agents);
  if (c == AdaptiveCase::Case1) {
    b(0) = 1.0;
  } else if (c == AdaptiveCase::Case2) {
    require(n_agents >= 3, "case2 needs at least three agents");
    const int n_b = std::max(1, static_cast<int>(std::lround(0.4 * n_agents)));
    b(0) = 20.0;
    for (int i = 1; i <= n_b && i < n_agents; ++i) b(i) = -2.5;
  }
  return b;
}

double absorbing_box_violation(const std::vector<Vec>& states, const Graph& g, const Vec& gain, const Vec& beta) {
  if (states.empty()) return 0.0;
  const Vec& x0 = states.front();
  double worst = 0.0;
  for (Index i = 0; i < g.size(); ++i) {
    double b = beta.size() ? std::abs(beta(i)) : 0.0;
    double bound = std::max(std::abs(x0(i)), gain(i) + (g.degrees()(i) > 0 ? b / g.degrees()(i) : INFINITY));
    for (const auto& x : states) worst = std::max(worst, std::abs(x(i)) - bound);
  }
  return worst;
}

AdaptiveResult run_adaptive(const AdaptiveOptions& opt) {
  const Graph& g = opt.graph;
  const Index n = g.size();
  require(n >= 2, "adaptive run needs at least two agents");
  require(is_strongly_connected(g), "adaptive run needs a strongly connected graph");
  require(g.is_symmetric(), "adaptive run needs an undirected graph (the estimator bound uses lambda2)");
  opt.adaptive.validate();
  require(opt.escape_band > 0 && opt.escape_band < opt.adaptive.y_th, "escape band must lie in (0, y_th)");
  require(opt.x0_amplitude > 0, "x0 amplitude must be positive");
  const Vec utilde = opt.utilde.size() ? opt.utilde : Vec::Zero(n);
  const Vec beta = opt.beta.size() ? opt.beta : Vec::Zero(n);
  require(utilde.size() == n && beta.size() == n, "utilde and beta must match the graph size");
  check_zero_sum(utilde);
  const double eps = opt.adaptive.epsilon;
  const double yth = opt.adaptive.y_th;
  const double horizon = opt.horizon > 0 ? opt.horizon : 500.0 / eps;

  AdaptiveResult r;
  if (auto w = opt.adaptive.warning()) r.warnings.push_back(*w);
  r.ubar_star = ubar_star(g, utilde);
  for (const auto& w : r.ubar_star.warnings) r.warnings.push_back(w);

  // Small same-signed perturbation; the seed's parity picks the side.
  const double side = (opt.seed % 2 == 0) ? 1.0 : -1.0;
  Vec x0 = side * opt.x0_amplitude * random_uniform(n, 0.5, 1.5, opt.seed);

  // Phase 1: x and u frozen, estimator runs.
  EstimatorConfig ec = opt.estimator;
  ec.cap_factor = 1.0;
  ec.throw_at_cap = false;
  r.estimator = integrate_nonsmooth(Vec::Zero(n), x0, g, ec);
  const bool converged = r.estimator.converged;
  const Vec w_frozen = r.estimator.w;
  if (!converged)
    r.warnings.push_back("estimator did not converge within the time bound; phase 2 uses the live estimate yhat_1");

  auto estimate = [&](const Vec& x) { return converged ? group_opinion(x) : (g.laplacian() * w_frozen + x)(0); };

  // Phase 2: z = (x, ubar).
  OdeSystem ode;
  ode.rhs = [&](double, const Vec& z) {
    AdaptiveRate rate = adaptive_field(z.head(n), z(n), estimate(z.head(n)), g, utilde, beta, opt.adaptive, opt.sigmoid);
    Vec dz(n + 1);
    dz.head(n) = rate.dx;
    dz(n) = rate.dubar;
    return dz;
  };
  Vec z0(n + 1);
  z0.head(n) = x0;
  z0(n) = opt.ubar0;
  IntegratorConfig cfg;
  cfg.t0 = r.estimator.elapsed;
  cfg.t_end = cfg.t0 + horizon;
  cfg.rtol = opt.rtol;
  cfg.atol = opt.atol;
  cfg.step = 0.0;
  cfg.stop_when = [&](double, const Vec& z) {
    double y = group_opinion(z.head(n));
    if (std::abs(yth * yth - y * y) >= opt.rest_tol) return false;
    return ode.rhs(0, z).head(n).lpNorm<Eigen::Infinity>() < 0.1 * opt.rest_tol;
  };
  std::vector<EventFunction> events{[&](double, const Vec& z) { return std::abs(group_opinion(z.head(n))) - opt.escape_band; }};
  EventResult er = integrate_with_events(ode, z0, events, cfg);

  const Trajectory& tr = er.trajectory;
  double ubar_max = opt.ubar0;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const Vec& z = tr.states[i];
    r.times.push_back(tr.times[i]);
    r.states.push_back(z.head(n));
    r.ubar.push_back(z(n));
    r.y.push_back(group_opinion(z.head(n)));
    r.yhat.push_back(estimate(z.head(n)));
    ubar_max = std::max(ubar_max, z(n));
  }
  for (const auto& hit : er.hits)
    if (hit.direction > 0) {
      r.ubar_c = hit.state(n);
      r.escape_time = hit.time;
      break;
    }
  const Vec& zt = tr.final_state();
  r.terminal_y = group_opinion(zt.head(n));
  r.terminal_ubar = zt(n);
  Vec dz = ode.rhs(0, zt);
  r.terminal_dubar = dz(n);
  r.terminal_field = dz.head(n).lpNorm<Eigen::Infinity>();
  r.reached_rest = tr.stopped_early;
  if (!r.reached_rest) r.warnings.push_back("closed loop did not reach its rest point within the horizon");

  for (std::size_t i = 1; i < r.times.size(); ++i)
    if (std::abs(r.y[i - 1]) < yth && std::abs(r.y[i]) < yth && r.ubar[i] < r.ubar[i - 1] - 1e-15)
      r.ubar_monotone_below_threshold = false;

  // Fastest change of y after the initial transient marks the jump between branches. Sliding along an
  // attracting branch moves y at a rate of order epsilon, so only much faster motion counts as a jump.
  double best = 0.0;
  std::optional<double> best_t, best_u;
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    if (r.times[i] - cfg.t0 < 10.0) continue;
    Vec z(n + 1);
    z.head(n) = r.states[i];
    z(n) = r.ubar[i];
    double rate = std::abs(group_opinion(ode.rhs(0, z).head(n)));
    if (rate > best) {
      best = rate;
      best_t = r.times[i];
      best_u = r.ubar[i];
    }
  }
  r.max_dy_ds = best;
  if (best > opt.jump_rate_factor * opt.adaptive.epsilon) {
    r.jump_time = best_t;
    r.jump_ubar = best_u;
  }

  if (opt.which != AdaptiveCase::Symmetric) {
    ParametrizedSystem sys = hetero_system(g, utilde, beta, opt.sigmoid);
    Equilibrium start = settle_equilibrium(sys, Vec::Zero(n), opt.ubar0);
    ContinuationConfig cc;
    cc.p_min = std::max(0.0, opt.ubar0 - 0.5);
    cc.p_max = opt.ubar0 + 1.0;
    cc.classify = true;
    Branch b = continue_branch(sys, start, cc);
    for (const auto& sp : b.singular_points)
      if (sp.kind == SingularKind::Fold) {
        r.fold_ubar = sp.param;
        break;
      }
  }

  r.max_box_violation = absorbing_box_violation(r.states, g, Vec::Constant(n, ubar_max) + utilde, beta);
  if (opt.which == AdaptiveCase::Symmetric && !r.ubar_c)
    throw NumericalFailure("no escape from the deadlock detected within the horizon");
  return r;
}

}  // namespace opdyn
