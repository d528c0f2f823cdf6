#include <cmath>

#include "opdyn/experiments.hpp"

namespace opdyn {

ReductionResult run_reduction_demo(const ReductionOptions& opt) {
  require(opt.t_end > 0 && opt.sample_dt > 0, "reduction demo needs t_end > 0 and sample_dt > 0");
  const Graph g = three_population_graph(opt.spec);
  const Index n = g.size();
  Vec beta = population_beta(opt.spec, opt.beta_a, opt.beta_b);

  ReductionResult r;
  r.min_group_degree = INFINITY;
  for (int k = 0; k < 3; ++k)
    if (opt.spec.group_size(k) > 0) r.min_group_degree = std::min(r.min_group_degree, opt.spec.group_degree(k));

  Vec x0 = opt.start_on_manifold
               ? lift_reduced(random_uniform(3, -opt.x0_amplitude, opt.x0_amplitude, opt.seed), opt.spec)
               : random_uniform(n, -opt.x0_amplitude, opt.x0_amplitude, opt.seed);

  IntegratorConfig cfg;
  cfg.t_end = opt.t_end;
  cfg.rtol = 1e-12;
  cfg.atol = 1e-15;
  cfg.step = 0.0;
  const int count = static_cast<int>(std::lround(opt.t_end / opt.sample_dt));
  for (int i = 0; i <= count; ++i) cfg.sample_times.push_back(std::min(i * opt.sample_dt, opt.t_end));

  OdeSystem full;
  full.rhs = [&](double, const Vec& x) { return normalized_field(x, g, opt.u, beta, opt.sigmoid); };
  Trajectory tf = integrate(full, x0, cfg);

  OdeSystem red;
  red.rhs = [&](double, const Vec& y) -> Vec {
    return reduced3_field(y, opt.spec, opt.u, opt.beta_a, opt.beta_b, opt.sigmoid);
  };
  Vec y0 = group_means(x0, opt.spec);
  Trajectory tr = integrate(red, y0, cfg);

  r.times = tf.times;
  r.states = tf.states;
  for (const auto& y : tr.states) r.reduced.push_back(y);
  for (const auto& x : r.states) {
    r.spread.push_back(group_spread(x, opt.spec));
    r.max_manifold_distance = std::max(r.max_manifold_distance, (x - lift_reduced(group_means(x, opt.spec), opt.spec)).norm());
  }
  const double v0 = r.spread.front();
  const double d = r.min_group_degree;
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    if (v0 > 0) r.max_bound_ratio = std::max(r.max_bound_ratio, r.spread[i] / (v0 * std::exp(-d * r.times[i])));
    // Step-to-step ratios are meaningless once V sits at the roundoff floor.
    if (i > 0 && r.spread[i - 1] > 0 && r.times[i] <= opt.bound_window)
      r.max_pair_ratio = std::max(r.max_pair_ratio, (r.spread[i] / r.spread[i - 1]) /
                                                        std::exp(-d * (r.times[i] - r.times[i - 1])));
  }
  r.terminal_mean_error =
      (group_means(r.states.back(), opt.spec) - r.reduced.back()).lpNorm<Eigen::Infinity>();
  return r;
}

}  // namespace opdyn
