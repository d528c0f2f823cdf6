#include <cmath>

#include "opdyn/experiments.hpp"

namespace opdyn {

HysteresisResult run_hysteresis(const HysteresisOptions& opt) {
  require(opt.beta_b_step > 0 && opt.beta_b_max > opt.beta_b_min, "hysteresis grid needs step > 0 and max > min");
  require(opt.u >= 0, "u must be nonnegative");
  const Graph g = three_population_graph(opt.spec);
  const int count = static_cast<int>(std::lround((opt.beta_b_max - opt.beta_b_min) / opt.beta_b_step)) + 1;

  HysteresisResult r;
  for (int i = 0; i < count; ++i) r.grid.push_back(opt.beta_b_min + i * opt.beta_b_step);
  r.y_up.resize(count);
  r.y_down.resize(count);
  r.residual_up.resize(count);
  r.residual_down.resize(count);

  Vec x = random_uniform(g.size(), -opt.x0_amplitude, opt.x0_amplitude, opt.seed);
  auto settle_at = [&](int i, double& y, double& res) {
    ParametrizedSystem sys = normalized_system(g, population_beta(opt.spec, opt.beta_a, r.grid[i]), opt.sigmoid);
    Equilibrium eq = settle_equilibrium(sys, x, opt.u, opt.settle);
    x = eq.x;
    y = group_opinion(x);
    res = sys.field(x, opt.u).lpNorm<Eigen::Infinity>();
    r.max_residual = std::max(r.max_residual, res);
  };
  for (int i = 0; i < count; ++i) settle_at(i, r.y_up[i], r.residual_up[i]);
  for (int i = count - 1; i >= 0; --i) settle_at(i, r.y_down[i], r.residual_down[i]);

  for (int i = 1; i < count; ++i)
    if (r.y_up[i - 1] > 0 && r.y_up[i] < 0) {
      r.switch_up = r.grid[i];
      break;
    }
  for (int i = count - 2; i >= 0; --i)
    if (r.y_down[i + 1] < 0 && r.y_down[i] > 0) {
      r.switch_down = r.grid[i];
      break;
    }
  if (r.switch_up && r.switch_down) r.width = *r.switch_up - *r.switch_down;
  return r;
}

}  // namespace opdyn
