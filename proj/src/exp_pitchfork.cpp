#include <atomic>
#include <mutex>
#include <random>
#include <thread>

#include "opdyn/experiments.hpp"

namespace opdyn {

Vec random_uniform(Index n, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  // Built by hand from the raw engine so results do not depend on the library's distribution code.
  Vec v(n);
  for (Index i = 0; i < n; ++i) {
    double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    v(i) = lo + (hi - lo) * unit;
  }
  return v;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(jobs));
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

Equilibrium settle_equilibrium(const ParametrizedSystem& sys, const Vec& x0, double param, const SettleOptions& opt) {
  OdeSystem ode;
  ode.rhs = [&](double, const Vec& x) { return sys.field(x, param); };
  IntegratorConfig cfg;
  cfg.t_end = opt.horizon;
  cfg.rtol = opt.rtol;
  cfg.atol = opt.atol;
  cfg.step = 0.0;
  cfg.record = false;
  cfg.stop_when = [&](double, const Vec& x) { return sys.field(x, param).lpNorm<Eigen::Infinity>() < opt.tol; };
  Vec x = x0;
  if (sys.field(x, param).lpNorm<Eigen::Infinity>() >= opt.tol) x = integrate(ode, x0, cfg).final_state();
  return find_equilibrium(sys, x, param);
}

PitchforkDiagram run_bifurcation_diagram(const ParametrizedSystem& sys, const Equilibrium& start,
                                         const PitchforkOptions& opt) {
  require(opt.u_max > opt.u_min, "parameter range must satisfy max > min");
  ContinuationConfig cont = opt.continuation;
  cont.p_min = opt.u_min;
  cont.p_max = opt.u_max;
  cont.direction = 1;
  cont.symmetric_trunk = opt.symmetric_trunk;
  PitchforkDiagram d;
  d.trunk = continue_branch(sys, start, cont);
  if (!opt.switch_branches) return d;
  cont.symmetric_trunk = false;
  const Index n = sys.dim;
  for (std::size_t k = 0; k < d.trunk.singular_points.size(); ++k) {
    const SingularPoint& sp = d.trunk.singular_points[k];
    if (sp.kind != SingularKind::Pitchfork) continue;
    for (int dir : {1, -1}) {
      Equilibrium seed = branch_switch(sys, sp, dir, opt.switch_offset);
      Vec hint = Vec::Zero(n + 1);
      hint.head(n) = dir * sp.null_vector;
      SwitchedBranch sb;
      sb.from_singular = k;
      sb.direction = dir;
      sb.branch = continue_branch(sys, seed, cont, hint);
      for (const auto& p : sb.branch.points)
        if (p.eq.param > sp.param + 1e-6)
          d.max_consensus_spread = std::max(d.max_consensus_spread, p.eq.x.maxCoeff() - p.eq.x.minCoeff());
      d.switched.push_back(std::move(sb));
    }
  }
  return d;
}

PitchforkDiagram run_pitchfork_diagram(const Graph& g, const PitchforkOptions& opt) {
  require(is_strongly_connected(g), "pitchfork diagram needs a strongly connected graph");
  ParametrizedSystem sys = normalized_system(g, opt.beta, opt.sigmoid);
  Vec zero = Vec::Zero(g.size());
  Equilibrium start = (opt.beta.size() == 0 || opt.beta.isZero(0.0)) ? find_equilibrium(sys, zero, opt.u_min)
                                                                      : settle_equilibrium(sys, zero, opt.u_min);
  return run_bifurcation_diagram(sys, start, opt);
}

}  // namespace opdyn
