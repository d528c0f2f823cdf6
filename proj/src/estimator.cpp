#include <cmath>

#include "opdyn/dynamics.hpp"
#include "opdyn/solver.hpp"

namespace opdyn {

EstimatorResult integrate_nonsmooth(const Vec& w0, const Vec& x, const Graph& g, const EstimatorConfig& cfg) {
  require(cfg.alpha > 0.0, "estimator gain alpha must be positive");
  require(cfg.tol > 0.0, "estimator tolerance must be positive");
  require(cfg.step >= 0.0, "estimator step must be nonnegative");
  require(cfg.cap_factor >= 1.0, "estimator cap factor must be at least 1");
  require(w0.size() == g.size() && x.size() == g.size(), "estimator dimensions do not match graph");
  const double l2 = lambda2(g);
  if (!(l2 > 1e-12)) throw InvalidInput("estimator needs a connected undirected graph (lambda2 > 0)");

  const Mat& lap = g.laplacian();
  const double y = group_opinion(x);
  const Vec target = Vec::Constant(x.size(), y);
  EstimatorState est{w0, cfg.alpha};

  EstimatorResult r;
  r.step = cfg.step > 0 ? cfg.step
                        : std::min(1e-4, cfg.tol / (4.0 * g.max_degree() * std::sqrt(double(g.size())))) / cfg.alpha;
  Vec yhat = est.yhat(x, g);
  const double mean0 = yhat.mean();
  r.initial_error = (yhat - target).norm();
  r.time_bound = r.initial_error / (cfg.alpha * l2);
  const double cap = cfg.cap_factor * r.time_bound;
  const long max_steps = static_cast<long>(std::ceil(cap / r.step));
  const long sample_every = std::max<long>(1, max_steps / 200);

  double err = r.initial_error;
  long k = 0;
  r.error_history.emplace_back(0.0, err);
  while (err > cfg.tol && k < max_steps) {
    est.w += r.step * estimator_field(est, x, g);
    ++k;
    yhat = lap * est.w + x;
    err = (yhat - target).norm();
    r.max_mean_drift = std::max(r.max_mean_drift, std::abs(yhat.mean() - mean0));
    if (k % sample_every == 0) r.error_history.emplace_back(k * r.step, err);
  }
  r.steps = k;
  r.elapsed = k * r.step;
  r.final_error = err;
  r.converged = err <= cfg.tol;
  r.w = est.w;
  if (r.error_history.back().first != r.elapsed) r.error_history.emplace_back(r.elapsed, err);
  if (!r.converged && cfg.throw_at_cap)
    throw NumericalFailure("estimator did not reach tolerance within the hard cap s=" + std::to_string(cap));
  return r;
}

}  // namespace opdyn
