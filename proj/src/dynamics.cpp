#include "opdyn/dynamics.hpp"

#include <cmath>

namespace opdyn {

namespace {

void check_dims(const Vec& x, const Graph& g, const Vec& beta) {
  if (x.size() != g.size())
    throw InvalidInput("state has " + std::to_string(x.size()) + " entries but graph has " +
                       std::to_string(g.size()) + " agents");
  if (beta.size() != 0 && beta.size() != g.size()) throw InvalidInput("beta length does not match graph size");
}

}  // namespace

void ModelParams::validate(Index n) const {
  require(u_inertia > 0.0, "u_I must be positive");
  require(u_social > 0.0, "u_S must be positive");
  require(nu.size() == 0 || nu.size() == n, "nu length does not match graph size");
}

void AdaptiveConfig::validate() const {
  require(epsilon > 0.0, "epsilon must be positive");
  require(y_th > 0.0, "y_th must be positive");
}

std::optional<std::string> AdaptiveConfig::warning() const {
  if (epsilon > 0.1) return "epsilon = " + std::to_string(epsilon) + " is large; time-scale separation is weak";
  return std::nullopt;
}

void DecisionConfig::validate() const {
  require(eta > 0.0, "decision threshold eta must be positive");
  require(delta_tol >= 0.0, "delta_tol must be nonnegative");
}

std::string to_string(Decision d) {
  switch (d) {
    case Decision::DecisionA: return "DecisionA";
    case Decision::DecisionB: return "DecisionB";
    case Decision::DeadlockNoDecision: return "DeadlockNoDecision";
    case Decision::DeadlockDisagreement: return "DeadlockDisagreement";
  }
  return "unknown";
}

Vec full_field(const Vec& x, const Graph& g, const ModelParams& p, const Sigmoid& s) {
  p.validate(g.size());
  check_dims(x, g, p.nu);
  Vec f = -p.u_inertia * g.degrees().cwiseProduct(x) + p.u_social * (g.adjacency() * s.apply(x));
  if (p.nu.size()) f += p.nu;
  return f;
}

Vec normalized_field(const Vec& x, const Graph& g, double u, const Vec& beta, const Sigmoid& s) {
  check_dims(x, g, beta);
  Vec f = -g.degrees().cwiseProduct(x) + u * (g.adjacency() * s.apply(x));
  if (beta.size()) f += beta;
  return f;
}

void check_zero_sum(const Vec& utilde) {
  if (std::abs(utilde.sum()) > 1e-12) throw InvalidInput("effort heterogeneities utilde must sum to zero");
}

Vec hetero_field(const Vec& x, const Graph& g, double ubar, const Vec& utilde, const Vec& beta,
                 const Sigmoid& s) {
  check_dims(x, g, beta);
  Vec social = g.adjacency() * s.apply(x);
  Vec gain = Vec::Constant(x.size(), ubar);
  if (utilde.size()) {
    require(utilde.size() == x.size(), "utilde length does not match graph size");
    check_zero_sum(utilde);
    gain += utilde;
  }
  Vec f = -g.degrees().cwiseProduct(x) + gain.cwiseProduct(social);
  if (beta.size()) f += beta;
  return f;
}

ReducedState reduced3_field(const ReducedState& y, const PopulationSpec& spec, double u, double beta_a,
                            double beta_b, const Sigmoid& s) {
  spec.validate();
  const Eigen::Vector3d sy(s(y(0)), s(y(1)), s(y(2)));
  const Eigen::Vector3d b(beta_a, -beta_b, 0.0);
  ReducedState f;
  for (int k = 0; k < 3; ++k) {
    double social = (spec.group_size(k) - 1) * sy(k);
    for (int m = 0; m < 3; ++m)
      if (m != k) social += spec.group_size(m) * spec.coupling[k][m] * sy(m);
    f(k) = -spec.group_degree(k) * y(k) + u * social + b(k);
  }
  return f;
}

ReducedState ata_reduced3_field(const ReducedState& y, int n, int n3, double u, double beta, const Sigmoid& s) {
  require(n >= 0 && n3 >= 0 && 2 * n + n3 >= 2, "all-to-all reduced model needs N = 2n + n3 >= 2");
  const double nm1 = 2 * n + n3 - 1;
  const double s1 = s(y(0)), s2 = s(y(1)), s3 = s(y(2));
  ReducedState f;
  f(0) = -nm1 * y(0) + u * ((n - 1) * s1 + n * s2 + n3 * s3) + beta;
  f(1) = -nm1 * y(1) + u * (n * s1 + (n - 1) * s2 + n3 * s3) - beta;
  f(2) = -nm1 * y(2) + u * (n * s1 + n * s2 + (n3 - 1) * s3);
  return f;
}

Eigen::Matrix3d reduced3_jacobian(const ReducedState& y, const PopulationSpec& spec, double u, const Sigmoid& s) {
  Eigen::Matrix3d j;
  for (int k = 0; k < 3; ++k)
    for (int m = 0; m < 3; ++m) {
      double w = (k == m) ? spec.group_size(k) - 1 : spec.group_size(m) * spec.coupling[k][m];
      j(k, m) = u * w * s.d1(y(m));
      if (k == m) j(k, m) -= spec.group_degree(k);
    }
  return j;
}

double scalar_consensus_field(double y, double u, int n, const Sigmoid& s) {
  require(n >= 2, "scalar consensus field needs N >= 2");
  return -(n - 1) * y + u * (n - 1) * s(y);
}

Vec estimator_field(const EstimatorState& est, const Vec& x, const Graph& g) {
  require(est.alpha > 0.0, "estimator gain alpha must be positive");
  require(est.w.size() == g.size() && x.size() == g.size(), "estimator dimensions do not match graph");
  Vec r = g.laplacian() * est.yhat(x, g);
  Vec f(r.size());
  for (Index i = 0; i < r.size(); ++i) f(i) = r(i) > 0 ? -est.alpha : (r(i) < 0 ? est.alpha : 0.0);
  return f;
}

AdaptiveRate adaptive_field(const Vec& x, double ubar, const EstimatorState& est, const Graph& g,
                            const Vec& utilde, const Vec& beta, const AdaptiveConfig& cfg, const Sigmoid& s) {
  return adaptive_field(x, ubar, est.yhat(x, g)(0), g, utilde, beta, cfg, s);
}

AdaptiveRate adaptive_field(const Vec& x, double ubar, double y_estimate, const Graph& g, const Vec& utilde,
                            const Vec& beta, const AdaptiveConfig& cfg, const Sigmoid& s) {
  return {hetero_field(x, g, ubar, utilde, beta, s), cfg.epsilon * (cfg.y_th * cfg.y_th - y_estimate * y_estimate)};
}

double group_opinion(const Vec& x) { return x.size() ? x.mean() : 0.0; }

double disagreement(const Vec& x) {
  if (!x.size()) return 0.0;
  double d = std::abs(x.mean()) - x.lpNorm<1>() / static_cast<double>(x.size());
  return std::min(d, 0.0);
}

Decision classify_decision(const Vec& x, const DecisionConfig& cfg) {
  const double delta = disagreement(x);
  const double y = group_opinion(x);
  if (std::abs(delta) <= cfg.delta_tol && y > cfg.eta) return Decision::DecisionA;
  if (std::abs(delta) <= cfg.delta_tol && y < -cfg.eta) return Decision::DecisionB;
  if (x.lpNorm<Eigen::Infinity>() <= cfg.delta_tol) return Decision::DeadlockNoDecision;
  if (std::abs(delta) > cfg.delta_tol) return Decision::DeadlockDisagreement;
  return Decision::DeadlockNoDecision;
}

Vec lift_reduced(const ReducedState& y, const PopulationSpec& spec) {
  Vec x(spec.total());
  auto groups = spec.groups();
  for (int k = 0; k < 3; ++k)
    for (int i : groups[k]) x(i) = y(k);
  return x;
}

ReducedState group_means(const Vec& x, const PopulationSpec& spec) {
  require(x.size() == spec.total(), "state length does not match population spec");
  ReducedState m = ReducedState::Zero();
  auto groups = spec.groups();
  for (int k = 0; k < 3; ++k) {
    if (groups[k].empty()) continue;
    for (int i : groups[k]) m(k) += x(i);
    m(k) /= static_cast<double>(groups[k].size());
  }
  return m;
}

double group_spread(const Vec& x, const PopulationSpec& spec) {
  require(x.size() == spec.total(), "state length does not match population spec");
  auto groups = spec.groups();
  double v = 0.0;
  for (int k = 0; k < 3; ++k)
    for (int i : groups[k])
      for (int j : groups[k]) v += 0.5 * (x(i) - x(j)) * (x(i) - x(j));
  return v;
}

}  // namespace opdyn
