#include <cmath>

#include "opdyn/bifurcation.hpp"

namespace opdyn {

Mat jacobian(const Vec& x, const Graph& g, double ubar, const Vec& utilde, const Sigmoid& s) {
  require(x.size() == g.size(), "state length does not match graph size");
  Vec gain = Vec::Constant(x.size(), ubar);
  if (utilde.size()) {
    require(utilde.size() == x.size(), "utilde length does not match graph size");
    gain += utilde;
  }
  Mat j = gain.asDiagonal() * g.adjacency() * s.apply_d1(x).asDiagonal();
  j.diagonal() -= g.degrees();
  return j;
}

Mat jacobian(const Vec& x, const Graph& g, double u, const Sigmoid& s) { return jacobian(x, g, u, Vec(), s); }

ParametrizedSystem normalized_system(const Graph& g, const Vec& beta, const Sigmoid& s) {
  require(beta.size() == 0 || beta.size() == g.size(), "beta length does not match graph size");
  ParametrizedSystem sys;
  sys.dim = g.size();
  sys.param_name = "u";
  sys.field = [g, beta, s](const Vec& x, double u) { return normalized_field(x, g, u, beta, s); };
  sys.jacobian = [g, s](const Vec& x, double u) { return jacobian(x, g, u, s); };
  sys.param_derivative = [g, s](const Vec& x, double) -> Vec { return g.adjacency() * s.apply(x); };
  return sys;
}

ParametrizedSystem hetero_system(const Graph& g, const Vec& utilde, const Vec& beta, const Sigmoid& s) {
  if (utilde.size()) {
    require(utilde.size() == g.size(), "utilde length does not match graph size");
    check_zero_sum(utilde);
  }
  ParametrizedSystem sys;
  sys.dim = g.size();
  sys.param_name = "ubar";
  sys.field = [g, utilde, beta, s](const Vec& x, double ub) { return hetero_field(x, g, ub, utilde, beta, s); };
  sys.jacobian = [g, utilde, s](const Vec& x, double ub) { return jacobian(x, g, ub, utilde, s); };
  sys.param_derivative = [g, s](const Vec& x, double) -> Vec { return g.adjacency() * s.apply(x); };
  return sys;
}

ParametrizedSystem reduced3_system(const PopulationSpec& spec, double beta_a, double beta_b, const Sigmoid& s) {
  spec.validate();
  ParametrizedSystem sys;
  sys.dim = 3;
  sys.param_name = "u";
  sys.field = [spec, beta_a, beta_b, s](const Vec& y, double u) -> Vec {
    return reduced3_field(y, spec, u, beta_a, beta_b, s);
  };
  sys.jacobian = [spec, s](const Vec& y, double u) -> Mat { return reduced3_jacobian(y, spec, u, s); };
  sys.param_derivative = [spec, s](const Vec& y, double) -> Vec {
    // F is affine in u; its u-derivative is the social term at u = 1 minus the u = 0 value.
    return reduced3_field(y, spec, 1.0, 0.0, 0.0, s) - reduced3_field(y, spec, 0.0, 0.0, 0.0, s);
  };
  return sys;
}

ParametrizedSystem ata_reduced3_system(int n, int n3, double beta, const Sigmoid& s) {
  PopulationSpec spec = all_to_all_spec(n, n, n3);
  ParametrizedSystem sys;
  sys.dim = 3;
  sys.param_name = "u";
  sys.field = [n, n3, beta, s](const Vec& y, double u) -> Vec { return ata_reduced3_field(y, n, n3, u, beta, s); };
  sys.jacobian = [spec, s](const Vec& y, double u) -> Mat { return reduced3_jacobian(y, spec, u, s); };
  sys.param_derivative = [n, n3, s](const Vec& y, double) -> Vec {
    return ata_reduced3_field(y, n, n3, 1.0, 0.0, s) - ata_reduced3_field(y, n, n3, 0.0, 0.0, s);
  };
  return sys;
}

std::string to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Saddle: return "saddle";
    case Stability::Nonhyperbolic: return "nonhyperbolic";
  }
  return "unknown";
}

std::string to_string(SingularKind k) {
  switch (k) {
    case SingularKind::Pitchfork: return "pitchfork";
    case SingularKind::Fold: return "fold";
    case SingularKind::Ambiguous: return "ambiguous";
  }
  return "ambiguous";
}

void assess_stability(Equilibrium& eq, const Mat& jac) {
  Eigen::EigenSolver<Mat> es(jac, false);
  eq.eigenvalues = es.eigenvalues();
  eq.n_unstable = 0;
  bool marginal = false;
  for (Index i = 0; i < eq.eigenvalues.size(); ++i) {
    double re = eq.eigenvalues(i).real();
    if (re > 1e-8) ++eq.n_unstable;
    if (std::abs(re) <= 1e-8) marginal = true;
  }
  eq.stability = marginal ? Stability::Nonhyperbolic : (eq.n_unstable ? Stability::Saddle : Stability::Stable);
}

std::pair<int, double> det_sign_log(const Mat& m) {
  Eigen::PartialPivLU<Mat> lu(m);
  const Mat& f = lu.matrixLU();
  int sign = static_cast<int>(lu.permutationP().determinant());
  double log_abs = 0.0;
  for (Index i = 0; i < f.rows(); ++i) {
    double d = f(i, i);
    if (d == 0.0) return {0, -INFINITY};
    if (d < 0) sign = -sign;
    log_abs += std::log(std::abs(d));
  }
  return {sign, log_abs};
}

Equilibrium find_equilibrium(const ParametrizedSystem& sys, const Vec& guess, double param, const NewtonConfig& cfg) {
  require(guess.size() == sys.dim, "initial guess has the wrong dimension");
  require(guess.allFinite() && std::isfinite(param), "initial guess must be finite");
  Vec x = guess;
  Vec f = sys.field(x, param);
  double fn = f.lpNorm<Eigen::Infinity>();
  int it = 0;
  while (fn > cfg.tol) {
    if (++it > cfg.max_iter)
      throw NumericalFailure("Newton did not converge in " + std::to_string(cfg.max_iter) + " iterations (|F| = " +
                             std::to_string(fn) + ")");
    Mat j = sys.jacobian(x, param);
    Eigen::PartialPivLU<Mat> lu(j);
    if (!(lu.rcond() > 1e-14)) throw NumericalFailure("singular Newton matrix");
    Vec dx = lu.solve(-f);
    double lambda = 1.0;
    Vec xn;
    Vec fnew;
    double fnn = 0.0;
    for (;;) {
      xn = x + lambda * dx;
      fnew = sys.field(xn, param);
      fnn = fnew.lpNorm<Eigen::Infinity>();
      if (fnn < fn || lambda < 1.0 / 1024) break;
      lambda *= 0.5;
    }
    const double step = (lambda * dx).lpNorm<Eigen::Infinity>();
    x = std::move(xn);
    f = std::move(fnew);
    // Roundoff floor: the update no longer moves x and the residual is already tiny.
    if (fnn >= fn && step <= 1e-15 * (1.0 + x.lpNorm<Eigen::Infinity>()) && fnn <= 1e3 * cfg.tol) {
      fn = fnn;
      break;
    }
    fn = fnn;
  }
  Equilibrium eq;
  eq.x = x;
  eq.param = param;
  assess_stability(eq, sys.jacobian(x, param));
  return eq;
}

}  // namespace opdyn
