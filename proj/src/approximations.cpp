#include "opdyn/approximations.hpp"

namespace opdyn {

double y_s(double u, const Sigmoid& s) {
  require(u > 1.0, "y_s needs u > 1 (no positive root otherwise)");
  auto f = [&](double y) { return y - u * s(y); };
  double lo = 1e-8, hi = u;
  while (f(lo) >= 0 && lo > 1e-300) lo *= 1e-3;
  if (f(lo) >= 0) throw NumericalFailure("y_s: could not bracket the root");
  while (hi - lo > 1e-12 * std::max(1.0, hi)) {
    double mid = 0.5 * (lo + hi);
    (f(mid) < 0 ? lo : hi) = mid;
  }
  double y = 0.5 * (lo + hi);
  for (int it = 0; it < 3; ++it) {
    double d = 1.0 - u * s.d1(y);
    if (d == 0.0) break;
    double yn = y - f(y) / d;
    if (!(yn > lo * 0.5 && yn < hi * 2)) break;
    y = yn;
  }
  return y;
}

double ustar_coefficient(int n_agents, int n3) {
  require(n_agents >= 2 && n3 >= 0 && n3 <= n_agents, "need N >= 2 and 0 <= n3 <= N");
  const double n = n_agents;
  const double a = 1.0 + 3.0 * n * n * n;
  return a * a * (n - n3) / (9.0 * std::pow(n, 9));
}

double ustar_series(double beta, int n_agents, int n3) { return 1.0 + ustar_coefficient(n_agents, n3) * beta * beta; }

double us_star_hat(double nu, int n_agents, int n3) {
  require(nu > 0.0, "value nu must be positive");
  return 1.0 / nu + ustar_coefficient(n_agents, n3) * nu * nu * nu;
}

Eigen::Matrix3d deadlock_jacobian(double u, double beta, int n, int n3) {
  const double y = ystar_root<double>(u, beta, 2 * n + n3);
  Eigen::Vector3d ys(y, -y, 0.0);
  return reduced3_jacobian(ys, all_to_all_spec(n, n, n3), u);
}

double ustar_numeric(int n, int n3, double beta) {
  require(n >= 1 && n3 >= 0, "need n >= 1 and n3 >= 0");
  auto det = [&](double u) { return deadlock_jacobian(u, beta, n, n3).determinant(); };
  double lo = 0.5;
  double f_lo = det(lo);
  double hi = -1;
  for (int k = 1; k <= 250; ++k) {
    double u = 0.5 + 0.01 * k;
    double f = det(u);
    if ((f_lo < 0) != (f < 0) || f == 0) {
      hi = u;
      break;
    }
    lo = u;
    f_lo = f;
  }
  if (hi < 0) throw NumericalFailure("ustar_numeric: no sign change of the deadlock determinant in u in [0.5, 3]");
  while (hi - lo > 1e-12) {
    double mid = 0.5 * (lo + hi);
    double f = det(mid);
    if ((f < 0) == (f_lo < 0)) {
      lo = mid;
      f_lo = f;
    } else {
      hi = mid;
    }
  }
  double u = 0.5 * (lo + hi);
  // Secant polish; keeps the bracket as a safeguard.
  for (int it = 0; it < 4; ++it) {
    double h = 1e-7;
    double d = (det(u + h) - det(u - h)) / (2 * h);
    if (d == 0.0) break;
    double un = u - det(u) / d;
    if (std::abs(un - u) > 1e-9) break;
    u = un;
  }
  return u;
}

UbarStar ubar_star(const Graph& g, const Vec& utilde) {
  require(is_strongly_connected(g), "ubar_star needs a strongly connected graph");
  const Index n = g.size();
  Vec ut = utilde.size() ? utilde : Vec::Zero(n);
  require(ut.size() == n, "utilde length does not match graph size");
  check_zero_sum(ut);
  UbarStar r;
  if (ut.norm() > 0.2 * g.min_degree())
    r.warnings.push_back("|utilde| exceeds 0.2 * min degree; the perturbative singular point may be inaccurate");

  auto mat = [&](double ub) {
    Mat m = (Vec::Constant(n, ub) + ut).asDiagonal() * g.adjacency();
    m.diagonal() -= g.degrees();
    return m;
  };
  auto sign_at = [&](double ub) { return det_sign_log(mat(ub)).first; };

  // Scan outward from 1 for the nearest sign change.
  double lo = 0, hi = 0;
  bool found = false;
  for (int k = 0; k < 50 && !found; ++k) {
    for (int side : {1, -1}) {
      double a = 1.0 + side * 0.01 * k, b = 1.0 + side * 0.01 * (k + 1);
      if (sign_at(a) * sign_at(b) <= 0) {
        lo = std::min(a, b);
        hi = std::max(a, b);
        found = true;
        break;
      }
    }
  }
  if (!found) throw NumericalFailure("ubar_star: no singular point in [0.5, 1.5]");
  int s_lo = sign_at(lo);
  if (s_lo == 0) {
    hi = lo;
  } else {
    while (hi - lo > 1e-9) {
      double mid = 0.5 * (lo + hi);
      int sm = sign_at(mid);
      if (sm == 0) {
        lo = hi = mid;
        break;
      }
      (sm == s_lo ? lo : hi) = mid;
    }
  }
  double ub = 0.5 * (lo + hi);
  // Newton with d/dub log|det| = tr(M^{-1} A_U), where A_U = dM/dub = A.
  for (int it = 0; it < 20; ++it) {
    Mat m = mat(ub);
    Eigen::FullPivLU<Mat> lu(m);
    if (!lu.isInvertible()) break;
    double tr = lu.solve(g.adjacency()).trace();
    if (tr == 0.0 || !std::isfinite(tr)) break;
    double step = -1.0 / tr;
    if (std::abs(step) > 1e-6) break;
    ub += step;
    if (std::abs(step) < 1e-15) break;
  }
  r.ubar = ub;
  Eigen::JacobiSVD<Mat> svd(mat(ub), Eigen::ComputeFullV);
  Vec v = svd.matrixV().col(n - 1);
  r.null_vector = v * (static_cast<double>(n) / v.sum());
  return r;
}

}  // namespace opdyn
