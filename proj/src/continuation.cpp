#include <cmath>

#include "opdyn/bifurcation.hpp"

namespace opdyn {

void ContinuationConfig::validate() const {
  require(p_max > p_min, "continuation range must satisfy p_max > p_min");
  require(h_min > 0 && h_init >= h_min && h_max >= h_init, "continuation steps must satisfy 0 < h_min <= h_init <= h_max");
  require(direction == 1 || direction == -1, "continuation direction must be +1 or -1");
  require(max_points > 1, "max_points must exceed 1");
  require(corrector_tol > 0 && refine_tol > 0, "continuation tolerances must be positive");
  require(probe_offset > 0, "probe offset must be positive");
}

namespace {

struct Corrected {
  Vec z;
  int iterations = 0;
  bool ok = false;
};

Vec eval_f(const ParametrizedSystem& sys, const Vec& z) { return sys.field(z.head(sys.dim), z(sys.dim)); }

Mat extended_jacobian(const ParametrizedSystem& sys, const Vec& z) {
  const Index n = sys.dim;
  Mat m(n, n + 1);
  m.leftCols(n) = sys.jacobian(z.head(n), z(n));
  m.col(n) = sys.param_derivative(z.head(n), z(n));
  return m;
}

// Newton on F(z) = 0 together with t^T (z - z0) = s.
Corrected correct(const ParametrizedSystem& sys, Vec z, const Vec& t, const Vec& z0, double s, double tol,
                  int max_iter) {
  const Index n = sys.dim;
  Corrected c;
  for (int it = 0; it <= max_iter; ++it) {
    Vec f = eval_f(sys, z);
    double arc = t.dot(z - z0) - s;
    if (!f.allFinite()) return c;
    if (f.lpNorm<Eigen::Infinity>() <= tol && std::abs(arc) <= 1e-13 * (1.0 + std::abs(s))) {
      c.z = std::move(z);
      c.iterations = it;
      c.ok = true;
      return c;
    }
    if (it == max_iter) break;
    Mat b(n + 1, n + 1);
    b.topRows(n) = extended_jacobian(sys, z);
    b.row(n) = t.transpose();
    Vec rhs(n + 1);
    rhs.head(n) = -f;
    rhs(n) = -arc;
    Eigen::PartialPivLU<Mat> lu(b);
    Vec dz = lu.solve(rhs);
    if (!dz.allFinite()) return c;
    z += dz;
    // Converged to roundoff even if the residual sits a hair above tol.
    if (dz.lpNorm<Eigen::Infinity>() <= 1e-14 * (1.0 + z.lpNorm<Eigen::Infinity>())) {
      Vec f2 = eval_f(sys, z);
      if (f2.lpNorm<Eigen::Infinity>() <= 100 * tol) {
        c.z = std::move(z);
        c.iterations = it + 1;
        c.ok = true;
        return c;
      }
    }
  }
  return c;
}

Vec tangent_at(const ParametrizedSystem& sys, const Vec& z, const Vec& t_ref) {
  const Index n = sys.dim;
  Mat b(n + 1, n + 1);
  b.topRows(n) = extended_jacobian(sys, z);
  b.row(n) = t_ref.transpose();
  Vec e = Vec::Zero(n + 1);
  e(n) = 1.0;
  Vec t = b.partialPivLu().solve(e);
  return t / t.norm();
}

Vec initial_tangent(const ParametrizedSystem& sys, const Vec& z, int direction, const std::optional<Vec>& hint) {
  Mat m = extended_jacobian(sys, z);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  Vec t = svd.matrixV().col(m.cols() - 1);
  double orient = hint ? t.dot(*hint) : direction * t(sys.dim);
  if (orient < 0) t = -t;
  return t / t.norm();
}

struct NullPair {
  Vec right;
  Vec left;
};

NullPair null_vectors(const Mat& j) {
  Eigen::JacobiSVD<Mat> svd(j, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Index k = j.cols() - 1;
  Vec r = svd.matrixV().col(k);
  Vec l = svd.matrixU().col(k);
  Index imax = 0;
  r.cwiseAbs().maxCoeff(&imax);
  double sgn = std::abs(r.sum()) > 1e-8 ? r.sum() : r(imax);
  if (sgn < 0) r = -r;
  return {r, l};
}

Equilibrium make_equilibrium(const ParametrizedSystem& sys, const Vec& z) {
  Equilibrium eq;
  eq.x = z.head(sys.dim);
  eq.param = z(sys.dim);
  assess_stability(eq, sys.jacobian(eq.x, eq.param));
  return eq;
}

// Newton on F(x, p) = 0 with phi^T (x - x_ref) = offset, p free.
std::optional<Vec> constrained_solve(const ParametrizedSystem& sys, const Vec& x_ref, double p_ref, const Vec& phi,
                                     double offset) {
  const Index n = sys.dim;
  Vec z(n + 1);
  z.head(n) = x_ref + offset * phi;
  z(n) = p_ref;
  for (int it = 0; it < 60; ++it) {
    Vec f = eval_f(sys, z);
    double c = phi.dot(z.head(n) - x_ref) - offset;
    if (!f.allFinite()) return std::nullopt;
    if (f.lpNorm<Eigen::Infinity>() <= 1e-12 && std::abs(c) <= 1e-14) return z;
    Mat b = Mat::Zero(n + 1, n + 1);
    b.topRows(n) = extended_jacobian(sys, z);
    b.row(n).head(n) = phi.transpose();
    Vec rhs(n + 1);
    rhs.head(n) = -f;
    rhs(n) = -c;
    Vec dz = b.partialPivLu().solve(rhs);
    if (!dz.allFinite()) return std::nullopt;
    z += dz;
    if (dz.lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + z.lpNorm<Eigen::Infinity>())) {
      if (eval_f(sys, z).lpNorm<Eigen::Infinity>() <= 1e-10) return z;
    }
  }
  return std::nullopt;
}

}  // namespace

SingularKind classify_singularity(const ParametrizedSystem& sys, const SingularPoint& sp, bool symmetric_trunk,
                                  double probe_offset) {
  const Index n = sys.dim;
  if (sp.tangent_flip) {
    Mat j = sys.jacobian(sp.state, sp.param);
    NullPair np = null_vectors(j);
    const double eps = 1e-4;
    Vec f0 = sys.field(sp.state, sp.param);
    Vec d2 = (sys.field(sp.state + eps * np.right, sp.param) + sys.field(sp.state - eps * np.right, sp.param) - 2 * f0) /
             (eps * eps);
    double a = np.left.dot(d2);
    double b = np.left.dot(sys.param_derivative(sp.state, sp.param));
    return (std::abs(a) > 1e-8 && std::abs(b) > 1e-8) ? SingularKind::Fold : SingularKind::Ambiguous;
  }
  if (!sp.det_flip) return SingularKind::Ambiguous;
  if (symmetric_trunk) return SingularKind::Pitchfork;
  auto plus = constrained_solve(sys, sp.state, sp.param, sp.null_vector, probe_offset);
  auto minus = constrained_solve(sys, sp.state, sp.param, sp.null_vector, -probe_offset);
  if (!plus || !minus) return SingularKind::Ambiguous;
  double dp = (*plus)(n) - sp.param;
  double dm = (*minus)(n) - sp.param;
  const double floor = 1e-12;
  if (std::abs(dp) > floor && std::abs(dm) > floor && (dp > 0) == (dm > 0)) return SingularKind::Pitchfork;
  return SingularKind::Ambiguous;
}

Equilibrium branch_switch(const ParametrizedSystem& sys, const SingularPoint& sp, int direction, double offset) {
  require(direction == 1 || direction == -1, "branch switch direction must be +1 or -1");
  require(offset > 0, "branch switch offset must be positive");
  require(sp.null_vector.size() == sys.dim, "singular point has no null vector");
  auto z = constrained_solve(sys, sp.state, sp.param, sp.null_vector, direction * offset);
  if (!z) throw NumericalFailure("branch switch Newton failed at param " + std::to_string(sp.param));
  return make_equilibrium(sys, *z);
}

Branch continue_branch(const ParametrizedSystem& sys, const Equilibrium& start, const ContinuationConfig& cfg,
                       const std::optional<Vec>& tangent_hint) {
  cfg.validate();
  const Index n = sys.dim;
  require(start.x.size() == n, "start equilibrium has the wrong dimension");
  if (sys.field(start.x, start.param).lpNorm<Eigen::Infinity>() > 1e-9)
    throw InvalidInput("continuation start is not a converged equilibrium");

  Branch br;
  Vec z(n + 1);
  z.head(n) = start.x;
  z(n) = start.param;
  Vec t = initial_tangent(sys, z, cfg.direction, tangent_hint);
  double h = cfg.h_init;
  double s = 0.0;
  auto [det_sign, log_det] = det_sign_log(sys.jacobian(start.x, start.param));
  br.points.push_back({make_equilibrium(sys, z), det_sign, log_det, 0.0});

  auto refine = [&](const Vec& za, const Vec& ta, double h_ab, bool fold_test, int sign_a) -> Vec {
    double lo = 0.0, hi = h_ab;
    Vec z_hi;
    while (hi - lo > 1e-10 * std::max(1.0, h_ab)) {
      double mid = 0.5 * (lo + hi);
      Corrected c = correct(sys, za + mid * ta, ta, za, mid, cfg.corrector_tol, cfg.corrector_max_iter + 10);
      if (!c.ok) break;
      int sg;
      if (fold_test) {
        Vec tm = tangent_at(sys, c.z, ta);
        sg = tm(n) > 0 ? 1 : (tm(n) < 0 ? -1 : 0);
      } else {
        sg = det_sign_log(sys.jacobian(c.z.head(n), c.z(n))).first;
      }
      if (sg == sign_a) {
        lo = mid;
      } else {
        hi = mid;
        z_hi = c.z;
      }
      if (z_hi.size() && std::abs(hi - lo) < 1e-12) break;
    }
    if (!z_hi.size()) {
      Corrected c = correct(sys, za + hi * ta, ta, za, hi, cfg.corrector_tol, cfg.corrector_max_iter + 10);
      z_hi = c.ok ? c.z : za + hi * ta;
    }
    // Take the midpoint of the final bracket as the reported location.
    Corrected c = correct(sys, za + 0.5 * (lo + hi) * ta, ta, za, 0.5 * (lo + hi), cfg.corrector_tol,
                          cfg.corrector_max_iter + 10);
    return c.ok ? c.z : z_hi;
  };

  while (static_cast<int>(br.points.size()) < cfg.max_points) {
    Corrected c = correct(sys, z + h * t, t, z, h, cfg.corrector_tol, cfg.corrector_max_iter);
    Vec t_new;
    if (c.ok) {
      t_new = tangent_at(sys, c.z, t);
      if (t.dot(t_new) < 0.95 && h > cfg.h_min) c.ok = false;
    }
    if (!c.ok) {
      h *= 0.5;
      if (h < cfg.h_min) {
        br.termination = "corrector failure at " + sys.param_name + "=" + std::to_string(z(n));
        return br;
      }
      continue;
    }
    Vec z_new = c.z;
    auto [sign_new, log_new] = det_sign_log(sys.jacobian(z_new.head(n), z_new(n)));
    const bool det_flip = sign_new * det_sign < 0;
    const bool tan_flip = t(n) * t_new(n) < 0;
    if (det_flip || tan_flip) {
      SingularPoint sp;
      sp.det_flip = det_flip;
      sp.tangent_flip = tan_flip;
      Vec zs;
      if (tan_flip) {
        int sa = t(n) > 0 ? 1 : -1;
        zs = refine(z, t, h, true, sa);
      } else {
        zs = refine(z, t, h, false, det_sign);
      }
      sp.state = zs.head(n);
      sp.param = zs(n);
      sp.null_vector = null_vectors(sys.jacobian(sp.state, sp.param)).right;
      sp.kind = cfg.classify ? classify_singularity(sys, sp, cfg.symmetric_trunk, cfg.probe_offset)
                             : SingularKind::Ambiguous;
      if (sp.param >= cfg.p_min && sp.param <= cfg.p_max) br.singular_points.push_back(sp);
    }
    s += h;
    const double p_new = z_new(n);
    if (p_new > cfg.p_max || p_new < cfg.p_min) {
      const double bound = p_new > cfg.p_max ? cfg.p_max : cfg.p_min;
      const double frac = (bound - z(n)) / (p_new - z(n));
      Vec zb = z + frac * (z_new - z);
      try {
        Equilibrium eq = find_equilibrium(sys, zb.head(n), bound);
        zb.head(n) = eq.x;
        zb(n) = bound;
      } catch (const NumericalFailure&) {
        zb = z_new;
      }
      auto [sb, lb] = det_sign_log(sys.jacobian(zb.head(n), zb(n)));
      br.points.push_back({make_equilibrium(sys, zb), sb, lb, s});
      br.termination = "reached " + sys.param_name + " bound";
      return br;
    }
    br.points.push_back({make_equilibrium(sys, z_new), sign_new, log_new, s});
    z = std::move(z_new);
    t = std::move(t_new);
    det_sign = sign_new;
    if (c.iterations <= 3) h = std::min(1.5 * h, cfg.h_max);
  }
  br.termination = "point limit";
  return br;
}

}  // namespace opdyn
