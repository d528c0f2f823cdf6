#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "opdyn/bifurcation.hpp"

namespace opdyn {

// Positive root of y = u S(y) for u > 1.
double y_s(double u, const Sigmoid& s = Sigmoid());

// Root of (N-1) y + u tanh(y) - beta = 0. Templated so tests can run it in extended precision.
template <class Real>
Real ystar_root(Real u, Real beta, int n_agents) {
  using std::abs;
  using std::cosh;
  using std::tanh;
  if (n_agents < 2) throw InvalidInput("ystar_root needs N >= 2");
  if (u < 0) throw InvalidInput("ystar_root needs u >= 0");
  const Real nm1 = Real(n_agents - 1);
  if (beta == 0) return Real(0);
  Real y = beta / (nm1 + u);
  const Real eps = std::numeric_limits<Real>::epsilon();
  for (int it = 0; it < 200; ++it) {
    Real c = cosh(y);
    Real g = nm1 * y + u * tanh(y) - beta;
    Real dg = nm1 + u / (c * c);
    Real dy = g / dg;
    y -= dy;
    if (abs(dy) <= 4 * eps * abs(y)) break;
  }
  return y;
}

template <class Real>
Real ystar_series(Real u, Real beta, int n_agents) {
  const Real m = Real(n_agents - 1) + u;
  return beta / m + u * beta * beta * beta / (3 * m * m * m * m);
}

double ustar_coefficient(int n_agents, int n3);
double ustar_series(double beta, int n_agents, int n3);
double us_star_hat(double nu, int n_agents, int n3);

// Jacobian of the all-to-all reduced model at the deadlock state (y*, -y*, 0).
Eigen::Matrix3d deadlock_jacobian(double u, double beta, int n, int n3);
// Singular point of the deadlock branch: det of deadlock_jacobian vanishes.
double ustar_numeric(int n, int n3, double beta);

struct UbarStar {
  double ubar = 1.0;
  Vec null_vector;  // normalized to mean 1
  std::vector<std::string> warnings;
};
UbarStar ubar_star(const Graph& g, const Vec& utilde);

}  // namespace opdyn
