#include <algorithm>
#include <cmath>

#include "opdyn/experiments.hpp"

namespace opdyn {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  if (n == 1) return {a};
  for (int i = 0; i < n; ++i) v.push_back(i == n - 1 ? b : a + (b - a) * i / (n - 1));
  return v;
}

namespace {

Equilibrium deadlock_start(int n, int n3, double beta, double u) {
  const double y = ystar_root<double>(u, beta, 2 * n + n3);
  Vec guess(3);
  guess << y, -y, 0.0;
  return find_equilibrium(ata_reduced3_system(n, n3, beta), guess, u);
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

}  // namespace

double continuation_ustar(int n, int n3, double beta, double u_max) {
  ParametrizedSystem sys = ata_reduced3_system(n, n3, beta);
  ContinuationConfig cfg;
  cfg.p_min = 0.5;
  cfg.p_max = u_max;
  Branch b = continue_branch(sys, deadlock_start(n, n3, beta, 0.5), cfg);
  if (b.singular_points.empty())
    throw NumericalFailure("no singular point on the deadlock branch for beta=" + std::to_string(beta));
  return b.singular_points.front().param;
}

ValueResult run_value_sensitivity(const ValueOptions& opt) {
  require(opt.n1 == opt.n2, "value sensitivity needs n1 == n2 (equal-value symmetric configuration)");
  require(opt.n1 >= 1 && opt.n3 >= 0, "population sizes must satisfy n1 >= 1, n3 >= 0");
  require(!opt.nu_grid.empty(), "nu grid must not be empty");
  for (double nu : opt.nu_grid) require(nu > 0, "nu values must be positive");
  for (double nu : opt.diagram_nus) require(nu > 0, "nu values must be positive");
  const int n_agents = opt.n1 + opt.n2 + opt.n3;

  ValueResult r;
  r.points.resize(opt.nu_grid.size());
  parallel_for(opt.nu_grid.size(), opt.jobs, [&](std::size_t i) {
    ValuePoint& p = r.points[i];
    p.nu = opt.nu_grid[i];
    const double beta = p.nu * p.nu;  // u_I = 1/nu, so beta = nu / u_I
    p.us_hat = us_star_hat(p.nu, n_agents, opt.n3);
    p.us_numeric = continuation_ustar(opt.n1, opt.n3, beta, opt.u_max) / p.nu;
    p.us_determinant = ustar_numeric(opt.n1, opt.n3, beta) / p.nu;
    p.rel_error = std::abs(p.us_hat - p.us_numeric) / p.us_numeric;
  });
  std::vector<double> hat, num;
  for (const auto& p : r.points) {
    hat.push_back(p.us_hat);
    num.push_back(p.us_numeric);
    r.max_rel_error = std::max(r.max_rel_error, p.rel_error);
  }
  r.hat_decreasing = strictly_decreasing(hat);
  r.numeric_decreasing = strictly_decreasing(num);

  r.diagrams.resize(opt.diagram_nus.size());
  parallel_for(opt.diagram_nus.size(), opt.jobs, [&](std::size_t i) {
    const double nu = opt.diagram_nus[i];
    const double beta = nu * nu;
    PitchforkOptions po;
    po.u_min = 0.5;
    po.u_max = opt.u_max;
    r.diagrams[i].nu = nu;
    r.diagrams[i].diagram =
        run_bifurcation_diagram(ata_reduced3_system(opt.n1, opt.n3, beta), deadlock_start(opt.n1, opt.n3, beta, 0.5), po);
  });
  return r;
}

UninformedResult run_uninformed_influence(const UninformedOptions& opt) {
  require(!opt.nu_grid.empty() && !opt.n3_values.empty(), "grids must not be empty");
  UninformedResult r;
  r.nu_grid = opt.nu_grid;
  r.n3_values = opt.n3_values;
  for (int n3 : opt.n3_values) {
    require(n3 >= 0 && n3 <= opt.n_agents - 2, "n3 must lie in [0, N-2]");
    require((opt.n_agents - n3) % 2 == 0, "N - n3 must be even so that n1 = n2 = (N - n3)/2 is integral (n3=" +
                                              std::to_string(n3) + ")");
    std::vector<double> curve;
    for (double nu : opt.nu_grid) {
      require(nu > 0, "nu values must be positive");
      curve.push_back(us_star_hat(nu, opt.n_agents, n3));
    }
    r.curves.push_back(std::move(curve));
  }
  std::vector<std::size_t> order(opt.n3_values.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return opt.n3_values[a] < opt.n3_values[b]; });
  r.ordered = true;
  for (std::size_t k = 1; k < order.size(); ++k)
    for (std::size_t i = 0; i < opt.nu_grid.size(); ++i)
      if (!(r.curves[order[k]][i] < r.curves[order[k - 1]][i])) r.ordered = false;
  return r;
}

}  // namespace opdyn
