#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "opdyn/approximations.hpp"
#include "opdyn/bifurcation.hpp"
#include "opdyn/solver.hpp"

namespace opdyn {

// Deterministic U(lo, hi) draws from a seeded mt19937_64.
Vec random_uniform(Index n, double lo, double hi, std::uint64_t seed);

// Runs fn(i) for i in [0, n) on up to `jobs` threads; results stay indexed by i.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

struct SettleOptions {
  double tol = 1e-8;       // |F|_inf at which integration stops
  double horizon = 200.0;  // normalized time limit
  double rtol = 1e-10;
  double atol = 1e-13;
};

// Integrates dx/ds = F(x, p) until |F| < tol, then polishes with Newton.
Equilibrium settle_equilibrium(const ParametrizedSystem& sys, const Vec& x0, double param,
                               const SettleOptions& opt = {});

// ---- pitchfork diagram -------------------------------------------------------------------------

struct PitchforkOptions {
  Sigmoid sigmoid;
  Vec beta;  // empty = 0
  double u_min = 0.5;
  double u_max = 3.0;
  ContinuationConfig continuation;  // range fields are overwritten from u_min/u_max
  double switch_offset = 1e-3;
  bool switch_branches = true;
  bool symmetric_trunk = false;
};

struct SwitchedBranch {
  std::size_t from_singular = 0;
  int direction = 1;
  Branch branch;
};

struct PitchforkDiagram {
  Branch trunk;
  std::vector<SwitchedBranch> switched;
  double max_consensus_spread = 0.0;  // over switched-branch points with param > pitchfork param
};

PitchforkDiagram run_pitchfork_diagram(const Graph& g, const PitchforkOptions& opt = {});
// Generic version on any parametrized system. The trunk starts from `start`.
PitchforkDiagram run_bifurcation_diagram(const ParametrizedSystem& sys, const Equilibrium& start,
                                         const PitchforkOptions& opt);

// ---- hysteresis --------------------------------------------------------------------------------

struct HysteresisOptions {
  PopulationSpec spec = all_to_all_spec(5, 5, 10);
  double u = 1.2;
  double beta_a = 5.0;
  double beta_b_min = 0.0;
  double beta_b_max = 12.0;
  double beta_b_step = 0.1;
  std::uint64_t seed = 1;
  double x0_amplitude = 1e-3;
  SettleOptions settle;
  Sigmoid sigmoid;
};

struct HysteresisResult {
  std::vector<double> grid;
  std::vector<double> y_up;    // settled mean opinion while beta_B increases
  std::vector<double> y_down;  // same grid order, values from the decreasing sweep
  std::vector<double> residual_up, residual_down;
  std::optional<double> switch_up;    // first beta_B (increasing) with y < 0
  std::optional<double> switch_down;  // first beta_B (decreasing) with y > 0
  double width = 0.0;
  double max_residual = 0.0;
};

HysteresisResult run_hysteresis(const HysteresisOptions& opt = {});

// ---- quintic transition ------------------------------------------------------------------------

PopulationSpec quintic_default_spec();

struct QuinticOptions {
  PopulationSpec spec = quintic_default_spec();
  std::vector<double> betas{0.0, 1.0, 3.0};
  double u_min = 0.5;
  double u_max = 3.0;
  int jobs = 1;
  Sigmoid sigmoid;
};

struct QuinticCase {
  double beta = 0.0;
  std::string classification;  // supercritical | subcritical | ambiguous
  std::optional<double> u_star;
  std::vector<double> fold_params;
  PitchforkDiagram diagram;
};

std::vector<QuinticCase> run_quintic_transition(const QuinticOptions& opt = {});

// ---- model reduction ---------------------------------------------------------------------------

struct ReductionOptions {
  PopulationSpec spec = all_to_all_spec(4, 4, 4);
  double u = 2.0;
  double beta_a = 1.0;
  double beta_b = 1.0;
  std::uint64_t seed = 1;
  double x0_amplitude = 0.5;
  double t_end = 20.0;
  double sample_dt = 0.01;
  double bound_window = 2.0;  // step-to-step decay ratios only checked for t <= bound_window
  bool start_on_manifold = false;
  Sigmoid sigmoid;
};

struct ReductionResult {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<ReducedState> reduced;  // independent reduced-model integration, same times
  std::vector<double> spread;         // V(x(t))
  double min_group_degree = 0.0;
  double max_bound_ratio = 0.0;       // max V(t) / (V(0) exp(-d t)) over all samples
  double max_pair_ratio = 0.0;        // max of V(t2)/V(t1) / exp(-d (t2 - t1)) over consecutive samples in the window
  double terminal_mean_error = 0.0;   // |group means of full run - reduced run| at t_end
  double max_manifold_distance = 0.0;
};

ReductionResult run_reduction_demo(const ReductionOptions& opt = {});

// ---- value sensitivity and uninformed influence -----------------------------------------------

std::vector<double> linspace(double a, double b, int n);

struct ValueOptions {
  int n1 = 10;
  int n2 = 10;
  int n3 = 80;
  std::vector<double> nu_grid = linspace(0.5, 2.0, 16);
  std::vector<double> diagram_nus{0.5, 1.0, 2.0};
  double u_max = 3.0;
  int jobs = 1;
};

struct ValuePoint {
  double nu = 0.0;
  double us_hat = 0.0;
  double us_numeric = 0.0;  // continuation-detected u*/nu
  double us_determinant = 0.0;  // ustar_numeric / nu
  double rel_error = 0.0;
};

struct ValueDiagram {
  double nu = 0.0;
  PitchforkDiagram diagram;  // parameter is u; u_S = u / nu
};

struct ValueResult {
  std::vector<ValuePoint> points;
  std::vector<ValueDiagram> diagrams;
  double max_rel_error = 0.0;
  bool hat_decreasing = false;
  bool numeric_decreasing = false;
};

ValueResult run_value_sensitivity(const ValueOptions& opt = {});
// Continuation-detected pitchfork of the all-to-all reduced model's deadlock branch.
double continuation_ustar(int n, int n3, double beta, double u_max = 3.0);

struct UninformedOptions {
  int n_agents = 7;
  std::vector<int> n3_values{1, 3, 5};
  std::vector<double> nu_grid = linspace(0.1, 2.0, 20);
};

struct UninformedResult {
  std::vector<double> nu_grid;
  std::vector<int> n3_values;
  std::vector<std::vector<double>> curves;  // curves[k][i] = us_star_hat(nu_i, N, n3_k)
  bool ordered = false;                     // larger n3 strictly lower at every nu
};

UninformedResult run_uninformed_influence(const UninformedOptions& opt = {});

// ---- adaptive closed loop ----------------------------------------------------------------------

enum class AdaptiveCase { Symmetric, Case1, Case2 };
AdaptiveCase adaptive_case_from_name(const std::string& name);
std::string to_string(AdaptiveCase c);

struct AdaptiveOptions {
  AdaptiveCase which = AdaptiveCase::Symmetric;
  Graph graph = complete_graph(10);
  Vec utilde;  // empty = 0
  Vec beta;    // empty = 0
  double ubar0 = 0.9;
  AdaptiveConfig adaptive;
  EstimatorConfig estimator;
  double x0_amplitude = 1e-3;
  std::uint64_t seed = 1;
  double escape_band = 0.05;
  double horizon = 0.0;  // 0 selects 500 / epsilon
  double rtol = 1e-10;
  double atol = 1e-16;
  double rest_tol = 1e-5;  // stop when |y_th^2 - y^2| and |dx/ds| fall below this
  double jump_rate_factor = 3.0;  // |dy/ds| above this multiple of epsilon is a jump
  Sigmoid sigmoid;
};

// Default beta vectors of the two unfolded cases on an N-agent complete graph.
Vec adaptive_case_beta(AdaptiveCase c, int n_agents);

struct AdaptiveResult {
  EstimatorResult estimator;
  std::vector<double> times;  // phase-2 fast time, offset by the estimator duration
  std::vector<Vec> states;
  std::vector<double> ubar;
  std::vector<double> y;
  std::vector<double> yhat;   // common estimate used in the slow equation
  UbarStar ubar_star;
  std::optional<double> ubar_c;
  std::optional<double> escape_time;
  double terminal_y = 0.0;
  double terminal_ubar = 0.0;
  double terminal_dubar = 0.0;
  double terminal_field = 0.0;
  bool reached_rest = false;
  double max_dy_ds = 0.0;
  std::optional<double> jump_time;
  std::optional<double> jump_ubar;
  std::optional<double> fold_ubar;  // first fold of the deadlock branch, from continuation
  bool ubar_monotone_below_threshold = true;
  double max_box_violation = 0.0;
  std::vector<std::string> warnings;
};

AdaptiveResult run_adaptive(const AdaptiveOptions& opt);

// Max over the recorded trajectory of |x_i(t)| - max(|x_i(0)|, gain_i + |beta_i| / d_i), clipped at 0.
double absorbing_box_violation(const std::vector<Vec>& states, const Graph& g, const Vec& gain, const Vec& beta);

}  // namespace opdyn
