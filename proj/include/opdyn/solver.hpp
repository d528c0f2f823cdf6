#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "opdyn/netgraph.hpp"

namespace opdyn {

using OdeRhs = std::function<Vec(double, const Vec&)>;
using OdeJacobian = std::function<Mat(double, const Vec&)>;

struct OdeSystem {
  OdeRhs rhs;
  OdeJacobian jacobian;  // required by Rosenbrock only
};

enum class Method { RK4, DormandPrince45, Rosenbrock2 };
Method method_from_name(const std::string& name);
std::string method_name(Method m);

struct IntegratorConfig {
  Method method = Method::DormandPrince45;
  double t0 = 0.0;
  double t_end = 1.0;
  double step = 1e-2;  // fixed step for RK4, initial guess for adaptive methods (0 = automatic)
  double rtol = 1e-9;
  double atol = 1e-12;
  double h_min = 1e-14;
  double h_max = std::numeric_limits<double>::infinity();
  long max_steps = 50'000'000;
  double event_tol = 1e-9;
  // When nonempty, only these times are recorded and the stepper lands on each exactly.
  std::vector<double> sample_times;
  bool record = true;
  // Checked after every accepted step; returning true ends the run early.
  std::function<bool(double, const Vec&)> stop_when;

  void validate() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  long steps = 0;
  long rejected = 0;
  bool stopped_early = false;

  const Vec& final_state() const { return states.back(); }
  double final_time() const { return times.back(); }
};

using EventFunction = std::function<double(double, const Vec&)>;

struct EventHit {
  std::size_t event = 0;
  double time = 0.0;
  Vec state;
  int direction = 0;  // +1 rising, -1 falling
};

struct EventResult {
  Trajectory trajectory;
  std::vector<EventHit> hits;
};

Trajectory integrate(const OdeSystem& sys, const Vec& x0, const IntegratorConfig& cfg);
// When terminal is set the run ends at the first hit of any event.
EventResult integrate_with_events(const OdeSystem& sys, const Vec& x0, const std::vector<EventFunction>& events,
                                  const IntegratorConfig& cfg, bool terminal = false);

struct EstimatorConfig {
  double alpha = 1.0;
  double tol = 1e-9;
  double step = 0.0;          // 0 selects a step small enough for the chattering band to sit below tol
  double cap_factor = 2.0;    // hard cap is cap_factor * |ytilde(0)| / lambda2
  bool throw_at_cap = true;
};

struct EstimatorResult {
  Vec w;
  double elapsed = 0.0;
  bool converged = false;
  double initial_error = 0.0;
  double final_error = 0.0;
  double time_bound = 0.0;  // |ytilde(0)| / lambda2
  double max_mean_drift = 0.0;
  double step = 0.0;
  long steps = 0;
  // Error norm sampled at roughly 200 evenly spaced steps, for reporting.
  std::vector<std::pair<double, double>> error_history;
};

EstimatorResult integrate_nonsmooth(const Vec& w0, const Vec& x, const Graph& g, const EstimatorConfig& cfg);

}  // namespace opdyn
