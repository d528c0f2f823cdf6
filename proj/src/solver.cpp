#include "opdyn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace opdyn {

Method method_from_name(const std::string& name) {
  if (name == "rk4") return Method::RK4;
  if (name == "rk45" || name == "dopri5") return Method::DormandPrince45;
  if (name == "ros2") return Method::Rosenbrock2;
  throw InvalidInput("unknown integration method '" + name + "' (valid: rk4, rk45, ros2)");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::RK4: return "rk4";
    case Method::DormandPrince45: return "rk45";
    case Method::Rosenbrock2: return "ros2";
  }
  return "rk45";
}

void IntegratorConfig::validate() const {
  require(std::isfinite(t0) && std::isfinite(t_end) && t_end >= t0, "integration interval must satisfy t_end >= t0");
  require(step >= 0.0, "step must be nonnegative");
  if (method == Method::RK4) require(step > 0.0, "fixed-step RK4 needs a positive step");
  require(rtol > 0.0 && atol > 0.0, "tolerances must be positive");
  require(h_min > 0.0 && h_max > 0.0, "step bounds must be positive");
  require(event_tol > 0.0, "event tolerance must be positive");
  for (std::size_t i = 1; i < sample_times.size(); ++i)
    require(sample_times[i] > sample_times[i - 1], "sample times must be strictly increasing");
}

namespace {

std::string at_time(double t) {
  std::ostringstream os;
  os.precision(17);
  os << t;
  return os.str();
}

bool finite(const Vec& v) { return v.allFinite(); }

struct StepOut {
  Vec x;
  Vec err;  // empty for fixed-step methods
};

// Dormand-Prince 5(4) coefficients.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

StepOut step_once(Method method, const OdeSystem& sys, double t, const Vec& x, double h) {
  const OdeRhs& f = sys.rhs;
  switch (method) {
    case Method::RK4: {
      Vec k1 = f(t, x);
      Vec k2 = f(t + 0.5 * h, x + 0.5 * h * k1);
      Vec k3 = f(t + 0.5 * h, x + 0.5 * h * k2);
      Vec k4 = f(t + h, x + h * k3);
      return {x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), Vec()};
    }
    case Method::DormandPrince45: {
      Vec k1 = f(t, x);
      Vec k2 = f(t + h / 5, x + h * (a21 * k1));
      Vec k3 = f(t + 3 * h / 10, x + h * (a31 * k1 + a32 * k2));
      Vec k4 = f(t + 4 * h / 5, x + h * (a41 * k1 + a42 * k2 + a43 * k3));
      Vec k5 = f(t + 8 * h / 9, x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      Vec k6 = f(t + h, x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      Vec xn = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      Vec k7 = f(t + h, xn);
      Vec err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      return {std::move(xn), std::move(err)};
    }
    case Method::Rosenbrock2: {
      if (!sys.jacobian) throw InvalidInput("Rosenbrock integration needs a Jacobian");
      const double gamma = 1.0 + 1.0 / std::sqrt(2.0);
      Mat w = Mat::Identity(x.size(), x.size()) - gamma * h * sys.jacobian(t, x);
      Eigen::PartialPivLU<Mat> lu(w);
      Vec k1 = lu.solve(f(t, x));
      Vec k2 = lu.solve(f(t + h, x + h * k1) - 2.0 * k1);
      return {x + h * (1.5 * k1 + 0.5 * k2), 0.5 * h * (k1 + k2)};
    }
  }
  return {x, Vec()};
}

int method_order(Method m) { return m == Method::Rosenbrock2 ? 1 : 4; }

double error_norm(const Vec& err, const Vec& x0, const Vec& x1, double rtol, double atol) {
  double e = 0.0;
  for (Index i = 0; i < err.size(); ++i) {
    double sc = atol + rtol * std::max(std::abs(x0(i)), std::abs(x1(i)));
    e = std::max(e, std::abs(err(i)) / sc);
  }
  return e;
}

double initial_step(const OdeSystem& sys, const Vec& x0, const IntegratorConfig& cfg) {
  if (cfg.step > 0) return cfg.step;
  Vec f0 = sys.rhs(cfg.t0, x0);
  double d0 = 0.0, d1 = 0.0;
  for (Index i = 0; i < x0.size(); ++i) {
    double sc = cfg.atol + cfg.rtol * std::abs(x0(i));
    d0 = std::max(d0, std::abs(x0(i)) / sc);
    d1 = std::max(d1, std::abs(f0(i)) / sc);
  }
  double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  return std::min(h, std::max(cfg.t_end - cfg.t0, cfg.h_min));
}

struct Runner {
  const OdeSystem& sys;
  const IntegratorConfig& cfg;
  const std::vector<EventFunction>& events;
  bool terminal;
  EventResult out;

  void record(double t, const Vec& x) {
    if (!cfg.record) return;
    if (!cfg.sample_times.empty()) return;
    out.trajectory.times.push_back(t);
    out.trajectory.states.push_back(x);
  }

  // Localizes sign changes inside an accepted step. Returns the earliest terminal hit time, if any.
  bool scan_events(double t, const Vec& x, double h, const Vec& xn, std::vector<double>& g_prev, double& t_stop,
                   Vec& x_stop) {
    bool stop = false;
    std::vector<EventHit> found;
    for (std::size_t k = 0; k < events.size(); ++k) {
      double g1 = events[k](t + h, xn);
      double g0 = g_prev[k];
      if ((g0 < 0 && g1 >= 0) || (g0 > 0 && g1 <= 0)) {
        double lo = 0.0, hi = h;
        Vec x_hi = xn;
        while (hi - lo > cfg.event_tol) {
          double mid = 0.5 * (lo + hi);
          Vec xm = step_once(cfg.method, sys, t, x, mid).x;
          double gm = events[k](t + mid, xm);
          if ((g0 < 0 && gm >= 0) || (g0 > 0 && gm <= 0)) {
            hi = mid;
            x_hi = std::move(xm);
          } else {
            lo = mid;
          }
        }
        found.push_back({k, t + hi, x_hi, g1 > g0 ? 1 : -1});
      }
      g_prev[k] = g1;
    }
    std::sort(found.begin(), found.end(), [](const EventHit& a, const EventHit& b) { return a.time < b.time; });
    for (auto& hit : found) {
      if (terminal && stop) break;
      out.hits.push_back(hit);
      if (terminal) {
        stop = true;
        t_stop = hit.time;
        x_stop = hit.state;
      }
    }
    return stop;
  }

  void run(const Vec& x0) {
    cfg.validate();
    if (!finite(x0)) throw InvalidInput("initial state is not finite");
    double t = cfg.t0;
    Vec x = x0;
    std::size_t next_sample = 0;
    auto emit_samples = [&](double t_now, const Vec& x_now) {
      while (next_sample < cfg.sample_times.size() && cfg.sample_times[next_sample] <= t_now) {
        if (cfg.sample_times[next_sample] == t_now && cfg.record) {
          out.trajectory.times.push_back(t_now);
          out.trajectory.states.push_back(x_now);
        }
        ++next_sample;
      }
    };
    while (next_sample < cfg.sample_times.size() && cfg.sample_times[next_sample] < t) ++next_sample;
    emit_samples(t, x);
    record(t, x);

    std::vector<double> g_prev(events.size());
    for (std::size_t k = 0; k < events.size(); ++k) g_prev[k] = events[k](t, x);

    const bool adaptive = cfg.method != Method::RK4;
    double h = adaptive ? initial_step(sys, x0, cfg) : cfg.step;
    const double expo = -1.0 / (method_order(cfg.method) + 1);
    Trajectory& tr = out.trajectory;

    while (t < cfg.t_end) {
      if (tr.steps + tr.rejected >= cfg.max_steps)
        throw NumericalFailure("integration exceeded " + std::to_string(cfg.max_steps) + " steps at t=" + at_time(t));
      double target = cfg.t_end;
      if (next_sample < cfg.sample_times.size()) target = std::min(target, cfg.sample_times[next_sample]);
      double h_try = std::min(h, cfg.h_max);
      bool lands = false;
      if (t + h_try >= target || target - (t + h_try) <= 1e-12 * std::max(1.0, std::abs(target))) {
        h_try = target - t;
        lands = true;
      }
      if (adaptive && h_try < cfg.h_min && !lands)
        throw NumericalFailure("step size underflow at t=" + at_time(t));

      StepOut s = step_once(cfg.method, sys, t, x, h_try);
      if (!finite(s.x)) {
        if (!adaptive) throw NumericalFailure("non-finite state at t=" + at_time(t));
        ++tr.rejected;
        h = 0.25 * h_try;
        if (h < cfg.h_min) throw NumericalFailure("non-finite state at t=" + at_time(t));
        continue;
      }
      double fac = 1.0;
      if (adaptive) {
        double err = error_norm(s.err, x, s.x, cfg.rtol, cfg.atol);
        fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, expo), 0.2, 5.0);
        if (err > 1.0) {
          ++tr.rejected;
          h = h_try * std::min(fac, 0.9);
          if (h < cfg.h_min) throw NumericalFailure("step size underflow at t=" + at_time(t));
          continue;
        }
      }
      ++tr.steps;
      double t_new = lands ? target : t + h_try;
      if (!events.empty()) {
        double t_stop = 0.0;
        Vec x_stop;
        if (scan_events(t, x, h_try, s.x, g_prev, t_stop, x_stop)) {
          t = t_stop;
          x = std::move(x_stop);
          record(t, x);
          if (!cfg.sample_times.empty() && cfg.record) {
            tr.times.push_back(t);
            tr.states.push_back(x);
          }
          tr.stopped_early = true;
          break;
        }
      }
      t = t_new;
      x = std::move(s.x);
      emit_samples(t, x);
      record(t, x);
      if (adaptive) h = std::max(h_try * fac, lands ? h : 0.0);
      if (cfg.stop_when && cfg.stop_when(t, x)) {
        tr.stopped_early = true;
        if (!cfg.sample_times.empty() && cfg.record && (tr.times.empty() || tr.times.back() != t)) {
          tr.times.push_back(t);
          tr.states.push_back(x);
        }
        break;
      }
    }
    if (tr.times.empty() || tr.times.back() != t) {
      tr.times.push_back(t);
      tr.states.push_back(x);
    }
  }
};

}  // namespace

Trajectory integrate(const OdeSystem& sys, const Vec& x0, const IntegratorConfig& cfg) {
  std::vector<EventFunction> none;
  Runner r{sys, cfg, none, false, {}};
  r.run(x0);
  return std::move(r.out.trajectory);
}

EventResult integrate_with_events(const OdeSystem& sys, const Vec& x0, const std::vector<EventFunction>& events,
                                  const IntegratorConfig& cfg, bool terminal) {
  Runner r{sys, cfg, events, terminal, {}};
  r.run(x0);
  return std::move(r.out);
}

}  // namespace opdyn
