#include "opdyn/commands.hpp"

#include <cmath>
#include <filesystem>

#include "opdyn/experiments.hpp"

namespace opdyn {

namespace {

// Strict reader that also records every value it hands out, defaults included.
class Reader {
 public:
  Reader(const json& j, const std::string& where) : o_(j, where) { out_ = json::object(); }

  double num(const std::string& k, double def) { return put(k, o_.number(k, def)); }
  int integer(const std::string& k, int def) { return put(k, o_.integer(k, def)); }
  std::uint64_t u64(const std::string& k, std::uint64_t def) { return put(k, o_.uint64(k, def)); }
  bool flag(const std::string& k, bool def) { return put(k, o_.boolean(k, def)); }
  std::string str(const std::string& k, const std::string& def) { return put(k, o_.string(k, def)); }
  std::vector<double> nums(const std::string& k, const std::vector<double>& def) { return put(k, o_.numbers(k, def)); }
  std::vector<int> ints(const std::string& k, const std::vector<int>& def) {
    std::vector<double> d(def.begin(), def.end());
    std::vector<int> out;
    for (double v : o_.numbers(k, d)) {
      if (v != std::floor(v)) throw InvalidInput(o_.where() + "." + k + ": expected integers");
      out.push_back(static_cast<int>(v));
    }
    return put(k, out);
  }
  Vec vec(const std::string& k, const Vec& def) {
    Vec v = o_.has(k) ? vec_from_json(o_.raw(k), o_.where() + "." + k) : def;
    out_[k] = vec_to_json(v);
    return v;
  }
  GraphSpec graph(const std::string& k, const GraphSpec& def) {
    GraphSpec g = o_.has(k) ? GraphSpec::from_json(o_.raw(k), o_.where() + "." + k) : def;
    out_[k] = g.to_json();
    return g;
  }
  PopulationSpec population(const std::string& k, const PopulationSpec& def) {
    PopulationSpec p = o_.has(k) ? population_from_json(o_.raw(k), o_.where() + "." + k) : def;
    p.validate();
    out_[k] = population_to_json(p);
    return p;
  }
  Sigmoid sigmoid() { return Sigmoid::from_name(str("sigmoid", "tanh")); }
  void set(const std::string& k, const json& v) { out_[k] = v; }
  void take(const std::string& k) {
    if (o_.has(k)) o_.raw(k);
  }
  json finish() {
    o_.finish();
    return out_;
  }
  const std::string& where() const { return o_.where(); }

 private:
  template <class T>
  T put(const std::string& k, T v) {
    out_[k] = v;
    return v;
  }
  StrictObject o_;
  json out_;
};

void positive(double v, const std::string& what) { require(v > 0, what + " must be positive"); }

std::vector<std::string> x_names(const std::string& prefix, Index n) {
  std::vector<std::string> h;
  for (Index i = 0; i < n; ++i) h.push_back(prefix + std::to_string(i + 1));
  return h;
}

json opt_num(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string path_in(const RunOptions& ro, const std::string& file) {
  return (std::filesystem::path(ro.out_dir) / file).string();
}

void write_branch(const RunOptions& ro, const std::string& file, const Branch& b, Index dim, double param_scale = 1.0,
                  const std::string& param_label = "param") {
  std::vector<std::string> header{param_label};
  auto xs = x_names("x_", dim);
  header.insert(header.end(), xs.begin(), xs.end());
  header.push_back("n_unstable");
  header.push_back("det_J");
  CsvWriter csv(path_in(ro, file), header);
  for (const auto& p : b.points) {
    std::vector<double> row{p.eq.param * param_scale};
    for (Index i = 0; i < dim; ++i) row.push_back(p.eq.x(i));
    row.push_back(p.eq.n_unstable);
    row.push_back(p.det_sign * std::exp(p.log_abs_det));
    csv.row(row);
  }
  csv.save();
}

json singular_json(const SingularPoint& sp) {
  return {{"kind", to_string(sp.kind)},
          {"param", sp.param},
          {"state", vec_to_json(sp.state)},
          {"nullvec", vec_to_json(sp.null_vector)}};
}

json diagram_outputs(const RunOptions& ro, const std::string& prefix, const PitchforkDiagram& d, Index dim,
                     bool write) {
  json sps = json::array();
  for (const auto& sp : d.trunk.singular_points) sps.push_back(singular_json(sp));
  json branches = json::array();
  branches.push_back({{"file", prefix + "branch_trunk.csv"},
                      {"points", d.trunk.points.size()},
                      {"termination", d.trunk.termination}});
  if (write) write_branch(ro, prefix + "branch_trunk.csv", d.trunk, dim);
  for (const auto& sb : d.switched) {
    std::string name = prefix + "branch_sp" + std::to_string(sb.from_singular + 1) +
                       (sb.direction > 0 ? "_plus.csv" : "_minus.csv");
    if (write) write_branch(ro, name, sb.branch, dim);
    json folds = json::array();
    for (const auto& sp : sb.branch.singular_points) folds.push_back(singular_json(sp));
    branches.push_back({{"file", name},
                        {"from_singular_point", sb.from_singular},
                        {"direction", sb.direction},
                        {"points", sb.branch.points.size()},
                        {"termination", sb.branch.termination},
                        {"singular_points", folds}});
  }
  return {{"singular_points", sps}, {"branches", branches}, {"max_consensus_spread", d.max_consensus_spread}};
}

ContinuationConfig read_continuation(Reader& r) {
  ContinuationConfig c;
  c.h_init = r.num("h_init", c.h_init);
  c.h_min = r.num("h_min", c.h_min);
  c.h_max = r.num("h_max", c.h_max);
  return c;
}

// ---- simulate ----------------------------------------------------------------------------------

json cmd_simulate(const json& cfg, const RunOptions* ro, std::optional<std::uint64_t> seed_override, bool execute) {
  Reader r(cfg, "config");
  r.take("command");
  GraphSpec gs = r.graph("graph", GraphSpec::complete(10));
  Graph g = gs.build();
  const Index n = g.size();
  std::string model = r.str("model", "normalized");
  require(model == "normalized" || model == "full" || model == "hetero",
          "config.model: unknown model '" + model + "' (valid: normalized, full, hetero)");
  double u = 0, ubar = 0;
  ModelParams mp;
  Vec beta, utilde;
  if (model == "normalized") {
    u = r.num("u", 0.5);
    require(u >= 0, "config.u: social effort u must be nonnegative (u >= 0)");
    beta = r.vec("beta", Vec::Zero(n));
  } else if (model == "full") {
    mp.u_inertia = r.num("u_inertia", 1.0);
    mp.u_social = r.num("u_social", 0.5);
    mp.nu = r.vec("nu", Vec::Zero(n));
    positive(mp.u_inertia, "config.u_inertia");
    positive(mp.u_social, "config.u_social");
  } else {
    ubar = r.num("ubar", 0.9);
    require(ubar >= 0, "config.ubar must be nonnegative");
    utilde = r.vec("utilde", Vec::Zero(n));
    beta = r.vec("beta", Vec::Zero(n));
  }
  require(beta.size() == 0 || beta.size() == n, "config.beta: length must equal the number of agents");
  require(mp.nu.size() == 0 || mp.nu.size() == n, "config.nu: length must equal the number of agents");
  require(utilde.size() == 0 || utilde.size() == n, "config.utilde: length must equal the number of agents");
  if (utilde.size()) check_zero_sum(utilde);
  Sigmoid sig = r.sigmoid();
  std::uint64_t seed = r.u64("seed", 1);
  if (seed_override) {
    seed = *seed_override;
    r.set("seed", seed);
  }
  double amp = r.num("x0_amplitude", 0.5);
  positive(amp, "config.x0_amplitude");
  Vec x0 = cfg.contains("x0") ? r.vec("x0", Vec()) : random_uniform(n, -amp, amp, seed);
  if (!cfg.contains("x0")) r.set("x0", vec_to_json(x0));
  require(x0.size() == n, "config.x0: length must equal the number of agents");
  IntegratorConfig ic;
  ic.method = method_from_name(r.str("method", "rk45"));
  ic.t_end = r.num("t_end", 50.0);
  ic.step = r.num("step", ic.method == Method::RK4 ? 1e-3 : 0.0);
  ic.rtol = r.num("rtol", 1e-10);
  ic.atol = r.num("atol", 1e-13);
  positive(ic.t_end, "config.t_end");
  ic.validate();
  DecisionConfig dc;
  dc.eta = r.num("eta", 0.1);
  dc.delta_tol = r.num("delta_tol", 1e-6);
  dc.validate();
  json resolved = r.finish();
  resolved["command"] = "simulate";
  if (!execute) return resolved;

  OdeSystem ode;
  Vec gain;
  Vec b_eff;
  if (model == "normalized") {
    ode.rhs = [&](double, const Vec& x) { return normalized_field(x, g, u, beta, sig); };
    ode.jacobian = [&](double, const Vec& x) { return jacobian(x, g, u, sig); };
    gain = Vec::Constant(n, u);
    b_eff = beta;
  } else if (model == "full") {
    ode.rhs = [&](double, const Vec& x) { return full_field(x, g, mp, sig); };
    ode.jacobian = [&](double, const Vec& x) -> Mat { return mp.u_inertia * jacobian(x, g, mp.u(), sig); };
    gain = Vec::Constant(n, mp.u());
    b_eff = mp.beta();
  } else {
    ode.rhs = [&](double, const Vec& x) { return hetero_field(x, g, ubar, utilde, beta, sig); };
    ode.jacobian = [&](double, const Vec& x) { return jacobian(x, g, ubar, utilde, sig); };
    gain = Vec::Constant(n, ubar) + utilde;
    b_eff = beta;
  }
  Trajectory tr = integrate(ode, x0, ic);
  std::vector<std::string> header{"t"};
  auto xs = x_names("x_", n);
  header.insert(header.end(), xs.begin(), xs.end());
  CsvWriter csv(path_in(*ro, "trajectory.csv"), header);
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    std::vector<double> row{tr.times[i]};
    for (Index k = 0; k < n; ++k) row.push_back(tr.states[i](k));
    csv.row(row);
  }
  csv.save();
  const Vec& xf = tr.final_state();
  double field = ode.rhs(0, xf).lpNorm<Eigen::Infinity>();
  if (model == "full") field /= mp.u_inertia;
  json summary = {{"command", "simulate"},
                  {"model", model},
                  {"final_time", tr.final_time()},
                  {"steps", tr.steps},
                  {"terminal_state_inf_norm", xf.lpNorm<Eigen::Infinity>()},
                  {"group_opinion", group_opinion(xf)},
                  {"disagreement", disagreement(xf)},
                  {"decision", to_string(classify_decision(xf, dc))},
                  {"normalized_field_inf_norm", field},
                  {"settled", field < 1e-8},
                  {"absorbing_box_violation", absorbing_box_violation(tr.states, g, gain, b_eff)}};
  return {{"resolved", resolved}, {"summary", summary}};
}

// ---- continue / pitchfork diagram --------------------------------------------------------------

json cmd_continue(const json& cfg, const RunOptions* ro, bool execute, const std::string& label) {
  Reader r(cfg, "config");
  r.take("command");
  r.take("scenario");
  GraphSpec gs = r.graph("graph", GraphSpec::complete(10));
  Graph g = gs.build();
  require(is_strongly_connected(g), "config.graph: continuation requires a strongly connected graph");
  PitchforkOptions po;
  po.beta = r.vec("beta", Vec::Zero(g.size()));
  require(po.beta.size() == g.size(), "config.beta: length must equal the number of agents");
  po.sigmoid = r.sigmoid();
  po.u_min = r.num("u_min", 0.5);
  po.u_max = r.num("u_max", 3.0);
  require(po.u_min >= 0 && po.u_max > po.u_min, "config: need 0 <= u_min < u_max");
  po.continuation = read_continuation(r);
  po.switch_offset = r.num("switch_offset", 1e-3);
  po.switch_branches = r.flag("switch_branches", true);
  positive(po.switch_offset, "config.switch_offset");
  ContinuationConfig check = po.continuation;
  check.p_min = po.u_min;
  check.p_max = po.u_max;
  check.validate();
  json resolved = r.finish();
  resolved["command"] = label == "continue" ? "continue" : "sweep";
  if (label != "continue") resolved["scenario"] = label;
  if (!execute) return resolved;

  PitchforkDiagram d = run_pitchfork_diagram(g, po);
  json out = diagram_outputs(*ro, "", d, g.size(), true);
  json sps = json::array();
  for (const auto& sp : d.trunk.singular_points) sps.push_back(singular_json(sp));
  write_json(path_in(*ro, "singular_points.json"), sps);
  json summary = {{"command", resolved["command"]}};
  if (label != "continue") summary["scenario"] = label;
  for (auto it = out.begin(); it != out.end(); ++it) summary[it.key()] = it.value();
  return {{"resolved", resolved}, {"summary", summary}};
}

// ---- sweeps ------------------------------------------------------------------------------------

json sweep_hysteresis(const json& cfg, const RunOptions* ro, std::optional<std::uint64_t> seed, bool execute) {
  Reader r(cfg, "config");
  r.take("command");
  r.take("scenario");
  HysteresisOptions o;
  o.spec = r.population("population", o.spec);
  o.u = r.num("u", o.u);
  o.beta_a = r.num("beta_a", o.beta_a);
  o.beta_b_min = r.num("beta_b_min", o.beta_b_min);
  o.beta_b_max = r.num("beta_b_max", o.beta_b_max);
  o.beta_b_step = r.num("beta_b_step", o.beta_b_step);
  o.seed = r.u64("seed", o.seed);
  if (seed) r.set("seed", o.seed = *seed);
  o.x0_amplitude = r.num("x0_amplitude", o.x0_amplitude);
  o.settle.tol = r.num("settle_tol", o.settle.tol);
  o.settle.horizon = r.num("settle_horizon", o.settle.horizon);
  o.sigmoid = r.sigmoid();
  require(o.u >= 0, "config.u must be nonnegative");
  require(o.beta_b_max > o.beta_b_min, "config: need beta_b_max > beta_b_min");
  positive(o.beta_b_step, "config.beta_b_step");
  positive(o.x0_amplitude, "config.x0_amplitude");
  positive(o.settle.tol, "config.settle_tol");
  positive(o.settle.horizon, "config.settle_horizon");
  json resolved = r.finish();
  if (!execute) return resolved;

  HysteresisResult h = run_hysteresis(o);
  CsvWriter csv(path_in(*ro, "hysteresis.csv"), {"beta_b", "y_up", "y_down", "residual_up", "residual_down"});
  for (std::size_t i = 0; i < h.grid.size(); ++i)
    csv.row({h.grid[i], h.y_up[i], h.y_down[i], h.residual_up[i], h.residual_down[i]});
  csv.save();
  json summary = {{"switch_up", opt_num(h.switch_up)},
                  {"switch_down", opt_num(h.switch_down)},
                  {"loop_width", h.width},
                  {"max_settle_residual", h.max_residual}};
  return {{"resolved", resolved}, {"summary", summary}};
}

json sweep_quintic(const json& cfg, const RunOptions* ro, bool execute) {
  Reader r(cfg, "config");
  r.take("command");
  r.take("scenario");
  QuinticOptions o;
  o.spec = r.population("population", o.spec);
  o.betas = r.nums("betas", o.betas);
  o.u_min = r.num("u_min", o.u_min);
  o.u_max = r.num("u_max", o.u_max);
  o.sigmoid = r.sigmoid();
  require(!o.betas.empty(), "config.betas must not be empty");
  require(o.u_min >= 0 && o.u_max > o.u_min, "config: need 0 <= u_min < u_max");
  json resolved = r.finish();
  if (!execute) return resolved;
  o.jobs = ro->jobs;
  auto cases = run_quintic_transition(o);
  json list = json::array();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    json d = diagram_outputs(*ro, "beta" + std::to_string(i + 1) + "_", c.diagram, o.spec.total(), true);
    list.push_back({{"beta", c.beta},
                    {"classification", c.classification},
                    {"u_star", opt_num(c.u_star)},
                    {"fold_params", c.fold_params},
                    {"diagram", d}});
  }
  return {{"resolved", resolved}, {"summary", {{"cases", list}}}};
}

json sweep_reduction(const json& cfg, const RunOptions* ro, std::optional<std::uint64_t> seed, bool execute) {
  Reader r(cfg, "config");
  r.take("command");
  r.take("scenario");
  ReductionOptions o;
  o.spec = r.population("population", o.spec);
  o.u = r.num("u", o.u);
  o.beta_a = r.num("beta_a", o.beta_a);
  o.beta_b = r.num("beta_b", o.beta_b);
  o.seed = r.u64("seed", o.seed);
  if (seed) r.set("seed", o.seed = *seed);
  o.x0_amplitude = r.num("x0_amplitude", o.x0_amplitude);
  o.t_end = r.num("t_end", o.t_end);
  o.sample_dt = r.num("sample_dt", o.sample_dt);
  o.bound_window = r.num("bound_window", o.bound_window);
  o.start_on_manifold = r.flag("start_on_manifold", o.start_on_manifold);
  o.sigmoid = r.sigmoid();
  require(o.u >= 0, "config.u must be nonnegative");
  positive(o.t_end, "config.t_end");
  positive(o.sample_dt, "config.sample_dt");
  positive(o.x0_amplitude, "config.x0_amplitude");
  json resolved = r.finish();
  if (!execute) return resolved;

  ReductionResult res = run_reduction_demo(o);
  const Index n = o.spec.total();
  std::vector<std::string> header{"t"};
  auto xs = x_names("x_", n);
  header.insert(header.end(), xs.begin(), xs.end());
  CsvWriter full(path_in(*ro, "trajectory.csv"), header);
  CsvWriter red(path_in(*ro, "reduced.csv"), {"t", "y1", "y2", "y3", "mean1", "mean2", "mean3", "V", "V_bound"});
  const double v0 = res.spread.front();
  for (std::size_t i = 0; i < res.times.size(); ++i) {
    std::vector<double> row{res.times[i]};
    for (Index k = 0; k < n; ++k) row.push_back(res.states[i](k));
    full.row(row);
    ReducedState m = group_means(res.states[i], o.spec);
    red.row({res.times[i], res.reduced[i](0), res.reduced[i](1), res.reduced[i](2), m(0), m(1), m(2), res.spread[i],
             v0 * std::exp(-res.min_group_degree * res.times[i])});
  }
  full.save();
  red.save();
  json summary = {{"min_group_degree", res.min_group_degree},
                  {"max_bound_ratio", res.max_bound_ratio},
                  {"max_pair_ratio", res.max_pair_ratio},
                  {"terminal_mean_error", res.terminal_mean_error},
                  {"max_manifold_distance", res.max_manifold_distance}};
  return {{"resolved", resolved}, {"summary", summary}};
}

json sweep_value(const json& cfg, const RunOptions* ro, bool execute) {
  Reader r(cfg, "config");
  r.take("command");
  r.take("scenario");
  ValueOptions o;
  o.n1 = r.integer("n1", o.n1);
  o.n2 = r.integer("n2", o.n2);
  o.n3 = r.integer("n3", o.n3);
  o.nu_grid = r.nums("nu_grid", o.nu_grid);
  o.diagram_nus = r.nums("diagram_nus", o.diagram_nus);
  o.u_max = r.num("u_max", o.u_max);
  require(o.n1 == o.n2, "config: value sensitivity needs n1 == n2");
  require(o.n1 >= 1 && o.n3 >= 0, "config: need n1 >= 1 and n3 >= 0");
  require(!o.nu_grid.empty(), "config.nu_grid must not be empty");
  for (double v : o.nu_grid) positive(v, "config.nu_grid entries");
  for (double v : o.diagram_nus) positive(v, "config.diagram_nus entries");
  require(o.u_max > 0.5, "config.u_max must exceed 0.5");
  json resolved = r.finish();
  if (!execute) return resolved;
  o.jobs = ro->jobs;
  ValueResult v = run_value_sensitivity(o);
  CsvWriter csv(path_in(*ro, "value_sensitivity.csv"),
                {"nu", "us_star_hat", "us_star_numeric", "rel_error", "us_star_determinant"});
  for (const auto& p : v.points) csv.row({p.nu, p.us_hat, p.us_numeric, p.rel_error, p.us_determinant});
  csv.save();
  json diagrams = json::array();
  for (std::size_t i = 0; i < v.diagrams.size(); ++i) {
    const auto& vd = v.diagrams[i];
    std::string prefix = "diagram_nu" + std::to_string(i + 1) + "_";
    auto emit = [&](const std::string& file, const Branch& b) {
      CsvWriter c(path_in(*ro, file), {"u_S", "u", "y1", "y2", "y3", "y_mean", "n_unstable", "det_J"});
      const int nn = o.n1 + o.n2 + o.n3;
      for (const auto& p : b.points) {
        const Vec& y = p.eq.x;
        double mean = (o.n1 * y(0) + o.n2 * y(1) + o.n3 * y(2)) / nn;
        c.row({p.eq.param / vd.nu, p.eq.param, y(0), y(1), y(2), mean, double(p.eq.n_unstable),
               p.det_sign * std::exp(p.log_abs_det)});
      }
      c.save();
    };
    emit(prefix + "trunk.csv", vd.diagram.trunk);
    for (const auto& sb : vd.diagram.switched)
      emit(prefix + "sp" + std::to_string(sb.from_singular + 1) + (sb.direction > 0 ? "_plus.csv" : "_minus.csv"),
           sb.branch);
    json sps = json::array();
    for (const auto& sp : vd.diagram.trunk.singular_points) sps.push_back(singular_json(sp));
    diagrams.push_back({{"nu", vd.nu}, {"file_prefix", prefix}, {"singular_points", sps}});
  }
  json summary = {{"max_rel_error", v.max_rel_error},
                  {"us_star_hat_decreasing", v.hat_decreasing},
                  {"us_star_numeric_decreasing", v.numeric_decreasing},
                  {"diagrams", diagrams}};
  return {{"resolved", resolved}, {"summary", summary}};
}

json sweep_uninformed(const json& cfg, const RunOptions* ro, bool execute) {
  Reader r(cfg, "config");
  r.take("command");
  r.take("scenario");
  UninformedOptions o;
  o.n_agents = r.integer("n_agents", o.n_agents);
  o.n3_values = r.ints("n3_values", o.n3_values);
  o.nu_grid = r.nums("nu_grid", o.nu_grid);
  require(o.n_agents >= 2, "config.n_agents must be at least 2");
  require(!o.n3_values.empty() && !o.nu_grid.empty(), "config: grids must not be empty");
  for (int n3 : o.n3_values) {
    require(n3 >= 0 && n3 <= o.n_agents - 2, "config.n3_values: entries must lie in [0, N-2]");
    require((o.n_agents - n3) % 2 == 0, "config.n3_values: N - n3 must be even (n1 = n2 integral)");
  }
  for (double v : o.nu_grid) positive(v, "config.nu_grid entries");
  json resolved = r.finish();
  if (!execute) return resolved;
  UninformedResult u = run_uninformed_influence(o);
  std::vector<std::string> header{"nu"};
  for (int n3 : u.n3_values) header.push_back("us_star_hat_n3_" + std::to_string(n3));
  CsvWriter csv(path_in(*ro, "uninformed_influence.csv"), header);
  for (std::size_t i = 0; i < u.nu_grid.size(); ++i) {
    std::vector<double> row{u.nu_grid[i]};
    for (const auto& c : u.curves) row.push_back(c[i]);
    csv.row(row);
  }
  csv.save();
  return {{"resolved", resolved}, {"summary", {{"ordered_larger_n3_lower", u.ordered}}}};
}

// ---- adaptive ----------------------------------------------------------------------------------

json cmd_adaptive(const std::string& which_name, const json& cfg, const RunOptions* ro,
                  std::optional<std::uint64_t> seed, bool execute) {
  AdaptiveCase which = adaptive_case_from_name(which_name);
  Reader r(cfg, "config");
  r.take("command");
  r.take("case");
  AdaptiveOptions o;
  o.which = which;
  GraphSpec gs = r.graph("graph", GraphSpec::complete(10));
  o.graph = gs.build();
  const Index n = o.graph.size();
  require(is_strongly_connected(o.graph), "config.graph: adaptive runs require a strongly connected graph");
  require(o.graph.is_symmetric(), "config.graph: adaptive runs require symmetric weights (estimator uses lambda2)");
  o.utilde = r.vec("utilde", Vec::Zero(n));
  o.beta = r.vec("beta", adaptive_case_beta(which, static_cast<int>(n)));
  require(o.utilde.size() == n && o.beta.size() == n, "config: utilde and beta lengths must equal the number of agents");
  check_zero_sum(o.utilde);
  o.ubar0 = r.num("ubar0", o.ubar0);
  o.adaptive.epsilon = r.num("epsilon", o.adaptive.epsilon);
  o.adaptive.y_th = r.num("y_th", o.adaptive.y_th);
  o.adaptive.validate();
  o.estimator.alpha = r.num("alpha", o.estimator.alpha);
  o.estimator.tol = r.num("estimator_tol", o.estimator.tol);
  o.estimator.step = r.num("estimator_step", o.estimator.step);
  positive(o.estimator.alpha, "config.alpha");
  positive(o.estimator.tol, "config.estimator_tol");
  require(o.estimator.step >= 0, "config.estimator_step must be nonnegative (0 = automatic)");
  o.x0_amplitude = r.num("x0_amplitude", o.x0_amplitude);
  o.seed = r.u64("seed", 0);
  if (seed) r.set("seed", o.seed = *seed);
  o.escape_band = r.num("escape_band", o.escape_band);
  o.horizon = r.num("horizon", 500.0 / o.adaptive.epsilon);
  o.rtol = r.num("rtol", o.rtol);
  o.atol = r.num("atol", o.atol);
  o.rest_tol = r.num("rest_tol", o.rest_tol);
  o.jump_rate_factor = r.num("jump_rate_factor", o.jump_rate_factor);
  int max_rows = r.integer("max_rows", 5000);
  o.sigmoid = r.sigmoid();
  require(o.ubar0 >= 0, "config.ubar0 must be nonnegative");
  positive(o.x0_amplitude, "config.x0_amplitude");
  require(o.escape_band > 0 && o.escape_band < o.adaptive.y_th, "config.escape_band must lie in (0, y_th)");
  positive(o.horizon, "config.horizon");
  positive(o.rtol, "config.rtol");
  positive(o.atol, "config.atol");
  positive(o.rest_tol, "config.rest_tol");
  positive(o.jump_rate_factor, "config.jump_rate_factor");
  require(max_rows >= 2, "config.max_rows must be at least 2");
  json resolved = r.finish();
  resolved["command"] = "adaptive";
  resolved["case"] = which_name;
  if (!execute) return resolved;

  AdaptiveResult res = run_adaptive(o);
  std::vector<std::string> header{"t"};
  auto xs = x_names("x_", n);
  header.insert(header.end(), xs.begin(), xs.end());
  header.push_back("ubar");
  header.push_back("y");
  header.push_back("yhat");
  CsvWriter csv(path_in(*ro, "trajectory.csv"), header);
  const std::size_t rows = res.times.size();
  const std::size_t stride = std::max<std::size_t>(1, (rows + max_rows - 2) / (max_rows - 1));
  for (std::size_t i = 0; i < rows; ++i) {
    if (i % stride != 0 && i + 1 != rows) continue;
    std::vector<double> row{res.times[i]};
    for (Index k = 0; k < n; ++k) row.push_back(res.states[i](k));
    row.push_back(res.ubar[i]);
    row.push_back(res.y[i]);
    row.push_back(res.yhat[i]);
    csv.row(row);
  }
  csv.save();
  CsvWriter est(path_in(*ro, "estimator.csv"), {"s", "error_norm"});
  for (auto& [s, e] : res.estimator.error_history) est.row({s, e});
  est.save();

  const double ustar = res.ubar_star.ubar;
  json entry_exit = nullptr;
  // The entry-exit relation only applies to the symmetric pitchfork (beta = 0).
  if (res.ubar_c && ustar > o.ubar0 && o.beta.isZero(0)) {
    double pred = 2 * ustar - o.ubar0;
    entry_exit = {{"predicted_ubar_c", pred}, {"relative_error", std::abs(*res.ubar_c - pred) / (ustar - o.ubar0)}};
  }
  json summary = {
      {"case", which_name},
      {"ubar0", o.ubar0},
      {"ubar_star", ustar},
      {"ubar_c", opt_num(res.ubar_c)},
      {"escape_time", opt_num(res.escape_time)},
      {"entry_exit", entry_exit},
      {"terminal_y", res.terminal_y},
      {"terminal_abs_y", std::abs(res.terminal_y)},
      {"terminal_abs_y_minus_y_th", std::abs(std::abs(res.terminal_y) - o.adaptive.y_th)},
      {"terminal_ubar", res.terminal_ubar},
      {"terminal_dubar", res.terminal_dubar},
      {"terminal_field_inf_norm", res.terminal_field},
      {"reached_rest", res.reached_rest},
      {"ubar_settled", std::abs(res.terminal_dubar) < o.adaptive.epsilon * 1e-3},
      {"max_dy_ds", res.max_dy_ds},
      {"jump_detected", res.jump_time.has_value()},
      {"jump_time", opt_num(res.jump_time)},
      {"jump_ubar", opt_num(res.jump_ubar)},
      {"fold_ubar", opt_num(res.fold_ubar)},
      {"ubar_nondecreasing_below_threshold", res.ubar_monotone_below_threshold},
      {"absorbing_box_violation", res.max_box_violation},
      {"estimator",
       {{"converged", res.estimator.converged},
        {"elapsed", res.estimator.elapsed},
        {"time_bound", res.estimator.time_bound},
        {"initial_error", res.estimator.initial_error},
        {"final_error", res.estimator.final_error},
        {"max_mean_drift", res.estimator.max_mean_drift},
        {"step", res.estimator.step},
        {"steps", res.estimator.steps}}},
      {"warnings", res.warnings}};
  return {{"resolved", resolved}, {"summary", summary}};
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
  return s;
}

std::string pick_variant(const std::string& flag, const json& cfg, const std::string& key) {
  std::string in_cfg;
  if (cfg.is_object() && cfg.contains(key)) {
    if (!cfg[key].is_string()) throw InvalidInput("config." + key + ": expected a string");
    in_cfg = cfg[key].get<std::string>();
  }
  if (!flag.empty() && !in_cfg.empty() && flag != in_cfg)
    throw InvalidInput("--" + key + " '" + flag + "' conflicts with config." + key + " '" + in_cfg + "'");
  return flag.empty() ? in_cfg : flag;
}

// Single dispatch for resolve and run.
json dispatch(const std::string& command, const std::string& variant_flag, const json& config, const RunOptions* ro,
              std::optional<std::uint64_t> seed, bool execute) {
  const json cfg = config.is_null() ? json::object() : config;
  if (!cfg.is_object()) throw InvalidInput("config: expected a JSON object");
  if (cfg.contains("command")) {
    if (!cfg["command"].is_string() || cfg["command"].get<std::string>() != command)
      throw InvalidInput("config.command does not match the requested command '" + command + "'");
  }
  if (command == "simulate") return cmd_simulate(cfg, ro, seed, execute);
  if (command == "continue") return cmd_continue(cfg, ro, execute, "continue");
  if (command == "sweep") {
    std::string sc = pick_variant(variant_flag, cfg, "scenario");
    if (sc.empty()) throw InvalidInput("sweep needs a scenario (valid: " + join(scenario_names()) + ")");
    json out;
    if (sc == "pitchfork_diagram") return cmd_continue(cfg, ro, execute, sc);
    if (sc == "hysteresis")
      out = sweep_hysteresis(cfg, ro, seed, execute);
    else if (sc == "quintic_transition")
      out = sweep_quintic(cfg, ro, execute);
    else if (sc == "reduction_demo")
      out = sweep_reduction(cfg, ro, seed, execute);
    else if (sc == "value_sensitivity")
      out = sweep_value(cfg, ro, execute);
    else if (sc == "uninformed_influence")
      out = sweep_uninformed(cfg, ro, execute);
    else
      throw InvalidInput("unknown scenario '" + sc + "' (valid: " + join(scenario_names()) + ")");
    json& resolved = execute ? out["resolved"] : out;
    resolved["command"] = "sweep";
    resolved["scenario"] = sc;
    if (execute) {
      out["summary"]["command"] = "sweep";
      out["summary"]["scenario"] = sc;
    }
    return out;
  }
  if (command == "adaptive") {
    std::string c = pick_variant(variant_flag, cfg, "case");
    if (c.empty()) c = "symmetric";
    adaptive_case_from_name(c);
    return cmd_adaptive(c, cfg, ro, seed, execute);
  }
  if (command == "validate") throw InvalidInput("validate is not a runnable command");
  throw InvalidInput("unknown command '" + command + "' (valid: " + join(command_names()) + ")");
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> v{"simulate", "continue", "sweep", "adaptive", "validate"};
  return v;
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> v{"pitchfork_diagram", "hysteresis", "quintic_transition",
                                          "reduction_demo", "value_sensitivity", "uninformed_influence"};
  return v;
}

const std::vector<std::string>& adaptive_case_names() {
  static const std::vector<std::string> v{"symmetric", "case1", "case2"};
  return v;
}

json parse_json_text(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(where + ": malformed JSON: " + e.what());
  }
}

json resolve_config(const std::string& command, const std::string& variant, const json& config,
                    std::optional<std::uint64_t> seed) {
  return dispatch(command, variant, config, nullptr, seed, false);
}

json run_command(const std::string& command, const std::string& variant, const json& config, const RunOptions& opt) {
  require(!opt.out_dir.empty(), "an output directory is required");
  require(opt.jobs >= 1, "--jobs must be at least 1");
  json resolved = resolve_config(command, variant, config, opt.seed);
  std::error_code ec;
  std::filesystem::create_directories(opt.out_dir, ec);
  if (ec) throw IoFailure("cannot create output directory '" + opt.out_dir + "': " + ec.message());
  write_json(path_in(opt, "config.json"), resolved);
  json out = dispatch(command, "", resolved, &opt, std::nullopt, true);
  json summary = out["summary"];
  summary["config_hash"] = hex64(fnv1a64(resolved.dump()));
  write_json(path_in(opt, "summary.json"), summary);
  return summary;
}

json validate_config(const json& config, const std::string& variant, std::optional<std::uint64_t> seed) {
  if (!config.is_object() || !config.contains("command") || !config["command"].is_string())
    throw InvalidInput("validate: config must contain a \"command\" string (valid: simulate, continue, sweep, adaptive)");
  return resolve_config(config["command"].get<std::string>(), variant, config, seed);
}

}  // namespace opdyn
