#include "opdyn/opdyn.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "opdyn/approximations.hpp"
#include "opdyn/commands.hpp"
#include "opdyn/serialization.hpp"

struct opdyn_graph {
  opdyn::Graph g;
};

namespace {

thread_local std::string last_error;

opdyn_status fail(opdyn_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <class F>
opdyn_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return OPDYN_OK;
  } catch (const opdyn::IoFailure& e) {
    return fail(OPDYN_IO_ERROR, e.what());
  } catch (const opdyn::InvalidInput& e) {
    return fail(OPDYN_CONFIG_ERROR, e.what());
  } catch (const opdyn::NumericalFailure& e) {
    return fail(OPDYN_NUMERICAL_ERROR, e.what());
  } catch (const std::exception& e) {
    return fail(OPDYN_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(OPDYN_INTERNAL_ERROR, "unknown error");
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

#define CHECK_ARG(cond, msg) \
  if (!(cond)) return fail(OPDYN_INVALID_ARGUMENT, msg)

}  // namespace

extern "C" {

const char* opdyn_last_error(void) { return last_error.c_str(); }
const char* opdyn_version(void) { return "1.0.0"; }

opdyn_status opdyn_graph_create(const double* weights, size_t n, opdyn_graph** out) {
  CHECK_ARG(weights && out && n > 0, "opdyn_graph_create: null argument or empty graph");
  return guarded([&] {
    opdyn::Mat a(n, n);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) a(i, j) = weights[i * n + j];
    *out = new opdyn_graph{opdyn::build_graph(a)};
  });
}

opdyn_status opdyn_graph_from_json(const char* json_text, opdyn_graph** out) {
  CHECK_ARG(json_text && out, "opdyn_graph_from_json: null argument");
  return guarded([&] {
    auto j = opdyn::parse_json_text(json_text, "graph");
    *out = new opdyn_graph{opdyn::GraphSpec::from_json(j).build()};
  });
}

void opdyn_graph_destroy(opdyn_graph* g) { delete g; }

size_t opdyn_graph_size(const opdyn_graph* g) { return g ? static_cast<size_t>(g->g.size()) : 0; }

opdyn_status opdyn_graph_is_strongly_connected(const opdyn_graph* g, int* out) {
  CHECK_ARG(g && out, "opdyn_graph_is_strongly_connected: null argument");
  return guarded([&] { *out = opdyn::is_strongly_connected(g->g) ? 1 : 0; });
}

opdyn_status opdyn_graph_lambda2(const opdyn_graph* g, double* out) {
  CHECK_ARG(g && out, "opdyn_graph_lambda2: null argument");
  return guarded([&] { *out = opdyn::lambda2(g->g); });
}

opdyn_status opdyn_graph_left_null_vector(const opdyn_graph* g, double* out) {
  CHECK_ARG(g && out, "opdyn_graph_left_null_vector: null argument");
  return guarded([&] {
    opdyn::Vec v = opdyn::left_null_eigenvector(g->g);
    for (opdyn::Index i = 0; i < v.size(); ++i) out[i] = v(i);
  });
}

opdyn_status opdyn_normalized_field(const opdyn_graph* g, double u, const double* beta, const double* x, double* dx) {
  CHECK_ARG(g && x && dx, "opdyn_normalized_field: null argument");
  return guarded([&] {
    const auto n = g->g.size();
    opdyn::Vec xv = Eigen::Map<const opdyn::Vec>(x, n);
    opdyn::Vec b = beta ? opdyn::Vec(Eigen::Map<const opdyn::Vec>(beta, n)) : opdyn::Vec();
    opdyn::Vec f = opdyn::normalized_field(xv, g->g, u, b);
    for (opdyn::Index i = 0; i < n; ++i) dx[i] = f(i);
  });
}

opdyn_status opdyn_y_s(double u, double* out) {
  CHECK_ARG(out, "opdyn_y_s: null argument");
  return guarded([&] { *out = opdyn::y_s(u); });
}

opdyn_status opdyn_ustar_series(double beta, int n_agents, int n3, double* out) {
  CHECK_ARG(out, "opdyn_ustar_series: null argument");
  return guarded([&] { *out = opdyn::ustar_series(beta, n_agents, n3); });
}

opdyn_status opdyn_ustar_numeric(int n_agents, int n3, double beta, double* out) {
  CHECK_ARG(out, "opdyn_ustar_numeric: null argument");
  return guarded([&] { *out = opdyn::ustar_numeric(n_agents, n3, beta); });
}

opdyn_status opdyn_us_star_hat(double nu, int n_agents, int n3, double* out) {
  CHECK_ARG(out, "opdyn_us_star_hat: null argument");
  return guarded([&] { *out = opdyn::us_star_hat(nu, n_agents, n3); });
}

opdyn_status opdyn_run(const char* command, const char* variant, const char* config_json, const char* out_dir,
                       int jobs, int has_seed, uint64_t seed, char** summary_json) {
  CHECK_ARG(command && out_dir, "opdyn_run: command and out_dir are required");
  return guarded([&] {
    opdyn::json cfg = config_json ? opdyn::parse_json_text(config_json, "config") : opdyn::json::object();
    opdyn::RunOptions ro;
    ro.out_dir = out_dir;
    ro.jobs = jobs;
    if (has_seed) ro.seed = seed;
    opdyn::json s = opdyn::run_command(command, variant ? variant : "", cfg, ro);
    if (summary_json) *summary_json = dup(s.dump(2));
  });
}

opdyn_status opdyn_validate(const char* command, const char* variant, const char* config_json, int has_seed,
                            uint64_t seed, char** resolved_json) {
  return guarded([&] {
    opdyn::json cfg = config_json ? opdyn::parse_json_text(config_json, "config") : opdyn::json::object();
    std::optional<std::uint64_t> sd;
    if (has_seed) sd = seed;
    opdyn::json r;
    if (command && *command)
      r = opdyn::resolve_config(command, variant ? variant : "", cfg, sd);
    else
      r = opdyn::validate_config(cfg, variant ? variant : "", sd);
    if (resolved_json) *resolved_json = dup(r.dump(2));
  });
}

void opdyn_string_free(char* s) { std::free(s); }

}  // extern "C"
