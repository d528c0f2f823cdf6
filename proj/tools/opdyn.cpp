#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "opdyn/opdyn.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int exit_code(opdyn_status s) {
  switch (s) {
    case OPDYN_OK:
      return 0;
    case OPDYN_NUMERICAL_ERROR:
      return kExitNumerical;
    case OPDYN_INTERNAL_ERROR:
      return 1;
    default:
      return kExitConfig;
  }
}

struct Common {
  std::string config;
  std::string out;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  std::string variant;
};

void add_common(CLI::App* app, Common& c, bool runnable) {
  app->add_option("--config", c.config, "JSON config file (defaults are used for missing keys)");
  if (runnable) {
    app->add_option("--out", c.out,
                    "Output directory (default: $OPDYN_OUTPUT_ROOT/<command>[_<variant>], root falls back to "
                    "./opdyn_runs)");
    app->add_option("--jobs", c.jobs, "Worker threads for sweeps (default 1, results do not depend on it)")
        ->check(CLI::PositiveNumber);
  }
  app->add_option("--seed", c.seed, "Overrides the config's RNG seed");
}

bool read_file(const std::string& path, std::string& text) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  text = ss.str();
  return true;
}

int fail(opdyn_status s) {
  std::cerr << "opdyn: error: " << opdyn_last_error() << "\n";
  return exit_code(s);
}

int run(const std::string& command, const Common& c) {
  std::string text;
  if (!c.config.empty() && !read_file(c.config, text)) {
    std::cerr << "opdyn: error: cannot read config file '" << c.config << "'\n";
    return kExitConfig;
  }
  const char* cfg = c.config.empty() ? nullptr : text.c_str();
  const char* variant = c.variant.empty() ? nullptr : c.variant.c_str();

  if (command == "validate") {
    char* resolved = nullptr;
    opdyn_status s = opdyn_validate(nullptr, variant, cfg ? cfg : "{}", c.seed.has_value(), c.seed.value_or(0), &resolved);
    if (s != OPDYN_OK) return fail(s);
    std::cout << resolved << "\n";
    opdyn_string_free(resolved);
    return 0;
  }

  std::string out = c.out;
  if (out.empty()) {
    const char* root = std::getenv("OPDYN_OUTPUT_ROOT");
    // The variant may come from the config file; resolve first so the directory name is right.
    std::string v = c.variant;
    if (v.empty() && command != "simulate" && command != "continue") {
      char* resolved = nullptr;
      opdyn_status s = opdyn_validate(command.c_str(), variant, cfg, c.seed.has_value(), c.seed.value_or(0), &resolved);
      if (s != OPDYN_OK) return fail(s);
      std::string r = resolved;
      opdyn_string_free(resolved);
      for (const char* key : {"\"scenario\": \"", "\"case\": \""}) {
        auto p = r.find(key);
        if (p != std::string::npos) {
          p += std::strlen(key);
          v = r.substr(p, r.find('"', p) - p);
        }
      }
    }
    out = std::string(root && *root ? root : "opdyn_runs") + "/" + command + (v.empty() ? "" : "_" + v);
  }

  char* summary = nullptr;
  opdyn_status s = opdyn_run(command.c_str(), variant, cfg, out.c_str(), c.jobs, c.seed.has_value(),
                             c.seed.value_or(0), &summary);
  if (s != OPDYN_OK) return fail(s);
  std::cout << summary << "\n";
  std::cerr << "opdyn: artifacts written to " << out << "\n";
  opdyn_string_free(summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "opdyn: multi-agent opinion dynamics on networks.\n"
      "Exit codes: 0 success, 2 configuration or validation error, 3 numerical failure.\n"
      "Environment: OPDYN_OUTPUT_ROOT sets the root of default output directories."};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(opdyn_version()));

  Common sim, cont, sweep, adapt, val;
  add_common(app.add_subcommand("simulate", "Integrate one trajectory and report its terminal state"), sim, true);
  add_common(app.add_subcommand("continue", "Continue the equilibrium branch in u and detect singular points"), cont,
             true);
  auto* sw = app.add_subcommand("sweep", "Run a named scenario");
  add_common(sw, sweep, true);
  sw->add_option("--scenario", sweep.variant,
                 "pitchfork_diagram | hysteresis | quintic_transition | reduction_demo | value_sensitivity | "
                 "uninformed_influence");
  auto* ad = app.add_subcommand("adaptive", "Closed-loop adaptive social effort run");
  add_common(ad, adapt, true);
  ad->add_option("--case", adapt.variant, "symmetric | case1 | case2 (default symmetric)");
  auto* va = app.add_subcommand("validate", "Resolve and check a config without running it; prints the result");
  add_common(va, val, false);
  va->add_option("--scenario,--case", val.variant, "Variant name when the config does not carry one");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  for (auto* sub : app.get_subcommands()) {
    const std::string name = sub->get_name();
    if (name == "simulate") return run(name, sim);
    if (name == "continue") return run(name, cont);
    if (name == "sweep") return run(name, sweep);
    if (name == "adaptive") return run(name, adapt);
    if (name == "validate") return run(name, val);
  }
  return kExitConfig;
}
