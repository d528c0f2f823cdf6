#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  std::string cmd = std::string(OPDYN_BIN) + " " + args + " > cli_stdout.txt 2> cli_stderr.txt";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::string config(const std::string& name) { return std::string(OPDYN_CONFIGS) + "/" + name; }

}  // namespace

TEST_CASE("simulate below the bifurcation reports a vanishing terminal state") {
  fs::remove_all("cli_sim");
  REQUIRE(run("simulate --config " + config("pitchfork_point.json") + " --out cli_sim") == 0);
  std::string summary = slurp("cli_sim/summary.json");
  CHECK(summary.find("\"terminal_state_inf_norm\"") != std::string::npos);
  CHECK(fs::exists("cli_sim/trajectory.csv"));
  CHECK(fs::exists("cli_sim/config.json"));
  // The terminal norm is printed as a number below 1e-6.
  auto pos = summary.find("\"terminal_state_inf_norm\": ");
  double v = std::stod(summary.substr(pos + 28));
  CHECK(v < 1e-6);
}

TEST_CASE("exit codes for configuration errors") {
  write("cli_bad.json", "{\"u\": ");
  CHECK(run("simulate --config cli_bad.json --out cli_x") == 2);
  write("cli_neg.json", "{\"u\": -1}");
  CHECK(run("simulate --config cli_neg.json --out cli_x") == 2);
  CHECK(slurp("cli_stderr.txt").find("u >= 0") != std::string::npos);
  CHECK(run("sweep --scenario not_a_scenario --out cli_x") == 2);
  std::string err = slurp("cli_stderr.txt");
  for (const char* s : {"pitchfork_diagram", "hysteresis", "quintic_transition", "reduction_demo",
                        "value_sensitivity", "uninformed_influence"})
    CHECK(err.find(s) != std::string::npos);
  write("cli_disc.json", R"({"graph": {"weights": [[0,1,0],[1,0,0],[0,0,0]]}})");
  CHECK(run("continue --config cli_disc.json --out cli_x") == 2);
  CHECK(slurp("cli_stderr.txt").find("strongly connected") != std::string::npos);
  CHECK(run("simulate --config does_not_exist.json --out cli_x") == 2);
  CHECK(run("simulate --jobs 0") == 2);
  CHECK(run("") == 2);
}

TEST_CASE("numerical failures exit with 3") {
  // The effort cannot drift past its critical value within so short a horizon.
  write("cli_est.json", R"({"horizon": 5.0})");
  CHECK(run("adaptive --case symmetric --config cli_est.json --out cli_x") == 3);
}

TEST_CASE("continue finds the pitchfork and reruns are byte-identical") {
  fs::remove_all("cli_c1");
  fs::remove_all("cli_c2");
  REQUIRE(run("continue --config " + config("pitchfork_continue.json") + " --out cli_c1") == 0);
  REQUIRE(run("continue --config " + config("pitchfork_continue.json") + " --out cli_c2") == 0);
  for (auto& e : fs::directory_iterator("cli_c1"))
    CHECK(slurp(e.path()) == slurp(fs::path("cli_c2") / e.path().filename()));
  std::string summary = slurp("cli_c1/summary.json");
  auto pos = summary.find("\"param\": ");
  REQUIRE(pos != std::string::npos);
  CHECK(std::abs(std::stod(summary.substr(pos + 9)) - 1.0) < 1e-6);
  CHECK(fs::exists("cli_c1/singular_points.json"));
  CHECK(fs::exists("cli_c1/branch_trunk.csv"));
}

TEST_CASE("value sensitivity writes the curve with its relative error column") {
  fs::remove_all("cli_vs");
  write("cli_vs.json", R"({"nu_grid": [0.5, 1.0, 2.0], "diagram_nus": []})");
  REQUIRE(run("sweep --scenario value_sensitivity --config cli_vs.json --out cli_vs") == 0);
  std::string csv = slurp("cli_vs/value_sensitivity.csv");
  CHECK(csv.rfind("nu,us_star_hat,us_star_numeric,rel_error", 0) == 0);
  CHECK(csv.find("\r\n") != std::string::npos);
}

TEST_CASE("adaptive symmetric diagnostics") {
  fs::remove_all("cli_ad");
  REQUIRE(run("adaptive --case symmetric --out cli_ad") == 0);
  std::string s = slurp("cli_ad/summary.json");
  CHECK(s.find("\"ubar_c\": 1.") != std::string::npos);
  CHECK(s.find("\"terminal_abs_y\"") != std::string::npos);
}

TEST_CASE("validate resolves without running, and the seed flag is honoured") {
  REQUIRE(run("validate --config " + config("hysteresis.json")) == 0);
  std::string out = slurp("cli_stdout.txt");
  CHECK(out.find("\"beta_b_step\": 0.1") != std::string::npos);
  REQUIRE(run("validate --config " + config("pitchfork_point.json") + " --seed 9") == 0);
  CHECK(slurp("cli_stdout.txt").find("\"seed\": 9") != std::string::npos);
  write("cli_nocmd.json", "{}");
  CHECK(run("validate --config cli_nocmd.json") == 2);
}

TEST_CASE("default output directory honours the environment") {
  fs::remove_all("cli_root");
  setenv("OPDYN_OUTPUT_ROOT", "cli_root", 1);
  REQUIRE(run("sweep --scenario uninformed_influence") == 0);
  CHECK(fs::exists("cli_root/sweep_uninformed_influence/uninformed_influence.csv"));
  unsetenv("OPDYN_OUTPUT_ROOT");
}

TEST_CASE("help documents flags and the environment variable") {
  REQUIRE(run("--help") == 0);
  std::string out = slurp("cli_stdout.txt");
  CHECK(out.find("OPDYN_OUTPUT_ROOT") != std::string::npos);
  REQUIRE(run("sweep --help") == 0);
  out = slurp("cli_stdout.txt");
  for (const char* f : {"--config", "--out", "--jobs", "--seed", "--scenario"}) CHECK(out.find(f) != std::string::npos);
}
