#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <random>

#include "opdyn/commands.hpp"
#include "opdyn/experiments.hpp"
#include "opdyn/serialization.hpp"
#include "oracles.hpp"

using namespace opdyn;

namespace {

std::mt19937_64 rng(20240601);

Vec draw(Index n, double amp) {
  std::uniform_real_distribution<double> d(-amp, amp);
  Vec v(n);
  for (Index i = 0; i < n; ++i) v(i) = d(rng);
  return v;
}

Graph random_strong_graph(Index n) {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  Mat w = Mat::Zero(n, n);
  for (Index i = 0; i < n; ++i) w(i, (i + n - 1) % n) = 0.5 + d(rng);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (i != j && d(rng) < 0.3) w(i, j) += d(rng);
  return build_graph(w);
}

}  // namespace

TEST_CASE("odd symmetry: F(-x, -beta) = -F(x, beta)") {
  for (int rep = 0; rep < 200; ++rep) {
    Graph g = random_strong_graph(6);
    Vec x = draw(6, 3), b = draw(6, 2);
    double u = 3.0 * (rep % 7) / 6.0;
    Vec lhs = normalized_field(-x, g, u, -b), rhs = -normalized_field(x, g, u, b);
    CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("Z2 equivariance of the informed symmetric network") {
  const int n = 3, n3 = 4, big_n = 2 * n + n3;
  PopulationSpec s = all_to_all_spec(n, n, n3);
  Graph g = three_population_graph(s);
  Vec beta = population_beta(s, 1.3, 1.3);
  Mat gamma = Mat::Zero(big_n, big_n);
  for (int i = 0; i < n; ++i) gamma(i, n + i) = gamma(n + i, i) = -1;
  for (int i = 2 * n; i < big_n; ++i) gamma(i, i) = -1;
  CHECK((gamma * gamma - Mat::Identity(big_n, big_n)).norm() == 0.0);
  for (int rep = 0; rep < 200; ++rep) {
    Vec x = draw(big_n, 3);
    double u = 0.2 + 0.01 * rep;
    Vec lhs = normalized_field(gamma * x, g, u, beta), rhs = gamma * normalized_field(x, g, u, beta);
    CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("permutation equivariance on complete graphs") {
  Graph g = complete_graph(7);
  for (int rep = 0; rep < 50; ++rep) {
    Vec x = draw(7, 2), b = draw(7, 1);
    std::vector<int> p{0, 1, 2, 3, 4, 5, 6};
    std::shuffle(p.begin(), p.end(), rng);
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(Eigen::Map<Eigen::VectorXi>(p.data(), 7));
    Vec lhs = normalized_field(perm * x, g, 1.7, perm * b), rhs = perm * normalized_field(x, g, 1.7, b);
    CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("Jacobians agree with finite differences on random states") {
  for (int rep = 0; rep < 100; ++rep) {
    Graph g = random_strong_graph(5);
    Vec x = draw(5, 2.5);
    double u = 0.1 + 0.03 * rep;
    Mat fd = oracle::fd_jacobian([&](const Vec& z) { return normalized_field(z, g, u, Vec()); }, x);
    CHECK((jacobian(x, g, u) - fd).cwiseAbs().maxCoeff() < 1e-6);
  }
  ParametrizedSystem sys = ata_reduced3_system(4, 5, 0.8);
  for (int rep = 0; rep < 50; ++rep) {
    Vec y = draw(3, 2);
    double u = 0.5 + 0.05 * rep;
    Mat fd = oracle::fd_jacobian([&](const Vec& z) { return sys.field(z, u); }, y);
    CHECK((sys.jacobian(y, u) - fd).cwiseAbs().maxCoeff() < 1e-6);
    double h = 1e-6;
    Vec fp = (sys.field(y, u + h) - sys.field(y, u - h)) / (2 * h);
    CHECK((sys.param_derivative(y, u) - fp).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("dissipation below the bifurcation: x^T F(x) < 0") {
  Graph g = complete_graph(10);
  for (double u : {0.3, 0.9, 1.0})
    for (int rep = 0; rep < 2000; ++rep) {
      Vec x = draw(10, std::pow(10.0, (rep % 8) - 4));
      if (x.norm() == 0) continue;
      CHECK(x.dot(normalized_field(x, g, u, Vec())) < 0);
    }
}

TEST_CASE("trajectories stay inside the absorbing box") {
  for (int rep = 0; rep < 20; ++rep) {
    Graph g = random_strong_graph(6);
    Vec b = draw(6, 2);
    double u = 0.5 + 0.2 * rep;
    OdeSystem ode;
    ode.rhs = [&](double, const Vec& x) { return normalized_field(x, g, u, b); };
    IntegratorConfig c;
    c.t_end = 20;
    Vec x0 = draw(6, 5);
    Trajectory tr = integrate(ode, x0, c);
    CHECK(absorbing_box_violation(tr.states, g, Vec::Constant(6, u), b) <= 1e-12);
  }
}

TEST_CASE("consensus manifold is invariant for complete graphs with beta = 0") {
  Graph g = complete_graph(8);
  OdeSystem ode;
  ode.rhs = [&](double, const Vec& x) { return normalized_field(x, g, 2.0, Vec()); };
  IntegratorConfig c;
  c.t_end = 10;
  Trajectory tr = integrate(ode, Vec::Constant(8, 0.3), c);
  for (const auto& x : tr.states) CHECK((x.array() - x(0)).abs().maxCoeff() < 1e-13);
  CHECK(std::abs(tr.final_state()(0) - oracle::ys(2.0)) < 1e-6);
}

TEST_CASE("post-bifurcation runs on complete graphs decide, never disagree") {
  Graph g = complete_graph(10);
  for (int rep = 0; rep < 20; ++rep) {
    OdeSystem ode;
    ode.rhs = [&](double, const Vec& x) { return normalized_field(x, g, 2.0, Vec()); };
    IntegratorConfig c;
    c.t_end = 50;
    c.record = false;
    Trajectory tr = integrate(ode, draw(10, 0.5), c);
    Decision d = classify_decision(tr.final_state(), DecisionConfig{});
    CHECK((d == Decision::DecisionA || d == Decision::DecisionB));
  }
}

TEST_CASE("repeated runs produce byte-identical artifacts") {
  namespace fs = std::filesystem;
  fs::path root = fs::temp_directory_path() / "opdyn_determinism";
  fs::remove_all(root);
  struct Job {
    std::string command, variant;
    json cfg;
  };
  std::vector<Job> jobs{{"simulate", "", json{{"t_end", 5.0}}},
                        {"continue", "", json::object()},
                        {"sweep", "reduction_demo", json{{"t_end", 2.0}}},
                        {"sweep", "quintic_transition", json::object()}};
  for (const auto& j : jobs) {
    std::vector<std::map<std::string, std::string>> runs;
    for (int k = 0; k < 2; ++k) {
      RunOptions ro;
      ro.out_dir = (root / (j.command + j.variant + std::to_string(k))).string();
      ro.jobs = k == 0 ? 1 : 3;
      run_command(j.command, j.variant, j.cfg, ro);
      std::map<std::string, std::string> files;
      for (auto& e : fs::directory_iterator(ro.out_dir)) files[e.path().filename().string()] = read_text(e.path().string());
      runs.push_back(files);
    }
    CAPTURE(j.command);
    CAPTURE(j.variant);
    CHECK(runs[0].size() > 2);
    CHECK(runs[0] == runs[1]);
  }
  fs::remove_all(root);
}
