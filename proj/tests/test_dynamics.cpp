#include <doctest.h>

#include <random>

#include "opdyn/bifurcation.hpp"
#include "opdyn/dynamics.hpp"
#include "oracles.hpp"

using namespace opdyn;

namespace {

Vec random_vec(Index n, std::mt19937_64& rng, double amp = 1.0) {
  std::uniform_real_distribution<double> d(-amp, amp);
  Vec v(n);
  for (Index i = 0; i < n; ++i) v(i) = d(rng);
  return v;
}

Graph random_graph(Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  Mat w(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) w(i, j) = i == j ? 0.0 : (d(rng) < 0.6 ? d(rng) : 0.0);
  return build_graph(w);
}

}  // namespace

TEST_CASE("normalized field matches a scalar-loop oracle") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    Graph g = random_graph(7, rng);
    Vec x = random_vec(7, rng, 3.0);
    Vec b = random_vec(7, rng);
    double u = 2.0 * (rep + 1) / 20.0;
    Vec f = normalized_field(x, g, u, b);
    CHECK((f - oracle::field(g.adjacency(), x, u, b)).norm() < 1e-12);
  }
}

TEST_CASE("full field equals u_I times the normalized field") {
  std::mt19937_64 rng(3);
  Graph g = random_graph(6, rng);
  ModelParams p;
  p.u_inertia = 2.5;
  p.u_social = 3.0;
  p.nu = random_vec(6, rng);
  Vec x = random_vec(6, rng, 2.0);
  Vec f = full_field(x, g, p);
  CHECK((f - p.u_inertia * normalized_field(x, g, p.u(), p.beta())).norm() < 1e-12);
  // Written out with raw gains: -u_I D x + u_S A tanh(x) + nu.
  Vec direct = -p.u_inertia * g.degrees().cwiseProduct(x) + p.u_social * g.adjacency() * x.array().tanh().matrix() + p.nu;
  CHECK((f - direct).norm() < 1e-12);
}

TEST_CASE("model parameter validation") {
  ModelParams p;
  p.u_inertia = 0;
  CHECK_THROWS_AS(p.validate(3), InvalidInput);
  p.u_inertia = 1;
  p.u_social = -1;
  CHECK_THROWS_AS(p.validate(3), InvalidInput);
  p.u_social = 1;
  p.nu = Vec::Zero(2);
  CHECK_THROWS_AS(p.validate(3), InvalidInput);
}

TEST_CASE("heterogeneous field reduces to the homogeneous one when utilde = 0") {
  std::mt19937_64 rng(5);
  Graph g = random_graph(5, rng);
  Vec x = random_vec(5, rng, 2.0), b = random_vec(5, rng);
  CHECK((hetero_field(x, g, 1.3, Vec::Zero(5), b) - normalized_field(x, g, 1.3, b)).norm() < 1e-14);
  Vec ut(5);
  ut << 0.1, -0.2, 0.05, 0.05, 0.0;
  Vec f = hetero_field(x, g, 1.3, ut, b);
  Vec direct = -g.degrees().cwiseProduct(x) +
               (Vec::Constant(5, 1.3) + ut).cwiseProduct(g.adjacency() * x.array().tanh().matrix()) + b;
  CHECK((f - direct).norm() < 1e-12);
  Vec bad = Vec::Constant(5, 0.1);
  CHECK_THROWS_AS(hetero_field(x, g, 1.3, bad, b), InvalidInput);
}

TEST_CASE("analytic Jacobians match central differences") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    Graph g = random_graph(6, rng);
    Vec x = random_vec(6, rng, 2.0);
    double u = 0.4 + 0.2 * rep;
    Mat j = jacobian(x, g, u);
    Mat fd = oracle::fd_jacobian([&](const Vec& z) { return normalized_field(z, g, u, Vec()); }, x);
    CHECK((j - fd).cwiseAbs().maxCoeff() < 1e-6);
    Vec ut = random_vec(6, rng, 0.1);
    ut.array() -= ut.mean();
    Mat jh = jacobian(x, g, u, ut);
    Mat fdh = oracle::fd_jacobian([&](const Vec& z) { return hetero_field(z, g, u, ut, Vec()); }, x);
    CHECK((jh - fdh).cwiseAbs().maxCoeff() < 1e-6);
  }
  PopulationSpec s = all_to_all_spec(3, 2, 4);
  s.coupling = {{{1, 0.3, 0.7}, {0.2, 1, 0.9}, {1.5, 0.4, 1}}};
  ReducedState y(0.3, -0.8, 1.1);
  Mat jr = reduced3_jacobian(y, s, 1.7);
  Mat fdr = oracle::fd_jacobian([&](const Vec& z) -> Vec { return reduced3_field(z, s, 1.7, 0.5, 0.2); }, y);
  CHECK((jr - fdr).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("reduced field lifts exactly to the full field on the group manifold") {
  PopulationSpec s = all_to_all_spec(3, 2, 4);
  s.coupling = {{{1, 0.3, 0.7}, {0.2, 1, 0.9}, {1.5, 0.4, 1}}};
  Graph g = three_population_graph(s);
  ReducedState y(0.4, -0.9, 0.2);
  const double u = 1.4, ba = 0.7, bb = 0.3;
  Vec full = normalized_field(lift_reduced(y, s), g, u, population_beta(s, ba, bb));
  Vec lifted = lift_reduced(reduced3_field(y, s, u, ba, bb), s);
  CHECK((full - lifted).norm() < 1e-12);
}

TEST_CASE("all-to-all reduced model written out by hand") {
  const int n = 4, n3 = 3;
  const double u = 1.3, beta = 0.6;
  ReducedState y(0.5, -0.2, 0.1);
  const int big_n = 2 * n + n3;
  const double s1 = std::tanh(y(0)), s2 = std::tanh(y(1)), s3 = std::tanh(y(2));
  ReducedState expect(-(big_n - 1) * y(0) + u * ((n - 1) * s1 + n * s2 + n3 * s3) + beta,
                      -(big_n - 1) * y(1) + u * (n * s1 + (n - 1) * s2 + n3 * s3) - beta,
                      -(big_n - 1) * y(2) + u * (n * s1 + n * s2 + (n3 - 1) * s3));
  CHECK((ata_reduced3_field(y, n, n3, u, beta) - expect).norm() < 1e-12);
  // Same thing through the general reduced field.
  CHECK((reduced3_field(y, all_to_all_spec(n, n, n3), u, beta, beta) - expect).norm() < 1e-12);
}

TEST_CASE("scalar consensus field") {
  CHECK(scalar_consensus_field(0.7, 2.0, 5) == doctest::Approx(4 * (-0.7 + 2.0 * std::tanh(0.7))));
}

TEST_CASE("decision metrics follow their definitions") {
  Vec x(4);
  x << 0.5, 0.6, 0.7, 0.2;
  CHECK(group_opinion(x) == doctest::Approx(0.5));
  CHECK(disagreement(x) == 0.0);
  DecisionConfig c;
  CHECK(classify_decision(x, c) == Decision::DecisionA);
  CHECK(classify_decision(-x, c) == Decision::DecisionB);
  Vec mixed(4);
  mixed << 0.5, -0.6, 0.1, 0.2;
  CHECK(disagreement(mixed) == doctest::Approx(0.05 - 0.35));
  CHECK(classify_decision(mixed, c) == Decision::DeadlockDisagreement);
  Vec small = Vec::Constant(4, 0.01);
  CHECK(classify_decision(small, c) == Decision::DeadlockNoDecision);
  CHECK(to_string(Decision::DecisionA) == "DecisionA");
}

TEST_CASE("group helpers") {
  PopulationSpec s = all_to_all_spec(2, 1, 3);
  Vec x(6);
  x << 1, 3, 5, 0, 1, 2;
  ReducedState m = group_means(x, s);
  CHECK(m(0) == doctest::Approx(2));
  CHECK(m(1) == doctest::Approx(5));
  CHECK(m(2) == doctest::Approx(1));
  // (1/2) sum over ordered pairs of squared differences, per group.
  CHECK(group_spread(x, s) == doctest::Approx(4.0 + (1 + 4 + 1)));
}

TEST_CASE("estimator field preserves the average of the estimate") {
  std::mt19937_64 rng(2);
  Graph g = complete_graph(6);
  EstimatorState e{random_vec(6, rng), 1.5};
  Vec x = random_vec(6, rng);
  Vec dw = estimator_field(e, x, g);
  // d(yhat)/ds = L dw and 1^T L = 0 on undirected graphs.
  CHECK(std::abs((g.laplacian() * dw).sum()) < 1e-12);
  for (Index i = 0; i < 6; ++i) CHECK(std::abs(std::abs(dw(i)) - 1.5) < 1e-15);
}

TEST_CASE("adaptive field") {
  Graph g = complete_graph(4);
  Vec x(4);
  x << 0.1, 0.2, 0.3, 0.4;
  AdaptiveConfig c;
  AdaptiveRate r = adaptive_field(x, 1.2, 0.25, g, Vec::Zero(4), Vec::Zero(4), c);
  CHECK(r.dubar == doctest::Approx(c.epsilon * (c.y_th * c.y_th - 0.25 * 0.25)));
  CHECK((r.dx - normalized_field(x, g, 1.2, Vec())).norm() < 1e-14);
  AdaptiveConfig bad;
  bad.epsilon = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad.epsilon = 0.5;
  CHECK(bad.warning().has_value());
}
