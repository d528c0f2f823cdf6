#include <doctest.h>

#include "opdyn/approximations.hpp"
#include "opdyn/bifurcation.hpp"
#include "opdyn/experiments.hpp"
#include "oracles.hpp"

using namespace opdyn;

namespace {

// Scalar normal forms with hand-written derivatives.
ParametrizedSystem scalar(std::function<double(double, double)> f, std::function<double(double, double)> fx,
                          std::function<double(double, double)> fp) {
  ParametrizedSystem s;
  s.dim = 1;
  s.param_name = "p";
  s.field = [f](const Vec& x, double p) { return Vec::Constant(1, f(x(0), p)); };
  s.jacobian = [fx](const Vec& x, double p) { return Mat::Constant(1, 1, fx(x(0), p)); };
  s.param_derivative = [fp](const Vec& x, double p) { return Vec::Constant(1, fp(x(0), p)); };
  return s;
}

}  // namespace

TEST_CASE("det_sign_log agrees with a dense determinant") {
  Mat m(3, 3);
  m << 2, -1, 0, 4, 1, 3, -2, 5, 1;
  auto [sign, logabs] = det_sign_log(m);
  double d = m.determinant();
  CHECK(sign == (d > 0 ? 1 : -1));
  CHECK(std::exp(logabs) == doctest::Approx(std::abs(d)));
  auto [s0, l0] = det_sign_log(Mat::Zero(2, 2));
  CHECK(s0 == 0);
}

TEST_CASE("find_equilibrium and stability tags") {
  Graph g = complete_graph(5);
  ParametrizedSystem sys = normalized_system(g, Vec());
  Equilibrium e = find_equilibrium(sys, Vec::Constant(5, 1.0), 2.0);
  CHECK((e.x - Vec::Constant(5, oracle::ys(2.0))).norm() < 1e-10);
  CHECK(e.stability == Stability::Stable);
  Equilibrium o = find_equilibrium(sys, Vec::Constant(5, 1e-3), 2.0);
  CHECK(o.x.norm() < 1e-12);
  CHECK(o.stability == Stability::Saddle);
  CHECK(o.n_unstable == 1);
  CHECK_THROWS_AS(find_equilibrium(scalar([](double x, double p) { return x * x + p; },
                                          [](double x, double) { return 2 * x; },
                                          [](double, double) { return 1.0; }),
                                   Vec::Constant(1, 0.5), 1.0),
                  NumericalFailure);
}

TEST_CASE("pitchfork normal form is detected and classified") {
  auto sys = scalar([](double x, double p) { return p * x - x * x * x; }, [](double x, double p) { return p - 3 * x * x; },
                    [](double x, double) { return x; });
  ContinuationConfig c;
  c.p_min = -1;
  c.p_max = 1;
  Equilibrium start = find_equilibrium(sys, Vec::Zero(1), -1);
  Branch b = continue_branch(sys, start, c);
  REQUIRE(b.singular_points.size() == 1);
  CHECK(std::abs(b.singular_points[0].param) < 1e-8);
  CHECK(b.singular_points[0].kind == SingularKind::Pitchfork);
  CHECK(b.termination == "reached p bound");
  Equilibrium up = branch_switch(sys, b.singular_points[0], +1, 1e-2);
  Equilibrium dn = branch_switch(sys, b.singular_points[0], -1, 1e-2);
  CHECK(up.x(0) * dn.x(0) < 0);
  CHECK(up.param == doctest::Approx(1e-4).epsilon(1e-6));
}

TEST_CASE("fold normal form is detected and classified") {
  auto sys = scalar([](double x, double p) { return p - x * x; }, [](double x, double) { return -2 * x; },
                    [](double, double) { return 1.0; });
  ContinuationConfig c;
  c.p_min = -1;
  c.p_max = 1;
  c.direction = -1;
  Equilibrium start = find_equilibrium(sys, Vec::Constant(1, 1.0), 1.0);
  Branch b = continue_branch(sys, start, c);
  REQUIRE(b.singular_points.size() == 1);
  CHECK(std::abs(b.singular_points[0].param) < 1e-8);
  CHECK(b.singular_points[0].kind == SingularKind::Fold);
  CHECK(b.singular_points[0].tangent_flip);
  // After the fold the branch continues on x < 0 back to the upper bound.
  CHECK(b.points.back().eq.x(0) < 0);
  CHECK(b.points.back().eq.param == doctest::Approx(1.0));
}

TEST_CASE("complete graph trunk: one pitchfork at u = 1 with null vector along 1") {
  for (int n : {5, 10}) {
    Graph g = complete_graph(n);
    PitchforkDiagram d = run_pitchfork_diagram(g);
    REQUIRE(d.trunk.singular_points.size() == 1);
    const auto& sp = d.trunk.singular_points[0];
    CHECK(std::abs(sp.param - 1.0) < 1e-6);
    CHECK(sp.kind == SingularKind::Pitchfork);
    Vec ones = Vec::Constant(n, 1.0 / std::sqrt(double(n)));
    CHECK(std::abs(std::abs(sp.null_vector.dot(ones)) - 1.0) < 1e-8);
    // Oracle: the determinant of -D + uA changes sign at the same u.
    CHECK(std::abs(sp.param - oracle::first_det_crossing(g.adjacency(), 0.5, 3.0)) < 1e-6);
  }
}

TEST_CASE("switched branches carry y_s on the consensus manifold, with opposite signs") {
  Graph g = complete_graph(6);
  PitchforkDiagram d = run_pitchfork_diagram(g);
  REQUIRE(d.switched.size() == 2);
  CHECK(d.switched[0].direction == -d.switched[1].direction);
  for (const auto& sb : d.switched) {
    for (const auto& p : sb.branch.points) {
      if (p.eq.param < 1.05) continue;
      double ys = oracle::ys(p.eq.param);
      CHECK((p.eq.x.cwiseAbs() - Vec::Constant(6, ys)).cwiseAbs().maxCoeff() < 1e-6);
      CHECK(p.eq.n_unstable == 0);
    }
  }
  CHECK(d.switched[0].branch.points.back().eq.x(0) * d.switched[1].branch.points.back().eq.x(0) < 0);
  // Past the pitchfork the trunk is a saddle.
  CHECK(d.trunk.points.back().eq.n_unstable == 1);
}

TEST_CASE("directed ring pitchfork") {
  PitchforkDiagram d = run_pitchfork_diagram(directed_ring(6));
  REQUIRE(d.trunk.singular_points.size() == 1);
  CHECK(std::abs(d.trunk.singular_points[0].param - 1.0) < 1e-6);
  CHECK(std::abs(d.trunk.singular_points[0].param - oracle::first_det_crossing(oracle::ring(6), 0.5, 3.0)) < 1e-6);
}

TEST_CASE("case-2 unfolding: the deadlock branch folds") {
  const int n = 10;
  Graph g = complete_graph(n);
  Vec beta = adaptive_case_beta(AdaptiveCase::Case2, n);
  ParametrizedSystem sys = hetero_system(g, Vec::Zero(n), beta);
  Equilibrium start = settle_equilibrium(sys, Vec::Zero(n), 0.9);
  ContinuationConfig c;
  c.p_min = 0.4;
  c.p_max = 1.9;
  Branch b = continue_branch(sys, start, c);
  REQUIRE_FALSE(b.singular_points.empty());
  const auto& f = b.singular_points[0];
  CHECK(f.kind == SingularKind::Fold);
  // At a fold the Jacobian is singular and the branch stops moving in the parameter.
  Mat j = sys.jacobian(f.state, f.param);
  Eigen::JacobiSVD<Mat> svd(j);
  CHECK(svd.singularValues().minCoeff() < 1e-6);
  CHECK(sys.field(f.state, f.param).norm() < 1e-9);
}

TEST_CASE("continuation config validation") {
  ContinuationConfig c;
  c.p_max = c.p_min;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c = ContinuationConfig{};
  c.h_min = 1.0;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
}
