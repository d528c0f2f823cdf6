#include <doctest.h>

#include "opdyn/netgraph.hpp"
#include "oracles.hpp"

using namespace opdyn;

TEST_CASE("laplacian rows sum to zero and degrees are row sums") {
  Mat w(4, 4);
  w << 0, 1, 0.5, 0, 2, 0, 0, 0, 0, 1, 0, 3, 1, 0, 0, 0;
  Graph g = build_graph(w);
  for (Index i = 0; i < 4; ++i) {
    CHECK(g.degrees()(i) == doctest::Approx(w.row(i).sum()));
    CHECK(std::abs(g.laplacian().row(i).sum()) < 1e-15);
  }
  CHECK(g.min_degree() == doctest::Approx(1.0));
  CHECK(g.max_degree() == doctest::Approx(4.0));
  CHECK_FALSE(g.is_symmetric());
}

TEST_CASE("build_graph rejects bad weights") {
  Mat w = Mat::Zero(3, 3);
  w(0, 0) = 1;
  CHECK_THROWS_AS(build_graph(w), InvalidInput);
  w.setZero();
  w(0, 1) = -1;
  CHECK_THROWS_AS(build_graph(w), InvalidInput);
  CHECK_THROWS_AS(build_graph(Mat::Zero(2, 3)), InvalidInput);
}

TEST_CASE("strong connectivity") {
  CHECK(is_strongly_connected(complete_graph(5)));
  CHECK(is_strongly_connected(directed_ring(6)));
  CHECK(is_strongly_connected(path_graph(4)));
  Mat w = Mat::Zero(3, 3);
  w(1, 0) = 1;
  w(2, 1) = 1;  // a chain 0 -> 1 -> 2 with no way back
  CHECK_FALSE(is_strongly_connected(build_graph(w)));
  Mat two = Mat::Zero(4, 4);
  two(0, 1) = two(1, 0) = two(2, 3) = two(3, 2) = 1;
  CHECK_FALSE(is_strongly_connected(build_graph(two)));
}

TEST_CASE("directed ring matches its definition") {
  Graph g = directed_ring(6);
  CHECK(g.adjacency().isApprox(oracle::ring(6)));
}

TEST_CASE("lambda2 of known spectra") {
  // Complete graph: Laplacian eigenvalues 0 and N (multiplicity N-1).
  for (int n : {3, 5, 10}) CHECK(lambda2(complete_graph(n)) == doctest::Approx(n));
  // Path graph: 2 - 2 cos(pi / n).
  for (int n : {3, 6, 9}) CHECK(lambda2(path_graph(n)) == doctest::Approx(2 - 2 * std::cos(M_PI / n)));
  CHECK_THROWS_AS(lambda2(directed_ring(5)), InvalidInput);
}

TEST_CASE("left null eigenvector satisfies gamma^T L = 0 and sums to one") {
  Mat w(4, 4);
  w << 0, 2, 0, 0, 0, 0, 1, 0, 0, 0, 0, 3, 1, 0, 0, 0;
  Graph g = build_graph(w);
  Vec gam = left_null_eigenvector(g);
  CHECK((gam.transpose() * g.laplacian()).norm() < 1e-12);
  CHECK(gam.sum() == doctest::Approx(1.0));
  CHECK(gam.minCoeff() > 0);
  // Undirected graphs have a uniform left null vector.
  Vec u = left_null_eigenvector(path_graph(5));
  CHECK((u - Vec::Constant(5, 0.2)).norm() < 1e-12);
}

TEST_CASE("three population graph structure") {
  PopulationSpec s = all_to_all_spec(2, 3, 4);
  s.coupling = {{{1, 0.5, 0.25}, {0.5, 1, 0.25}, {2, 2, 1}}};
  Graph g = three_population_graph(s);
  CHECK(g.size() == 9);
  auto groups = s.groups();
  for (int k = 0; k < 3; ++k)
    for (int m = 0; m < 3; ++m)
      for (int i : groups[k])
        for (int j : groups[m])
          if (i != j) CHECK(g.adjacency()(i, j) == s.coupling[k][m]);
  // Every member of group k has degree (n_k - 1) + sum_{m != k} n_m a_km.
  for (int k = 0; k < 3; ++k) {
    double d = s.group_size(k) - 1;
    for (int m = 0; m < 3; ++m)
      if (m != k) d += s.group_size(m) * s.coupling[k][m];
    CHECK(s.group_degree(k) == doctest::Approx(d));
    for (int i : groups[k]) CHECK(g.degrees()(i) == doctest::Approx(d));
  }
}

TEST_CASE("population spec validation") {
  PopulationSpec s = all_to_all_spec(2, 2, 2);
  s.coupling[0][0] = 0.5;
  CHECK_THROWS_AS(s.validate(), InvalidInput);
  s = all_to_all_spec(2, 2, 2);
  s.coupling[0][2] = -1;
  CHECK_THROWS_AS(s.validate(), InvalidInput);
  CHECK(is_z2_symmetric(all_to_all_spec(3, 3, 4), 1.0, 1.0));
  CHECK_FALSE(is_z2_symmetric(all_to_all_spec(3, 3, 4), 1.0, 2.0));
  CHECK_FALSE(is_z2_symmetric(all_to_all_spec(3, 2, 4), 1.0, 1.0));
}

TEST_CASE("population beta expands by group") {
  PopulationSpec s = all_to_all_spec(2, 1, 2);
  Vec b = population_beta(s, 3.0, 4.0);
  Vec expect(5);
  expect << 3, 3, -4, 0, 0;
  CHECK(b.isApprox(expect));
}
