#include "opdyn/netgraph.hpp"

#include <cmath>
#include <queue>

namespace opdyn {

Graph build_graph(const Mat& weights) {
  require(weights.rows() == weights.cols(), "adjacency matrix must be square");
  require(weights.rows() > 0, "graph needs at least one agent");
  for (Index i = 0; i < weights.rows(); ++i) {
    require(weights(i, i) == 0.0, "adjacency diagonal must be zero (a_ii = 0), found nonzero at row " +
                                      std::to_string(i + 1));
    for (Index j = 0; j < weights.cols(); ++j) {
      require(std::isfinite(weights(i, j)), "adjacency weights must be finite");
      require(weights(i, j) >= 0.0, "adjacency weights must be nonnegative");
    }
  }
  Graph g;
  g.adjacency_ = weights;
  g.degrees_ = weights.rowwise().sum();
  g.laplacian_ = -weights;
  // Diagonal set from the same row sums so that L*1 vanishes to rounding of the sum itself.
  for (Index i = 0; i < weights.rows(); ++i) g.laplacian_(i, i) = g.degrees_(i);
  return g;
}

Graph complete_graph(int n, double weight) {
  require(n >= 1, "complete graph needs n >= 1");
  Mat a = Mat::Constant(n, n, weight);
  a.diagonal().setZero();
  return build_graph(a);
}

Graph directed_ring(int n, double weight) {
  require(n >= 2, "ring needs n >= 2");
  Mat a = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) a(i, (i + n - 1) % n) = weight;
  return build_graph(a);
}

Graph path_graph(int n) {
  require(n >= 1, "path graph needs n >= 1");
  Mat a = Mat::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = a(i + 1, i) = 1.0;
  return build_graph(a);
}

double PopulationSpec::group_degree(int k) const {
  double d = group_size(k) - 1;
  for (int m = 0; m < 3; ++m)
    if (m != k) d += group_size(m) * coupling[k][m];
  return d;
}

void PopulationSpec::validate() const {
  require(n1 >= 0 && n2 >= 0 && n3 >= 0, "population sizes must be nonnegative");
  require(total() >= 1, "population spec has no agents");
  for (int k = 0; k < 3; ++k)
    for (int m = 0; m < 3; ++m) {
      require(std::isfinite(coupling[k][m]) && coupling[k][m] >= 0.0, "coupling weights must be nonnegative");
      if (k == m) require(coupling[k][m] == 1.0, "intra-group coupling must equal 1");
    }
}

std::array<std::vector<int>, 3> PopulationSpec::groups() const {
  std::array<std::vector<int>, 3> out;
  int idx = 0;
  for (int k = 0; k < 3; ++k)
    for (int c = 0; c < group_size(k); ++c) out[k].push_back(idx++);
  return out;
}

PopulationSpec all_to_all_spec(int n1, int n2, int n3) {
  PopulationSpec s;
  s.n1 = n1;
  s.n2 = n2;
  s.n3 = n3;
  return s;
}

Graph three_population_graph(const PopulationSpec& spec) {
  spec.validate();
  const int n = spec.total();
  std::vector<int> group(n);
  auto groups = spec.groups();
  for (int k = 0; k < 3; ++k)
    for (int i : groups[k]) group[i] = k;
  Mat a = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) a(i, j) = spec.coupling[group[i]][group[j]];
  return build_graph(a);
}

bool is_z2_symmetric(const PopulationSpec& spec, double beta_a, double beta_b) {
  if (beta_a != beta_b || spec.n1 != spec.n2) return false;
  for (int k = 0; k < 3; ++k)
    for (int m = 0; m < 3; ++m)
      if (spec.coupling[k][m] != spec.coupling[m][k]) return false;
  return spec.coupling[0][2] == spec.coupling[1][2];
}

namespace {

std::vector<bool> reach(const Mat& a, bool forward) {
  const Index n = a.rows();
  std::vector<bool> seen(n, false);
  std::queue<Index> q;
  seen[0] = true;
  q.push(0);
  while (!q.empty()) {
    Index v = q.front();
    q.pop();
    for (Index w = 0; w < n; ++w) {
      // arc v -> w exists when a(w, v) > 0
      double wt = forward ? a(w, v) : a(v, w);
      if (wt > 0 && !seen[w]) {
        seen[w] = true;
        q.push(w);
      }
    }
  }
  return seen;
}

}  // namespace

bool is_strongly_connected(const Graph& g) {
  if (g.size() == 1) return true;
  for (bool dir : {true, false}) {
    auto seen = reach(g.adjacency(), dir);
    for (bool s : seen)
      if (!s) return false;
  }
  return true;
}

Vec left_null_eigenvector(const Graph& g) {
  const Index n = g.size();
  if (n == 1) return Vec::Ones(1);
  Eigen::EigenSolver<Mat> es(g.laplacian().transpose(), false);
  const Eigen::VectorXcd ev = es.eigenvalues();
  const double rho = ev.cwiseAbs().maxCoeff();
  int zeros = 0;
  for (Index i = 0; i < n; ++i)
    if (std::abs(ev(i)) <= 1e-8 * std::max(rho, 1e-300)) ++zeros;
  if (rho == 0.0 || zeros != 1)
    throw InvalidInput("zero eigenvalue of the Laplacian is not simple; graph is not strongly connected");

  // Replace one balance equation by the normalization sum(v) = 1 and solve directly.
  Mat m = g.laplacian().transpose();
  m.row(n - 1).setOnes();
  Vec rhs = Vec::Zero(n);
  rhs(n - 1) = 1.0;
  Vec v = m.fullPivLu().solve(rhs);
  for (Index i = 0; i < n; ++i) {
    if (v(i) < 0) {
      if (v(i) < -1e-10) throw NumericalFailure("left null vector has a negative entry");
      v(i) = 0.0;
    }
  }
  return v / v.sum();
}

double lambda2(const Graph& g) {
  require(g.is_symmetric(), "lambda2 requires symmetric (undirected) weights");
  require(g.size() >= 2, "lambda2 requires at least two agents");
  Eigen::SelfAdjointEigenSolver<Mat> es(g.laplacian(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(1);
}

Vec population_beta(const PopulationSpec& spec, double beta_a, double beta_b) {
  Vec b = Vec::Zero(spec.total());
  auto groups = spec.groups();
  for (int i : groups[0]) b(i) = beta_a;
  for (int i : groups[1]) b(i) = -beta_b;
  return b;
}

}  // namespace opdyn
