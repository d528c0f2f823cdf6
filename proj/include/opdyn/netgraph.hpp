#pragma once

#include <array>
#include <vector>

#include "opdyn/common.hpp"

namespace opdyn {

// a_ij is the weight agent i places on agent j; arcs run j -> i.
class Graph {
 public:
  Graph() = default;

  Index size() const { return adjacency_.rows(); }
  const Mat& adjacency() const { return adjacency_; }
  const Vec& degrees() const { return degrees_; }
  const Mat& laplacian() const { return laplacian_; }
  double min_degree() const { return degrees_.minCoeff(); }
  double max_degree() const { return degrees_.maxCoeff(); }
  bool is_symmetric() const { return adjacency_ == adjacency_.transpose(); }

  friend Graph build_graph(const Mat& weights);

 private:
  Mat adjacency_;
  Vec degrees_;
  Mat laplacian_;
};

Graph build_graph(const Mat& weights);
Graph complete_graph(int n, double weight = 1.0);
Graph directed_ring(int n, double weight = 1.0);
Graph path_graph(int n);

struct PopulationSpec {
  int n1 = 0;
  int n2 = 0;
  int n3 = 0;
  // coupling[k][m] is the weight a member of group k places on a member of group m.
  std::array<std::array<double, 3>, 3> coupling{{{1, 1, 1}, {1, 1, 1}, {1, 1, 1}}};

  int total() const { return n1 + n2 + n3; }
  int group_size(int k) const { return k == 0 ? n1 : (k == 1 ? n2 : n3); }
  double group_degree(int k) const;
  void validate() const;
  std::array<std::vector<int>, 3> groups() const;
};

PopulationSpec all_to_all_spec(int n1, int n2, int n3);
Graph three_population_graph(const PopulationSpec& spec);
bool is_z2_symmetric(const PopulationSpec& spec, double beta_a, double beta_b);

bool is_strongly_connected(const Graph& g);
Vec left_null_eigenvector(const Graph& g);
double lambda2(const Graph& g);

// Expands group-level information (beta_a, 0, -beta_b) into a per-agent vector.
Vec population_beta(const PopulationSpec& spec, double beta_a, double beta_b);

}  // namespace opdyn
