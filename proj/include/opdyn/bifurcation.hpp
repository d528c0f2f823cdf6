#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "opdyn/dynamics.hpp"

namespace opdyn {

// A vector field F(x, p) over one scalar parameter, with analytic derivatives.
struct ParametrizedSystem {
  Index dim = 0;
  std::string param_name = "u";
  std::function<Vec(const Vec&, double)> field;
  std::function<Mat(const Vec&, double)> jacobian;
  std::function<Vec(const Vec&, double)> param_derivative;
};

// -D + U A diag(S'(x)), with U = diag(ubar + utilde).
Mat jacobian(const Vec& x, const Graph& g, double ubar, const Vec& utilde, const Sigmoid& s = Sigmoid());
Mat jacobian(const Vec& x, const Graph& g, double u, const Sigmoid& s = Sigmoid());

ParametrizedSystem normalized_system(const Graph& g, const Vec& beta, const Sigmoid& s = Sigmoid());
ParametrizedSystem hetero_system(const Graph& g, const Vec& utilde, const Vec& beta, const Sigmoid& s = Sigmoid());
ParametrizedSystem reduced3_system(const PopulationSpec& spec, double beta_a, double beta_b,
                                   const Sigmoid& s = Sigmoid());
ParametrizedSystem ata_reduced3_system(int n, int n3, double beta, const Sigmoid& s = Sigmoid());

enum class Stability { Stable, Saddle, Nonhyperbolic };
std::string to_string(Stability s);

struct Equilibrium {
  Vec x;
  double param = 0.0;
  Eigen::VectorXcd eigenvalues;
  Stability stability = Stability::Stable;
  int n_unstable = 0;
};

struct NewtonConfig {
  double tol = 1e-12;
  int max_iter = 50;
};

// Fills eigenvalues and the stability tag (real-part margin 1e-8).
void assess_stability(Equilibrium& eq, const Mat& jac);
Equilibrium find_equilibrium(const ParametrizedSystem& sys, const Vec& guess, double param,
                             const NewtonConfig& cfg = {});

enum class SingularKind { Pitchfork, Fold, Ambiguous };
std::string to_string(SingularKind k);

struct SingularPoint {
  SingularKind kind = SingularKind::Ambiguous;
  double param = 0.0;
  Vec state;
  Vec null_vector;  // unit 2-norm
  bool det_flip = false;
  bool tangent_flip = false;
};

struct BranchPoint {
  Equilibrium eq;
  int det_sign = 0;
  double log_abs_det = 0.0;
  double arclength = 0.0;
};

struct Branch {
  std::vector<BranchPoint> points;
  std::vector<SingularPoint> singular_points;
  std::string termination;
};

struct ContinuationConfig {
  double p_min = 0.5;
  double p_max = 3.0;
  double h_init = 0.01;
  double h_min = 1e-5;
  double h_max = 0.1;
  int direction = 1;  // initial sign of dp/ds, unless a tangent hint is supplied
  int max_points = 20000;
  double corrector_tol = 1e-11;
  int corrector_max_iter = 10;
  double refine_tol = 1e-8;
  double probe_offset = 1e-2;
  bool classify = true;
  // A trunk that is the fixed subspace of a symmetry: branch points on it are pitchforks.
  bool symmetric_trunk = false;
  void validate() const;
};

Branch continue_branch(const ParametrizedSystem& sys, const Equilibrium& start, const ContinuationConfig& cfg,
                       const std::optional<Vec>& tangent_hint = std::nullopt);

SingularKind classify_singularity(const ParametrizedSystem& sys, const SingularPoint& sp, bool symmetric_trunk = false,
                                  double probe_offset = 1e-2);

// Seed on the branch emerging from a pitchfork: solves F = 0 with phi^T (x - x_sp) = direction * offset and the
// parameter free.
Equilibrium branch_switch(const ParametrizedSystem& sys, const SingularPoint& sp, int direction,
                          double offset = 1e-3);

// Sign and log-magnitude of det from an LU factorization.
std::pair<int, double> det_sign_log(const Mat& m);

}  // namespace opdyn
