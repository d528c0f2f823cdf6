#pragma once

#include <optional>
#include <string>
#include <utility>

#include "opdyn/netgraph.hpp"
#include "opdyn/sigmoid.hpp"

namespace opdyn {

// Raw (unnormalized) parameters: inertia u_I, social gain u_S, information nu.
struct ModelParams {
  double u_inertia = 1.0;
  double u_social = 1.0;
  Vec nu;

  double u() const { return u_social / u_inertia; }
  Vec beta() const { return nu / u_inertia; }
  void validate(Index n) const;
};

struct EstimatorState {
  Vec w;
  double alpha = 1.0;

  // yhat = L w + x, always recomputed.
  Vec yhat(const Vec& x, const Graph& g) const { return g.laplacian() * w + x; }
};

struct AdaptiveConfig {
  double epsilon = 0.01;
  double y_th = 0.5;

  void validate() const;
  std::optional<std::string> warning() const;
};

struct DecisionConfig {
  double eta = 0.1;
  double delta_tol = 1e-6;
  void validate() const;
};

enum class Decision { DecisionA, DecisionB, DeadlockNoDecision, DeadlockDisagreement };
std::string to_string(Decision d);

using ReducedState = Eigen::Vector3d;

Vec full_field(const Vec& x, const Graph& g, const ModelParams& p, const Sigmoid& s = Sigmoid());
Vec normalized_field(const Vec& x, const Graph& g, double u, const Vec& beta, const Sigmoid& s = Sigmoid());
Vec hetero_field(const Vec& x, const Graph& g, double ubar, const Vec& utilde, const Vec& beta,
                 const Sigmoid& s = Sigmoid());

// Group-reduced dynamics. Group 1 receives +beta_a and group 2 receives -beta_b, the same
// signs the agents carry in the full model, so the lift is exact.
ReducedState reduced3_field(const ReducedState& y, const PopulationSpec& spec, double u, double beta_a,
                            double beta_b, const Sigmoid& s = Sigmoid());
ReducedState ata_reduced3_field(const ReducedState& y, int n, int n3, double u, double beta,
                                const Sigmoid& s = Sigmoid());
Eigen::Matrix3d reduced3_jacobian(const ReducedState& y, const PopulationSpec& spec, double u,
                                  const Sigmoid& s = Sigmoid());
double scalar_consensus_field(double y, double u, int n, const Sigmoid& s = Sigmoid());

Vec estimator_field(const EstimatorState& est, const Vec& x, const Graph& g);

struct AdaptiveRate {
  Vec dx;
  double dubar;
};
// Uses the live estimate yhat_1 from the estimator state.
AdaptiveRate adaptive_field(const Vec& x, double ubar, const EstimatorState& est, const Graph& g,
                            const Vec& utilde, const Vec& beta, const AdaptiveConfig& cfg,
                            const Sigmoid& s = Sigmoid());
// Uses a supplied common estimate of the group opinion.
AdaptiveRate adaptive_field(const Vec& x, double ubar, double y_estimate, const Graph& g, const Vec& utilde,
                            const Vec& beta, const AdaptiveConfig& cfg, const Sigmoid& s = Sigmoid());

double group_opinion(const Vec& x);
double disagreement(const Vec& x);
Decision classify_decision(const Vec& x, const DecisionConfig& cfg);

// Embeds a group-level state into the full agent state (constant within each group).
Vec lift_reduced(const ReducedState& y, const PopulationSpec& spec);
ReducedState group_means(const Vec& x, const PopulationSpec& spec);
// Sum over groups of (1/2) sum_{i,j in group} (x_i - x_j)^2.
double group_spread(const Vec& x, const PopulationSpec& spec);

void check_zero_sum(const Vec& utilde);

}  // namespace opdyn
