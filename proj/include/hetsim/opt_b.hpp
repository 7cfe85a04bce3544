#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "hetsim/blanking.hpp"
#include "hetsim/interference_graph.hpp"
#include "hetsim/utility.hpp"

namespace hetsim {

struct SimplexSolveParams {
  double kkt_tol = 1e-8;
  int max_iters = 20000;
  std::optional<Eigen::VectorXd> warm_start;
};

struct SimplexSolveResult {
  Eigen::VectorXd q;        // simplex point
  double objective = 0.0;
  int iterations = 0;
  double kkt_gap = 0.0;     // max_j g_j - g.q at the returned point
};

// Maximizes sum_k w_k u((Mi q)_k) over the simplex by Frank-Wolfe with away
// steps and exact line search; monotone from the warm start. `mi` is users x
// patterns, nonnegative. Throws DegenerateObjectiveError when a log-type
// utility meets an all-zero matrix.
SimplexSolveResult maximize_over_simplex(const Eigen::MatrixXd& mi, const Eigen::VectorXd& weights,
                                         const UtilityFamily& utility,
                                         const SimplexSolveParams& params = {});

// Caratheodory-style support reduction: keeps the combined rate vector Mi q
// unchanged while shrinking the support to at most `max_support` columns.
Eigen::VectorXd sparsify_simplex_point(const Eigen::MatrixXd& mi, Eigen::VectorXd q,
                                       int max_support);

struct RestrictedMasterResult {
  Eigen::VectorXd q;
  double objective = 0.0;
};

// Restricted-master solve over a set of maximal independent sets using the
// deterministic interference-free rates; support capped at the vertex count.
RestrictedMasterResult solve_restricted_master(const std::vector<VertexMask>& theta,
                                               const InterferenceGraph& ig,
                                               const LargeScaleState& state,
                                               const LinkBudget& budget,
                                               const Eigen::VectorXd& weights,
                                               const UtilityFamily& utility,
                                               const SimplexSolveParams& params = {});

struct ProfileSearchResult {
  std::vector<VertexMask> theta;     // positive-mass sets at termination
  Eigen::VectorXd q;                 // their weights
  BlankingProfile profile;
  std::vector<double> objective_trajectory;  // one entry per iteration
  int iterations = 0;
};

// Column-generation loop: solve the restricted master, price a new maximal set
// through a max-weight independent set with vertex weights mu_k * rate_k, stop
// when the objective improvement falls below epsilon. The objective is
// non-decreasing across iterations by construction.
ProfileSearchResult search_profile(const TopologyGraph& graph, const InterferenceGraph& ig,
                                   const LargeScaleState& state, const LinkBudget& budget,
                                   const Eigen::VectorXd& weights, const UtilityFamily& utility,
                                   double epsilon = 1e-6, int max_iters = 50, int mis_cap = 25);

// Long-timescale profile weights from online estimates (users x patterns).
struct ProfileWeightsResult {
  ProfilePmf pmf;
  double objective = 0.0;
};
ProfileWeightsResult optimize_profile_weights(const BlankingProfile& profile,
                                              const Eigen::MatrixXd& estimates,
                                              const Eigen::VectorXd& weights,
                                              const UtilityFamily& utility,
                                              const SimplexSolveParams& params = {});

}  // namespace hetsim
