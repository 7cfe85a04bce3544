#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "hetsim/net_model.hpp"
#include "hetsim/utility.hpp"

namespace hetsim {

enum class TypeACategory : std::uint8_t { macro_n, pico_n, pico_i };

// Conditional average-rate estimates for the group-A users, the inputs of the
// long-timescale blanking optimization. `min_set` holds the neighbor macros of
// the user's serving pico (empty for macro users). Absent estimates are kept
// as zero with the flag cleared.
struct EstimateSetA {
  std::vector<int> users;                 // user ids, ascending
  Eigen::VectorXd e;                      // favored-class mean
  Eigen::VectorXd ebar;                   // unfavored-class mean
  std::vector<std::uint8_t> has_e, has_ebar;
  std::vector<TypeACategory> category;
  std::vector<std::vector<int>> min_set;  // macro indices

  int size() const { return static_cast<int>(users.size()); }
  static EstimateSetA from_graph(const TopologyGraph& graph);

  // Largest violation of e >= ebar across users (0 when none). The ordering
  // holds for the pure per-sample rate function; scheduled estimates can break
  // it for pico N-users that compete with I-users, so callers treat this as a
  // diagnostic rather than a hard invariant.
  double ordering_residual() const;
  void validate(double tol) const;  // finiteness + ordering within tol
};

// Closed-form average mutual information of user i under blanking marginals q:
//   macro N-user: (1 - q_b) e
//   pico N-user:  min_{j in min_set} q_j (e - ebar) + ebar
//   pico I-user:  min_{j in min_set} q_j e
// Absent estimates enter as zero. `serving_macro` of macro users is their BS.
double average_rate_closed_form(const Eigen::VectorXd& q, const EstimateSetA& est, int i,
                          const std::vector<int>& serving_macro_of_user);

// Convenience wrapper evaluating the whole vector and the weighted utility.
Eigen::VectorXd average_rate_vector(const Eigen::VectorXd& q, const EstimateSetA& est,
                              const std::vector<int>& serving_macro);
double group_a_utility(const Eigen::VectorXd& q, const EstimateSetA& est,
               const std::vector<int>& serving_macro, const Eigen::VectorXd& weights,
               const UtilityFamily& utility);

// Supergradient of the objective above; min terms charge their lowest-index
// active minimizer.
Eigen::VectorXd group_a_utility_supergradient(const Eigen::VectorXd& q, const EstimateSetA& est,
                                      const std::vector<int>& serving_macro,
                                      const Eigen::VectorXd& weights,
                                      const UtilityFamily& utility);

struct MarginalSolveParams {
  int supergradient_iters = 600;
  double initial_step = 0.25;
  int polish_passes = 40;
  double tol = 1e-6;
  std::optional<Eigen::VectorXd> warm_start;  // default: 0.5 everywhere
};

struct MarginalSolveResult {
  Eigen::VectorXd q;
  double objective = 0.0;
  int iterations = 0;
};

// Projected supergradient ascent with diminishing steps plus a cyclic
// golden-section polish over the box [0,1]^N0. Monotone w.r.t. the warm start:
// the best iterate seen is returned.
MarginalSolveResult optimize_blanking_marginals(const EstimateSetA& est,
                                                const std::vector<int>& serving_macro,
                                                const Eigen::VectorXd& weights,
                                                const UtilityFamily& utility, int n_macro,
                                                const MarginalSolveParams& params = {});

// First-order optimality violation of the box-constrained objective at q:
// the largest positive one-sided directional derivative over a probe family
// (coordinate axes, per-min-set joint directions, the supergradient direction).
double first_order_residual_a(const Eigen::VectorXd& q, const EstimateSetA& est,
                              const std::vector<int>& serving_macro,
                              const Eigen::VectorXd& weights, const UtilityFamily& utility);

}  // namespace hetsim
