#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "hetsim/blanking.hpp"
#include "hetsim/opt_a.hpp"
#include "hetsim/opt_b.hpp"
#include "hetsim/scheduler.hpp"

namespace hetsim {

// Test mode: expectations are computed exactly over a frozen finite set of
// channel samples, so the short-timescale scheduling step and long-timescale
// control step share one deterministic objective and the alternating updates
// can be checked for monotone ascent and fixed points.

// Deterministic scheduling policy on group-A subbands: one choice per
// (BS, pattern class, sample). A class is "favored" when the BS's favorable
// pattern set is active; within a class the choice never varies with the
// pattern, matching the reduced policy space.
struct FrozenPolicyA {
  // choice[bs][favored ? 1 : 0][sample] = user id or -1
  std::vector<std::array<std::vector<int>, 2>> choice;

  bool operator==(const FrozenPolicyA& other) const { return choice == other.choice; }
};

class FrozenContextA {
 public:
  FrozenContextA(const TopologyGraph& graph, const LinkBudget& budget,
                 std::vector<ChannelSample> samples, Eigen::VectorXd user_weights,
                 UtilityFamily utility, double rate_scale = 1.0);

  int n_samples() const { return static_cast<int>(samples_.size()); }
  const TopologyGraph& graph() const { return *graph_; }
  const Eigen::VectorXd& type_a_weights() const { return weights_a_; }
  const std::vector<int>& serving_macro() const { return serving_macro_; }
  const UtilityFamily& utility() const { return utility_; }

  // Weighted-argmax scheduling under per-user weights mu (indexed by user id).
  FrozenPolicyA argmax_policy(const Eigen::VectorXd& mu) const;
  // Exact conditional means under the policy; every class is marked present.
  EstimateSetA estimates(const FrozenPolicyA& policy) const;
  // Exact objective of the reduced problem at (q, policy).
  double objective(const Eigen::VectorXd& q, const FrozenPolicyA& policy) const;
  // Per-user scheduling weights w_k u'(rate_scale * average rate) at (q, policy).
  Eigen::VectorXd scheduling_weights(const Eigen::VectorXd& q, const FrozenPolicyA& policy) const;

  // One guarded scheduling re-weight pass: returns a policy whose objective at
  // q is never below the input's.
  FrozenPolicyA improve_policy(const Eigen::VectorXd& q, FrozenPolicyA policy,
                               int max_rounds = 50) const;

 private:
  const TopologyGraph* graph_;
  const LinkBudget* budget_;
  std::vector<ChannelSample> samples_;
  Eigen::VectorXd weights_all_;   // per user id
  Eigen::VectorXd weights_a_;     // aligned with type-A order
  UtilityFamily utility_;
  double rate_scale_;
  std::vector<int> serving_macro_;               // aligned with type-A order
  Eigen::MatrixXd mi_;                           // type-A users x samples, own-class rate
  std::vector<int> type_a_index_;                // user id -> type-A position or -1
};

struct FrozenAoAResult {
  Eigen::VectorXd q;
  FrozenPolicyA policy;
  std::vector<double> objective_trajectory;  // Û at (q^{T+1}, π^{T}) per iteration
  double residual = 0.0;                     // first-order + re-weight improvement gap
};

// Alternating optimization on the frozen objective: guarded scheduling
// re-weights, then an exact long-timescale solve warm-started at the current
// point. The recorded objective never decreases.
FrozenAoAResult frozen_ao_a(const FrozenContextA& ctx, const Eigen::VectorXd& q0, int iterations);

// Residual of the stopping condition at (q, policy): box first-order violation
// of the long-timescale objective plus the improvement available from one more
// scheduling re-weight step.
double frozen_fixed_point_residual_a(const FrozenContextA& ctx, const Eigen::VectorXd& q,
                                     const FrozenPolicyA& policy);

// Group-B analogue over a fixed profile.
struct FrozenPolicyB {
  // choice[bs][pattern j][sample] = user id or -1
  std::vector<std::vector<std::vector<int>>> choice;
  bool operator==(const FrozenPolicyB& other) const { return choice == other.choice; }
};

class FrozenContextB {
 public:
  FrozenContextB(const TopologyGraph& graph, const LinkBudget& budget, BlankingProfile profile,
                 std::vector<ChannelSample> samples, Eigen::VectorXd user_weights,
                 UtilityFamily utility, double rate_scale = 1.0);

  const BlankingProfile& profile() const { return profile_; }
  const TopologyGraph& graph() const { return *graph_; }
  const Eigen::VectorXd& type_b_weights() const { return weights_b_; }
  const UtilityFamily& utility() const { return utility_; }

  FrozenPolicyB argmax_policy(const Eigen::VectorXd& mu) const;
  Eigen::MatrixXd estimates(const FrozenPolicyB& policy) const;  // |U_B| x |profile|
  double objective(const Eigen::VectorXd& qb, const FrozenPolicyB& policy) const;
  Eigen::VectorXd scheduling_weights(const Eigen::VectorXd& qb, const FrozenPolicyB& policy) const;
  FrozenPolicyB improve_policy(const Eigen::VectorXd& qb, FrozenPolicyB policy,
                               int max_rounds = 50) const;

 private:
  const TopologyGraph* graph_;
  const LinkBudget* budget_;
  BlankingProfile profile_;
  std::vector<ChannelSample> samples_;
  Eigen::VectorXd weights_all_, weights_b_;
  UtilityFamily utility_;
  double rate_scale_;
  std::vector<int> type_b_index_;                    // user id -> type-B position or -1
  std::vector<Eigen::MatrixXd> mi_;                  // per pattern: type-B users x samples
};

struct FrozenAoBResult {
  Eigen::VectorXd qb;
  FrozenPolicyB policy;
  std::vector<double> objective_trajectory;
};

FrozenAoBResult frozen_ao_b(const FrozenContextB& ctx, const Eigen::VectorXd& qb0, int iterations);

}  // namespace hetsim
