#include "hetsim/frozen.hpp"

#include <algorithm>
#include <cmath>

namespace hetsim {

namespace {

BlankingPattern all_blank(int n_macro) {
  return BlankingPattern(std::vector<std::uint8_t>(n_macro, 0));
}

}  // namespace

FrozenContextA::FrozenContextA(const TopologyGraph& graph, const LinkBudget& budget,
                               std::vector<ChannelSample> samples, Eigen::VectorXd user_weights,
                               UtilityFamily utility, double rate_scale)
    : graph_(&graph),
      budget_(&budget),
      samples_(std::move(samples)),
      weights_all_(std::move(user_weights)),
      utility_(utility),
      rate_scale_(rate_scale) {
  const auto& type_a = graph.type_a_users;
  const int na = static_cast<int>(type_a.size());
  weights_a_ = Eigen::VectorXd(na);
  serving_macro_.resize(na);
  type_a_index_.assign(graph.n_users, -1);
  mi_ = Eigen::MatrixXd::Zero(na, n_samples());

  const BlankingPattern on = BlankingPattern::all_on(graph.n_macro);
  const BlankingPattern blank = all_blank(graph.n_macro);
  for (int i = 0; i < na; ++i) {
    const int k = type_a[i];
    type_a_index_[k] = i;
    weights_a_[i] = weights_all_[k];
    serving_macro_[i] = graph.is_macro(graph.serving[k]) ? graph.serving[k] : -1;
    // Own-class rate: pattern-independent within the favored class (macro
    // users face no modeled interferers; pico users see all macros blank).
    const BlankingPattern& rep = graph.is_macro(graph.serving[k]) ? on : blank;
    for (int s = 0; s < n_samples(); ++s)
      mi_(i, s) = mutual_information(graph, k, rep, samples_[s], SubbandType::a, budget);
  }
}

FrozenPolicyA FrozenContextA::argmax_policy(const Eigen::VectorXd& mu) const {
  const auto& g = *graph_;
  FrozenPolicyA policy;
  policy.choice.resize(g.n_bs);
  for (int n = 0; n < g.n_bs; ++n) {
    for (int favored = 0; favored < 2; ++favored) {
      auto& slot = policy.choice[n][favored];
      slot.assign(n_samples(), -1);
      if (g.is_macro(n) && favored == 0) continue;  // blanked macro stays silent
      for (int s = 0; s < n_samples(); ++s) {
        int best = -1;
        double best_value = -1.0;
        for (int k : g.served[n]) {
          if (g.user_type[k] != UserType::a) continue;
          if (!g.is_macro(n) && favored == 0 &&
              g.user_class[k] == UserClass::interference_limited)
            continue;  // pico I-users need every neighbor macro blank
          const double value = mu[k] * mi_(type_a_index_[k], s);
          if (value > best_value) {
            best_value = value;
            best = k;
          }
        }
        slot[s] = best;
      }
    }
  }
  return policy;
}

EstimateSetA FrozenContextA::estimates(const FrozenPolicyA& policy) const {
  EstimateSetA est = EstimateSetA::from_graph(*graph_);
  const double inv = 1.0 / n_samples();
  for (int i = 0; i < est.size(); ++i) {
    const int k = est.users[i];
    const int b = graph_->serving[k];
    double sum_fav = 0.0, sum_unfav = 0.0;
    for (int s = 0; s < n_samples(); ++s) {
      if (policy.choice[b][1][s] == k) sum_fav += mi_(i, s);
      if (policy.choice[b][0][s] == k) sum_unfav += mi_(i, s);
    }
    est.e[i] = sum_fav * inv;
    est.ebar[i] = sum_unfav * inv;
    est.has_e[i] = 1;
    est.has_ebar[i] = 1;
  }
  return est;
}

double FrozenContextA::objective(const Eigen::VectorXd& q, const FrozenPolicyA& policy) const {
  const EstimateSetA est = estimates(policy);
  return group_a_utility(q, est, serving_macro_, weights_a_, utility_);
}

Eigen::VectorXd FrozenContextA::scheduling_weights(const Eigen::VectorXd& q,
                                                   const FrozenPolicyA& policy) const {
  const EstimateSetA est = estimates(policy);
  const Eigen::VectorXd rates = average_rate_vector(q, est, serving_macro_);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(graph_->n_users);
  for (int i = 0; i < est.size(); ++i)
    mu[est.users[i]] = weights_a_[i] * utility_.du(rate_scale_ * std::max(rates[i], 0.0));
  return mu;
}

FrozenPolicyA FrozenContextA::improve_policy(const Eigen::VectorXd& q, FrozenPolicyA policy,
                                             int max_rounds) const {
  double value = objective(q, policy);
  for (int round = 0; round < max_rounds; ++round) {
    const FrozenPolicyA candidate = argmax_policy(scheduling_weights(q, policy));
    const double candidate_value = objective(q, candidate);
    if (candidate_value <= value || candidate == policy) break;
    policy = candidate;
    value = candidate_value;
  }
  return policy;
}

FrozenAoAResult frozen_ao_a(const FrozenContextA& ctx, const Eigen::VectorXd& q0, int iterations) {
  FrozenAoAResult result;
  result.q = q0;
  // Initial policy: equal weights across users.
  result.policy = ctx.argmax_policy(Eigen::VectorXd::Ones(ctx.graph().n_users));

  for (int it = 0; it < iterations; ++it) {
    result.policy = ctx.improve_policy(result.q, result.policy);
    const EstimateSetA est = ctx.estimates(result.policy);
    MarginalSolveParams params;
    params.warm_start = result.q;
    const MarginalSolveResult solved =
        optimize_blanking_marginals(est, ctx.serving_macro(), ctx.type_a_weights(), ctx.utility(),
                                    ctx.graph().n_macro, params);
    result.q = solved.q;
    result.objective_trajectory.push_back(solved.objective);
  }
  result.residual = frozen_fixed_point_residual_a(ctx, result.q, result.policy);
  return result;
}

double frozen_fixed_point_residual_a(const FrozenContextA& ctx, const Eigen::VectorXd& q,
                                     const FrozenPolicyA& policy) {
  const EstimateSetA est = ctx.estimates(policy);
  const double grad_residual =
      first_order_residual_a(q, est, ctx.serving_macro(), ctx.type_a_weights(), ctx.utility());
  const double before = ctx.objective(q, policy);
  const FrozenPolicyA next = ctx.argmax_policy(ctx.scheduling_weights(q, policy));
  const double gap = std::max(0.0, ctx.objective(q, next) - before);
  return grad_residual + gap;
}

// --- group B ---------------------------------------------------------------

FrozenContextB::FrozenContextB(const TopologyGraph& graph, const LinkBudget& budget,
                               BlankingProfile profile, std::vector<ChannelSample> samples,
                               Eigen::VectorXd user_weights, UtilityFamily utility,
                               double rate_scale)
    : graph_(&graph),
      budget_(&budget),
      profile_(std::move(profile)),
      samples_(std::move(samples)),
      weights_all_(std::move(user_weights)),
      utility_(utility),
      rate_scale_(rate_scale) {
  const auto& type_b = graph.type_b_users;
  const int nb = static_cast<int>(type_b.size());
  weights_b_ = Eigen::VectorXd(nb);
  type_b_index_.assign(graph.n_users, -1);
  for (int i = 0; i < nb; ++i) {
    type_b_index_[type_b[i]] = i;
    weights_b_[i] = weights_all_[type_b[i]];
  }
  mi_.resize(profile_.size());
  for (int j = 0; j < profile_.size(); ++j) {
    mi_[j] = Eigen::MatrixXd::Zero(nb, static_cast<int>(samples_.size()));
    for (int i = 0; i < nb; ++i)
      for (size_t s = 0; s < samples_.size(); ++s)
        mi_[j](i, static_cast<int>(s)) = mutual_information(
            graph, type_b[i], profile_.patterns[j], samples_[s], SubbandType::b, budget);
  }
}

FrozenPolicyB FrozenContextB::argmax_policy(const Eigen::VectorXd& mu) const {
  const auto& g = *graph_;
  const int n_samples = static_cast<int>(samples_.size());
  FrozenPolicyB policy;
  policy.choice.assign(g.n_bs, {});
  for (int n = 0; n < g.n_bs; ++n) {
    policy.choice[n].assign(profile_.size(), std::vector<int>(n_samples, -1));
    if (!g.is_macro(n)) continue;
    for (int j = 0; j < profile_.size(); ++j) {
      if (!profile_.patterns[j].transmits(n)) continue;
      for (int s = 0; s < n_samples; ++s) {
        int best = -1;
        double best_value = -1.0;
        for (int k : g.served[n]) {
          if (g.user_type[k] != UserType::b) continue;
          const double value = mu[k] * mi_[j](type_b_index_[k], s);
          if (value > best_value) {
            best_value = value;
            best = k;
          }
        }
        policy.choice[n][j][s] = best;
      }
    }
  }
  return policy;
}

Eigen::MatrixXd FrozenContextB::estimates(const FrozenPolicyB& policy) const {
  const int nb = static_cast<int>(graph_->type_b_users.size());
  const int n_samples = static_cast<int>(samples_.size());
  Eigen::MatrixXd est = Eigen::MatrixXd::Zero(nb, profile_.size());
  for (int i = 0; i < nb; ++i) {
    const int k = graph_->type_b_users[i];
    const int b = graph_->serving[k];
    for (int j = 0; j < profile_.size(); ++j) {
      double sum = 0.0;
      for (int s = 0; s < n_samples; ++s)
        if (policy.choice[b][j][s] == k) sum += mi_[j](i, s);
      est(i, j) = sum / n_samples;
    }
  }
  return est;
}

double FrozenContextB::objective(const Eigen::VectorXd& qb, const FrozenPolicyB& policy) const {
  const Eigen::MatrixXd est = estimates(policy);
  const Eigen::VectorXd rates = est * qb;
  double total = 0.0;
  for (int i = 0; i < rates.size(); ++i)
    total += weights_b_[i] * utility_.u(std::max(rates[i], 0.0));
  return total;
}

Eigen::VectorXd FrozenContextB::scheduling_weights(const Eigen::VectorXd& qb,
                                                   const FrozenPolicyB& policy) const {
  const Eigen::MatrixXd est = estimates(policy);
  const Eigen::VectorXd rates = est * qb;
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(graph_->n_users);
  for (int i = 0; i < rates.size(); ++i)
    mu[graph_->type_b_users[i]] =
        weights_b_[i] * utility_.du(rate_scale_ * std::max(rates[i], 0.0));
  return mu;
}

FrozenPolicyB FrozenContextB::improve_policy(const Eigen::VectorXd& qb, FrozenPolicyB policy,
                                             int max_rounds) const {
  double value = objective(qb, policy);
  for (int round = 0; round < max_rounds; ++round) {
    const FrozenPolicyB candidate = argmax_policy(scheduling_weights(qb, policy));
    const double candidate_value = objective(qb, candidate);
    if (candidate_value <= value || candidate == policy) break;
    policy = candidate;
    value = candidate_value;
  }
  return policy;
}

FrozenAoBResult frozen_ao_b(const FrozenContextB& ctx, const Eigen::VectorXd& qb0,
                            int iterations) {
  FrozenAoBResult result;
  result.qb = qb0;
  result.policy = ctx.argmax_policy(Eigen::VectorXd::Ones(ctx.graph().n_users));
  for (int it = 0; it < iterations; ++it) {
    result.policy = ctx.improve_policy(result.qb, result.policy);
    const Eigen::MatrixXd est = ctx.estimates(result.policy);
    SimplexSolveParams params;
    params.warm_start = result.qb;
    const SimplexSolveResult solved =
        maximize_over_simplex(est, ctx.type_b_weights(), ctx.utility(), params);
    result.qb = solved.q;
    result.objective_trajectory.push_back(solved.objective);
  }
  return result;
}

}  // namespace hetsim
