#include "hetsim/scheduler.hpp"

#include <cmath>

namespace hetsim {

std::vector<int> eligible_users(const TopologyGraph& graph, int bs, SubbandType type,
                                const BlankingPattern& pattern) {
  std::vector<int> out;
  if (type == SubbandType::a) {
    if (graph.is_macro(bs) && !pattern.transmits(bs)) return out;  // blanked macro
    for (int k : graph.served[bs]) {
      if (graph.user_type[k] != UserType::a) continue;
      if (!graph.is_macro(bs) && graph.user_class[k] == UserClass::interference_limited) {
        bool neighbor_active = false;
        for (int m : graph.neighbor_macros[k])
          if (pattern.transmits(m)) {
            neighbor_active = true;
            break;
          }
        if (neighbor_active) continue;
      }
      out.push_back(k);
    }
  } else {
    if (!graph.is_macro(bs) || !pattern.transmits(bs)) return out;  // picos silent on group B
    for (int k : graph.served[bs])
      if (graph.user_type[k] == UserType::b) out.push_back(k);
  }
  return out;
}

double mutual_information(const TopologyGraph& graph, int user, const BlankingPattern& pattern,
                          const ChannelSample& sample, SubbandType type,
                          const LinkBudget& budget) {
  const int b = graph.serving[user];
  double interference = budget.noise_mw;
  for (int m : graph.neighbor_macros[user])
    if (pattern.transmits(m)) interference += sample.gain_sq(user, m) * budget.tx_power_mw[m];
  if (type == SubbandType::a)
    for (int p : graph.neighbor_picos[user])
      interference += sample.gain_sq(user, p) * budget.tx_power_mw[p];
  const double signal = sample.gain_sq(user, b) * budget.tx_power_mw[b];
  return std::log2(1.0 + signal / interference);
}

ScheduleEntry schedule_bs(const TopologyGraph& graph, int bs, SubbandType type,
                          const BlankingPattern& pattern, const ChannelSample& sample,
                          const LinkBudget& budget, const Eigen::VectorXd& mu) {
  ScheduleEntry entry;
  double best = -1.0;
  for (int k : eligible_users(graph, bs, type, pattern)) {
    const double mi = mutual_information(graph, k, pattern, sample, type, budget);
    const double value = mu[k] * mi;
    if (value > best) {  // first (lowest-id) user wins ties
      best = value;
      entry.user = k;
      entry.mi = mi;
    }
  }
  return entry;
}

void RateTracker::push_subframe(const Eigen::VectorXd& delivered) {
  const double s = static_cast<double>(offset_);
  rate_ = ((s + 1.0) * rate_ + delivered) / (s + 2.0);
  ++offset_;
}

ConditionalEstimator::ConditionalEstimator(int n_users, int n_profile_patterns)
    : n_profile_(n_profile_patterns),
      sum_a_(Eigen::VectorXd::Zero(n_users)),
      sum_abar_(Eigen::VectorXd::Zero(n_users)),
      count_a_(n_users, 0),
      count_abar_(n_users, 0),
      sum_b_(n_users, std::vector<double>(n_profile_patterns, 0.0)),
      count_b_(n_users, std::vector<long>(n_profile_patterns, 0)) {}

void ConditionalEstimator::record_type_a(int user, bool favored, double mi) {
  if (favored) {
    sum_a_[user] += mi;
    ++count_a_[user];
  } else {
    sum_abar_[user] += mi;
    ++count_abar_[user];
  }
}

void ConditionalEstimator::record_type_b(int user, int pattern_index, double mi) {
  sum_b_[user][pattern_index] += mi;
  ++count_b_[user][pattern_index];
}

std::optional<double> ConditionalEstimator::favored_mean(int user) const {
  if (count_a_[user] == 0) return std::nullopt;
  return sum_a_[user] / static_cast<double>(count_a_[user]);
}

std::optional<double> ConditionalEstimator::unfavored_mean(int user) const {
  if (count_abar_[user] == 0) return std::nullopt;
  return sum_abar_[user] / static_cast<double>(count_abar_[user]);
}

std::optional<double> ConditionalEstimator::profile_mean(int user, int pattern_index) const {
  if (count_b_[user][pattern_index] == 0) return std::nullopt;
  return sum_b_[user][pattern_index] / static_cast<double>(count_b_[user][pattern_index]);
}

}  // namespace hetsim
