#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "hetsim/blanking.hpp"
#include "hetsim/net_model.hpp"

namespace hetsim {

enum class SubbandType : std::uint8_t { a, b };

// One (BS, subband) scheduling outcome. user < 0 means the BS stays silent.
struct ScheduleEntry {
  int user = -1;
  double mi = 0.0;
};

// Users BS n may serve on one subband of the given type under a pattern.
// Group-A subbands: no type-B users; macro users only when their BS transmits;
// pico I-users only when every neighbor macro is blank. Group-B subbands: only
// type-B users of transmitting macros; picos stay silent.
std::vector<int> eligible_users(const TopologyGraph& graph, int bs, SubbandType type,
                                const BlankingPattern& pattern);

// Shannon rate treating interference as noise, bits/s/Hz:
//   log2(1 + |h|^2 P_b / (noise + sum over neighbor macros a_n |h|^2 P_n
//                               + [group A] sum over neighbor picos |h|^2 P_n)).
double mutual_information(const TopologyGraph& graph, int user, const BlankingPattern& pattern,
                          const ChannelSample& sample, SubbandType type, const LinkBudget& budget);

// Weighted argmax over the eligible set; ties by lowest user id.
ScheduleEntry schedule_bs(const TopologyGraph& graph, int bs, SubbandType type,
                          const BlankingPattern& pattern, const ChannelSample& sample,
                          const LinkBudget& budget, const Eigen::VectorXd& mu);

// Moving-average rate per user, reset-free across super-frame boundaries:
// R(t) = (s+1)/(s+2) R(t-1) + 1/(s+2) r(t-1) with s the offset of t within its
// super-frame. The very first super-frame starts from the floor value.
class RateTracker {
 public:
  RateTracker(int n_users, double initial = 1e-6)
      : rate_(Eigen::VectorXd::Constant(n_users, initial)) {}

  void begin_superframe() { offset_ = 0; }
  // Feeds the finished subframe's delivered rates; advances the clock.
  void push_subframe(const Eigen::VectorXd& delivered);
  const Eigen::VectorXd& average_rate() const { return rate_; }

 private:
  Eigen::VectorXd rate_;
  int offset_ = 0;
};

// Running sample means of the per-subband mutual information a user collects,
// conditioned on the pattern class (favored / unfavored) for group-A users and
// on the profile pattern index for group-B users. Unscheduled users contribute
// zeros whenever their class was active, which makes each mean an unbiased
// estimate of the policy-and-fading average.
class ConditionalEstimator {
 public:
  ConditionalEstimator(int n_users, int n_profile_patterns);

  void record_type_a(int user, bool favored, double mi);
  void record_type_b(int user, int pattern_index, double mi);

  std::optional<double> favored_mean(int user) const;      // e_k estimate
  std::optional<double> unfavored_mean(int user) const;    // e-bar_k estimate
  std::optional<double> profile_mean(int user, int pattern_index) const;
  long favored_count(int user) const { return count_a_[user]; }
  long unfavored_count(int user) const { return count_abar_[user]; }
  long profile_count(int user, int j) const { return count_b_[user][j]; }
  int profile_patterns() const { return n_profile_; }

 private:
  int n_profile_;
  Eigen::VectorXd sum_a_, sum_abar_;
  std::vector<long> count_a_, count_abar_;
  std::vector<std::vector<double>> sum_b_;
  std::vector<std::vector<long>> count_b_;
};

}  // namespace hetsim
