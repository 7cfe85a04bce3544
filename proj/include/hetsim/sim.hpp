#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hetsim/blanking.hpp"
#include "hetsim/interference_graph.hpp"
#include "hetsim/net_model.hpp"
#include "hetsim/opt_a.hpp"
#include "hetsim/opt_b.hpp"
#include "hetsim/scheduler.hpp"
#include "hetsim/utility.hpp"

namespace hetsim {

// Everything fixed for the duration of a run: geometry, gains, topology,
// link budget, per-user weights and the utility family.
struct Scenario {
  NetworkConfig config;
  LargeScaleState state;
  TopologyGraph graph;
  LinkBudget budget;
  Eigen::VectorXd user_weights;
  UtilityFamily utility;

  int n_users() const { return graph.n_users; }
};

Scenario make_scenario(const NetworkConfig& config);
Scenario make_scenario(const NetworkConfig& config, const FixtureTopology& fixture);

// The RRMS -> BS broadcast: subband split plus the two blanking controls.
struct LongTermControl {
  int superframe_index = 0;
  int group_a_subbands = 0;     // group-A subbands occupy the low indices
  double split_fraction = 1.0;  // continuous split the integer count came from
  Eigen::VectorXd marginals;    // per-macro blanking marginals
  NestedBlankingPmf blanking_pmf;
  BlankingProfile profile;
  ProfilePmf profile_weights;   // empty when the profile is empty
};

// The BS -> RRMS message: conditional rate estimates with visit counts and the
// end-of-frame moving-average rates.
struct StatisticsReport {
  EstimateSetA estimates_a;
  std::vector<long> counts_a_favored, counts_a_unfavored;  // per type-A user
  Eigen::MatrixXd estimates_b;                             // |U_B| x |profile|
  std::vector<std::vector<long>> counts_b;
  Eigen::VectorXd final_average_rate;
  long subframes = 0;

  void validate(const Scenario& scenario, const LongTermControl& control) const;
};

struct DecisionRecord {
  int t = 0;
  int m = 0;
  int bs = 0;
  std::string pattern;
  int user = -1;
  double mi = 0.0;

  bool operator==(const DecisionRecord&) const = default;
};

struct SuperframeResult {
  StatisticsReport stats;
  Eigen::VectorXd rate_sum;  // per user, bits/s/Hz summed over the frame
  std::vector<DecisionRecord> trace;
};

// BS-side short-timescale loop over one super-frame. Decisions depend only on
// the broadcast control, the tracker state and the (seed, t, m)-keyed random
// streams, so the caller may delay broadcasts without changing the frame that
// still runs under the old control.
SuperframeResult run_superframe(const Scenario& scenario, const LongTermControl& control,
                                RateTracker& tracker, int t0, int subframes, std::uint64_t seed,
                                int threads = 1, bool collect_trace = false);

struct SuperframeRecord {
  int index = 0;
  double objective_a = 0.0;
  double objective_b = 0.0;
  double total_utility = 0.0;
  Eigen::VectorXd marginals;
  std::vector<std::pair<std::string, double>> blanking_pmf;  // (bit-string, probability)
  Eigen::VectorXd profile_weights;
  double split_fraction = 1.0;
  int group_a_subbands = 0;
  int marginal_iterations = 0;
  bool profile_refreshed = false;
  std::vector<std::string> profile_patterns;
  std::vector<std::vector<int>> profile_vertex_sets;  // user ids per kept set
  std::vector<double> profile_search_objectives;
};

// RRMS-side long-timescale state (warm starts and the profile cadence clock).
struct RrmsState {
  Eigen::VectorXd marginals;
  BlankingProfile profile;
  ProfilePmf profile_weights;
  int superframes_since_profile = 0;
  int profile_refresh = 10;  // recompute cadence in super-frames
};

// Warm-up broadcast: marginals at 0.5 everywhere, fresh profile, uniform
// profile weights, weight-proportional subband split.
LongTermControl initial_control(const Scenario& scenario, RrmsState& rrms);

// One long-timescale update from a finished frame's statistics.
LongTermControl rrms_update(const Scenario& scenario, const StatisticsReport& stats,
                            RrmsState& rrms, SuperframeRecord* record);

enum class Algorithm { proposed, baseline1, baseline2 };
std::string algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);

struct RunParams {
  int superframes = 50;
  std::uint64_t seed = 1;
  int threads = 1;
  bool collect_trace = false;
  int profile_refresh = 10;
  // Test hook: the broadcast computed at the end of this super-frame reaches
  // the BSs one frame late. Negative disables.
  int delay_broadcast_at = -1;
};

struct MetricsReport {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::vector<SuperframeRecord> trajectory;  // proposed scheme only
  Eigen::VectorXd mean_rate;                 // bits/s/Hz per subframe, per user
  double utility = 0.0;                      // family utility of the mean rates
  double avg_cell_capacity_mbps = 0.0;
  double overall_mean_kbps = 0.0;
  double macro_i_mean_kbps = 0.0;
  double pico_i_mean_kbps = 0.0;
  double worst10_mean_kbps = 0.0;
  long macro_i_count = 0;
  long pico_i_count = 0;
  int baseline_rate_numerator = -1;   // baseline 2's chosen blanking count per cycle
  double ffr_outer_percentile = -1.0;  // baseline 1's zone rule, flagged in the output
  int ffr_reuse_groups = 0;
  std::vector<DecisionRecord> trace;

  void validate() const;  // worst-10% <= overall mean, finite fields
};

MetricsReport run_simulation(const Scenario& scenario, Algorithm algorithm,
                             const RunParams& params);

// Per-user means and the report aggregates from accumulated rates.
MetricsReport compute_metrics(const Scenario& scenario, const Eigen::VectorXd& rate_sum,
                              long subframes);

// Line-delimited records and the tab-separated per-user table.
std::string metrics_to_jsonl(const MetricsReport& report);
std::string rates_to_tsv(const MetricsReport& report, const Scenario& scenario);
std::string trace_to_tsv(const std::vector<DecisionRecord>& trace);

// The RRMS/BS boundary is an in-process message exchange, but both messages
// are wire-ready: they round-trip through JSON exactly.
std::string long_term_control_to_json(const LongTermControl& control);
LongTermControl long_term_control_from_json(const std::string& text);
std::string statistics_report_to_json(const StatisticsReport& stats);
StatisticsReport statistics_report_from_json(const std::string& text);

}  // namespace hetsim
