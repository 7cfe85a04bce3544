#include "hetsim/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace hetsim {

std::vector<int> ffr_macro_groups(const TopologyGraph& graph) {
  const int n0 = graph.n_macro;
  // Macros are adjacent when some user hears both.
  std::vector<std::vector<std::uint8_t>> adjacent(n0, std::vector<std::uint8_t>(n0, 0));
  for (int k = 0; k < graph.n_users; ++k) {
    const auto& edges = graph.edges_of_user[k];
    for (size_t a = 0; a < edges.size(); ++a) {
      if (!graph.is_macro(edges[a])) continue;
      for (size_t b = a + 1; b < edges.size(); ++b) {
        if (!graph.is_macro(edges[b])) continue;
        adjacent[edges[a]][edges[b]] = adjacent[edges[b]][edges[a]] = 1;
      }
    }
  }
  std::vector<int> group(n0, -1);
  for (int n = 0; n < n0; ++n) {
    bool used[3] = {false, false, false};
    for (int m = 0; m < n; ++m)
      if (adjacent[n][m] && group[m] >= 0 && group[m] < 3) used[group[m]] = true;
    int color = 0;
    while (color < 3 && used[color]) ++color;
    group[n] = color < 3 ? color : n % 3;  // hex layouts stay 3-colorable
  }
  return group;
}

std::vector<std::uint8_t> outer_zone_users(const Scenario& scenario, double percentile) {
  const auto& graph = scenario.graph;
  std::vector<std::uint8_t> outer(graph.n_users, 0);
  for (int n = 0; n < graph.n_macro; ++n) {
    const auto& served = graph.served[n];
    if (served.empty()) continue;
    std::vector<int> order = served;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const double sa = scenario.state.sigma_sq(a, n);
      const double sb = scenario.state.sigma_sq(b, n);
      if (sa != sb) return sa < sb;
      return a < b;
    });
    const int count =
        static_cast<int>(std::floor(percentile * static_cast<double>(order.size()) + 1e-9));
    for (int i = 0; i < count; ++i) outer[order[i]] = 1;
  }
  return outer;
}

namespace {

struct SyncAbsSetup {
  int blank_count = 0;  // blank subframes per cycle
  int cycle_len = 8;
  bool ffr = false;
  std::vector<int> macro_group;          // per macro, used when ffr
  std::vector<std::uint8_t> outer_zone;  // per user, used when ffr
};

// Synchronized time-domain blanking with per-subband PF scheduling. Channel
// draws come from (seed, t, m, purpose)-keyed streams so candidate rates can
// be compared under common random numbers.
Eigen::VectorXd run_sync_abs(const Scenario& scenario, const SyncAbsSetup& setup, int subframes,
                             std::uint64_t seed, StreamPurpose purpose,
                             std::vector<DecisionRecord>* trace) {
  const auto& graph = scenario.graph;
  const int M = scenario.config.subbands;
  const int L = scenario.config.superframe_len;
  RateTracker tracker(graph.n_users, scenario.utility.rate_floor);
  Eigen::VectorXd rate_sum = Eigen::VectorXd::Zero(graph.n_users);

  const BlankingPattern on = BlankingPattern::all_on(graph.n_macro);
  const BlankingPattern off(std::vector<std::uint8_t>(graph.n_macro, 0));

  for (int t = 0; t < subframes; ++t) {
    if (t % L == 0) tracker.begin_superframe();
    const bool blank = (t % setup.cycle_len) < setup.blank_count;
    const BlankingPattern& pattern = blank ? off : on;

    Eigen::VectorXd mu(graph.n_users);
    const Eigen::VectorXd& avg = tracker.average_rate();
    for (int k = 0; k < graph.n_users; ++k)
      mu[k] = scenario.user_weights[k] / std::max(avg[k], scenario.utility.rate_floor);

    Eigen::VectorXd delivered = Eigen::VectorXd::Zero(graph.n_users);
    for (int m = 0; m < M; ++m) {
      RngStream channel_rng(seed, t, m, purpose);
      const ChannelSample sample = sample_small_scale(scenario.state, graph, channel_rng);
      for (int n = 0; n < graph.n_bs; ++n) {
        ScheduleEntry entry;
        double best = -1.0;
        const bool macro_on = !graph.is_macro(n) || pattern.transmits(n);
        if (macro_on) {
          for (int k : graph.served[n]) {
            if (graph.is_macro(n)) {
              if (setup.ffr && setup.outer_zone[k] && m % 3 != setup.macro_group[n]) continue;
            } else if (graph.user_class[k] == UserClass::interference_limited) {
              bool neighbor_active = false;
              for (int nm : graph.neighbor_macros[k])
                if (pattern.transmits(nm)) {
                  neighbor_active = true;
                  break;
                }
              if (neighbor_active) continue;
            }
            const double mi =
                mutual_information(graph, k, pattern, sample, SubbandType::a, scenario.budget);
            const double value = mu[k] * mi;
            if (value > best) {
              best = value;
              entry.user = k;
              entry.mi = mi;
            }
          }
        }
        if (entry.user >= 0) delivered[entry.user] += entry.mi;
        if (trace)
          trace->push_back({t, m, n, pattern.to_string(), entry.user,
                            entry.user >= 0 ? entry.mi : 0.0});
      }
    }
    rate_sum += delivered;
    tracker.push_subframe(delivered);
  }
  return rate_sum;
}

double pf_utility_of(const Scenario& scenario, const Eigen::VectorXd& rate_sum, long subframes) {
  double total = 0.0;
  for (int k = 0; k < rate_sum.size(); ++k)
    total += scenario.user_weights[k] *
             std::log(std::max(rate_sum[k] / subframes, scenario.utility.rate_floor));
  return total;
}

}  // namespace

MetricsReport run_baseline(const Scenario& scenario, Algorithm algorithm, const RunParams& params,
                           const BaselineParams& baseline) {
  if (params.superframes < 1) throw ConfigError("run: horizon shorter than one super-frame");
  const int L = scenario.config.superframe_len;
  const long horizon = static_cast<long>(params.superframes) * L;

  SyncAbsSetup setup;
  setup.cycle_len = baseline.cycle_len;

  int chosen_numerator;
  if (algorithm == Algorithm::baseline1) {
    chosen_numerator = 1;  // fixed 1/8 blanking
    setup.ffr = true;
    setup.macro_group = ffr_macro_groups(scenario.graph);
    setup.outer_zone = outer_zone_users(scenario, baseline.outer_zone_percentile);
  } else if (algorithm == Algorithm::baseline2) {
    // Paired pilots over the blanking-rate grid, common random numbers.
    const int pilot = baseline.pilot_subframes > 0 ? baseline.pilot_subframes : L;
    int best = 0;
    double best_utility = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < setup.cycle_len; ++j) {
      SyncAbsSetup candidate = setup;
      candidate.blank_count = j;
      const Eigen::VectorXd pilot_sum =
          run_sync_abs(scenario, candidate, pilot, params.seed, StreamPurpose::pilot, nullptr);
      const double value = pf_utility_of(scenario, pilot_sum, pilot);
      if (value > best_utility) {  // ties keep the lowest rate
        best_utility = value;
        best = j;
      }
    }
    chosen_numerator = best;
  } else {
    throw Error("run_baseline: not a baseline algorithm");
  }

  setup.blank_count = chosen_numerator;
  std::vector<DecisionRecord> trace;
  const Eigen::VectorXd rate_sum =
      run_sync_abs(scenario, setup, static_cast<int>(horizon), params.seed,
                   StreamPurpose::channel, params.collect_trace ? &trace : nullptr);

  MetricsReport report = compute_metrics(scenario, rate_sum, horizon);
  report.algorithm = algorithm_name(algorithm);
  report.seed = params.seed;
  report.baseline_rate_numerator = chosen_numerator;
  if (setup.ffr) {
    report.ffr_outer_percentile = baseline.outer_zone_percentile;
    report.ffr_reuse_groups = 3;
  }
  report.trace = std::move(trace);
  report.validate();
  return report;
}

}  // namespace hetsim
