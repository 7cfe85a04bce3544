#include "hetsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "hetsim/baselines.hpp"

namespace hetsim {

Scenario make_scenario(const NetworkConfig& config) {
  config.validate();
  Scenario s;
  s.config = config;
  s.state = generate_topology(config, config.seed);
  s.graph = build_topology_graph(s.state, cell_selection(s.state, config), config);
  s.budget = LinkBudget::from_config(config, s.state.n_macro, s.state.n_bs());
  s.user_weights = Eigen::VectorXd::Ones(s.graph.n_users);
  s.utility = UtilityFamily{};
  return s;
}

Scenario make_scenario(const NetworkConfig& config, const FixtureTopology& fixture) {
  Scenario s;
  s.config = config;
  s.state = fixture.state;
  s.graph = fixture.graph;
  s.budget = LinkBudget::from_config(config, s.state.n_macro, s.state.n_bs());
  s.user_weights = Eigen::VectorXd::Ones(s.graph.n_users);
  s.utility = UtilityFamily{};
  return s;
}

void StatisticsReport::validate(const Scenario& scenario, const LongTermControl& control) const {
  const long expected_a = subframes * control.group_a_subbands;
  const auto& type_a = scenario.graph.type_a_users;
  for (size_t i = 0; i < type_a.size(); ++i) {
    if (counts_a_favored[i] + counts_a_unfavored[i] != expected_a)
      throw InvariantViolation("statistics: group-A visit counts inconsistent with L_S * |M_A|");
  }
  const long expected_b = subframes * (scenario.config.subbands - control.group_a_subbands);
  for (const auto& row : counts_b) {
    long total = 0;
    for (long c : row) total += c;
    if (total != expected_b)
      throw InvariantViolation("statistics: group-B visit counts inconsistent with L_S * |M_B|");
  }
  for (int i = 0; i < estimates_a.size(); ++i)
    if (!std::isfinite(estimates_a.e[i]) || !std::isfinite(estimates_a.ebar[i]))
      throw InvariantViolation("statistics: non-finite estimate");
}

namespace {

struct SubbandOutcome {
  SubbandType type = SubbandType::a;
  BlankingPattern pattern;
  int profile_index = -1;
  std::vector<ScheduleEntry> entries;  // per BS
};

void evaluate_subband(const Scenario& scenario, const LongTermControl& control, int t, int m,
                      std::uint64_t seed, const Eigen::VectorXd& mu, SubbandOutcome& out) {
  const auto& graph = scenario.graph;
  out.type = m < control.group_a_subbands ? SubbandType::a : SubbandType::b;
  RngStream pattern_rng(seed, t, m, StreamPurpose::pattern);
  if (out.type == SubbandType::a) {
    out.pattern = sample_pattern(control.blanking_pmf, pattern_rng);
    out.profile_index = -1;
  } else if (control.profile.size() == 0) {
    // No co-tier users: the subband stays silent.
    out.pattern = BlankingPattern(std::vector<std::uint8_t>(graph.n_macro, 0));
    out.profile_index = -1;
    out.entries.assign(graph.n_bs, {});
    return;
  } else {
    out.profile_index = sample_profile_index(control.profile_weights, pattern_rng);
    out.pattern = control.profile.patterns[out.profile_index];
  }
  RngStream channel_rng(seed, t, m, StreamPurpose::channel);
  const ChannelSample sample = sample_small_scale(scenario.state, graph, channel_rng);
  out.entries.resize(graph.n_bs);
  for (int n = 0; n < graph.n_bs; ++n)
    out.entries[n] = schedule_bs(graph, n, out.type, out.pattern, sample, scenario.budget, mu);
}

}  // namespace

SuperframeResult run_superframe(const Scenario& scenario, const LongTermControl& control,
                                RateTracker& tracker, int t0, int subframes, std::uint64_t seed,
                                int threads, bool collect_trace) {
  const auto& graph = scenario.graph;
  const int n_subbands = scenario.config.subbands;
  const int n_profile = control.profile.size();

  SuperframeResult result;
  result.rate_sum = Eigen::VectorXd::Zero(graph.n_users);
  ConditionalEstimator estimator(graph.n_users, n_profile);

  std::vector<SubbandOutcome> outcomes(n_subbands);
  for (int t = t0; t < t0 + subframes; ++t) {
    // Scheduling weights from the moving-average rates of this subframe.
    Eigen::VectorXd mu(graph.n_users);
    const Eigen::VectorXd& avg = tracker.average_rate();
    for (int k = 0; k < graph.n_users; ++k)
      mu[k] = scenario.user_weights[k] * scenario.utility.du(avg[k]);

    // Subband evaluations are independent given the counter-based streams.
    const int workers = std::max(1, std::min(threads, n_subbands));
    if (workers == 1) {
      for (int m = 0; m < n_subbands; ++m)
        evaluate_subband(scenario, control, t, m, seed, mu, outcomes[m]);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(workers);
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
          for (int m = w; m < n_subbands; m += workers)
            evaluate_subband(scenario, control, t, m, seed, mu, outcomes[m]);
        });
      }
      for (auto& th : pool) th.join();
    }

    // Sequential merge in (m, bs) order keeps every downstream value
    // independent of the scheduling evaluation order.
    Eigen::VectorXd delivered = Eigen::VectorXd::Zero(graph.n_users);
    for (int m = 0; m < n_subbands; ++m) {
      const SubbandOutcome& out = outcomes[m];
      for (int n = 0; n < graph.n_bs; ++n) {
        const ScheduleEntry& entry = out.entries[n];
        if (entry.user >= 0) delivered[entry.user] += entry.mi;
        if (collect_trace)
          result.trace.push_back(
              {t, m, n, out.pattern.to_string(), entry.user, entry.user >= 0 ? entry.mi : 0.0});
      }
      if (out.type == SubbandType::a) {
        for (int k : graph.type_a_users) {
          const int b = graph.serving[k];
          const bool favored = pattern_favors(out.pattern, b, graph);
          const ScheduleEntry& entry = out.entries[b];
          estimator.record_type_a(k, favored, entry.user == k ? entry.mi : 0.0);
        }
      } else if (out.profile_index >= 0) {
        for (int k : graph.type_b_users) {
          const ScheduleEntry& entry = out.entries[graph.serving[k]];
          estimator.record_type_b(k, out.profile_index, entry.user == k ? entry.mi : 0.0);
        }
      }
    }
    result.rate_sum += delivered;
    tracker.push_subframe(delivered);
  }

  // Pack the statistics message.
  StatisticsReport& stats = result.stats;
  stats.subframes = subframes;
  stats.estimates_a = EstimateSetA::from_graph(graph);
  const int na = stats.estimates_a.size();
  stats.counts_a_favored.assign(na, 0);
  stats.counts_a_unfavored.assign(na, 0);
  for (int i = 0; i < na; ++i) {
    const int k = stats.estimates_a.users[i];
    if (auto e = estimator.favored_mean(k)) {
      stats.estimates_a.e[i] = *e;
      stats.estimates_a.has_e[i] = 1;
    }
    if (auto e = estimator.unfavored_mean(k)) {
      stats.estimates_a.ebar[i] = *e;
      stats.estimates_a.has_ebar[i] = 1;
    }
    stats.counts_a_favored[i] = estimator.favored_count(k);
    stats.counts_a_unfavored[i] = estimator.unfavored_count(k);
  }
  const auto& type_b = graph.type_b_users;
  stats.estimates_b = Eigen::MatrixXd::Zero(static_cast<int>(type_b.size()), n_profile);
  stats.counts_b.assign(type_b.size(), std::vector<long>(n_profile, 0));
  for (size_t i = 0; i < type_b.size(); ++i) {
    for (int j = 0; j < n_profile; ++j) {
      if (auto e = estimator.profile_mean(type_b[i], j))
        stats.estimates_b(static_cast<int>(i), j) = *e;
      stats.counts_b[i][j] = estimator.profile_count(type_b[i], j);
    }
  }
  stats.final_average_rate = tracker.average_rate();
  return result;
}

namespace {

// Weight sums of the two groups; the subband split only needs these.
void group_weights(const Scenario& s, double& w_a, double& w_b) {
  w_a = 0.0;
  w_b = 0.0;
  for (int k : s.graph.type_a_users) w_a += s.user_weights[k];
  for (int k : s.graph.type_b_users) w_b += s.user_weights[k];
}

Eigen::VectorXd type_a_weights(const Scenario& s) {
  Eigen::VectorXd w(static_cast<int>(s.graph.type_a_users.size()));
  for (size_t i = 0; i < s.graph.type_a_users.size(); ++i)
    w[static_cast<int>(i)] = s.user_weights[s.graph.type_a_users[i]];
  return w;
}

Eigen::VectorXd type_b_weights(const Scenario& s) {
  Eigen::VectorXd w(static_cast<int>(s.graph.type_b_users.size()));
  for (size_t i = 0; i < s.graph.type_b_users.size(); ++i)
    w[static_cast<int>(i)] = s.user_weights[s.graph.type_b_users[i]];
  return w;
}

void refresh_profile(const Scenario& scenario, RrmsState& rrms, SuperframeRecord* record) {
  const InterferenceGraph ig = build_interference_graph(scenario.graph);
  const ProfileSearchResult found =
      search_profile(scenario.graph, ig, scenario.state, scenario.budget, type_b_weights(scenario),
                     scenario.utility);
  rrms.profile = found.profile;
  if (rrms.profile.size() > 0)
    rrms.profile_weights.probs =
        Eigen::VectorXd::Constant(rrms.profile.size(), 1.0 / rrms.profile.size());
  else
    rrms.profile_weights.probs = Eigen::VectorXd();
  rrms.superframes_since_profile = 0;
  if (record) {
    record->profile_refreshed = true;
    for (const auto& p : rrms.profile.patterns) record->profile_patterns.push_back(p.to_string());
    for (VertexMask mask : found.theta) {
      std::vector<int> users;
      for (int v : mask_to_vertices(mask)) users.push_back(ig.users[v]);
      record->profile_vertex_sets.push_back(std::move(users));
    }
    record->profile_search_objectives = found.objective_trajectory;
  }
}

}  // namespace

LongTermControl initial_control(const Scenario& scenario, RrmsState& rrms) {
  const int n0 = scenario.graph.n_macro;
  rrms.marginals = Eigen::VectorXd::Constant(n0, 0.5);
  refresh_profile(scenario, rrms, nullptr);

  double w_a, w_b;
  group_weights(scenario, w_a, w_b);
  const SubbandSplit split =
      optimize_subband_split(0.0, 0.0, scenario.utility, scenario.config.subbands, w_a, w_b,
                             scenario.graph.type_a_users.empty(),
                             scenario.graph.type_b_users.empty());

  LongTermControl control;
  control.superframe_index = 0;
  control.group_a_subbands = split.m_a;
  control.split_fraction = split.qs;
  control.marginals = rrms.marginals;
  control.blanking_pmf = synchronous_blanking_pmf(rrms.marginals);
  control.profile = rrms.profile;
  control.profile_weights = rrms.profile_weights;
  return control;
}

LongTermControl rrms_update(const Scenario& scenario, const StatisticsReport& stats,
                            RrmsState& rrms, SuperframeRecord* record) {
  const auto& graph = scenario.graph;

  std::vector<int> serving_macro(stats.estimates_a.size(), -1);
  for (int i = 0; i < stats.estimates_a.size(); ++i) {
    const int b = graph.serving[stats.estimates_a.users[i]];
    serving_macro[i] = graph.is_macro(b) ? b : -1;
  }
  MarginalSolveParams qa_params;
  qa_params.warm_start = rrms.marginals;
  const MarginalSolveResult qa =
      optimize_blanking_marginals(stats.estimates_a, serving_macro, type_a_weights(scenario),
                                  scenario.utility, graph.n_macro, qa_params);
  rrms.marginals = qa.q;

  ++rrms.superframes_since_profile;
  bool refreshed = false;
  if (!graph.type_b_users.empty() &&
      (rrms.profile.size() == 0 || rrms.superframes_since_profile >= rrms.profile_refresh)) {
    refresh_profile(scenario, rrms, record);
    refreshed = true;
  }

  double objective_b = 0.0;
  if (rrms.profile.size() > 0) {
    // Frame estimates index the profile that produced them; after a refresh
    // the uniform weights stand until fresh data arrives.
    if (!refreshed && stats.estimates_b.cols() == rrms.profile.size() &&
        stats.estimates_b.size() > 0 && stats.estimates_b.maxCoeff() > 0.0) {
      SimplexSolveParams qb_params;
      qb_params.warm_start = rrms.profile_weights.probs;
      const ProfileWeightsResult qb =
          optimize_profile_weights(rrms.profile, stats.estimates_b, type_b_weights(scenario),
                                   scenario.utility, qb_params);
      rrms.profile_weights = qb.pmf;
      objective_b = qb.objective;
    } else if (stats.estimates_b.size() > 0) {
      // Uniform mixture of the observed estimates as a placeholder value.
      const Eigen::VectorXd mix =
          stats.estimates_b *
          Eigen::VectorXd::Constant(stats.estimates_b.cols(), 1.0 / stats.estimates_b.cols());
      objective_b = utility_value(scenario.utility, type_b_weights(scenario), mix.cwiseMax(0.0));
    } else {
      objective_b =
          utility_value(scenario.utility, type_b_weights(scenario),
                        Eigen::VectorXd::Zero(static_cast<int>(graph.type_b_users.size())));
    }
  }

  double w_a, w_b;
  group_weights(scenario, w_a, w_b);
  const SubbandSplit split =
      optimize_subband_split(qa.objective, objective_b, scenario.utility,
                             scenario.config.subbands, w_a, w_b, graph.type_a_users.empty(),
                             graph.type_b_users.empty());

  LongTermControl control;
  control.group_a_subbands = split.m_a;
  control.split_fraction = split.qs;
  control.marginals = rrms.marginals;
  control.blanking_pmf = synchronous_blanking_pmf(rrms.marginals);
  control.profile = rrms.profile;
  control.profile_weights = rrms.profile_weights;

  if (record) {
    record->objective_a = qa.objective;
    record->objective_b = objective_b;
    record->total_utility =
        subband_split_objective(split.m_a, scenario.config.subbands, qa.objective, objective_b,
                                scenario.utility, w_a, w_b);
    record->marginals = rrms.marginals;
    for (int j = 0; j < control.blanking_pmf.size(); ++j)
      record->blanking_pmf.emplace_back(control.blanking_pmf.support[j].to_string(),
                                        control.blanking_pmf.probs[j]);
    record->profile_weights = rrms.profile_weights.probs;
    record->split_fraction = split.qs;
    record->group_a_subbands = split.m_a;
    record->marginal_iterations = qa.iterations;
  }
  return control;
}

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::proposed:
      return "proposed";
    case Algorithm::baseline1:
      return "baseline1";
    case Algorithm::baseline2:
      return "baseline2";
  }
  return "unknown";
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "proposed") return Algorithm::proposed;
  if (name == "baseline1") return Algorithm::baseline1;
  if (name == "baseline2") return Algorithm::baseline2;
  throw ConfigError("unknown algorithm '" + name + "' (expected proposed|baseline1|baseline2)");
}

MetricsReport run_simulation(const Scenario& scenario, Algorithm algorithm,
                             const RunParams& params) {
  if (params.superframes < 1) throw ConfigError("run: horizon shorter than one super-frame");
  if (algorithm != Algorithm::proposed) return run_baseline(scenario, algorithm, params);

  const int L = scenario.config.superframe_len;
  RateTracker tracker(scenario.n_users(), scenario.utility.rate_floor);
  RrmsState rrms;
  rrms.profile_refresh = params.profile_refresh;
  LongTermControl control = initial_control(scenario, rrms);
  std::optional<LongTermControl> delayed;

  std::vector<SuperframeRecord> trajectory;
  Eigen::VectorXd rate_sum = Eigen::VectorXd::Zero(scenario.n_users());
  std::vector<DecisionRecord> trace;

  for (int T = 0; T < params.superframes; ++T) {
    control.superframe_index = T;
    tracker.begin_superframe();
    SuperframeResult frame = run_superframe(scenario, control, tracker, T * L, L, params.seed,
                                            params.threads, params.collect_trace);
    frame.stats.validate(scenario, control);
    rate_sum += frame.rate_sum;
    if (params.collect_trace)
      trace.insert(trace.end(), frame.trace.begin(), frame.trace.end());

    SuperframeRecord record;
    record.index = T;
    LongTermControl next = rrms_update(scenario, frame.stats, rrms, &record);
    trajectory.push_back(record);

    if (params.delay_broadcast_at == T) {
      delayed = next;  // the fresh broadcast misses the next frame
    } else if (delayed) {
      control = *delayed;
      delayed.reset();
    } else {
      control = next;
    }
  }

  MetricsReport metrics = compute_metrics(scenario, rate_sum, params.superframes * (long)L);
  metrics.algorithm = algorithm_name(algorithm);
  metrics.seed = params.seed;
  metrics.trajectory = std::move(trajectory);
  metrics.trace = std::move(trace);
  metrics.validate();
  return metrics;
}

MetricsReport compute_metrics(const Scenario& scenario, const Eigen::VectorXd& rate_sum,
                              long subframes) {
  if (subframes <= 0) throw Error("compute_metrics: empty history");
  MetricsReport report;
  report.mean_rate = rate_sum / static_cast<double>(subframes);
  report.utility = utility_value(scenario.utility, scenario.user_weights,
                                 report.mean_rate.cwiseMax(0.0));

  const double to_kbps = scenario.config.subband_bandwidth_hz() / 1e3;
  const int K = scenario.n_users();
  report.overall_mean_kbps = report.mean_rate.mean() * to_kbps;
  report.avg_cell_capacity_mbps =
      report.mean_rate.sum() * scenario.config.subband_bandwidth_hz() / 1e6 /
      scenario.graph.n_macro;

  double macro_i = 0.0;
  for (int k : scenario.graph.type_b_users) macro_i += report.mean_rate[k];
  report.macro_i_count = static_cast<long>(scenario.graph.type_b_users.size());
  report.macro_i_mean_kbps =
      report.macro_i_count > 0 ? macro_i / report.macro_i_count * to_kbps : 0.0;

  double pico_i = 0.0;
  long pico_i_count = 0;
  for (int n = scenario.graph.n_macro; n < scenario.graph.n_bs; ++n)
    for (int k : scenario.graph.pico_i_users[n]) {
      pico_i += report.mean_rate[k];
      ++pico_i_count;
    }
  report.pico_i_count = pico_i_count;
  report.pico_i_mean_kbps = pico_i_count > 0 ? pico_i / pico_i_count * to_kbps : 0.0;

  std::vector<int> order(K);
  for (int k = 0; k < K; ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (report.mean_rate[a] != report.mean_rate[b])
      return report.mean_rate[a] < report.mean_rate[b];
    return a < b;
  });
  const int worst = (K + 9) / 10;  // ceil(K/10)
  double worst_sum = 0.0;
  for (int i = 0; i < worst; ++i) worst_sum += report.mean_rate[order[i]];
  report.worst10_mean_kbps = worst_sum / worst * to_kbps;
  return report;
}

void MetricsReport::validate() const {
  if (worst10_mean_kbps > overall_mean_kbps + 1e-9)
    throw InvariantViolation("metrics: worst-10% mean above overall mean");
  if (!std::isfinite(utility) || !std::isfinite(avg_cell_capacity_mbps))
    throw InvariantViolation("metrics: non-finite aggregate");
}

}  // namespace hetsim
