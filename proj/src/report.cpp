#include <json.hpp>
#include <sstream>

#include "hetsim/sim.hpp"

namespace hetsim {

namespace {

nlohmann::ordered_json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

constexpr const char* kSchema = "hetsim-metrics-v1";

}  // namespace

std::string metrics_to_jsonl(const MetricsReport& report) {
  std::ostringstream out;
  for (const auto& rec : report.trajectory) {
    nlohmann::ordered_json j;
    j["schema"] = kSchema;
    j["record"] = "superframe";
    j["T"] = rec.index;
    j["objective_a"] = rec.objective_a;
    j["objective_b"] = rec.objective_b;
    j["total_utility"] = rec.total_utility;
    j["blanking_marginals"] = vector_to_json(rec.marginals);
    nlohmann::ordered_json pmf = nlohmann::ordered_json::array();
    for (const auto& [bits, prob] : rec.blanking_pmf)
      pmf.push_back(nlohmann::ordered_json::array({bits, prob}));
    j["blanking_pmf"] = pmf;
    j["profile_weights"] = vector_to_json(rec.profile_weights);
    j["split_fraction"] = rec.split_fraction;
    j["group_a_subbands"] = rec.group_a_subbands;
    j["marginal_solver_iterations"] = rec.marginal_iterations;
    if (rec.profile_refreshed) {
      j["profile"] = rec.profile_patterns;
      j["profile_vertex_sets"] = rec.profile_vertex_sets;
      j["profile_search_objectives"] = rec.profile_search_objectives;
    }
    out << j.dump() << '\n';
  }
  nlohmann::ordered_json j;
  j["schema"] = kSchema;
  j["record"] = "final";
  j["algorithm"] = report.algorithm;
  j["seed"] = report.seed;
  j["utility"] = report.utility;
  j["avg_cell_capacity_mbps"] = report.avg_cell_capacity_mbps;
  j["overall_mean_kbps"] = report.overall_mean_kbps;
  j["macro_i_user_kbps"] = report.macro_i_mean_kbps;
  j["macro_i_user_count"] = report.macro_i_count;
  j["pico_i_user_kbps"] = report.pico_i_mean_kbps;
  j["pico_i_user_count"] = report.pico_i_count;
  j["worst10_kbps"] = report.worst10_mean_kbps;
  if (report.baseline_rate_numerator >= 0)
    j["baseline_blank_per_cycle"] = report.baseline_rate_numerator;
  if (report.ffr_outer_percentile >= 0.0) {
    j["ffr_outer_percentile"] = report.ffr_outer_percentile;
    j["ffr_reuse_groups"] = report.ffr_reuse_groups;
  }
  out << j.dump() << '\n';
  return out.str();
}

std::string rates_to_tsv(const MetricsReport& report, const Scenario& scenario) {
  std::ostringstream out;
  out << "user\tserving_bs\ttier\tclass\ttype\tmean_rate_bits_hz\tmean_rate_kbps\n";
  const double to_kbps = scenario.config.subband_bandwidth_hz() / 1e3;
  for (int k = 0; k < scenario.graph.n_users; ++k) {
    const int b = scenario.graph.serving[k];
    out << k << '\t' << b << '\t' << (scenario.graph.is_macro(b) ? "macro" : "pico") << '\t'
        << (scenario.graph.user_class[k] == UserClass::noise_limited ? "N" : "I") << '\t'
        << (scenario.graph.user_type[k] == UserType::a ? "A" : "B") << '\t'
        << report.mean_rate[k] << '\t' << report.mean_rate[k] * to_kbps << '\n';
  }
  return out.str();
}

std::string trace_to_tsv(const std::vector<DecisionRecord>& trace) {
  std::ostringstream out;
  out << "t\tm\tbs\tpattern\tuser\tmi\n";
  for (const auto& rec : trace)
    out << rec.t << '\t' << rec.m << '\t' << rec.bs << '\t' << rec.pattern << '\t' << rec.user
        << '\t' << rec.mi << '\n';
  return out.str();
}


namespace {

nlohmann::ordered_json patterns_to_json(const std::vector<BlankingPattern>& patterns) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& p : patterns) arr.push_back(p.to_string());
  return arr;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& arr) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  Eigen::Index i = 0;
  for (const auto& x : arr) v[i++] = x.get<double>();
  return v;
}

}  // namespace

std::string long_term_control_to_json(const LongTermControl& control) {
  nlohmann::ordered_json j;
  j["superframe"] = control.superframe_index;
  j["group_a_subbands"] = control.group_a_subbands;
  j["split_fraction"] = control.split_fraction;
  j["marginals"] = vector_to_json(control.marginals);
  j["pmf_support"] = patterns_to_json(control.blanking_pmf.support);
  j["pmf_probs"] = vector_to_json(control.blanking_pmf.probs);
  j["profile"] = patterns_to_json(control.profile.patterns);
  j["profile_weights"] = vector_to_json(control.profile_weights.probs);
  return j.dump();
}

LongTermControl long_term_control_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  LongTermControl control;
  control.superframe_index = j.at("superframe").get<int>();
  control.group_a_subbands = j.at("group_a_subbands").get<int>();
  control.split_fraction = j.at("split_fraction").get<double>();
  control.marginals = vector_from_json(j.at("marginals"));
  for (const auto& bits : j.at("pmf_support"))
    control.blanking_pmf.support.push_back(BlankingPattern::from_string(bits.get<std::string>()));
  control.blanking_pmf.probs = vector_from_json(j.at("pmf_probs"));
  for (const auto& bits : j.at("profile"))
    control.profile.patterns.push_back(BlankingPattern::from_string(bits.get<std::string>()));
  control.profile_weights.probs = vector_from_json(j.at("profile_weights"));
  return control;
}

std::string statistics_report_to_json(const StatisticsReport& stats) {
  nlohmann::ordered_json j;
  j["subframes"] = stats.subframes;
  j["users"] = stats.estimates_a.users;
  j["favored_mean"] = vector_to_json(stats.estimates_a.e);
  j["unfavored_mean"] = vector_to_json(stats.estimates_a.ebar);
  j["favored_present"] = stats.estimates_a.has_e;
  j["unfavored_present"] = stats.estimates_a.has_ebar;
  nlohmann::ordered_json categories = nlohmann::ordered_json::array();
  for (auto c : stats.estimates_a.category) categories.push_back(static_cast<int>(c));
  j["category"] = categories;
  j["min_set"] = stats.estimates_a.min_set;
  j["favored_count"] = stats.counts_a_favored;
  j["unfavored_count"] = stats.counts_a_unfavored;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < stats.estimates_b.rows(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index col = 0; col < stats.estimates_b.cols(); ++col)
      row.push_back(stats.estimates_b(i, col));
    rows.push_back(row);
  }
  j["profile_estimates"] = rows;
  j["profile_counts"] = stats.counts_b;
  j["average_rate"] = vector_to_json(stats.final_average_rate);
  return j.dump();
}

StatisticsReport statistics_report_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  StatisticsReport stats;
  stats.subframes = j.at("subframes").get<long>();
  stats.estimates_a.users = j.at("users").get<std::vector<int>>();
  stats.estimates_a.e = vector_from_json(j.at("favored_mean"));
  stats.estimates_a.ebar = vector_from_json(j.at("unfavored_mean"));
  stats.estimates_a.has_e = j.at("favored_present").get<std::vector<std::uint8_t>>();
  stats.estimates_a.has_ebar = j.at("unfavored_present").get<std::vector<std::uint8_t>>();
  for (const auto& c : j.at("category"))
    stats.estimates_a.category.push_back(static_cast<TypeACategory>(c.get<int>()));
  stats.estimates_a.min_set = j.at("min_set").get<std::vector<std::vector<int>>>();
  stats.counts_a_favored = j.at("favored_count").get<std::vector<long>>();
  stats.counts_a_unfavored = j.at("unfavored_count").get<std::vector<long>>();
  const auto& rows = j.at("profile_estimates");
  const Eigen::Index n_rows = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index n_cols = n_rows > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  stats.estimates_b = Eigen::MatrixXd::Zero(n_rows, n_cols);
  for (Eigen::Index i = 0; i < n_rows; ++i)
    for (Eigen::Index col = 0; col < n_cols; ++col)
      stats.estimates_b(i, col) = rows[i][col].get<double>();
  stats.counts_b = j.at("profile_counts").get<std::vector<std::vector<long>>>();
  stats.final_average_rate = vector_from_json(j.at("average_rate"));
  return stats;
}

}  // namespace hetsim
