#include "hetsim/config_io.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

namespace hetsim {

namespace {

UtilityKind utility_kind_from_name(const std::string& name) {
  if (name == "proportional_fair") return UtilityKind::proportional_fair;
  if (name == "alpha_fair") return UtilityKind::alpha_fair;
  if (name == "weighted_sum") return UtilityKind::weighted_sum;
  throw ConfigError("config: unknown utility kind '" + name + "'");
}

std::string utility_kind_name(UtilityKind kind) {
  switch (kind) {
    case UtilityKind::proportional_fair:
      return "proportional_fair";
    case UtilityKind::alpha_fair:
      return "alpha_fair";
    case UtilityKind::weighted_sum:
      return "weighted_sum";
  }
  return "proportional_fair";
}

}  // namespace

ScenarioConfig parse_scenario_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");

  ScenarioConfig cfg;
  NetworkConfig& n = cfg.network;
  const std::set<std::string> known = {
      "n_macro",        "picos_per_macro",   "users_per_macro",   "inter_site_distance_m",
      "subbands",       "macro_power_dbm",   "pico_power_dbm",    "bias_db",
      "noise_density_dbm_hz", "bandwidth_hz", "shadowing_std_db", "edge_threshold_db",
      "superframe_len", "seed",              "pico_user_fraction", "pico_cluster_radius_m",
      "poisson_picos",  "poisson_users",     "macro_pathloss_a",  "macro_pathloss_b",
      "pico_pathloss_a", "pico_pathloss_b",  "utility",           "alpha",
      "rate_floor",     "profile_refresh"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ConfigError("config: unknown key '" + key + "'");

  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("n_macro", n.n_macro);
  get("picos_per_macro", n.picos_per_macro);
  get("users_per_macro", n.users_per_macro);
  get("inter_site_distance_m", n.inter_site_distance_m);
  get("subbands", n.subbands);
  get("macro_power_dbm", n.macro_power_dbm);
  get("pico_power_dbm", n.pico_power_dbm);
  get("bias_db", n.bias_db);
  get("noise_density_dbm_hz", n.noise_density_dbm_hz);
  get("bandwidth_hz", n.bandwidth_hz);
  get("shadowing_std_db", n.shadowing_std_db);
  get("edge_threshold_db", n.edge_threshold_db);
  get("superframe_len", n.superframe_len);
  get("seed", n.seed);
  get("pico_user_fraction", n.pico_user_fraction);
  get("pico_cluster_radius_m", n.pico_cluster_radius_m);
  get("poisson_picos", n.poisson_picos);
  get("poisson_users", n.poisson_users);
  get("macro_pathloss_a", n.macro_pathloss_a);
  get("macro_pathloss_b", n.macro_pathloss_b);
  get("pico_pathloss_a", n.pico_pathloss_a);
  get("pico_pathloss_b", n.pico_pathloss_b);
  get("profile_refresh", cfg.profile_refresh);

  if (j.contains("utility")) cfg.utility.kind = utility_kind_from_name(j.at("utility"));
  if (j.contains("alpha")) cfg.utility.alpha = j.at("alpha").get<double>();
  if (j.contains("rate_floor")) cfg.utility.rate_floor = j.at("rate_floor").get<double>();

  n.validate();
  if (cfg.profile_refresh < 1) throw ConfigError("config: profile_refresh must be >= 1");
  return cfg;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_config(buf.str());
}

std::string scenario_config_to_json(const ScenarioConfig& cfg) {
  nlohmann::ordered_json j;
  const NetworkConfig& n = cfg.network;
  j["n_macro"] = n.n_macro;
  j["picos_per_macro"] = n.picos_per_macro;
  j["users_per_macro"] = n.users_per_macro;
  j["inter_site_distance_m"] = n.inter_site_distance_m;
  j["subbands"] = n.subbands;
  j["macro_power_dbm"] = n.macro_power_dbm;
  j["pico_power_dbm"] = n.pico_power_dbm;
  j["bias_db"] = n.bias_db;
  j["noise_density_dbm_hz"] = n.noise_density_dbm_hz;
  j["bandwidth_hz"] = n.bandwidth_hz;
  j["shadowing_std_db"] = n.shadowing_std_db;
  j["edge_threshold_db"] = n.edge_threshold_db;
  j["superframe_len"] = n.superframe_len;
  j["seed"] = n.seed;
  j["pico_user_fraction"] = n.pico_user_fraction;
  j["pico_cluster_radius_m"] = n.pico_cluster_radius_m;
  j["poisson_picos"] = n.poisson_picos;
  j["poisson_users"] = n.poisson_users;
  j["utility"] = utility_kind_name(cfg.utility.kind);
  j["alpha"] = cfg.utility.alpha;
  j["rate_floor"] = cfg.utility.rate_floor;
  j["profile_refresh"] = cfg.profile_refresh;
  return j.dump(2) + "\n";
}

ScenarioConfig default_scenario_config() { return ScenarioConfig{}; }

}  // namespace hetsim
