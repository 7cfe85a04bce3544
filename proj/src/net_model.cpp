#include "hetsim/net_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace hetsim {

void NetworkConfig::validate() const {
  if (n_macro < 1) throw ConfigError("config: n_macro must be >= 1");
  if (picos_per_macro < 0) throw ConfigError("config: picos_per_macro must be >= 0");
  if (users_per_macro < 1) throw ConfigError("config: users_per_macro must be >= 1");
  if (subbands < 2) throw ConfigError("config: subbands must be >= 2");
  if (bias_db < 0.0) throw ConfigError("config: bias_db must be >= 0");
  if (superframe_len < 1) throw ConfigError("config: superframe_len must be >= 1");
  if (inter_site_distance_m <= 0.0) throw ConfigError("config: inter_site_distance_m must be > 0");
  if (bandwidth_hz <= 0.0) throw ConfigError("config: bandwidth_hz must be > 0");
  if (pico_user_fraction < 0.0 || pico_user_fraction > 1.0)
    throw ConfigError("config: pico_user_fraction must lie in [0,1]");
  if (!std::isfinite(macro_power_dbm) || !std::isfinite(pico_power_dbm))
    throw ConfigError("config: powers must be finite");
}

double NetworkConfig::noise_per_subband_mw() const {
  return dbm_to_mw(noise_density_dbm_hz + 10.0 * std::log10(bandwidth_hz / subbands));
}

LinkBudget LinkBudget::from_config(const NetworkConfig& cfg, int n_macro, int n_bs) {
  LinkBudget budget;
  budget.tx_power_mw = Eigen::VectorXd(n_bs);
  for (int n = 0; n < n_bs; ++n)
    budget.tx_power_mw[n] = dbm_to_mw(n < n_macro ? cfg.macro_power_dbm : cfg.pico_power_dbm);
  budget.noise_mw = cfg.noise_per_subband_mw();
  return budget;
}

namespace {

constexpr double kMinPathDistanceM = 10.0;
constexpr double kMacroMinUserDistanceM = 35.0;
constexpr double kPicoMinSiteDistanceM = 75.0;

// Hexagonal spiral of grid sites: center first, then rings outward.
std::vector<Eigen::Vector2d> hex_spiral(int count, double spacing) {
  std::vector<Eigen::Vector2d> out;
  out.reserve(count);
  auto axial_to_xy = [&](int a, int b) {
    return Eigen::Vector2d(spacing * (a + 0.5 * b), spacing * (std::sqrt(3.0) / 2.0) * b);
  };
  out.push_back(axial_to_xy(0, 0));
  const int dirs[6][2] = {{1, 0}, {1, -1}, {0, -1}, {-1, 0}, {-1, 1}, {0, 1}};
  for (int ring = 1; static_cast<int>(out.size()) < count; ++ring) {
    int a = -ring, b = ring;  // start of the ring walk
    for (int side = 0; side < 6 && static_cast<int>(out.size()) < count; ++side) {
      for (int step = 0; step < ring && static_cast<int>(out.size()) < count; ++step) {
        out.push_back(axial_to_xy(a, b));
        a += dirs[side][0];
        b += dirs[side][1];
      }
    }
  }
  return out;
}

Eigen::Vector2d uniform_in_annulus(RngStream& rng, const Eigen::Vector2d& center, double r_min,
                                   double r_max) {
  const double u = rng.uniform();
  const double r = std::sqrt(u * (r_max * r_max - r_min * r_min) + r_min * r_min);
  const double theta = 6.283185307179586476925286766559 * rng.uniform();
  return center + r * Eigen::Vector2d(std::cos(theta), std::sin(theta));
}

double pathloss_db(const NetworkConfig& cfg, bool macro, double distance_m) {
  const double d_km = std::max(distance_m, kMinPathDistanceM) / 1000.0;
  return macro ? cfg.macro_pathloss_a + cfg.macro_pathloss_b * std::log10(d_km)
               : cfg.pico_pathloss_a + cfg.pico_pathloss_b * std::log10(d_km);
}

}  // namespace

LargeScaleState generate_topology(const NetworkConfig& config, std::uint64_t seed) {
  config.validate();

  const auto macro_pos = hex_spiral(config.n_macro, config.inter_site_distance_m);
  const double cell_radius = 0.5 * config.inter_site_distance_m;

  // Pico and user placement, cell by cell.
  std::vector<Eigen::Vector2d> pico_pos;
  std::vector<Eigen::Vector2d> user_pos;
  std::vector<int> picos_of_cell_begin, picos_of_cell_count;
  for (int c = 0; c < config.n_macro; ++c) {
    RngStream counts(seed, c, 2, StreamPurpose::topology);
    int n_picos = config.picos_per_macro;
    if (config.poisson_picos) n_picos = counts.poisson(config.picos_per_macro);
    RngStream pico_rng(seed, c, 0, StreamPurpose::topology);
    picos_of_cell_begin.push_back(static_cast<int>(pico_pos.size()));
    picos_of_cell_count.push_back(n_picos);
    for (int p = 0; p < n_picos; ++p)
      pico_pos.push_back(
          uniform_in_annulus(pico_rng, macro_pos[c], kPicoMinSiteDistanceM, cell_radius));
  }
  for (int c = 0; c < config.n_macro; ++c) {
    RngStream counts(seed, c, 3, StreamPurpose::topology);
    int n_users = config.users_per_macro;
    if (config.poisson_users) n_users = counts.poisson(config.users_per_macro);
    RngStream user_rng(seed, c, 1, StreamPurpose::topology);
    for (int i = 0; i < n_users; ++i) {
      const bool clustered =
          picos_of_cell_count[c] > 0 && user_rng.uniform() < config.pico_user_fraction;
      if (clustered) {
        const int p = std::min(static_cast<int>(user_rng.uniform() * picos_of_cell_count[c]),
                               picos_of_cell_count[c] - 1);
        user_pos.push_back(uniform_in_annulus(user_rng, pico_pos[picos_of_cell_begin[c] + p], 0.0,
                                              config.pico_cluster_radius_m));
      } else {
        user_pos.push_back(
            uniform_in_annulus(user_rng, macro_pos[c], kMacroMinUserDistanceM, cell_radius));
      }
    }
  }

  const int n_bs = config.n_macro + static_cast<int>(pico_pos.size());
  const int n_users = static_cast<int>(user_pos.size());
  if (n_users == 0) throw ConfigError("generate_topology: no users generated");

  LargeScaleState state;
  state.n_macro = config.n_macro;
  state.bs_pos = Eigen::MatrixXd(n_bs, 2);
  for (int c = 0; c < config.n_macro; ++c) state.bs_pos.row(c) = macro_pos[c];
  for (size_t p = 0; p < pico_pos.size(); ++p)
    state.bs_pos.row(config.n_macro + static_cast<int>(p)) = pico_pos[p];
  state.user_pos = Eigen::MatrixXd(n_users, 2);
  for (int k = 0; k < n_users; ++k) state.user_pos.row(k) = user_pos[k];

  state.sigma_sq = Eigen::MatrixXd(n_users, n_bs);
  for (int k = 0; k < n_users; ++k) {
    for (int n = 0; n < n_bs; ++n) {
      const double d = (user_pos[k] - Eigen::Vector2d(state.bs_pos.row(n))).norm();
      double loss_db = pathloss_db(config, n < config.n_macro, d);
      if (config.shadowing_std_db > 0.0) {
        RngStream shadow(seed, k, n, StreamPurpose::shadowing);
        loss_db += config.shadowing_std_db * shadow.normal();
      }
      state.sigma_sq(k, n) = db_to_linear(-loss_db);
    }
  }
  return state;
}

std::vector<int> cell_selection(const LargeScaleState& state, const NetworkConfig& config) {
  const int n_users = state.n_users();
  const int n_bs = state.n_bs();
  const int n_macro = state.n_macro;
  if (n_users == 0 || n_bs == 0) throw ConfigError("cell_selection: empty state");
  LinkBudget budget = LinkBudget::from_config(config, n_macro, n_bs);
  const double bias = db_to_linear(config.bias_db);

  std::vector<int> serving(n_users);
  for (int k = 0; k < n_users; ++k) {
    int best_macro = 0;
    double best_macro_rx = -1.0;
    for (int n = 0; n < n_macro; ++n) {
      const double rx = budget.tx_power_mw[n] * state.sigma_sq(k, n);
      if (rx > best_macro_rx) {
        best_macro_rx = rx;
        best_macro = n;
      }
    }
    int best_pico = -1;
    double best_pico_rx = -1.0;
    for (int n = n_macro; n < n_bs; ++n) {
      const double rx = budget.tx_power_mw[n] * state.sigma_sq(k, n);
      if (rx > best_pico_rx) {
        best_pico_rx = rx;
        best_pico = n;
      }
    }
    // Pico wins the boundary case: the selection inequality is non-strict.
    if (best_pico >= 0 && bias * best_pico_rx >= best_macro_rx)
      serving[k] = best_pico;
    else
      serving[k] = best_macro;
  }
  return serving;
}

namespace {

// Derives everything that follows from the edge lists: neighbor sets, N/I
// classes, A/B types, served sets and pico cell metadata.
void classify(TopologyGraph& g) {
  const int n_users = g.n_users;
  const int n_bs = g.n_bs;
  g.neighbor_macros.assign(n_users, {});
  g.neighbor_picos.assign(n_users, {});
  g.user_class.assign(n_users, UserClass::noise_limited);
  g.user_type.assign(n_users, UserType::a);
  g.served.assign(n_bs, {});
  g.pico_i_users.assign(n_bs, {});
  g.cell_neighbor_macros.assign(n_bs, {});
  g.type_a_users.clear();
  g.type_b_users.clear();

  for (int k = 0; k < n_users; ++k) {
    auto& edges = g.edges_of_user[k];
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    g.served[g.serving[k]].push_back(k);
    for (int n : edges) {
      if (n == g.serving[k]) continue;
      (g.is_macro(n) ? g.neighbor_macros[k] : g.neighbor_picos[k]).push_back(n);
    }
    g.user_class[k] =
        edges.size() == 1 ? UserClass::noise_limited : UserClass::interference_limited;
    const bool macro_served = g.is_macro(g.serving[k]);
    g.user_type[k] = (macro_served && g.user_class[k] == UserClass::interference_limited)
                         ? UserType::b
                         : UserType::a;
    (g.user_type[k] == UserType::a ? g.type_a_users : g.type_b_users).push_back(k);
  }
  for (int n = g.n_macro; n < n_bs; ++n) {
    std::set<int> cell_macros;
    for (int k : g.served[n]) {
      if (g.user_class[k] != UserClass::interference_limited) continue;
      g.pico_i_users[n].push_back(k);
      cell_macros.insert(g.neighbor_macros[k].begin(), g.neighbor_macros[k].end());
    }
    g.cell_neighbor_macros[n].assign(cell_macros.begin(), cell_macros.end());
  }
}

}  // namespace

bool TopologyGraph::has_edge(int user, int bs) const {
  const auto& e = edges_of_user[user];
  return std::binary_search(e.begin(), e.end(), bs);
}

void TopologyGraph::validate() const {
  for (int k = 0; k < n_users; ++k) {
    if (serving[k] < 0 || serving[k] >= n_bs)
      throw InvariantViolation("topology: serving BS out of range");
    if (!has_edge(k, serving[k]))
      throw InvariantViolation("topology: missing serving edge (k, b_k)");
    const bool is_n = edges_of_user[k].size() == 1;
    if (is_n != (user_class[k] == UserClass::noise_limited))
      throw InvariantViolation("topology: N-user iff single edge");
    const bool macro_served = is_macro(serving[k]);
    const bool type_b = macro_served && user_class[k] == UserClass::interference_limited;
    if (type_b != (user_type[k] == UserType::b))
      throw InvariantViolation("topology: type B = macro-cell I-users exactly");
    if (!macro_served && user_type[k] != UserType::a)
      throw InvariantViolation("topology: pico-served users are type A");
  }
  if (static_cast<int>(type_a_users.size() + type_b_users.size()) != n_users)
    throw InvariantViolation("topology: type partition must cover all users");
  for (int n = n_macro; n < n_bs; ++n) {
    for (int k : pico_i_users[n]) {
      if (neighbor_macros[k] != cell_neighbor_macros[n])
        throw InvariantViolation("topology: pico I-users must share the cell neighbor-macro set");
    }
  }
}

TopologyGraph build_topology_graph(const LargeScaleState& state, const std::vector<int>& serving,
                                   const NetworkConfig& config) {
  const int n_users = state.n_users();
  const int n_bs = state.n_bs();
  LinkBudget budget = LinkBudget::from_config(config, state.n_macro, n_bs);
  const double cutoff = db_to_linear(config.edge_threshold_db) * budget.noise_mw;

  TopologyGraph g;
  g.n_bs = n_bs;
  g.n_macro = state.n_macro;
  g.n_users = n_users;
  g.serving = serving;
  g.edges_of_user.assign(n_users, {});
  for (int k = 0; k < n_users; ++k) {
    for (int n = 0; n < n_bs; ++n) {
      if (n == serving[k] || budget.tx_power_mw[n] * state.sigma_sq(k, n) >= cutoff)
        g.edges_of_user[k].push_back(n);
    }
  }
  classify(g);

  // Shared neighbor-macro sets per pico cell: every I-user of a pico cell gets
  // the union of the cell's neighbor macros (edges are added, never removed).
  bool added = false;
  for (int n = g.n_macro; n < n_bs; ++n) {
    for (int k : g.pico_i_users[n]) {
      for (int m : g.cell_neighbor_macros[n]) {
        if (!g.has_edge(k, m)) {
          g.edges_of_user[k].push_back(m);
          std::sort(g.edges_of_user[k].begin(), g.edges_of_user[k].end());
          added = true;
        }
      }
    }
  }
  if (added) classify(g);
  g.validate();
  return g;
}

ChannelSample sample_small_scale(const LargeScaleState& state, const TopologyGraph& graph,
                                 RngStream& rng) {
  ChannelSample sample;
  sample.gain_sq = Eigen::MatrixXd::Zero(state.n_users(), state.n_bs());
  for (int k = 0; k < graph.n_users; ++k)
    for (int n : graph.edges_of_user[k])
      sample.gain_sq(k, n) = state.sigma_sq(k, n) * rng.exponential();
  return sample;
}

// --- fixtures -------------------------------------------------------------

namespace {

struct FixtureBs {
  int label;
  bool macro;
};

}  // namespace

FixtureTopology parse_fixture_topology(const std::string& text, const NetworkConfig& config) {
  std::vector<FixtureBs> bss;
  std::vector<std::pair<int, int>> users;               // (label, serving label)
  std::vector<std::tuple<int, int, double>> edges;      // (user label, bs label, sigma_sq or -1)

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) continue;
    if (kind == "bs") {
      int id;
      std::string tier;
      if (!(ls >> id >> tier) || (tier != "macro" && tier != "pico"))
        throw ConfigError("fixture line " + std::to_string(line_no) +
                          ": expected 'bs <id> macro|pico'");
      bss.push_back({id, tier == "macro"});
    } else if (kind == "user") {
      int id, bs;
      std::string word;
      if (!(ls >> id >> word >> bs) || word != "serving")
        throw ConfigError("fixture line " + std::to_string(line_no) +
                          ": expected 'user <id> serving <bs>'");
      users.emplace_back(id, bs);
    } else if (kind == "edge") {
      int uid, bs;
      if (!(ls >> uid >> bs))
        throw ConfigError("fixture line " + std::to_string(line_no) +
                          ": expected 'edge <user> <bs> [sigma-sq]'");
      double sigma = -1.0;
      ls >> sigma;
      edges.emplace_back(uid, bs, sigma);
    } else {
      throw ConfigError("fixture line " + std::to_string(line_no) + ": unknown record '" +
                        kind + "'");
    }
  }
  if (bss.empty() || users.empty()) throw ConfigError("fixture: needs at least one BS and one user");

  // Internal numbering: macros first, each group ordered by label.
  std::stable_sort(bss.begin(), bss.end(), [](const FixtureBs& a, const FixtureBs& b) {
    if (a.macro != b.macro) return a.macro;
    return a.label < b.label;
  });
  std::map<int, int> bs_index;
  int n_macro = 0;
  for (size_t i = 0; i < bss.size(); ++i) {
    if (bs_index.count(bss[i].label)) throw ConfigError("fixture: duplicate BS id");
    bs_index[bss[i].label] = static_cast<int>(i);
    if (bss[i].macro) ++n_macro;
  }
  std::stable_sort(users.begin(), users.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::map<int, int> user_index;
  for (size_t i = 0; i < users.size(); ++i) {
    if (user_index.count(users[i].first)) throw ConfigError("fixture: duplicate user id");
    user_index[users[i].first] = static_cast<int>(i);
  }

  const int n_bs = static_cast<int>(bss.size());
  const int n_users = static_cast<int>(users.size());
  LinkBudget budget = LinkBudget::from_config(config, n_macro, n_bs);

  FixtureTopology fx;
  fx.state.n_macro = n_macro;
  // Default gains: well below the edge threshold for pairs without an edge.
  fx.state.sigma_sq = Eigen::MatrixXd(n_users, n_bs);
  for (int k = 0; k < n_users; ++k)
    for (int n = 0; n < n_bs; ++n)
      fx.state.sigma_sq(k, n) = 1e-4 * budget.noise_mw / budget.tx_power_mw[n];

  TopologyGraph& g = fx.graph;
  g.n_bs = n_bs;
  g.n_macro = n_macro;
  g.n_users = n_users;
  g.serving.resize(n_users);
  g.edges_of_user.assign(n_users, {});
  for (int k = 0; k < n_users; ++k) {
    const auto it = bs_index.find(users[k].second);
    if (it == bs_index.end()) throw ConfigError("fixture: user serving unknown BS");
    g.serving[user_index[users[k].first]] = it->second;
  }
  for (const auto& [uid, bsid, sigma] : edges) {
    const auto ku = user_index.find(uid);
    const auto nb = bs_index.find(bsid);
    if (ku == user_index.end() || nb == bs_index.end())
      throw ConfigError("fixture: edge references unknown user or BS");
    const int k = ku->second, n = nb->second;
    g.edges_of_user[k].push_back(n);
    if (sigma > 0.0) {
      fx.state.sigma_sq(k, n) = sigma;
    } else {
      // 20 dB direct SNR, 10 dB interference-to-noise by default.
      const double target = (n == g.serving[k]) ? 100.0 : 10.0;
      fx.state.sigma_sq(k, n) = target * budget.noise_mw / budget.tx_power_mw[n];
    }
  }
  for (int k = 0; k < n_users; ++k) {
    auto& e = g.edges_of_user[k];
    if (std::find(e.begin(), e.end(), g.serving[k]) == e.end()) e.push_back(g.serving[k]);
    const int n = g.serving[k];
    if (fx.state.sigma_sq(k, n) <= 1e-4 * budget.noise_mw / budget.tx_power_mw[n])
      fx.state.sigma_sq(k, n) = 100.0 * budget.noise_mw / budget.tx_power_mw[n];
  }
  classify(g);
  // The union rule also applies to explicit fixtures.
  bool added = false;
  for (int n = g.n_macro; n < n_bs; ++n) {
    for (int k : g.pico_i_users[n]) {
      for (int m : g.cell_neighbor_macros[n]) {
        if (!g.has_edge(k, m)) {
          g.edges_of_user[k].push_back(m);
          std::sort(g.edges_of_user[k].begin(), g.edges_of_user[k].end());
          const double target = 10.0 * budget.noise_mw / budget.tx_power_mw[m];
          fx.state.sigma_sq(k, m) = std::max(fx.state.sigma_sq(k, m), target);
          added = true;
        }
      }
    }
  }
  if (added) classify(g);
  g.validate();

  for (const auto& b : bss) fx.bs_label.push_back(b.label);
  for (const auto& u : users) fx.user_label.push_back(u.first);
  return fx;
}

FixtureTopology load_fixture_topology(const std::string& path, const NetworkConfig& config) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open fixture file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_fixture_topology(buf.str(), config);
}

std::string fixture_two_tier_text() {
  return "# two macros, one pico, five users\n"
         "bs 1 macro\n"
         "bs 2 macro\n"
         "bs 3 pico\n"
         "user 1 serving 1\n"
         "user 2 serving 2\n"
         "user 3 serving 3\n"
         "user 4 serving 3\n"
         "user 5 serving 2\n"
         "edge 1 1\n"
         "edge 5 1\n"
         "edge 2 2\n"
         "edge 4 2\n"
         "edge 5 2\n"
         "edge 3 3\n"
         "edge 4 3\n";
}

std::string fixture_co_tier_text() {
  return "# three macros, four macro-cell I-users\n"
         "bs 1 macro\n"
         "bs 2 macro\n"
         "bs 3 macro\n"
         "user 1 serving 1\n"
         "user 2 serving 2\n"
         "user 3 serving 3\n"
         "user 4 serving 3\n"
         "edge 1 1\n"
         "edge 1 2\n"
         "edge 2 2\n"
         "edge 2 3\n"
         "edge 3 3\n"
         "edge 3 2\n"
         "edge 4 3\n"
         "edge 4 2\n";
}

}  // namespace hetsim
