#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "hetsim/common.hpp"
#include "hetsim/rng.hpp"

namespace hetsim {

// Scenario parameters. Powers are per subband; the noise floor per subband is
// noise_density + 10*log10(bandwidth / subbands).
//
// The defaults are the desk-scale scenario: omnidirectional macros on a sparse
// grid stand in for a sectorized deployment, sized so that macro interiors are
// noise limited while cell-edge and pico-cluster users see strong interferers.
struct NetworkConfig {
  int n_macro = 7;
  int picos_per_macro = 2;
  int users_per_macro = 10;
  double inter_site_distance_m = 6000.0;
  int subbands = 10;  // M
  double macro_power_dbm = 36.0;
  double pico_power_dbm = 8.0;
  double bias_db = 9.0;
  double noise_density_dbm_hz = -174.0;
  double bandwidth_hz = 10e6;
  double shadowing_std_db = 3.0;
  double edge_threshold_db = 6.0;  // interference-to-noise cutoff for topology edges
  int superframe_len = 200;        // L_S
  std::uint64_t seed = 1;

  // Layout details.
  double pico_user_fraction = 2.0 / 3.0;  // users clustered around picos
  double pico_cluster_radius_m = 40.0;
  bool poisson_picos = false;  // per-cell pico count ~ Poisson(picos_per_macro)
  bool poisson_users = false;  // per-cell user count ~ Poisson(users_per_macro)

  // Path-loss coefficients, dB at distance d km: a + b*log10(d).
  double macro_pathloss_a = 128.1;
  double macro_pathloss_b = 37.6;
  double pico_pathloss_a = 140.7;
  double pico_pathloss_b = 36.7;

  void validate() const;
  double noise_per_subband_mw() const;
  double subband_bandwidth_hz() const { return bandwidth_hz / subbands; }
};

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// Large-scale fading state: linear power path gains sigma^2 (users x BSs) and
// node positions. Macro BSs occupy columns 0..n_macro-1.
struct LargeScaleState {
  Eigen::MatrixXd sigma_sq;    // K x N, all entries > 0
  Eigen::MatrixXd bs_pos;      // N x 2 (meters); empty for file-loaded fixtures
  Eigen::MatrixXd user_pos;    // K x 2
  int n_macro = 0;

  int n_bs() const { return static_cast<int>(sigma_sq.cols()); }
  int n_users() const { return static_cast<int>(sigma_sq.rows()); }
};

// Per-BS linear transmit power (mW per subband) and the subband noise floor.
struct LinkBudget {
  Eigen::VectorXd tx_power_mw;  // N
  double noise_mw = 1.0;

  static LinkBudget from_config(const NetworkConfig& cfg, int n_macro, int n_bs);
};

enum class UserClass : std::uint8_t { noise_limited, interference_limited };
enum class UserType : std::uint8_t { a, b };

// Bipartite BS-user topology graph with serving assignments, neighbor sets and
// the user classification that drives the ABRB machinery.
struct TopologyGraph {
  int n_bs = 0;
  int n_macro = 0;
  int n_users = 0;

  std::vector<std::vector<int>> edges_of_user;     // sorted BS ids, includes serving
  std::vector<int> serving;                        // b_k
  std::vector<std::vector<int>> neighbor_macros;   // B_k^MA (serving excluded)
  std::vector<std::vector<int>> neighbor_picos;    // B_k^PI
  std::vector<UserClass> user_class;
  std::vector<UserType> user_type;
  std::vector<std::vector<int>> served;            // U_n per BS
  std::vector<std::vector<int>> pico_i_users;      // U_n^I (empty for macros)
  std::vector<std::vector<int>> cell_neighbor_macros;  // B_n per pico (empty for macros)
  std::vector<int> type_a_users;                   // sorted
  std::vector<int> type_b_users;                   // sorted

  bool is_macro(int bs) const { return bs >= 0 && bs < n_macro; }
  bool has_edge(int user, int bs) const;

  // Checks the structural invariants (partition, serving edges, the shared
  // neighbor-macro predicate for pico I-users). Throws InvariantViolation.
  void validate() const;
};

// One subband's instantaneous channel: |h|^2 linear power gains, zero off-edge.
struct ChannelSample {
  Eigen::MatrixXd gain_sq;  // K x N
};

// --- operations ---------------------------------------------------------

// Macro grid + uniform picos + clustered users + log-distance path loss with
// lognormal shadowing. Pure function of (config, seed).
LargeScaleState generate_topology(const NetworkConfig& config, std::uint64_t seed);

// Biased cell selection: pico wins when bias * P_p * sigma^2_p >= P_m * sigma^2_m
// (non-strict). Argmax ties break toward the lowest BS index.
std::vector<int> cell_selection(const LargeScaleState& state, const NetworkConfig& config);

// Edge rule: serving edge always; otherwise long-term received power at least
// edge_threshold above the subband noise floor. Classifies users, then enforces
// the shared neighbor-macro set per pico cell by adding edges (union rule).
TopologyGraph build_topology_graph(const LargeScaleState& state, const std::vector<int>& serving,
                                   const NetworkConfig& config);

// |h|^2 = sigma^2 * X with X unit-mean exponential, drawn from the stream keyed
// by (seed, subframe, subband); non-edges are exactly zero.
ChannelSample sample_small_scale(const LargeScaleState& state, const TopologyGraph& graph,
                                 RngStream& rng);

// --- fixture / adjacency file formats ------------------------------------

// Explicit-graph fixture: "bs <id> macro|pico", "user <id> serving <bs-id>",
// "edge <user-id> <bs-id> [sigma-sq]". Ids are arbitrary; internally macros are
// renumbered first. Direct edges default to 20 dB SNR, cross edges to 10 dB INR
// relative to the config link budget when no sigma-sq is given.
struct FixtureTopology {
  LargeScaleState state;
  TopologyGraph graph;
  std::vector<int> bs_label;    // original ids
  std::vector<int> user_label;
};

FixtureTopology load_fixture_topology(const std::string& path, const NetworkConfig& config);
FixtureTopology parse_fixture_topology(const std::string& text, const NetworkConfig& config);

// Built-in example fixtures (two macros + one pico with five users; and the
// three-macro co-tier example with four macro I-users).
std::string fixture_two_tier_text();
std::string fixture_co_tier_text();

}  // namespace hetsim
