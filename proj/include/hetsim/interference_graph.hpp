#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "hetsim/net_model.hpp"

namespace hetsim {

// Conflict graph over the macro-cell I-users: vertices are those users, and
// two vertices conflict when either user has a topology edge to the other's
// serving macro. Vertex i corresponds to users[i] (ascending user id).
struct InterferenceGraph {
  std::vector<int> users;
  std::vector<int> serving_macro;
  std::vector<std::uint32_t> adjacency;  // bitmask rows, no self loops

  int size() const { return static_cast<int>(users.size()); }
  bool has_edge(int i, int j) const { return (adjacency[i] >> j) & 1u; }
  bool independent(std::uint32_t mask) const;
  bool maximal_independent(std::uint32_t mask) const;
  void validate() const;  // symmetry, no self loops
};

using VertexMask = std::uint32_t;

struct MisSet {
  std::vector<VertexMask> sets;  // lexicographic by ascending vertex sequence
  int size() const { return static_cast<int>(sets.size()); }
};

inline std::vector<int> mask_to_vertices(VertexMask mask) {
  std::vector<int> out;
  for (int v = 0; mask; ++v, mask >>= 1)
    if (mask & 1u) out.push_back(v);
  return out;
}

InterferenceGraph build_interference_graph(const TopologyGraph& graph);

// Exact enumeration of every maximal independent set. Throws SizeError above
// the cap with a hint to use the iterative MWIS path instead.
MisSet enumerate_mis(const InterferenceGraph& ig, int cap = 25);

struct MwisResult {
  VertexMask vertices = 0;  // always extended to a maximal independent set
  double weight = 0.0;
  bool exact = true;
};

// Exact maximum-weight independent set up to the cap (scan over the enumerated
// maximal sets); greedy weight/(degree+1) heuristic above it, flagged inexact.
// Ties break toward the lexicographically smallest vertex set. Weights must be
// nonnegative and finite.
MwisResult max_weight_independent_set(const InterferenceGraph& ig, const Eigen::VectorXd& weights,
                                      int cap = 25);

// Interference-free rate vector of the deterministic channel: members get
// log2(1 + P_b sigma^2 / noise), everyone else zero. Entries follow the
// graph's vertex order. Throws when the set is not independent.
Eigen::VectorXd mi_vector_deterministic(VertexMask members, const InterferenceGraph& ig,
                                        const LargeScaleState& state, const LinkBudget& budget);

// Adjacency-list text form: "vertex <user> <macro>" lines then "edge <u> <v>"
// lines (user ids). Round-trips through parse_interference_graph.
std::string interference_graph_to_text(const InterferenceGraph& ig);
InterferenceGraph parse_interference_graph(const std::string& text);

}  // namespace hetsim
