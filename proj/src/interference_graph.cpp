#include "hetsim/interference_graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <sstream>

namespace hetsim {

bool InterferenceGraph::independent(VertexMask mask) const {
  for (int i = 0; i < size(); ++i)
    if ((mask >> i) & 1u)
      if (adjacency[i] & mask) return false;
  return true;
}

bool InterferenceGraph::maximal_independent(VertexMask mask) const {
  if (!independent(mask)) return false;
  for (int v = 0; v < size(); ++v) {
    if ((mask >> v) & 1u) continue;
    if ((adjacency[v] & mask) == 0) return false;  // v could still join
  }
  return true;
}

void InterferenceGraph::validate() const {
  for (int i = 0; i < size(); ++i) {
    if ((adjacency[i] >> i) & 1u) throw InvariantViolation("interference graph: self loop");
    for (int j = 0; j < size(); ++j)
      if (has_edge(i, j) != has_edge(j, i))
        throw InvariantViolation("interference graph: asymmetric edge");
  }
}

InterferenceGraph build_interference_graph(const TopologyGraph& graph) {
  InterferenceGraph ig;
  ig.users = graph.type_b_users;
  const int n = ig.size();
  if (n > 32) throw SizeError("interference graph: more than 32 macro-cell I-users unsupported");
  ig.serving_macro.resize(n);
  ig.adjacency.assign(n, 0);
  for (int i = 0; i < n; ++i) ig.serving_macro[i] = graph.serving[ig.users[i]];
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int k = ig.users[i], kp = ig.users[j];
      if (graph.has_edge(k, graph.serving[kp]) || graph.has_edge(kp, graph.serving[k])) {
        ig.adjacency[i] |= 1u << j;
        ig.adjacency[j] |= 1u << i;
      }
    }
  }
  return ig;
}

namespace {

// Maximal cliques of the complement graph are exactly the maximal independent
// sets; standard pivoting recursion over bitmasks.
void bron_kerbosch(const std::vector<VertexMask>& comp, VertexMask r, VertexMask p, VertexMask x,
                   std::vector<VertexMask>& out) {
  if (p == 0 && x == 0) {
    out.push_back(r);
    return;
  }
  const VertexMask px = p | x;
  int pivot = std::countr_zero(px);
  int best_cover = -1;
  for (VertexMask rest = px; rest;) {
    const int v = std::countr_zero(rest);
    rest &= rest - 1;
    const int cover = std::popcount(p & comp[v]);
    if (cover > best_cover) {
      best_cover = cover;
      pivot = v;
    }
  }
  for (VertexMask cand = p & ~comp[pivot]; cand;) {
    const int v = std::countr_zero(cand);
    cand &= cand - 1;
    const VertexMask bit = VertexMask{1} << v;
    bron_kerbosch(comp, r | bit, p & comp[v], x & comp[v], out);
    p &= ~bit;
    x |= bit;
  }
}

// Ascending-vertex-sequence lexicographic order for canonical output.
bool mask_lex_less(VertexMask a, VertexMask b) {
  while (a && b) {
    const int va = std::countr_zero(a);
    const int vb = std::countr_zero(b);
    if (va != vb) return va < vb;
    a &= a - 1;
    b &= b - 1;
  }
  return a == 0 && b != 0;
}

}  // namespace

MisSet enumerate_mis(const InterferenceGraph& ig, int cap) {
  const int n = ig.size();
  if (n > cap)
    throw SizeError("enumerate_mis: vertex count " + std::to_string(n) + " above cap " +
                    std::to_string(cap) + "; use the iterative MWIS path");
  MisSet mis;
  if (n == 0) return mis;
  std::vector<VertexMask> comp(n);
  const VertexMask all = (n == 32) ? ~VertexMask{0} : ((VertexMask{1} << n) - 1);
  for (int v = 0; v < n; ++v) comp[v] = all & ~ig.adjacency[v] & ~(VertexMask{1} << v);
  bron_kerbosch(comp, 0, all, 0, mis.sets);
  std::sort(mis.sets.begin(), mis.sets.end(), mask_lex_less);
  for (VertexMask m : mis.sets)
    if (!ig.maximal_independent(m)) throw InvariantViolation("enumerate_mis: non-maximal output");
  return mis;
}

namespace {

VertexMask maximalize(const InterferenceGraph& ig, VertexMask mask) {
  for (int v = 0; v < ig.size(); ++v) {
    const VertexMask bit = VertexMask{1} << v;
    if ((mask & bit) == 0 && (ig.adjacency[v] & mask) == 0) mask |= bit;
  }
  return mask;
}

}  // namespace

MwisResult max_weight_independent_set(const InterferenceGraph& ig, const Eigen::VectorXd& weights,
                                      int cap) {
  const int n = ig.size();
  if (weights.size() != n) throw Error("mwis: weight vector size mismatch");
  for (int v = 0; v < n; ++v)
    if (!(weights[v] >= 0.0) || !std::isfinite(weights[v]))
      throw Error("mwis: weights must be nonnegative and finite");

  MwisResult result;
  if (n == 0) return result;

  auto mask_weight = [&](VertexMask mask) {
    double w = 0.0;
    for (VertexMask m = mask; m;) {
      const int v = std::countr_zero(m);
      m &= m - 1;
      w += weights[v];
    }
    return w;
  };

  if (n <= cap) {
    const MisSet mis = enumerate_mis(ig, cap);
    for (VertexMask m : mis.sets) {
      const double w = mask_weight(m);
      if (w > result.weight ||
          (w == result.weight && (result.vertices == 0 || mask_lex_less(m, result.vertices)))) {
        result.weight = w;
        result.vertices = m;
      }
    }
    result.exact = true;
    return result;
  }

  // Greedy weight/(degree+1) fallback, then maximalize.
  VertexMask chosen = 0, removed = 0;
  const VertexMask all = (n == 32) ? ~VertexMask{0} : ((VertexMask{1} << n) - 1);
  while ((chosen | removed) != all) {
    int best = -1;
    double best_score = -1.0;
    for (int v = 0; v < n; ++v) {
      const VertexMask bit = VertexMask{1} << v;
      if ((chosen | removed) & bit) continue;
      const int deg = std::popcount(ig.adjacency[v] & ~(chosen | removed));
      const double score = weights[v] / (deg + 1.0);
      if (score > best_score) {
        best_score = score;
        best = v;
      }
    }
    chosen |= VertexMask{1} << best;
    removed |= ig.adjacency[best];
  }
  result.vertices = maximalize(ig, chosen);
  result.weight = mask_weight(result.vertices);
  result.exact = false;
  return result;
}

Eigen::VectorXd mi_vector_deterministic(VertexMask members, const InterferenceGraph& ig,
                                        const LargeScaleState& state, const LinkBudget& budget) {
  if (!ig.independent(members)) throw Error("mi_vector_deterministic: set is not independent");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(ig.size());
  for (int v = 0; v < ig.size(); ++v) {
    if (((members >> v) & 1u) == 0) continue;
    const int k = ig.users[v];
    const int b = ig.serving_macro[v];
    out[v] = std::log2(1.0 + budget.tx_power_mw[b] * state.sigma_sq(k, b) / budget.noise_mw);
  }
  return out;
}

std::string interference_graph_to_text(const InterferenceGraph& ig) {
  std::ostringstream out;
  for (int v = 0; v < ig.size(); ++v)
    out << "vertex " << ig.users[v] << ' ' << ig.serving_macro[v] << '\n';
  for (int i = 0; i < ig.size(); ++i)
    for (int j = i + 1; j < ig.size(); ++j)
      if (ig.has_edge(i, j)) out << "edge " << ig.users[i] << ' ' << ig.users[j] << '\n';
  return out.str();
}

InterferenceGraph parse_interference_graph(const std::string& text) {
  InterferenceGraph ig;
  std::map<int, int> index;
  std::istringstream in(text);
  std::string line;
  std::vector<std::pair<int, int>> edges;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) continue;
    if (kind == "vertex") {
      int user, macro;
      if (!(ls >> user >> macro)) throw ConfigError("interference graph: bad vertex line");
      if (index.count(user)) throw ConfigError("interference graph: duplicate vertex");
      index[user] = static_cast<int>(ig.users.size());
      ig.users.push_back(user);
      ig.serving_macro.push_back(macro);
    } else if (kind == "edge") {
      int u, v;
      if (!(ls >> u >> v)) throw ConfigError("interference graph: bad edge line");
      edges.emplace_back(u, v);
    } else {
      throw ConfigError("interference graph: unknown record '" + kind + "'");
    }
  }
  if (ig.size() > 32) throw SizeError("interference graph: too many vertices");
  ig.adjacency.assign(ig.size(), 0);
  for (auto [u, v] : edges) {
    if (!index.count(u) || !index.count(v))
      throw ConfigError("interference graph: edge references unknown vertex");
    const int i = index[u], j = index[v];
    if (i == j) throw ConfigError("interference graph: self loop");
    ig.adjacency[i] |= VertexMask{1} << j;
    ig.adjacency[j] |= VertexMask{1} << i;
  }
  return ig;
}

}  // namespace hetsim
