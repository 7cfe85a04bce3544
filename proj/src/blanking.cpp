#include "hetsim/blanking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace hetsim {

BlankingPattern BlankingPattern::from_string(const std::string& s) {
  BlankingPattern p;
  p.bits.reserve(s.size());
  for (char c : s) {
    if (c != '0' && c != '1') throw Error("pattern string must contain only 0/1");
    p.bits.push_back(c == '1' ? 1 : 0);
  }
  return p;
}

std::string BlankingPattern::to_string() const {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

void NestedBlankingPmf::validate(const Eigen::VectorXd& marginals) const {
  if (static_cast<int>(support.size()) != probs.size())
    throw InvariantViolation("pmf: support/probs size mismatch");
  if (support.empty()) throw InvariantViolation("pmf: empty support");
  const int n0 = support.front().size();
  if (static_cast<int>(support.size()) > n0 + 1)
    throw InvariantViolation("pmf: support larger than N0+1");
  double total = 0.0;
  for (Eigen::Index j = 0; j < probs.size(); ++j) {
    if (probs[j] <= 0.0) throw InvariantViolation("pmf: non-positive probability");
    total += probs[j];
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvariantViolation("pmf: probabilities must sum to 1");

  // Nested blanking: blank sets ordered by inclusion.
  std::vector<std::set<int>> blanks;
  for (const auto& p : support) {
    std::set<int> b;
    for (int n = 0; n < p.size(); ++n)
      if (!p.transmits(n)) b.insert(n);
    blanks.push_back(std::move(b));
  }
  auto subset = [](const std::set<int>& a, const std::set<int>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
  };
  for (size_t i = 0; i < blanks.size(); ++i)
    for (size_t j = i + 1; j < blanks.size(); ++j)
      if (!subset(blanks[i], blanks[j]) && !subset(blanks[j], blanks[i]))
        throw InvariantViolation("pmf: blank sets must form a chain");

  // Exact marginal consistency.
  for (int n = 0; n < n0; ++n) {
    double blank_mass = 0.0;
    for (size_t j = 0; j < support.size(); ++j)
      if (!support[j].transmits(n)) blank_mass += probs[j];
    if (std::abs(blank_mass - marginals[n]) > 1e-12)
      throw InvariantViolation("pmf: marginal mismatch at macro " + std::to_string(n));
  }
}

void ProfilePmf::validate() const {
  if (probs.size() == 0) throw InvariantViolation("profile pmf: empty");
  double total = 0.0;
  for (Eigen::Index j = 0; j < probs.size(); ++j) {
    if (probs[j] < 0.0) throw InvariantViolation("profile pmf: negative probability");
    total += probs[j];
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvariantViolation("profile pmf: must sum to 1");
}

NestedBlankingPmf synchronous_blanking_pmf(const Eigen::VectorXd& marginals) {
  const int n0 = static_cast<int>(marginals.size());
  for (int n = 0; n < n0; ++n)
    if (!(marginals[n] >= 0.0 && marginals[n] <= 1.0))
      throw Error("synchronous_blanking_pmf: marginals must lie in [0,1]");

  // Ascending marginal order, ties by index.
  std::vector<int> order(n0);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return marginals[a] < marginals[b]; });

  // Pattern j blanks the j-1 largest-marginal macros; its mass is the gap
  // between consecutive sorted marginals (endpoints 0 and 1). Equivalently:
  // draw U uniform, blank exactly the macros with marginal >= U.
  std::vector<BlankingPattern> support;
  std::vector<double> probs;
  BlankingPattern pattern = BlankingPattern::all_on(n0);
  double upper = 1.0;  // marginal of the next macro to blank, scanning downward
  for (int j = 0; j <= n0; ++j) {
    const double lower = (j == n0) ? 0.0 : marginals[order[n0 - 1 - j]];
    const double mass = upper - lower;
    if (mass > 0.0) {
      support.push_back(pattern);
      probs.push_back(mass);
    }
    if (j < n0) {
      pattern.bits[order[n0 - 1 - j]] = 0;
      upper = lower;
    }
  }

  NestedBlankingPmf pmf;
  pmf.support = std::move(support);
  pmf.probs = Eigen::Map<Eigen::VectorXd>(probs.data(), static_cast<Eigen::Index>(probs.size()));
  pmf.validate(marginals);
  return pmf;
}

const BlankingPattern& sample_pattern(const NestedBlankingPmf& pmf, RngStream& rng) {
  if (pmf.support.empty()) throw Error("sample_pattern: empty pmf");
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (int j = 0; j < pmf.size(); ++j) {
    cumulative += pmf.probs[j];
    if (u < cumulative) return pmf.support[j];
  }
  return pmf.support.back();
}

int sample_profile_index(const ProfilePmf& pmf, RngStream& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (Eigen::Index j = 0; j < pmf.probs.size(); ++j) {
    cumulative += pmf.probs[j];
    if (u < cumulative) return static_cast<int>(j);
  }
  return static_cast<int>(pmf.probs.size()) - 1;
}

bool pattern_favors(const BlankingPattern& pattern, int bs, const TopologyGraph& graph) {
  if (bs < 0 || bs >= graph.n_bs) throw Error("pattern_favors: unknown BS id");
  if (pattern.size() != graph.n_macro) throw Error("pattern_favors: pattern length != N0");
  if (graph.is_macro(bs)) return pattern.transmits(bs);
  for (int m : graph.cell_neighbor_macros[bs])
    if (pattern.transmits(m)) return false;
  return true;  // vacuous when the pico has no neighbor macros
}

BlankingProfile profile_from_mis(const std::vector<std::vector<int>>& mis_user_lists,
                                 const TopologyGraph& graph) {
  BlankingProfile profile;
  for (const auto& members : mis_user_lists) {
    if (members.empty()) throw Error("profile_from_mis: empty vertex set");
    BlankingPattern p(std::vector<std::uint8_t>(graph.n_macro, 0));
    for (int k : members) {
      if (k < 0 || k >= graph.n_users) throw Error("profile_from_mis: unknown user id");
      const int n = graph.serving[k];
      if (!graph.is_macro(n)) throw Error("profile_from_mis: vertex user not macro-served");
      p.bits[n] = 1;
    }
    if (std::find(profile.patterns.begin(), profile.patterns.end(), p) == profile.patterns.end())
      profile.patterns.push_back(p);
  }
  return profile;
}

}  // namespace hetsim
