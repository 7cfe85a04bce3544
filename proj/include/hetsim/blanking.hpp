#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "hetsim/common.hpp"
#include "hetsim/net_model.hpp"
#include "hetsim/rng.hpp"

namespace hetsim {

// Macro blanking vector: bit n is 0 when macro BS n sends a blank resource
// block, 1 when it sends data. Length is always the macro count.
struct BlankingPattern {
  std::vector<std::uint8_t> bits;

  BlankingPattern() = default;
  explicit BlankingPattern(std::vector<std::uint8_t> b) : bits(std::move(b)) {}
  static BlankingPattern all_on(int n_macro) {
    return BlankingPattern(std::vector<std::uint8_t>(n_macro, 1));
  }
  static BlankingPattern from_string(const std::string& s);

  int size() const { return static_cast<int>(bits.size()); }
  bool transmits(int macro) const { return bits[macro] != 0; }
  std::string to_string() const;

  bool operator==(const BlankingPattern& other) const { return bits == other.bits; }
  bool operator<(const BlankingPattern& other) const { return bits < other.bits; }
};

// Distribution over blanking patterns whose blank sets are nested by inclusion
// and whose per-macro blanking marginals match a given vector exactly.
struct NestedBlankingPmf {
  std::vector<BlankingPattern> support;  // all-on towards all-blank, zero-mass entries dropped
  Eigen::VectorXd probs;

  int size() const { return static_cast<int>(support.size()); }
  // Throws InvariantViolation unless: probs positive and sum to one (1e-12),
  // blank sets form a chain, and marginals reproduce `marginals` exactly.
  void validate(const Eigen::VectorXd& marginals) const;
};

// Small set of distinct patterns used on the co-tier subband group.
struct BlankingProfile {
  std::vector<BlankingPattern> patterns;
  int size() const { return static_cast<int>(patterns.size()); }
};

// Simplex weights over an BlankingProfile's patterns.
struct ProfilePmf {
  Eigen::VectorXd probs;
  void validate() const;
};

// Unique nested-support distribution consistent with the blanking marginals:
// sort macros by ascending marginal (ties by index); pattern j blanks the j-1
// largest-marginal macros; probabilities are the successive differences of the
// sorted marginals with endpoints 0 and 1.
NestedBlankingPmf synchronous_blanking_pmf(const Eigen::VectorXd& marginals);

// One categorical draw; identical rng keys give identical patterns.
const BlankingPattern& sample_pattern(const NestedBlankingPmf& pmf, RngStream& rng);
int sample_profile_index(const ProfilePmf& pmf, RngStream& rng);

// Favorable-pattern test: a macro BS is favored when it transmits data; a pico
// BS is favored when every neighbor macro of its cell is blank.
bool pattern_favors(const BlankingPattern& pattern, int bs, const TopologyGraph& graph);

// Maps each vertex set to the pattern that turns on exactly the macros serving
// its members; duplicate patterns collapse, first occurrence kept.
BlankingProfile profile_from_mis(const std::vector<std::vector<int>>& mis_user_lists,
                             const TopologyGraph& graph);

}  // namespace hetsim
