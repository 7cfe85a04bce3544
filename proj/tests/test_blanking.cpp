#include <doctest.h>

#include <algorithm>
#include <set>

#include "hetsim/blanking.hpp"

using namespace hetsim;

namespace {

Eigen::VectorXd qvec(std::initializer_list<double> values) {
  Eigen::VectorXd q(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) q[i++] = v;
  return q;
}

std::set<std::string> support_strings(const NestedBlankingPmf& pmf) {
  std::set<std::string> out;
  for (const auto& p : pmf.support) out.insert(p.to_string());
  return out;
}

double prob_of(const NestedBlankingPmf& pmf, const std::string& pattern) {
  for (int j = 0; j < pmf.size(); ++j)
    if (pmf.support[j].to_string() == pattern) return pmf.probs[j];
  return -1.0;
}

}  // namespace

TEST_CASE("nested construction for marginals [0.7, 0.5]") {
  const NestedBlankingPmf pmf = synchronous_blanking_pmf(qvec({0.7, 0.5}));
  CHECK(support_strings(pmf) == std::set<std::string>{"11", "01", "00"});
  CHECK(prob_of(pmf, "11") == doctest::Approx(0.3));
  CHECK(prob_of(pmf, "01") == doctest::Approx(0.2));
  CHECK(prob_of(pmf, "00") == doctest::Approx(0.5));
  // Marginals recovered exactly.
  CHECK(prob_of(pmf, "01") + prob_of(pmf, "00") == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(prob_of(pmf, "00") == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("never-blank marginals give the single all-on pattern") {
  const NestedBlankingPmf pmf = synchronous_blanking_pmf(qvec({0.0, 0.0}));
  REQUIRE(pmf.size() == 1);
  CHECK(pmf.support[0].to_string() == "11");
  CHECK(pmf.probs[0] == doctest::Approx(1.0));
}

TEST_CASE("tied marginals drop the zero-mass chain link") {
  const NestedBlankingPmf pmf = synchronous_blanking_pmf(qvec({0.2, 0.5, 0.5}));
  CHECK(support_strings(pmf) == std::set<std::string>{"111", "100", "000"});
  CHECK(prob_of(pmf, "111") == doctest::Approx(0.5));
  CHECK(prob_of(pmf, "100") == doctest::Approx(0.3));
  CHECK(prob_of(pmf, "000") == doctest::Approx(0.2));
}

TEST_CASE("random marginals always satisfy the pmf invariants") {
  RngStream rng(31, 0, 0, StreamPurpose::topology);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n0 = 1 + static_cast<int>(rng.uniform() * 6);
    Eigen::VectorXd q(n0);
    for (int n = 0; n < n0; ++n) q[n] = rng.uniform();
    const NestedBlankingPmf pmf = synchronous_blanking_pmf(q);  // validate() runs inside
    CHECK(pmf.size() <= n0 + 1);
    // Support is full exactly when all marginals are distinct and interior.
    std::set<double> distinct(q.data(), q.data() + n0);
    const bool interior = q.minCoeff() > 0.0 && q.maxCoeff() < 1.0;
    if (static_cast<int>(distinct.size()) == n0 && interior) CHECK(pmf.size() == n0 + 1);
  }
}

TEST_CASE("favored-mass identities: picos get min q over the cell, macros 1 - q_n") {
  RngStream rng(32, 0, 0, StreamPurpose::topology);
  for (int trial = 0; trial < 200; ++trial) {
    const int n0 = 2 + static_cast<int>(rng.uniform() * 4);
    Eigen::VectorXd q(n0);
    for (int n = 0; n < n0; ++n) q[n] = rng.uniform();
    const NestedBlankingPmf pmf = synchronous_blanking_pmf(q);

    // Random neighbor-macro set standing in for a pico cell.
    std::vector<int> cell;
    for (int n = 0; n < n0; ++n)
      if (rng.uniform() < 0.5) cell.push_back(n);
    if (cell.empty()) cell.push_back(0);

    double blank_all = 0.0;
    for (int j = 0; j < pmf.size(); ++j) {
      bool all_blank = true;
      for (int n : cell) all_blank = all_blank && !pmf.support[j].transmits(n);
      if (all_blank) blank_all += pmf.probs[j];
    }
    double min_q = 1.0;
    for (int n : cell) min_q = std::min(min_q, q[n]);
    CHECK(blank_all == doctest::Approx(min_q).epsilon(1e-12));

    for (int n = 0; n < n0; ++n) {
      double on_mass = 0.0;
      for (int j = 0; j < pmf.size(); ++j)
        if (pmf.support[j].transmits(n)) on_mass += pmf.probs[j];
      CHECK(on_mass == doctest::Approx(1.0 - q[n]).epsilon(1e-12));
    }
  }
}

TEST_CASE("pattern sampling: degenerate pmf, empirical marginals, keyed determinism") {
  const NestedBlankingPmf single = synchronous_blanking_pmf(qvec({0.0}));
  RngStream rng(1, 0, 0, StreamPurpose::pattern);
  for (int i = 0; i < 50; ++i) CHECK(sample_pattern(single, rng).to_string() == "1");

  const NestedBlankingPmf pmf = synchronous_blanking_pmf(qvec({0.7, 0.5}));
  int blank1 = 0, blank2 = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    RngStream draw(77, i, 0, StreamPurpose::pattern);
    const BlankingPattern& p = sample_pattern(pmf, draw);
    blank1 += !p.transmits(0);
    blank2 += !p.transmits(1);
  }
  CHECK(static_cast<double>(blank1) / n == doctest::Approx(0.7).epsilon(0.015));
  CHECK(static_cast<double>(blank2) / n == doctest::Approx(0.5).epsilon(0.02));

  RngStream a(5, 9, 1, StreamPurpose::pattern), b(5, 9, 1, StreamPurpose::pattern);
  CHECK(sample_pattern(pmf, a) == sample_pattern(pmf, b));
}

TEST_CASE("favorable pattern sets on the two-tier fixture") {
  const FixtureTopology fx = parse_fixture_topology(fixture_two_tier_text(), NetworkConfig{});
  // Macro 1 (internal 0): transmits; macro 2 (internal 1): transmits;
  // pico 3 (internal 2): favored when macro 2 is blank.
  auto favored = [&](const std::string& bits, int bs) {
    return pattern_favors(BlankingPattern::from_string(bits), bs, fx.graph);
  };
  CHECK(favored("10", 0));
  CHECK(favored("11", 0));
  CHECK_FALSE(favored("01", 0));
  CHECK_FALSE(favored("00", 0));
  CHECK(favored("01", 1));
  CHECK(favored("11", 1));
  CHECK_FALSE(favored("10", 1));
  CHECK(favored("00", 2));
  CHECK(favored("10", 2));
  CHECK_FALSE(favored("01", 2));
  CHECK_FALSE(favored("11", 2));
  // All-blank pattern is never favorable for a macro.
  CHECK_FALSE(favored("00", 1));
  CHECK_THROWS_AS(favored("11", 9), Error);
}

TEST_CASE("a pico with no neighbor macros is favored under every pattern") {
  const std::string text = "bs 1 macro\nbs 2 pico\nuser 1 serving 2\nedge 1 2\n";
  const FixtureTopology fx = parse_fixture_topology(text, NetworkConfig{});
  for (const std::string& bits : {"0", "1"})
    CHECK(pattern_favors(BlankingPattern::from_string(bits), 1, fx.graph));
}

TEST_CASE("profiles from vertex sets: footprint mapping and dedupe") {
  const FixtureTopology fx = parse_fixture_topology(fixture_co_tier_text(), NetworkConfig{});
  // Vertex sets as user lists (internal user ids 0..3).
  const BlankingProfile profile =
      profile_from_mis({{0, 2}, {0, 3}, {1}}, fx.graph);
  REQUIRE(profile.size() == 2);
  CHECK(profile.patterns[0].to_string() == "101");
  CHECK(profile.patterns[1].to_string() == "010");

  const BlankingProfile single = profile_from_mis({{0}}, fx.graph);
  REQUIRE(single.size() == 1);
  CHECK(single.patterns[0].to_string() == "100");

  CHECK_THROWS_AS(profile_from_mis({{42}}, fx.graph), Error);
  CHECK_THROWS_AS(profile_from_mis({{}}, fx.graph), Error);
}
