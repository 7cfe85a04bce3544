#include <doctest.h>

#include <cmath>

#include "hetsim/frozen.hpp"
#include "hetsim/opt_a.hpp"
#include "hetsim/rng.hpp"
#include "hetsim/sim.hpp"

using namespace hetsim;

namespace {

UtilityFamily pf() { return UtilityFamily{UtilityKind::proportional_fair, 1.0, 1e-6}; }

// Hand-built estimate sets: categories, neighbor sets and values.
struct Fixture {
  EstimateSetA est;
  std::vector<int> serving_macro;
  Eigen::VectorXd weights;
};

Fixture make_fixture(int n_users) {
  Fixture f;
  f.est.users.resize(n_users);
  for (int i = 0; i < n_users; ++i) f.est.users[i] = i;
  f.est.e = Eigen::VectorXd::Zero(n_users);
  f.est.ebar = Eigen::VectorXd::Zero(n_users);
  f.est.has_e.assign(n_users, 1);
  f.est.has_ebar.assign(n_users, 1);
  f.est.category.assign(n_users, TypeACategory::macro_n);
  f.est.min_set.assign(n_users, {});
  f.serving_macro.assign(n_users, -1);
  f.weights = Eigen::VectorXd::Ones(n_users);
  return f;
}

// Random estimate set over n0 macros honoring e >= ebar.
Fixture random_fixture(RngStream& rng, int n0, int n_users) {
  Fixture f = make_fixture(n_users);
  for (int i = 0; i < n_users; ++i) {
    const double roll = rng.uniform();
    if (roll < 0.4) {
      f.est.category[i] = TypeACategory::macro_n;
      f.serving_macro[i] = static_cast<int>(rng.uniform() * n0);
      f.est.e[i] = 0.5 + 3.0 * rng.uniform();
      f.est.ebar[i] = 0.0;
    } else {
      f.est.category[i] = roll < 0.7 ? TypeACategory::pico_i : TypeACategory::pico_n;
      std::vector<int> cell;
      for (int n = 0; n < n0; ++n)
        if (rng.uniform() < 0.6) cell.push_back(n);
      if (cell.empty()) cell.push_back(static_cast<int>(rng.uniform() * n0));
      f.est.min_set[i] = cell;
      f.est.e[i] = 0.5 + 3.0 * rng.uniform();
      f.est.ebar[i] = f.est.category[i] == TypeACategory::pico_i
                          ? 0.0
                          : f.est.e[i] * rng.uniform();  // pico N: ebar <= e
    }
  }
  return f;
}

double grid_best(const Fixture& f, const UtilityFamily& u, int n0, double step) {
  double best = -1e300;
  if (n0 == 1) {
    for (double q0 = 0.0; q0 <= 1.0 + 1e-12; q0 += step) {
      Eigen::VectorXd q(1);
      q << std::min(q0, 1.0);
      best = std::max(best, group_a_utility(q, f.est, f.serving_macro, f.weights, u));
    }
  } else {
    for (double q0 = 0.0; q0 <= 1.0 + 1e-12; q0 += step) {
      for (double q1 = 0.0; q1 <= 1.0 + 1e-12; q1 += step) {
        Eigen::VectorXd q(2);
        q << std::min(q0, 1.0), std::min(q1, 1.0);
        best = std::max(best, group_a_utility(q, f.est, f.serving_macro, f.weights, u));
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("closed-form average rates per category") {
  Fixture f = make_fixture(3);
  // macro N-user in cell 0 with e = 2.
  f.est.e[0] = 2.0;
  f.serving_macro[0] = 0;
  // pico I-user hearing macros {0,1} with e = 2.
  f.est.category[1] = TypeACategory::pico_i;
  f.est.min_set[1] = {0, 1};
  f.est.e[1] = 2.0;
  // pico N-user hearing {1}, e = 2, ebar = 1.
  f.est.category[2] = TypeACategory::pico_n;
  f.est.min_set[2] = {1};
  f.est.e[2] = 2.0;
  f.est.ebar[2] = 1.0;

  Eigen::VectorXd q(2);
  q << 0.7, 0.5;
  CHECK(average_rate_closed_form(q, f.est, 0, f.serving_macro) == doctest::Approx((1 - 0.7) * 2.0));
  CHECK(average_rate_closed_form(q, f.est, 1, f.serving_macro) == doctest::Approx(0.5 * 2.0));
  CHECK(average_rate_closed_form(q, f.est, 2, f.serving_macro) == doctest::Approx(0.5 * 1.0 + 1.0));

  q << 0.3, 0.3;
  CHECK(average_rate_closed_form(q, f.est, 0, f.serving_macro) == doctest::Approx(1.4));

  q << 0.0, 0.0;
  CHECK(average_rate_closed_form(q, f.est, 0, f.serving_macro) == doctest::Approx(2.0));
  CHECK(average_rate_closed_form(q, f.est, 1, f.serving_macro) == doctest::Approx(0.0));
}

TEST_CASE("absent estimates enter as zero") {
  Fixture f = make_fixture(1);
  f.est.e[0] = 5.0;
  f.est.has_e[0] = 0;
  f.serving_macro[0] = 0;
  Eigen::VectorXd q(1);
  q << 0.2;
  CHECK(average_rate_closed_form(q, f.est, 0, f.serving_macro) == doctest::Approx(0.0));
}

TEST_CASE("one macro with a protected and an unprotected user splits the marginal in half") {
  // log((1-q) e0) + log(q e1) peaks at q = 1/2 independent of the e values.
  for (double e0 : {0.5, 2.0}) {
    for (double e1 : {1.0, 7.0}) {
      Fixture f = make_fixture(2);
      f.est.e[0] = e0;
      f.serving_macro[0] = 0;
      f.est.category[1] = TypeACategory::pico_i;
      f.est.min_set[1] = {0};
      f.est.e[1] = e1;
      const MarginalSolveResult r = optimize_blanking_marginals(f.est, f.serving_macro, f.weights, pf(), 1);
      CHECK(r.q[0] == doctest::Approx(0.5).epsilon(1e-4));
      // Grid-search oracle at 1e-4 resolution agrees on the objective.
      const double best = grid_best(f, pf(), 1, 1e-4);
      CHECK(r.objective == doctest::Approx(best).epsilon(1e-6));
    }
  }
}

TEST_CASE("degenerate populations pin the marginals to the box corners") {
  Fixture macro_only = make_fixture(2);
  macro_only.est.e << 1.0, 3.0;
  macro_only.serving_macro = {0, 1};
  const MarginalSolveResult r0 = optimize_blanking_marginals(macro_only.est, macro_only.serving_macro, macro_only.weights,
                                    pf(), 2);
  CHECK(r0.q[0] == doctest::Approx(0.0).scale(1).epsilon(1e-6));
  CHECK(r0.q[1] == doctest::Approx(0.0).scale(1).epsilon(1e-6));

  Fixture pico_only = make_fixture(2);
  pico_only.est.category.assign(2, TypeACategory::pico_i);
  pico_only.est.min_set = {{0}, {1}};
  pico_only.est.e << 1.0, 3.0;
  const MarginalSolveResult r1 =
      optimize_blanking_marginals(pico_only.est, pico_only.serving_macro, pico_only.weights, pf(), 2);
  CHECK(r1.q[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r1.q[1] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("solver matches the grid oracle on random two-macro instances") {
  RngStream rng(41, 0, 0, StreamPurpose::topology);
  for (int trial = 0; trial < 12; ++trial) {
    const int n0 = 1 + (trial % 2);
    Fixture f = random_fixture(rng, n0, 3 + static_cast<int>(rng.uniform() * 4));
    const MarginalSolveResult r = optimize_blanking_marginals(f.est, f.serving_macro, f.weights, pf(), n0);
    const double best = grid_best(f, pf(), n0, 1e-3);
    CHECK(r.objective >= best - 1e-3);
  }
}

TEST_CASE("supergradient agrees with central differences away from kinks") {
  RngStream rng(43, 0, 0, StreamPurpose::topology);
  const UtilityFamily u = pf();
  int checked = 0;
  for (int trial = 0; trial < 60 && checked < 25; ++trial) {
    const int n0 = 2 + static_cast<int>(rng.uniform() * 2);
    Fixture f = random_fixture(rng, n0, 4);
    Eigen::VectorXd q(n0);
    for (int n = 0; n < n0; ++n) q[n] = 0.05 + 0.9 * rng.uniform();
    // Skip points where any min-term is non-unique.
    bool unique = true;
    for (int i = 0; i < f.est.size(); ++i) {
      const auto& cell = f.est.min_set[i];
      if (cell.empty()) continue;
      double lo = 2.0, second = 2.0;
      for (int n : cell) {
        if (q[n] < lo) {
          second = lo;
          lo = q[n];
        } else {
          second = std::min(second, q[n]);
        }
      }
      if (cell.size() > 1 && second - lo < 1e-3) unique = false;
    }
    if (!unique) continue;
    ++checked;
    const Eigen::VectorXd grad = group_a_utility_supergradient(q, f.est, f.serving_macro, f.weights, u);
    const double h = 1e-5;
    for (int n = 0; n < n0; ++n) {
      Eigen::VectorXd hi = q, lo = q;
      hi[n] += h;
      lo[n] -= h;
      const double fd = (group_a_utility(hi, f.est, f.serving_macro, f.weights, u) -
                         group_a_utility(lo, f.est, f.serving_macro, f.weights, u)) /
                        (2 * h);
      CHECK(std::abs(grad[n] - fd) <= 1e-4 * (1.0 + std::abs(fd)));
    }
  }
  CHECK(checked >= 10);
}

TEST_CASE("objective is concave along random segments") {
  RngStream rng(47, 0, 0, StreamPurpose::topology);
  const UtilityFamily u = pf();
  for (int trial = 0; trial < 20; ++trial) {
    const int n0 = 2;
    Fixture f = random_fixture(rng, n0, 5);
    Eigen::VectorXd a(n0), b(n0);
    for (int n = 0; n < n0; ++n) {
      a[n] = rng.uniform();
      b[n] = rng.uniform();
    }
    const double fa = group_a_utility(a, f.est, f.serving_macro, f.weights, u);
    const double fb = group_a_utility(b, f.est, f.serving_macro, f.weights, u);
    for (double t : {0.25, 0.5, 0.75}) {
      const Eigen::VectorXd x = a + t * (b - a);
      CHECK(group_a_utility(x, f.est, f.serving_macro, f.weights, u) >=
            t * fb + (1 - t) * fa - 1e-9);
    }
  }
}

TEST_CASE("non-finite estimates are rejected") {
  Fixture f = make_fixture(1);
  f.serving_macro[0] = 0;
  f.est.e[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(optimize_blanking_marginals(f.est, f.serving_macro, f.weights, pf(), 1), Error);
}

TEST_CASE("frozen alternating optimization: ascent and a small fixed-point residual") {
  NetworkConfig cfg;
  cfg.subbands = 4;
  cfg.superframe_len = 10;
  const Scenario sc =
      make_scenario(cfg, parse_fixture_topology(fixture_two_tier_text(), cfg));
  std::vector<ChannelSample> samples;
  for (int s = 0; s < 40; ++s) {
    RngStream rng(61, s, 0, StreamPurpose::channel);
    samples.push_back(sample_small_scale(sc.state, sc.graph, rng));
  }
  const FrozenContextA ctx(sc.graph, sc.budget, samples, sc.user_weights, pf());
  const FrozenAoAResult run = frozen_ao_a(ctx, Eigen::VectorXd::Constant(2, 0.5), 12);
  for (size_t i = 1; i < run.objective_trajectory.size(); ++i)
    CHECK(run.objective_trajectory[i] >=
          run.objective_trajectory[i - 1] - 1e-9 * (1.0 + std::abs(run.objective_trajectory[i])));
  CHECK(run.residual <= 1e-4);

  // Perturbing the converged point off the optimum shows up in the residual.
  Eigen::VectorXd off = run.q;
  off[0] = std::min(1.0, std::max(0.0, off[0] > 0.5 ? off[0] - 0.1 : off[0] + 0.1));
  CHECK(frozen_fixed_point_residual_a(ctx, off, run.policy) > 1e-4);
}

TEST_CASE("all-noise-limited networks sit at the q = 0 corner with zero residual") {
  Fixture f = make_fixture(2);
  f.est.e << 1.0, 2.5;
  f.serving_macro = {0, 0};
  Eigen::VectorXd q = Eigen::VectorXd::Zero(1);
  CHECK(first_order_residual_a(q, f.est, f.serving_macro, f.weights, pf()) ==
        doctest::Approx(0.0).scale(1).epsilon(1e-9));
}

TEST_CASE("estimate-set validation: finiteness and the ordering diagnostic") {
  Fixture f = make_fixture(2);
  f.est.category[0] = TypeACategory::pico_n;
  f.est.min_set[0] = {0};
  f.est.e[0] = 1.0;
  f.est.ebar[0] = 1.2;  // scheduled estimates may run above the favored mean
  f.est.e[1] = 2.0;
  f.serving_macro[1] = 0;
  CHECK(f.est.ordering_residual() == doctest::Approx(0.2));
  CHECK_NOTHROW(f.est.validate(0.25));
  CHECK_THROWS_AS(f.est.validate(0.1), InvariantViolation);
  f.est.e[1] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(f.est.validate(1.0), InvariantViolation);
}
