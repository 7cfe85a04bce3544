#include "hetsim/opt_b.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

namespace hetsim {

namespace {

double simplex_objective(const Eigen::MatrixXd& mi, const Eigen::VectorXd& weights,
                         const UtilityFamily& utility, const Eigen::VectorXd& q) {
  const Eigen::VectorXd rates = mi * q;
  double total = 0.0;
  for (Eigen::Index k = 0; k < rates.size(); ++k)
    total += weights[k] * utility.u(std::max(rates[k], 0.0));
  return total;
}

Eigen::VectorXd simplex_gradient(const Eigen::MatrixXd& mi, const Eigen::VectorXd& weights,
                                 const UtilityFamily& utility, const Eigen::VectorXd& q) {
  const Eigen::VectorXd rates = mi * q;
  Eigen::VectorXd d(rates.size());
  for (Eigen::Index k = 0; k < rates.size(); ++k)
    d[k] = weights[k] * utility.du(std::max(rates[k], 0.0));
  return mi.transpose() * d;
}

// Exact line search on a concave slice via golden section.
double line_search(const Eigen::MatrixXd& mi, const Eigen::VectorXd& weights,
                   const UtilityFamily& utility, const Eigen::VectorXd& q,
                   const Eigen::VectorXd& direction, double gamma_max) {
  const double phi = 0.6180339887498949;
  double a = 0.0, b = gamma_max;
  auto value = [&](double g) { return simplex_objective(mi, weights, utility, q + g * direction); };
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = value(x1), f2 = value(x2);
  for (int i = 0; i < 60; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = value(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = value(x1);
    }
  }
  const double mid = 0.5 * (a + b);
  // Never move to a worse point than an endpoint of the bracket.
  const double f_mid = value(mid);
  const double f_end = value(gamma_max);
  if (f_end >= f_mid && f_end >= value(0.0)) return gamma_max;
  return f_mid >= value(0.0) ? mid : 0.0;
}

}  // namespace

SimplexSolveResult maximize_over_simplex(const Eigen::MatrixXd& mi, const Eigen::VectorXd& weights,
                                         const UtilityFamily& utility,
                                         const SimplexSolveParams& params) {
  const int n_patterns = static_cast<int>(mi.cols());
  const int n_users = static_cast<int>(mi.rows());
  if (n_patterns == 0) throw Error("maximize_over_simplex: no patterns");
  if (weights.size() != n_users) throw Error("maximize_over_simplex: weight size mismatch");
  if (mi.minCoeff() < 0.0) throw Error("maximize_over_simplex: negative rate entries");
  if (utility.is_log_type() && mi.maxCoeff() <= 0.0)
    throw DegenerateObjectiveError(
        "maximize_over_simplex: all-zero rate matrix under log utility");

  Eigen::VectorXd q;
  if (params.warm_start && params.warm_start->size() == n_patterns &&
      params.warm_start->minCoeff() >= 0.0 && std::abs(params.warm_start->sum() - 1.0) < 1e-9) {
    q = *params.warm_start;
  } else {
    q = Eigen::VectorXd::Constant(n_patterns, 1.0 / n_patterns);
  }

  SimplexSolveResult result;
  double objective = simplex_objective(mi, weights, utility, q);
  int it = 0;
  for (; it < params.max_iters; ++it) {
    const Eigen::VectorXd g = simplex_gradient(mi, weights, utility, q);
    // Frank-Wolfe vertex (lowest index on ties) and away vertex on the support.
    int fw = 0;
    for (int j = 1; j < n_patterns; ++j)
      if (g[j] > g[fw]) fw = j;
    int away = -1;
    for (int j = 0; j < n_patterns; ++j)
      if (q[j] > 0.0 && (away < 0 || g[j] < g[away])) away = j;

    const double fw_gap = g[fw] - g.dot(q);
    result.kkt_gap = fw_gap;
    if (fw_gap <= params.kkt_tol) break;
    const double away_gap = g.dot(q) - g[away];

    Eigen::VectorXd direction;
    double gamma_max;
    if (fw_gap >= away_gap) {
      direction = -q;
      direction[fw] += 1.0;
      gamma_max = 1.0;
    } else {
      direction = q;
      direction[away] -= 1.0;
      gamma_max = q[away] / (1.0 - q[away] + 1e-300);
      gamma_max = std::min(gamma_max, 1e6);
    }
    const double gamma = line_search(mi, weights, utility, q, direction, gamma_max);
    if (gamma <= 0.0) break;
    q += gamma * direction;
    // Clean tiny negatives from the away step.
    for (int j = 0; j < n_patterns; ++j)
      if (q[j] < 1e-15) q[j] = 0.0;
    q /= q.sum();
    const double next = simplex_objective(mi, weights, utility, q);
    if (next < objective) break;  // numerical floor reached
    objective = next;
  }
  result.q = q;
  result.objective = simplex_objective(mi, weights, utility, q);
  result.iterations = it;
  const Eigen::VectorXd g = simplex_gradient(mi, weights, utility, q);
  result.kkt_gap = g.maxCoeff() - g.dot(q);
  return result;
}

Eigen::VectorXd sparsify_simplex_point(const Eigen::MatrixXd& mi, Eigen::VectorXd q,
                                       int max_support) {
  auto support_of = [&](const Eigen::VectorXd& x) {
    std::vector<int> s;
    for (int j = 0; j < x.size(); ++j)
      if (x[j] > 0.0) s.push_back(j);
    return s;
  };

  // Merge duplicate columns first: identical rate vectors are interchangeable.
  std::vector<int> support = support_of(q);
  for (size_t a = 0; a < support.size(); ++a) {
    for (size_t b = a + 1; b < support.size(); ++b) {
      if ((mi.col(support[a]) - mi.col(support[b])).lpNorm<Eigen::Infinity>() == 0.0) {
        q[support[a]] += q[support[b]];
        q[support[b]] = 0.0;
      }
    }
    support = support_of(q);
  }

  // Caratheodory: while the support is too large, move along a null-space
  // direction of the support columns (plus the simplex constraint) until a
  // component hits zero. The combined rate vector is unchanged.
  while (static_cast<int>(support.size()) > max_support) {
    const int s = static_cast<int>(support.size());
    Eigen::MatrixXd a(mi.rows() + 1, s);
    for (int j = 0; j < s; ++j) {
      a.col(j).head(mi.rows()) = mi.col(support[j]);
      a(mi.rows(), j) = 1.0;
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    const Eigen::MatrixXd kernel = lu.kernel();
    if (kernel.cols() == 0 || kernel.col(0).lpNorm<Eigen::Infinity>() < 1e-14) break;
    Eigen::VectorXd z = kernel.col(0);
    // Step toward the first vanishing coordinate.
    double step = std::numeric_limits<double>::infinity();
    for (int j = 0; j < s; ++j)
      if (z[j] < 0.0) step = std::min(step, -q[support[j]] / z[j]);
    if (!std::isfinite(step)) {
      z = -z;
      step = std::numeric_limits<double>::infinity();
      for (int j = 0; j < s; ++j)
        if (z[j] < 0.0) step = std::min(step, -q[support[j]] / z[j]);
    }
    if (!std::isfinite(step)) break;
    for (int j = 0; j < s; ++j) q[support[j]] = std::max(0.0, q[support[j]] + step * z[j]);
    q /= q.sum();
    std::vector<int> next = support_of(q);
    if (next.size() >= support.size()) break;  // no progress
    support = std::move(next);
  }
  return q;
}

RestrictedMasterResult solve_restricted_master(const std::vector<VertexMask>& theta,
                                               const InterferenceGraph& ig,
                                               const LargeScaleState& state,
                                               const LinkBudget& budget,
                                               const Eigen::VectorXd& weights,
                                               const UtilityFamily& utility,
                                               const SimplexSolveParams& params) {
  if (theta.empty()) throw Error("solve_restricted_master: empty MIS set");
  Eigen::MatrixXd mi(ig.size(), static_cast<int>(theta.size()));
  for (size_t j = 0; j < theta.size(); ++j)
    mi.col(static_cast<int>(j)) = mi_vector_deterministic(theta[j], ig, state, budget);
  SimplexSolveResult solved = maximize_over_simplex(mi, weights, utility, params);
  Eigen::VectorXd q = sparsify_simplex_point(mi, solved.q, ig.size());

  // The null-space reduction can stall at numerical optima; finish by dropping
  // support columns whose removal costs nothing.
  auto support_size = [&](const Eigen::VectorXd& x) {
    int s = 0;
    for (int j = 0; j < x.size(); ++j)
      if (x[j] > 0.0) ++s;
    return s;
  };
  double objective = simplex_objective(mi, weights, utility, q);
  bool shrunk = true;
  while (support_size(q) > ig.size() && shrunk) {
    shrunk = false;
    for (int drop = 0; drop < q.size() && !shrunk; ++drop) {
      if (q[drop] <= 0.0) continue;
      std::vector<int> keep;
      for (int j = 0; j < q.size(); ++j)
        if (j != drop) keep.push_back(j);
      Eigen::MatrixXd reduced(mi.rows(), static_cast<int>(keep.size()));
      for (size_t j = 0; j < keep.size(); ++j) reduced.col(static_cast<int>(j)) = mi.col(keep[j]);
      const SimplexSolveResult again = maximize_over_simplex(reduced, weights, utility, {});
      if (again.objective >= objective - 1e-10 * (1.0 + std::abs(objective))) {
        q = Eigen::VectorXd::Zero(mi.cols());
        for (size_t j = 0; j < keep.size(); ++j) q[keep[j]] = again.q[static_cast<int>(j)];
        q = sparsify_simplex_point(mi, q, ig.size());
        objective = simplex_objective(mi, weights, utility, q);
        shrunk = true;
      }
    }
  }
  return {q, objective};
}

namespace {

// Greedy cover: repeatedly the maximal set covering the most uncovered
// vertices (lexicographic tie-break), so every vertex appears in theta.
std::vector<VertexMask> initial_cover(const InterferenceGraph& ig, int mis_cap) {
  const int n = ig.size();
  const VertexMask all = (n == 32) ? ~VertexMask{0} : ((VertexMask{1} << n) - 1);
  std::vector<VertexMask> cover;
  VertexMask covered = 0;
  if (n <= mis_cap) {
    const MisSet mis = enumerate_mis(ig, mis_cap);
    while (covered != all) {
      int best = -1, best_gain = -1;
      for (int j = 0; j < mis.size(); ++j) {
        const int gain = std::popcount(mis.sets[j] & ~covered);
        if (gain > best_gain) {
          best_gain = gain;
          best = j;
        }
      }
      cover.push_back(mis.sets[best]);
      covered |= mis.sets[best];
    }
  } else {
    // Above the enumeration cap: cover via weighted MWIS calls that favor
    // uncovered vertices.
    while (covered != all) {
      Eigen::VectorXd w(n);
      for (int v = 0; v < n; ++v) w[v] = ((covered >> v) & 1u) ? 0.0 : 1.0;
      const MwisResult r = max_weight_independent_set(ig, w, mis_cap);
      cover.push_back(r.vertices);
      covered |= r.vertices;
    }
  }
  return cover;
}

}  // namespace

ProfileSearchResult search_profile(const TopologyGraph& graph, const InterferenceGraph& ig,
                                   const LargeScaleState& state, const LinkBudget& budget,
                                   const Eigen::VectorXd& weights, const UtilityFamily& utility,
                                   double epsilon, int max_iters, int mis_cap) {
  ProfileSearchResult result;
  if (ig.size() == 0) return result;  // empty profile: no co-tier users

  std::vector<VertexMask> theta = initial_cover(ig, mis_cap);
  Eigen::VectorXd q;
  double previous = -std::numeric_limits<double>::infinity();

  for (int i = 0; i < max_iters; ++i) {
    SimplexSolveParams params;
    if (q.size() > 0) {
      // Warm start: previous weights, zero mass on the freshly added set.
      Eigen::VectorXd warm = Eigen::VectorXd::Zero(static_cast<int>(theta.size()));
      warm.head(q.size()) = q;
      params.warm_start = warm;
    }
    if (static_cast<int>(theta.size()) > ig.size() + 1)
      throw InvariantViolation("profile search: working set larger than |U_B|+1");
    const RestrictedMasterResult solved =
        solve_restricted_master(theta, ig, state, budget, weights, utility, params);
    if (!result.objective_trajectory.empty() &&
        solved.objective < result.objective_trajectory.back() -
                               1e-9 * (1.0 + std::abs(solved.objective)))
      throw InvariantViolation("profile search: objective decreased");
    q = solved.q;
    result.objective_trajectory.push_back(solved.objective);
    result.iterations = i + 1;

    // Keep positive-mass sets only.
    std::vector<VertexMask> positive;
    Eigen::VectorXd q_positive(q.size());
    int count = 0;
    for (int j = 0; j < q.size(); ++j) {
      if (q[j] > 0.0) {
        positive.push_back(theta[j]);
        q_positive[count++] = q[j];
      }
    }
    q = q_positive.head(count);
    theta = positive;

    if (solved.objective - previous <= epsilon && i > 0) break;
    previous = solved.objective;

    // Price a new maximal set: vertex weight mu_k * interference-free rate.
    Eigen::MatrixXd mi(ig.size(), static_cast<int>(theta.size()));
    for (size_t j = 0; j < theta.size(); ++j)
      mi.col(static_cast<int>(j)) = mi_vector_deterministic(theta[j], ig, state, budget);
    const Eigen::VectorXd combined = mi * q;
    Eigen::VectorXd vertex_weight(ig.size());
    for (int v = 0; v < ig.size(); ++v) {
      const double mu = weights[v] * utility.du(std::max(combined[v], 0.0));
      const int b = ig.serving_macro[v];
      const double own_rate =
          std::log2(1.0 + budget.tx_power_mw[b] * state.sigma_sq(ig.users[v], b) / budget.noise_mw);
      vertex_weight[v] = mu * own_rate;
    }
    const MwisResult priced = max_weight_independent_set(ig, vertex_weight, mis_cap);
    if (std::find(theta.begin(), theta.end(), priced.vertices) != theta.end()) break;
    theta.push_back(priced.vertices);
  }

  result.theta = theta;
  result.q = q;
  std::vector<std::vector<int>> user_lists;
  for (VertexMask m : theta) {
    std::vector<int> users;
    for (int v : mask_to_vertices(m)) users.push_back(ig.users[v]);
    user_lists.push_back(std::move(users));
  }
  result.profile = profile_from_mis(user_lists, graph);
  if (result.profile.size() > ig.size())
    throw InvariantViolation("profile search: profile larger than |U_B|");
  return result;
}

ProfileWeightsResult optimize_profile_weights(const BlankingProfile& profile,
                                              const Eigen::MatrixXd& estimates,
                                              const Eigen::VectorXd& weights,
                                              const UtilityFamily& utility,
                                              const SimplexSolveParams& params) {
  if (profile.size() == 0) throw Error("optimize_profile_weights: empty profile");
  if (estimates.cols() != profile.size())
    throw Error("optimize_profile_weights: estimate matrix shape mismatch");
  const SimplexSolveResult solved = maximize_over_simplex(estimates, weights, utility, params);
  ProfileWeightsResult result;
  result.pmf.probs = solved.q;
  result.objective = solved.objective;
  result.pmf.validate();
  return result;
}

}  // namespace hetsim
