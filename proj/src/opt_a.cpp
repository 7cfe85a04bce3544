#include "hetsim/opt_a.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace hetsim {

EstimateSetA EstimateSetA::from_graph(const TopologyGraph& graph) {
  EstimateSetA est;
  est.users = graph.type_a_users;
  const int n = est.size();
  est.e = Eigen::VectorXd::Zero(n);
  est.ebar = Eigen::VectorXd::Zero(n);
  est.has_e.assign(n, 0);
  est.has_ebar.assign(n, 0);
  est.category.resize(n);
  est.min_set.resize(n);
  for (int i = 0; i < n; ++i) {
    const int k = est.users[i];
    const int b = graph.serving[k];
    if (graph.is_macro(b)) {
      est.category[i] = TypeACategory::macro_n;
    } else {
      est.category[i] = graph.user_class[k] == UserClass::interference_limited
                            ? TypeACategory::pico_i
                            : TypeACategory::pico_n;
      est.min_set[i] = graph.cell_neighbor_macros[b];
    }
  }
  return est;
}

double EstimateSetA::ordering_residual() const {
  double worst = 0.0;
  for (int i = 0; i < size(); ++i)
    if (has_e[i] && has_ebar[i]) worst = std::max(worst, ebar[i] - e[i]);
  return worst;
}

void EstimateSetA::validate(double tol) const {
  for (int i = 0; i < size(); ++i) {
    if (!std::isfinite(e[i]) || !std::isfinite(ebar[i]))
      throw InvariantViolation("estimates: non-finite value");
    if (e[i] < 0.0 || ebar[i] < 0.0) throw InvariantViolation("estimates: negative value");
  }
  if (ordering_residual() > tol)
    throw InvariantViolation("estimates: favored mean below unfavored mean beyond tolerance");
}

namespace {

// Lowest-index minimizer of q over the macro set; the set is never empty for
// pico categories (an empty set means the pico hears no macros: min term 1).
double min_over(const Eigen::VectorXd& q, const std::vector<int>& set, int* argmin = nullptr) {
  if (set.empty()) {
    if (argmin) *argmin = -1;
    return 1.0;
  }
  double best = q[set[0]];
  int arg = set[0];
  for (size_t i = 1; i < set.size(); ++i)
    if (q[set[i]] < best) {
      best = q[set[i]];
      arg = set[i];
    }
  if (argmin) *argmin = arg;
  return best;
}

}  // namespace

double average_rate_closed_form(const Eigen::VectorXd& q, const EstimateSetA& est, int i,
                          const std::vector<int>& serving_macro) {
  const double e = est.has_e[i] ? est.e[i] : 0.0;
  const double ebar = est.has_ebar[i] ? est.ebar[i] : 0.0;
  switch (est.category[i]) {
    case TypeACategory::macro_n:
      return (1.0 - q[serving_macro[i]]) * e;
    case TypeACategory::pico_n:
      return min_over(q, est.min_set[i]) * (e - ebar) + ebar;
    case TypeACategory::pico_i:
      return min_over(q, est.min_set[i]) * e;
  }
  throw Error("average_rate_closed_form: unknown category");
}

Eigen::VectorXd average_rate_vector(const Eigen::VectorXd& q, const EstimateSetA& est,
                              const std::vector<int>& serving_macro) {
  Eigen::VectorXd out(est.size());
  for (int i = 0; i < est.size(); ++i) out[i] = average_rate_closed_form(q, est, i, serving_macro);
  return out;
}

double group_a_utility(const Eigen::VectorXd& q, const EstimateSetA& est,
               const std::vector<int>& serving_macro, const Eigen::VectorXd& weights,
               const UtilityFamily& utility) {
  double total = 0.0;
  for (int i = 0; i < est.size(); ++i)
    total +=
        weights[i] * utility.u(std::max(0.0, average_rate_closed_form(q, est, i, serving_macro)));
  return total;
}

Eigen::VectorXd group_a_utility_supergradient(const Eigen::VectorXd& q, const EstimateSetA& est,
                                      const std::vector<int>& serving_macro,
                                      const Eigen::VectorXd& weights,
                                      const UtilityFamily& utility) {
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(q.size());
  for (int i = 0; i < est.size(); ++i) {
    const double e = est.has_e[i] ? est.e[i] : 0.0;
    const double ebar = est.has_ebar[i] ? est.ebar[i] : 0.0;
    const double rate = std::max(0.0, average_rate_closed_form(q, est, i, serving_macro));
    const double du = weights[i] * utility.du(rate);
    int arg = -1;
    switch (est.category[i]) {
      case TypeACategory::macro_n:
        grad[serving_macro[i]] -= du * e;
        break;
      case TypeACategory::pico_n:
        min_over(q, est.min_set[i], &arg);
        if (arg >= 0) grad[arg] += du * (e - ebar);
        break;
      case TypeACategory::pico_i:
        min_over(q, est.min_set[i], &arg);
        if (arg >= 0) grad[arg] += du * e;
        break;
    }
  }
  return grad;
}

namespace {

double golden_coordinate_max(const std::function<double(double)>& fn, double lo, double hi) {
  const double phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = fn(x1), f2 = fn(x2);
  for (int i = 0; i < 80; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = fn(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = fn(x1);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

MarginalSolveResult optimize_blanking_marginals(const EstimateSetA& est,
                                                const std::vector<int>& serving_macro,
                                                const Eigen::VectorXd& weights,
                                                const UtilityFamily& utility, int n_macro,
                                                const MarginalSolveParams& params) {
  for (int i = 0; i < est.size(); ++i)
    if (!std::isfinite(est.e[i]) || !std::isfinite(est.ebar[i]))
      throw Error("optimize_blanking_marginals: non-finite estimates");

  Eigen::VectorXd q = params.warm_start ? *params.warm_start
                                        : Eigen::VectorXd::Constant(n_macro, 0.5);
  auto objective = [&](const Eigen::VectorXd& x) {
    return group_a_utility(x, est, serving_macro, weights, utility);
  };

  Eigen::VectorXd best_q = q;
  double best_value = objective(q);
  int iterations = 0;

  // Phase 1: projected supergradient ascent with diminishing steps.
  for (int it = 0; it < params.supergradient_iters; ++it) {
    const Eigen::VectorXd grad =
        group_a_utility_supergradient(q, est, serving_macro, weights, utility);
    const double gnorm = grad.lpNorm<Eigen::Infinity>();
    if (gnorm < params.tol) break;
    const double step = params.initial_step / (gnorm * std::sqrt(static_cast<double>(it + 1)));
    q = (q + step * grad).cwiseMax(0.0).cwiseMin(1.0);
    const double value = objective(q);
    ++iterations;
    if (value > best_value) {
      best_value = value;
      best_q = q;
    }
  }

  // Phase 2: cyclic line searches. Coordinates alone stall where several
  // marginals tie inside a min term, so each distinct min set also gets a
  // joint direction (the objective stays concave along any fixed direction).
  std::vector<Eigen::VectorXd> directions;
  for (int n = 0; n < n_macro; ++n) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n_macro);
    d[n] = 1.0;
    directions.push_back(d);
  }
  std::vector<std::vector<int>> seen_sets;
  for (int i = 0; i < est.size(); ++i) {
    const auto& cell = est.min_set[i];
    if (cell.size() < 2) continue;
    if (std::find(seen_sets.begin(), seen_sets.end(), cell) != seen_sets.end()) continue;
    seen_sets.push_back(cell);
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n_macro);
    for (int n : cell) d[n] = 1.0;
    directions.push_back(d);
  }
  if (n_macro > 1) directions.push_back(Eigen::VectorXd::Ones(n_macro));

  q = best_q;
  for (int pass = 0; pass < params.polish_passes; ++pass) {
    double before = best_value;
    for (const Eigen::VectorXd& d : directions) {
      // Feasible step range inside the box along d.
      double t_lo = -1.0, t_hi = 1.0;
      for (int n = 0; n < n_macro; ++n) {
        if (d[n] > 0.0) {
          t_hi = std::min(t_hi, (1.0 - q[n]) / d[n]);
          t_lo = std::max(t_lo, -q[n] / d[n]);
        }
      }
      if (t_hi - t_lo < 1e-12) continue;
      auto slice = [&](double t) { return objective(q + t * d); };
      const double t = golden_coordinate_max(slice, t_lo, t_hi);
      Eigen::VectorXd candidate = (q + t * d).cwiseMax(0.0).cwiseMin(1.0);
      const double value = objective(candidate);
      if (value > best_value) {
        best_value = value;
        q = candidate;
        best_q = candidate;
      }
    }
    ++iterations;
    if (best_value - before < params.tol * (1.0 + std::abs(best_value)) * 1e-4) break;
  }

  return {best_q, best_value, iterations};
}

double first_order_residual_a(const Eigen::VectorXd& q, const EstimateSetA& est,
                              const std::vector<int>& serving_macro,
                              const Eigen::VectorXd& weights, const UtilityFamily& utility) {
  const int n = static_cast<int>(q.size());
  auto objective = [&](const Eigen::VectorXd& x) {
    return group_a_utility(x, est, serving_macro, weights, utility);
  };
  const double f0 = objective(q);
  const double h = 1e-6;

  std::vector<Eigen::VectorXd> directions;
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
    d[j] = 1.0;
    directions.push_back(d);
    directions.push_back(-d);
  }
  // Joint directions over each pico cell's active minimizer set; these cover
  // the kinks the coordinate probes miss when several marginals tie.
  for (int i = 0; i < est.size(); ++i) {
    if (est.min_set[i].empty()) continue;
    const double m = min_over(q, est.min_set[i]);
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
    for (int j : est.min_set[i])
      if (q[j] <= m + 1e-12) d[j] = 1.0;
    directions.push_back(d);
    directions.push_back(-d);
  }
  const Eigen::VectorXd grad = group_a_utility_supergradient(q, est, serving_macro, weights, utility);
  if (grad.lpNorm<Eigen::Infinity>() > 0.0)
    directions.push_back(grad / grad.lpNorm<Eigen::Infinity>());

  double residual = 0.0;
  for (const auto& d : directions) {
    // Project the direction onto the box's feasible cone at q.
    Eigen::VectorXd p = d;
    for (int j = 0; j < n; ++j) {
      if (q[j] <= 0.0 && p[j] < 0.0) p[j] = 0.0;
      if (q[j] >= 1.0 && p[j] > 0.0) p[j] = 0.0;
    }
    const double norm = p.lpNorm<Eigen::Infinity>();
    if (norm == 0.0) continue;
    p /= norm;
    Eigen::VectorXd x = (q + h * p).cwiseMax(0.0).cwiseMin(1.0);
    residual = std::max(residual, (objective(x) - f0) / h);
  }
  return residual;
}

}  // namespace hetsim
