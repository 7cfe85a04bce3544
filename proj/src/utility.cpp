#include "hetsim/utility.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace hetsim {

double UtilityFamily::u(double r) const {
  switch (kind) {
    case UtilityKind::weighted_sum:
      return r;
    case UtilityKind::proportional_fair:
      return std::log(std::max(r, rate_floor));
    case UtilityKind::alpha_fair:
      if (alpha == 1.0) return std::log(std::max(r, rate_floor));
      return std::pow(std::max(r, rate_floor), 1.0 - alpha) / (1.0 - alpha);
  }
  return 0.0;
}

double UtilityFamily::du(double r) const {
  switch (kind) {
    case UtilityKind::weighted_sum:
      return 1.0;
    case UtilityKind::proportional_fair:
      return 1.0 / std::max(r, rate_floor);
    case UtilityKind::alpha_fair:
      if (alpha == 1.0) return 1.0 / std::max(r, rate_floor);
      return std::pow(std::max(r, rate_floor), -alpha);
  }
  return 0.0;
}

double UtilityFamily::f(double c) const {
  switch (kind) {
    case UtilityKind::weighted_sum:
      return c;
    case UtilityKind::proportional_fair:
      return 1.0;
    case UtilityKind::alpha_fair:
      if (alpha == 1.0) return 1.0;
      return std::pow(c, 1.0 - alpha);
  }
  return 1.0;
}

double UtilityFamily::g(double c) const {
  switch (kind) {
    case UtilityKind::weighted_sum:
      return 0.0;
    case UtilityKind::proportional_fair:
      return std::log(c);
    case UtilityKind::alpha_fair:
      if (alpha == 1.0) return std::log(c);
      return 0.0;
  }
  return 0.0;
}

double utility_value(const UtilityFamily& family, const Eigen::VectorXd& weights,
                     const Eigen::VectorXd& rates) {
  if (weights.size() != rates.size()) throw Error("utility_value: weight/rate size mismatch");
  double total = 0.0;
  for (Eigen::Index k = 0; k < rates.size(); ++k) {
    if (rates[k] < 0.0) throw Error("utility_value: negative rate");
    total += weights[k] * family.u(rates[k]);
  }
  return total;
}

double subband_split_objective(int m_a, int subbands, double u_a_star, double u_b_star,
                               const UtilityFamily& family, double w_a_sum, double w_b_sum) {
  const double ca = static_cast<double>(m_a);
  const double cb = static_cast<double>(subbands - m_a);
  double value = 0.0;
  if (m_a > 0) value += family.f(ca) * u_a_star + family.g(ca) * w_a_sum;
  if (subbands - m_a > 0) value += family.f(cb) * u_b_star + family.g(cb) * w_b_sum;
  return value;
}

namespace {

// Continuous objective at qs in (0,1).
double qs_objective(double qs, int subbands, double u_a, double u_b,
                    const UtilityFamily& family, double w_a, double w_b) {
  const double m = static_cast<double>(subbands);
  return family.f(m * qs) * u_a + family.g(m * (1.0 - qs)) * w_b +
         family.f(m * (1.0 - qs)) * u_b + family.g(m * qs) * w_a;
}

double golden_section_max(const std::function<double(double)>& fn, double lo, double hi,
                          int iters) {
  const double phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = fn(x1), f2 = fn(x2);
  for (int i = 0; i < iters; ++i) {
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

SubbandSplit optimize_subband_split(double u_a_star, double u_b_star, const UtilityFamily& family,
                      int subbands, double w_a_sum, double w_b_sum, bool group_a_empty,
                      bool group_b_empty) {
  if (subbands < 1) throw ConfigError("optimize_subband_split: need at least one subband");
  if (group_a_empty && group_b_empty) throw Error("optimize_subband_split: both user groups empty");
  if (group_b_empty) return {1.0, subbands};
  if (group_a_empty) return {0.0, 0};
  if (subbands < 2) throw ConfigError("optimize_subband_split: need M >= 2 to serve both groups");

  // Starved nonempty groups are never allowed: qs stays in [1/M, 1-1/M].
  const double lo = 1.0 / subbands;
  const double hi = 1.0 - 1.0 / subbands;
  auto fn = [&](double q) {
    return qs_objective(q, subbands, u_a_star, u_b_star, family, w_a_sum, w_b_sum);
  };
  const double qs = golden_section_max(fn, lo, hi, 120);

  const int floor_split = std::clamp(static_cast<int>(std::floor(qs * subbands)), 1, subbands - 1);
  const int ceil_split = std::clamp(static_cast<int>(std::ceil(qs * subbands)), 1, subbands - 1);
  const double f_floor =
      subband_split_objective(floor_split, subbands, u_a_star, u_b_star, family, w_a_sum, w_b_sum);
  const double f_ceil =
      subband_split_objective(ceil_split, subbands, u_a_star, u_b_star, family, w_a_sum, w_b_sum);
  const int m_a = (f_ceil > f_floor) ? ceil_split : floor_split;
  return {qs, m_a};
}

}  // namespace hetsim
