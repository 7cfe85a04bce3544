#pragma once

#include <Eigen/Dense>

#include "hetsim/common.hpp"

namespace hetsim {

enum class UtilityKind { weighted_sum, alpha_fair, proportional_fair };

// Concave increasing per-user utility u plus the scaling pair (f, g) with
// u(c*r) = f(c)*u(r) + g(c). Proportional fair is natural log (alpha = 1).
struct UtilityFamily {
  UtilityKind kind = UtilityKind::proportional_fair;
  double alpha = 1.0;       // alpha_fair only
  double rate_floor = 1e-6; // applied before log-type utilities and derivatives

  double u(double r) const;
  double du(double r) const;  // u'(r), floored the same way as u
  double f(double c) const;
  double g(double c) const;

  bool is_log_type() const {
    return kind == UtilityKind::proportional_fair ||
           (kind == UtilityKind::alpha_fair && alpha == 1.0);
  }
};

// Sum_k w_k u(rates_k). Throws on negative rates.
double utility_value(const UtilityFamily& family, const Eigen::VectorXd& weights,
                     const Eigen::VectorXd& rates);

struct SubbandSplit {
  double qs = 1.0;  // continuous optimum of the scalar program
  int m_a = 0;      // integer number of group-A subbands actually used
};

// Splits the M subbands between the two user groups by maximizing
//   f(M*qs)*u_a_star + g(M*(1-qs))*w_b_sum + f(M*(1-qs))*u_b_star + g(M*qs)*w_a_sum
// over qs, then picking the better of the floor/ceil integer splits. When one
// group is empty the whole band goes to the other. Throws when both are empty.
SubbandSplit optimize_subband_split(double u_a_star, double u_b_star, const UtilityFamily& family,
                      int subbands, double w_a_sum, double w_b_sum, bool group_a_empty,
                      bool group_b_empty);

// Objective of the integer split above; exposed so tests can sweep all splits.
double subband_split_objective(int m_a, int subbands, double u_a_star, double u_b_star,
                               const UtilityFamily& family, double w_a_sum, double w_b_sum);

}  // namespace hetsim
