#pragma once

#include <algorithm>
#include <cmath>

#include "fluxanneal/errors.hpp"

namespace fluxanneal {

struct SchedulePoint {
  double alpha;
  double beta;
};

/// Time-dependent MD weights over normalized time tau in [0, 1]:
///
///   alpha(tau) = alpha_f * (tau + rho1*(1 - tau) + rho2*tau*(tau - 1))
///   beta(tau)  = beta_f  * (tau + kappa1*(1 - tau) + kappa2*tau*(tau - 1))
///
/// alpha weights the kinetic/confining part, beta the Ising part; both
/// polynomials hit their *_f value at tau = 1 by construction. Construction
/// rejects coefficient sets whose alpha crosses zero inside [0, 1], found by
/// minimizing the quadratic.
class Schedule {
 public:
  Schedule(double alpha_f, double rho1, double rho2, double beta_f, double kappa1,
           double kappa2)
      : alpha_f_(alpha_f), rho1_(rho1), rho2_(rho2), beta_f_(beta_f), kappa1_(kappa1),
        kappa2_(kappa2) {
    check_alpha_positive();
  }

  static Schedule paper_default() { return Schedule(0.008, 4.0, 3.0, 0.12, 0.05, 1.0); }

  /// Constant alpha/beta: coefficients (1, 0) make the polynomial identically
  /// one. Used for integrator studies with the schedule frozen.
  static Schedule constant(double alpha, double beta) {
    return Schedule(alpha, 1.0, 0.0, beta, 1.0, 0.0);
  }

  SchedulePoint eval(double tau) const {
    if (!(tau >= 0.0 && tau <= 1.0))
      throw ContractViolation("Schedule::eval: tau outside [0, 1]");
    return {alpha_f_ * (tau + rho1_ * (1.0 - tau) + rho2_ * tau * (tau - 1.0)),
            beta_f_ * (tau + kappa1_ * (1.0 - tau) + kappa2_ * tau * (tau - 1.0))};
  }

  double alpha_f() const { return alpha_f_; }
  double rho1() const { return rho1_; }
  double rho2() const { return rho2_; }
  double beta_f() const { return beta_f_; }
  double kappa1() const { return kappa1_; }
  double kappa2() const { return kappa2_; }

  Schedule with_kappa2(double kappa2) const {
    return Schedule(alpha_f_, rho1_, rho2_, beta_f_, kappa1_, kappa2);
  }

 private:
  void check_alpha_positive() const {
    // alpha(tau)/alpha_f = rho2*tau^2 + (1 - rho1 - rho2)*tau + rho1.
    double a = rho2_;
    double b = 1.0 - rho1_ - rho2_;
    double c = rho1_;
    double lo = std::min(c, a + b + c);
    double hi = std::max(c, a + b + c);
    if (a != 0.0) {
      double vertex = -b / (2.0 * a);
      if (vertex > 0.0 && vertex < 1.0) {
        double v = (a * vertex + b) * vertex + c;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    bool positive = (alpha_f_ > 0.0 && lo > 0.0) || (alpha_f_ < 0.0 && hi < 0.0);
    if (!positive)
      throw ContractViolation("Schedule: alpha(tau) must stay positive on [0, 1]");
  }

  double alpha_f_, rho1_, rho2_, beta_f_, kappa1_, kappa2_;
};

inline SchedulePoint schedule_eval(const Schedule& s, double tau) { return s.eval(tau); }

}  // namespace fluxanneal
