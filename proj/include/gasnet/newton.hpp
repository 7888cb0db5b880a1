#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "gasnet/error.hpp"

namespace gasnet {

struct NewtonOptions {
  double tol = 1e-10;  ///< on the scaled residual, infinity norm
  int max_iter = 50;
  int max_halvings = 30;
};

struct NewtonResult {
  Eigen::VectorXd x;
  Eigen::VectorXd residual;  ///< unscaled
  double scaled_norm = 0.0;
  int iterations = 0;
};

namespace detail {

inline double scaled_inf_norm(const Eigen::VectorXd& r, const Eigen::VectorXd& scale) {
  return (r.array() / scale.array()).abs().maxCoeff();
}

inline double scaled_two_norm(const Eigen::VectorXd& r, const Eigen::VectorXd& scale) {
  return (r.array() / scale.array()).matrix().norm();
}

}  // namespace detail

/// Damped Newton with Armijo backtracking by halving.
///
/// `residual(x)` may throw gasnet::Error for parameters outside the physical
/// domain; `admissible(x)` can reject further trial points. Both count as a
/// failed trial and halve the step.
template <class Residual, class Jacobian, class Admissible>
NewtonResult damped_newton(Residual&& residual, Jacobian&& jacobian, Admissible&& admissible, Eigen::VectorXd x,
                           const Eigen::VectorXd& scale, const NewtonOptions& opt = {}) {
  NewtonResult res;
  Eigen::VectorXd r = residual(x);
  double norm = detail::scaled_inf_norm(r, scale);
  int it = 0;
  while (norm > opt.tol) {
    if (it >= opt.max_iter) fail(ErrorCode::NoConvergence, "Newton iteration budget exhausted, residual " + std::to_string(norm));
    const Eigen::MatrixXd J = jacobian(x);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    if (!lu.isInvertible()) fail(ErrorCode::SingularJacobian, "coupling Jacobian is singular");
    const Eigen::VectorXd dx = lu.solve(-r);
    const double merit = detail::scaled_two_norm(r, scale);
    double lambda = 1.0;
    bool accepted = false, blocked = false;
    for (int k = 0; k <= opt.max_halvings; ++k, lambda *= 0.5) {
      const Eigen::VectorXd trial = x + lambda * dx;
      Eigen::VectorXd rt;
      try {
        if (!admissible(trial)) {
          blocked = true;
          continue;
        }
        rt = residual(trial);
      } catch (const Error&) {
        continue;
      }
      if (!rt.allFinite()) continue;
      if (detail::scaled_two_norm(rt, scale) <= (1.0 - 1e-4 * lambda) * merit) {
        x = trial;
        r = rt;
        accepted = true;
        break;
      }
    }
    if (!accepted && blocked)
      fail(ErrorCode::SubsonicViolation, "Newton steps toward the root leave the admissible subsonic region");
    if (!accepted) fail(ErrorCode::NoConvergence, "line search failed to reduce the residual");
    norm = detail::scaled_inf_norm(r, scale);
    ++it;
  }
  // One extra full step after a genuine solve brings the residual to roundoff.
  if (it > 0) {
    const Eigen::MatrixXd J = jacobian(x);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    if (lu.isInvertible()) {
      const Eigen::VectorXd trial = x + lu.solve(-r);
      try {
        if (admissible(trial)) {
          const Eigen::VectorXd rt = residual(trial);
          if (rt.allFinite() && detail::scaled_inf_norm(rt, scale) <= norm) {
            x = trial;
            r = rt;
            norm = detail::scaled_inf_norm(r, scale);
          }
        }
      } catch (const Error&) {
      }
    }
  }
  res.x = x;
  res.residual = r;
  res.scaled_norm = norm;
  res.iterations = it;
  return res;
}

}  // namespace gasnet
