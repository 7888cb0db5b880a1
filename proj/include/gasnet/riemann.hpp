#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "gasnet/error.hpp"
#include "gasnet/thermo.hpp"

namespace gasnet {

// ---------------------------------------------------------------------------
// Wave functions. Each comes with its derivative in the first argument; the
// derivatives feed the Newton iterations here and the coupling Jacobians.
// ---------------------------------------------------------------------------

namespace detail {

inline double mu2(const GasConstants& g) { return (g.gamma - 1.0) / (g.gamma + 1.0); }

inline double theta2(double rho_star, double rho_bar, double kappa, const GasConstants& g) {
  const double gm = g.gamma;
  if (rho_star <= rho_bar) {
    const double b = 0.5 * (gm - 1.0);
    return 2.0 * std::sqrt(kappa * gm) / (gm - 1.0) * rho_star * (std::pow(rho_star, b) - std::pow(rho_bar, b));
  }
  const double dp = kappa * (std::pow(rho_star, gm) - std::pow(rho_bar, gm));
  return std::sqrt(rho_star / rho_bar * (rho_star - rho_bar) * dp);
}

inline double dtheta2(double rho_star, double rho_bar, double kappa, const GasConstants& g) {
  const double gm = g.gamma;
  if (rho_star <= rho_bar) {
    const double b = 0.5 * (gm - 1.0);
    return 2.0 * std::sqrt(kappa * gm) / (gm - 1.0) * ((1.0 + b) * std::pow(rho_star, b) - std::pow(rho_bar, b));
  }
  const double dp = kappa * (std::pow(rho_star, gm) - std::pow(rho_bar, gm));
  const double dpdrho = kappa * gm * std::pow(rho_star, gm - 1.0);
  const double drho = rho_star - rho_bar;
  const double F = rho_star / rho_bar * drho * dp;
  const double dF = (drho * dp + rho_star * dp + rho_star * drho * dpdrho) / rho_bar;
  return dF / (2.0 * std::sqrt(F));
}

inline double theta3(double rho_star, double rho_bar, double kappa, const GasConstants& g) {
  const double gm = g.gamma;
  if (rho_star <= rho_bar) {
    const double b = 0.5 * (gm + 1.0);
    return 2.0 * std::sqrt(kappa * gm) / (gm + 1.0) * (std::pow(rho_star, b) - std::pow(rho_bar, b));
  }
  const double dp = kappa * (std::pow(rho_star, gm) - std::pow(rho_bar, gm));
  return std::sqrt((rho_star - rho_bar) * dp);
}

inline double dtheta3(double rho_star, double rho_bar, double kappa, const GasConstants& g) {
  const double gm = g.gamma;
  if (rho_star <= rho_bar) return std::sqrt(kappa * gm) * std::pow(rho_star, 0.5 * (gm - 1.0));
  const double dp = kappa * (std::pow(rho_star, gm) - std::pow(rho_bar, gm));
  const double dpdrho = kappa * gm * std::pow(rho_star, gm - 1.0);
  const double drho = rho_star - rho_bar;
  return (dp + drho * dpdrho) / (2.0 * std::sqrt(drho * dp));
}

inline double psi(double p_star, double rho_k, double p_k, const GasConstants& g) {
  const double gm = g.gamma;
  if (p_star <= p_k) {
    const double c_k = std::sqrt(gm * p_k / rho_k);
    return 2.0 * c_k / (gm - 1.0) * (std::pow(p_star / p_k, (gm - 1.0) / (2.0 * gm)) - 1.0);
  }
  const double m2 = mu2(g);
  return (p_star - p_k) * std::sqrt((1.0 - m2) / (rho_k * (p_star + m2 * p_k)));
}

inline double dpsi(double p_star, double rho_k, double p_k, const GasConstants& g) {
  const double gm = g.gamma;
  if (p_star <= p_k) {
    const double c_k = std::sqrt(gm * p_k / rho_k);
    return c_k / (gm * p_k) * std::pow(p_star / p_k, -(gm + 1.0) / (2.0 * gm));
  }
  const double m2 = mu2(g);
  const double root = std::sqrt((1.0 - m2) / (rho_k * (p_star + m2 * p_k)));
  return root * (1.0 - 0.5 * (p_star - p_k) / (p_star + m2 * p_k));
}

inline double phi(double p_star, double rho_k, double p_k, const GasConstants& g) {
  if (p_star <= p_k) return rho_k * std::pow(p_star / p_k, 1.0 / g.gamma);
  const double m2 = mu2(g);
  return rho_k * (p_star + m2 * p_k) / (m2 * p_star + p_k);
}

inline double dphi(double p_star, double rho_k, double p_k, const GasConstants& g) {
  if (p_star <= p_k) return rho_k / (g.gamma * p_k) * std::pow(p_star / p_k, 1.0 / g.gamma - 1.0);
  const double m2 = mu2(g);
  const double den = m2 * p_star + p_k;
  return rho_k * p_k * (1.0 - m2 * m2) / (den * den);
}

inline void require_model(const PipeState& s, Model m, const char* what) {
  if (s.model != m) fail(ErrorCode::InvalidArgument, std::string(what) + " requires a " + std::string(to_string(m)) + " state");
}

}  // namespace detail

/// Mass-flux increment across an M2 wave reaching density rho_star from ubar.
inline double theta2(double rho_star, const PipeState& ubar, const GasConstants& g) {
  detail::require_model(ubar, Model::M2, "theta2");
  return detail::theta2(rho_star, ubar.rho, ubar.kappa, g);
}

inline double theta3(double rho_star, const PipeState& ubar, const GasConstants& g) {
  detail::require_model(ubar, Model::M3, "theta3");
  return detail::theta3(rho_star, ubar.rho, ubar.kappa, g);
}

/// Velocity increment across an M1 acoustic wave reaching pressure p_star from uk.
inline double psi(double p_star, const PipeState& uk, const GasConstants& g) {
  detail::require_model(uk, Model::M1, "psi");
  return detail::psi(p_star, uk.rho, pressure(uk, g), g);
}

/// Density behind an M1 acoustic wave reaching pressure p_star from uk.
inline double phi_density(double p_star, const PipeState& uk, const GasConstants& g) {
  detail::require_model(uk, Model::M1, "phi_density");
  return detail::phi(p_star, uk.rho, pressure(uk, g), g);
}

// ---------------------------------------------------------------------------
// Scalar root finding
// ---------------------------------------------------------------------------

struct RootResult {
  double x = 0.0;
  int iterations = 0;
};

/// Newton on an increasing function with f(lo) < 0 < f(hi). Any iterate that
/// leaves the current bracket is replaced by the bisection point.
/// `eval(x)` returns {f, f'}; `done(x, f)` decides convergence.
template <class Eval, class Done>
RootResult bracketed_newton(Eval&& eval, Done&& done, double lo, double hi, double x0, int max_iter) {
  double x = std::clamp(x0, lo, hi);
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
  for (int it = 0; it < max_iter; ++it) {
    const auto [f, df] = eval(x);
    if (done(x, f)) return {x, it};
    if (f < 0.0) lo = x;
    else hi = x;
    double next = x - f / df;
    if (!(df > 0.0) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(hi), 1e-300)) return {next, it + 1};
    x = next;
  }
  fail(ErrorCode::NoConvergence, "star-state iteration exceeded its budget");
}

// ---------------------------------------------------------------------------
// Solutions of the standard Riemann problem
// ---------------------------------------------------------------------------

enum class WaveType { Rarefaction, Shock };

/// Extent of one acoustic wave in the (x/t) plane; lo == hi for shocks.
struct WaveFan {
  WaveType type = WaveType::Rarefaction;
  double lo = 0.0;
  double hi = 0.0;
};

struct RiemannOptions {
  double tol = 1e-10;
  int max_iter = 100;
};

struct RiemannSolutionM1 {
  double p_star = 0.0;
  double u_star = 0.0;
  double rho_L_star = 0.0;
  double rho_R_star = 0.0;
  double E_L_star = 0.0;
  double E_R_star = 0.0;
  std::array<WaveFan, 2> waves{};  ///< families 1 and 3; the contact moves with u_star
  int iterations = 0;

  PipeState left_star() const { return PipeState::euler(rho_L_star, rho_L_star * u_star, E_L_star); }
  PipeState right_star() const { return PipeState::euler(rho_R_star, rho_R_star * u_star, E_R_star); }
};

struct RiemannSolutionIso {
  Model model = Model::M2;
  double rho_star = 0.0;
  double q_star = 0.0;
  double kappa = 0.0;
  std::array<WaveFan, 2> waves{};  ///< families 1 and 2
  int iterations = 0;

  PipeState star() const { return PipeState::isentropic(model, rho_star, q_star, kappa); }
};

inline RiemannSolutionM1 solve_riemann_m1(const PipeState& UL, const PipeState& UR, const GasConstants& g,
                                          const RiemannOptions& opt = {}) {
  detail::require_model(UL, Model::M1, "solve_riemann_m1");
  detail::require_model(UR, Model::M1, "solve_riemann_m1");
  validate_state(UL);
  validate_state(UR);
  const double gm = g.gamma;
  const double rL = UL.rho, rR = UR.rho;
  const double uL = UL.velocity(), uR = UR.velocity();
  const double pL = pressure(UL, g), pR = pressure(UR, g);
  const double cL = std::sqrt(gm * pL / rL), cR = std::sqrt(gm * pR / rR);
  const double du = uR - uL;
  if (!(2.0 * (cL + cR) / (gm - 1.0) > du)) fail(ErrorCode::VacuumFormation, "M1 data generate vacuum");

  auto eval = [&](double p) {
    const double f = detail::psi(p, rL, pL, g) + detail::psi(p, rR, pR, g) + du;
    const double df = detail::dpsi(p, rL, pL, g) + detail::dpsi(p, rR, pR, g);
    return std::pair{f, df};
  };
  auto done = [&](double, double f) { return std::abs(f) <= opt.tol; };

  double hi = std::max(pL, pR);
  for (int k = 0; eval(hi).first <= 0.0; ++k) {
    if (k > 200) fail(ErrorCode::NoConvergence, "could not bracket p*");
    hi *= 2.0;
  }
  // Two-rarefaction estimate.
  const double z = (gm - 1.0) / (2.0 * gm);
  const double guess =
      std::pow(std::max(cL + cR - 0.5 * (gm - 1.0) * du, 1e-300) / (cL / std::pow(pL, z) + cR / std::pow(pR, z)), 1.0 / z);

  RiemannSolutionM1 sol;
  const RootResult root = bracketed_newton(eval, done, 0.0, hi, guess, opt.max_iter);
  const double ps = root.x;
  sol.iterations = root.iterations;
  sol.p_star = ps;
  sol.u_star = 0.5 * (uL - detail::psi(ps, rL, pL, g) + uR + detail::psi(ps, rR, pR, g));
  sol.rho_L_star = detail::phi(ps, rL, pL, g);
  sol.rho_R_star = detail::phi(ps, rR, pR, g);
  sol.E_L_star = ps / (gm - 1.0) + 0.5 * sol.rho_L_star * sol.u_star * sol.u_star;
  sol.E_R_star = ps / (gm - 1.0) + 0.5 * sol.rho_R_star * sol.u_star * sol.u_star;

  const double a = (gm + 1.0) / (2.0 * gm), b = (gm - 1.0) / (2.0 * gm);
  if (ps > pL) {
    const double s = uL - cL * std::sqrt(a * ps / pL + b);
    sol.waves[0] = {WaveType::Shock, s, s};
  } else {
    sol.waves[0] = {WaveType::Rarefaction, uL - cL, sol.u_star - cL * std::pow(ps / pL, z)};
  }
  if (ps > pR) {
    const double s = uR + cR * std::sqrt(a * ps / pR + b);
    sol.waves[1] = {WaveType::Shock, s, s};
  } else {
    sol.waves[1] = {WaveType::Rarefaction, sol.u_star + cR * std::pow(ps / pR, z), uR + cR};
  }
  return sol;
}

inline RiemannSolutionIso solve_riemann_iso(const PipeState& UL, const PipeState& UR, Model model, const GasConstants& g,
                                            const RiemannOptions& opt = {}) {
  if (model == Model::M1) fail(ErrorCode::InvalidArgument, "solve_riemann_iso requires model M2 or M3");
  detail::require_model(UL, model, "solve_riemann_iso");
  detail::require_model(UR, model, "solve_riemann_iso");
  validate_state(UL);
  validate_state(UR);
  if (std::abs(UL.kappa - UR.kappa) > 1e-14 * UL.kappa)
    fail(ErrorCode::InvalidArgument, "left and right isentropic states must share kappa");
  const double gm = g.gamma;
  const double kappa = UL.kappa;
  const double rL = UL.rho, rR = UR.rho;
  const double uL = UL.velocity(), uR = UR.velocity();
  const double cL = sound_speed(UL, g), cR = sound_speed(UR, g);

  RiemannSolutionIso sol;
  sol.model = model;
  sol.kappa = kappa;
  const double guess = 0.5 * (rL + rR);
  double rho_star = 0.0;

  if (model == Model::M2) {
    if (!(2.0 * (cL + cR) / (gm - 1.0) > uR - uL)) fail(ErrorCode::VacuumFormation, "M2 data generate vacuum");
    // Velocity form: increasing in rho, and rho times it is the flux residual.
    auto eval = [&](double r) {
      const double f = (detail::theta2(r, rL, kappa, g) + detail::theta2(r, rR, kappa, g)) / r + (uR - uL);
      const double df = (detail::dtheta2(r, rL, kappa, g) + detail::dtheta2(r, rR, kappa, g)) / r -
                        (detail::theta2(r, rL, kappa, g) + detail::theta2(r, rR, kappa, g)) / (r * r);
      return std::pair{f, df};
    };
    auto done = [&](double r, double f) { return std::abs(r * f) <= opt.tol; };
    double hi = std::max(rL, rR);
    for (int k = 0; eval(hi).first <= 0.0; ++k) {
      if (k > 200) fail(ErrorCode::NoConvergence, "could not bracket rho*");
      hi *= 2.0;
    }
    const RootResult root = bracketed_newton(eval, done, 0.0, hi, guess, opt.max_iter);
    rho_star = root.x;
    sol.iterations = root.iterations;
    sol.q_star = 0.5 * (uL * rho_star - detail::theta2(rho_star, rL, kappa, g) + uR * rho_star +
                        detail::theta2(rho_star, rR, kappa, g));
  } else {
    const double qL = UL.q, qR = UR.q;
    const double vac = 2.0 * std::sqrt(kappa * gm) / (gm + 1.0) *
                       (std::pow(rL, 0.5 * (gm + 1.0)) + std::pow(rR, 0.5 * (gm + 1.0)));
    if (!(vac > qR - qL)) fail(ErrorCode::VacuumFormation, "M3 data generate vacuum");
    auto eval = [&](double r) {
      const double f = detail::theta3(r, rL, kappa, g) + detail::theta3(r, rR, kappa, g) + (qR - qL);
      const double df = detail::dtheta3(r, rL, kappa, g) + detail::dtheta3(r, rR, kappa, g);
      return std::pair{f, df};
    };
    auto done = [&](double, double f) { return std::abs(f) <= opt.tol; };
    double hi = std::max(rL, rR);
    for (int k = 0; eval(hi).first <= 0.0; ++k) {
      if (k > 200) fail(ErrorCode::NoConvergence, "could not bracket rho*");
      hi *= 2.0;
    }
    const RootResult root = bracketed_newton(eval, done, 0.0, hi, guess, opt.max_iter);
    rho_star = root.x;
    sol.iterations = root.iterations;
    sol.q_star = 0.5 * (qL - detail::theta3(rho_star, rL, kappa, g) + qR + detail::theta3(rho_star, rR, kappa, g));
  }
  sol.rho_star = rho_star;

  const double c_star = std::sqrt(kappa * gm * std::pow(rho_star, gm - 1.0));
  const double u_star = sol.q_star / rho_star;
  if (rho_star > rL) {
    const double s = (sol.q_star - UL.q) / (rho_star - rL);
    sol.waves[0] = {WaveType::Shock, s, s};
  } else if (model == Model::M2) {
    sol.waves[0] = {WaveType::Rarefaction, uL - cL, u_star - c_star};
  } else {
    sol.waves[0] = {WaveType::Rarefaction, -cL, -c_star};
  }
  if (rho_star > rR) {
    const double s = (UR.q - sol.q_star) / (rR - rho_star);
    sol.waves[1] = {WaveType::Shock, s, s};
  } else if (model == Model::M2) {
    sol.waves[1] = {WaveType::Rarefaction, u_star + c_star, uR + cR};
  } else {
    sol.waves[1] = {WaveType::Rarefaction, c_star, cR};
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Self-similar sampling. A point exactly on a wave edge resolves to the
// state on its right.
// ---------------------------------------------------------------------------

inline PipeState sample_solution(const RiemannSolutionM1& sol, const PipeState& UL, const PipeState& UR, double xi,
                                 const GasConstants& g) {
  const double gm = g.gamma;
  const WaveFan& w1 = sol.waves[0];
  const WaveFan& w3 = sol.waves[1];
  if (xi < sol.u_star) {
    if (xi < w1.lo) return UL;
    if (w1.type == WaveType::Rarefaction && xi < w1.hi) {
      const double uL = UL.velocity(), pL = pressure(UL, g);
      const double cL = std::sqrt(gm * pL / UL.rho);
      const double base = 2.0 / (gm + 1.0) + (gm - 1.0) / ((gm + 1.0) * cL) * (uL - xi);
      const double rho = UL.rho * std::pow(base, 2.0 / (gm - 1.0));
      const double u = 2.0 / (gm + 1.0) * (cL + 0.5 * (gm - 1.0) * uL + xi);
      const double p = pL * std::pow(base, 2.0 * gm / (gm - 1.0));
      return PipeState::from_primitive(rho, u, p, g);
    }
    return sol.left_star();
  }
  if (w3.type == WaveType::Shock) return xi < w3.lo ? sol.right_star() : UR;
  if (xi < w3.lo) return sol.right_star();
  if (xi < w3.hi) {
    const double uR = UR.velocity(), pR = pressure(UR, g);
    const double cR = std::sqrt(gm * pR / UR.rho);
    const double base = 2.0 / (gm + 1.0) - (gm - 1.0) / ((gm + 1.0) * cR) * (uR - xi);
    const double rho = UR.rho * std::pow(base, 2.0 / (gm - 1.0));
    const double u = 2.0 / (gm + 1.0) * (-cR + 0.5 * (gm - 1.0) * uR + xi);
    const double p = pR * std::pow(base, 2.0 * gm / (gm - 1.0));
    return PipeState::from_primitive(rho, u, p, g);
  }
  return UR;
}

namespace detail {

inline double rho_from_sound_speed(double c, double kappa, const GasConstants& g) {
  return std::pow(c * c / (kappa * g.gamma), 1.0 / (g.gamma - 1.0));
}

/// State inside an isentropic rarefaction fan at x/t = xi.
inline PipeState iso_fan_state(const PipeState& outer, int family, double xi, const GasConstants& g) {
  const double gm = g.gamma;
  const double kappa = outer.kappa;
  const double c_out = sound_speed(outer, g);
  if (outer.model == Model::M2) {
    const double u_out = outer.velocity();
    double c = 0.0, u = 0.0;
    if (family == 1) {
      const double J = u_out + 2.0 * c_out / (gm - 1.0);
      c = (gm - 1.0) / (gm + 1.0) * (J - xi);
      u = xi + c;
    } else {
      const double J = u_out - 2.0 * c_out / (gm - 1.0);
      c = (gm - 1.0) / (gm + 1.0) * (xi - J);
      u = xi - c;
    }
    const double rho = rho_from_sound_speed(c, kappa, g);
    return PipeState::isentropic(Model::M2, rho, rho * u, kappa);
  }
  const double c = family == 1 ? -xi : xi;
  const double rho = rho_from_sound_speed(c, kappa, g);
  const double q = family == 1 ? outer.q - theta3(rho, outer.rho, kappa, g) : outer.q + theta3(rho, outer.rho, kappa, g);
  return PipeState::isentropic(Model::M3, rho, q, kappa);
}

}  // namespace detail

inline PipeState sample_solution(const RiemannSolutionIso& sol, const PipeState& UL, const PipeState& UR, double xi,
                                 const GasConstants& g) {
  const WaveFan& w1 = sol.waves[0];
  const WaveFan& w2 = sol.waves[1];
  if (xi < w1.lo) return UL;
  if (w1.type == WaveType::Rarefaction && xi < w1.hi) return detail::iso_fan_state(UL, 1, xi, g);
  if (w2.type == WaveType::Shock) return xi < w2.lo ? sol.star() : UR;
  if (xi < w2.lo) return sol.star();
  if (xi < w2.hi) return detail::iso_fan_state(UR, 2, xi, g);
  return UR;
}

}  // namespace gasnet
