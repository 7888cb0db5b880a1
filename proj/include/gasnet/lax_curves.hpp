#pragma once

#include <cmath>
#include <string>

#include "gasnet/error.hpp"
#include "gasnet/riemann.hpp"
#include "gasnet/thermo.hpp"

namespace gasnet {

/// Curve parameters: sigma is a pressure on M1 acoustic curves and a density
/// on isentropic curves; tau is the density increment along the M1 contact.
struct LaxParam {
  double sigma = 0.0;
  double tau = 0.0;
};

/// Natural curve parameter of a state: p for M1, rho for M2/M3.
inline double base_parameter(const PipeState& s, const GasConstants& g) {
  return s.model == Model::M1 ? pressure(s, g) : s.rho;
}

inline PipeState lax_m1(int family, LaxParam param, const PipeState& base, const GasConstants& g) {
  detail::require_model(base, Model::M1, "lax_m1");
  if (family == 2) {
    if (param.tau == 0.0) return base;
    const double u = base.velocity();
    const double rho = base.rho + param.tau;
    if (!(rho > 0.0)) fail(ErrorCode::NonPositiveDensity, "contact curve left the positive-density region");
    return PipeState::euler(rho, base.q + param.tau * u, base.E + 0.5 * param.tau * u * u);
  }
  if (family != 1 && family != 3) fail(ErrorCode::InvalidArgument, "M1 family must be 1, 2 or 3");
  if (!(param.sigma > 0.0)) fail(ErrorCode::NonPositivePressure, "curve parameter sigma must be positive");
  const double pk = pressure(base, g);
  if (param.sigma == pk) return base;
  const double rho = detail::phi(param.sigma, base.rho, pk, g);
  const double dpsi = detail::psi(param.sigma, base.rho, pk, g);
  const double u = family == 1 ? base.velocity() - dpsi : base.velocity() + dpsi;
  return PipeState::euler(rho, rho * u, param.sigma / (g.gamma - 1.0) + 0.5 * rho * u * u);
}

inline PipeState lax_iso(Model model, int family, double sigma, const PipeState& base, const GasConstants& g) {
  if (model == Model::M1) fail(ErrorCode::InvalidArgument, "lax_iso requires model M2 or M3");
  detail::require_model(base, model, "lax_iso");
  if (family != 1 && family != 2) fail(ErrorCode::InvalidArgument, "isentropic family must be 1 or 2");
  if (!(sigma > 0.0)) fail(ErrorCode::NonPositiveDensity, "curve parameter sigma must be positive");
  if (sigma == base.rho) return base;
  const double sgn = family == 1 ? -1.0 : 1.0;
  if (model == Model::M2) {
    const double th = detail::theta2(sigma, base.rho, base.kappa, g);
    return PipeState::isentropic(model, sigma, base.velocity() * sigma + sgn * th, base.kappa);
  }
  const double th = detail::theta3(sigma, base.rho, base.kappa, g);
  return PipeState::isentropic(model, sigma, base.q + sgn * th, base.kappa);
}

// ---------------------------------------------------------------------------
// Junction traces. In pipe coordinates every pipe leaves the junction, so
// incoming M1 pipes use the 3-curve, outgoing M1 pipes the 2-curve composed
// with the 3-curve, and isentropic pipes the 2-curve.
// ---------------------------------------------------------------------------

enum class PipeRole { M1Outgoing, M1Incoming, Isentropic };

inline std::string_view to_string(PipeRole r) {
  switch (r) {
    case PipeRole::M1Outgoing: return "M1_out";
    case PipeRole::M1Incoming: return "M1_in";
    case PipeRole::Isentropic: return "iso_in_or_out";
  }
  return "?";
}

struct CurveDerivatives {
  double dq_dsigma = 0.0, dh_dsigma = 0.0, ds_dsigma = 0.0, dp_dsigma = 0.0, dT_dsigma = 0.0;
  double dq_dtau = 0.0, dh_dtau = 0.0, ds_dtau = 0.0, dp_dtau = 0.0, dT_dtau = 0.0;
};

/// Trace state plus the coupling quantities and their parameter derivatives.
struct TraceEval {
  PipeState state;
  PipeState intermediate;  ///< state behind the 3-wave (M1 outgoing); equals `state` otherwise
  double q = 0.0, h = 0.0, s = 0.0, p = 0.0, T = 0.0;
  CurveDerivatives d;
};

inline TraceEval evaluate_trace(PipeRole role, double sigma, double tau, const PipeState& base, const GasConstants& g) {
  TraceEval ev;
  const double gm = g.gamma;
  if (role == PipeRole::Isentropic) {
    if (base.model == Model::M1) fail(ErrorCode::InvalidArgument, "isentropic role needs an M2/M3 state");
    ev.state = lax_iso(base.model, 2, sigma, base, g);
    ev.intermediate = ev.state;
    const double kappa = base.kappa;
    const double rho = sigma;
    const double u = ev.state.velocity();
    ev.q = ev.state.q;
    ev.p = kappa * std::pow(rho, gm);
    ev.T = ev.p / (rho * g.R);
    ev.s = isentropic_entropy(kappa, g);
    const double hp = kappa * gm * std::pow(rho, gm - 1.0) / (gm - 1.0);
    if (base.model == Model::M2) {
      ev.h = hp + 0.5 * u * u;
      ev.d.dq_dsigma = base.velocity() + detail::dtheta2(sigma, base.rho, kappa, g);
      ev.d.dh_dsigma = kappa * gm * std::pow(rho, gm - 2.0) + u * (ev.d.dq_dsigma - u) / rho;
    } else {
      ev.h = hp;
      ev.d.dq_dsigma = detail::dtheta3(sigma, base.rho, kappa, g);
      ev.d.dh_dsigma = kappa * gm * std::pow(rho, gm - 2.0);
    }
    ev.d.dp_dsigma = kappa * gm * std::pow(rho, gm - 1.0);
    ev.d.dT_dsigma = (gm - 1.0) * kappa * std::pow(rho, gm - 2.0) / g.R;
    return ev;
  }

  detail::require_model(base, Model::M1, "evaluate_trace");
  if (role == PipeRole::M1Incoming) tau = 0.0;
  const PipeState w = lax_m1(3, {sigma, 0.0}, base, g);
  ev.intermediate = w;
  ev.state = lax_m1(2, {0.0, tau}, w, g);
  const double pk = pressure(base, g);
  const double dphi = detail::dphi(sigma, base.rho, pk, g);
  const double dpsi = detail::dpsi(sigma, base.rho, pk, g);
  const double rho = ev.state.rho;
  const double u = w.velocity();
  ev.q = ev.state.q;
  ev.p = sigma;
  ev.T = sigma / (rho * g.R);
  ev.h = gm * sigma / ((gm - 1.0) * rho) + 0.5 * u * u;
  ev.s = g.cv * std::log(sigma / std::pow(rho, gm)) + g.s0;
  ev.d.dq_dsigma = dphi * u + rho * dpsi;
  ev.d.dh_dsigma = gm / ((gm - 1.0) * rho) - gm * sigma * dphi / ((gm - 1.0) * rho * rho) + u * dpsi;
  ev.d.ds_dsigma = g.cv * (1.0 / sigma - gm * dphi / rho);
  ev.d.dp_dsigma = 1.0;
  ev.d.dT_dsigma = 1.0 / (rho * g.R) - sigma * dphi / (rho * rho * g.R);
  if (role == PipeRole::M1Outgoing) {
    ev.d.dq_dtau = u;
    ev.d.dh_dtau = -gm * sigma / ((gm - 1.0) * rho * rho);
    ev.d.ds_dtau = -gm * g.cv / rho;
    ev.d.dT_dtau = -sigma / (rho * rho * g.R);
  }
  return ev;
}

/// Closed-form derivatives at (sigma, tau) = (base parameter, 0).
inline CurveDerivatives curve_derivatives_at_base(PipeRole role, const PipeState& base, const GasConstants& g) {
  validate_state(base);
  const double u = base.velocity();
  const double c = sound_speed(base, g);
  if (!(std::abs(u) < c)) fail(ErrorCode::NotSubsonic, "base state is not subsonic");
  const double gm = g.gamma;
  const double rho = base.rho;
  CurveDerivatives d;
  if (role == PipeRole::Isentropic) {
    if (base.model == Model::M1) fail(ErrorCode::InvalidArgument, "isentropic role needs an M2/M3 state");
    const double lambda2 = base.model == Model::M2 ? u + c : c;
    d.dq_dsigma = lambda2;
    d.dh_dsigma = lambda2 * c / rho;
    d.dp_dsigma = c * c;
    d.dT_dsigma = (gm - 1.0) * base.kappa * std::pow(rho, gm - 2.0) / g.R;
    return d;
  }
  detail::require_model(base, Model::M1, "curve_derivatives_at_base");
  const double lambda3 = u + c;
  d.dq_dsigma = lambda3 / (c * c);
  d.dh_dsigma = lambda3 / (c * rho);
  d.ds_dsigma = 0.0;
  d.dp_dsigma = 1.0;
  d.dT_dsigma = (gm - 1.0) / (gm * g.R * rho);
  if (role == PipeRole::M1Outgoing) {
    d.dq_dtau = u;
    d.dh_dtau = -c * c / ((gm - 1.0) * rho);
    d.ds_dtau = -gm * g.cv / rho;
    d.dT_dtau = -pressure(base, g) / (rho * rho * g.R);
  }
  return d;
}

// ---------------------------------------------------------------------------
// Forward wave curves in pipe coordinates: the state on the right of a
// single k-wave whose left state is given. Strength is param(right) -
// param(left), with param = p on M1 families 1/3 and rho otherwise.
// ---------------------------------------------------------------------------

inline int family_count(Model m) { return m == Model::M1 ? 3 : 2; }

inline double wave_parameter(int family, const PipeState& s, const GasConstants& g) {
  if (s.model == Model::M1 && family != 2) return pressure(s, g);
  return s.rho;
}

/// True when a k-wave from `left` to `right` is compressive.
inline bool is_compressive(int family, const PipeState& left, const PipeState& right, const GasConstants& g) {
  const double w = wave_parameter(family, right, g) - wave_parameter(family, left, g);
  if (left.model == Model::M1 && family == 2) return false;
  return family == 1 ? w > 0.0 : w < 0.0;
}

inline PipeState wave_curve_forward(int family, double strength, const PipeState& left, const GasConstants& g) {
  const double gm = g.gamma;
  if (strength == 0.0) return left;
  if (left.model == Model::M1) {
    const double pL = pressure(left, g);
    if (family == 1) return lax_m1(1, {pL + strength, 0.0}, left, g);
    if (family == 2) return lax_m1(2, {0.0, strength}, left, g);
    if (family != 3) fail(ErrorCode::InvalidArgument, "M1 family must be 1, 2 or 3");
    const double pR = pL + strength;
    if (!(pR > 0.0)) fail(ErrorCode::NonPositivePressure, "3-wave strength drives pressure non-positive");
    const double uL = left.velocity();
    double rhoR = 0.0, uR = 0.0;
    if (pR > pL) {
      rhoR = left.rho * std::pow(pR / pL, 1.0 / gm);
      const double cL = std::sqrt(gm * pL / left.rho), cR = std::sqrt(gm * pR / rhoR);
      uR = uL + 2.0 * (cR - cL) / (gm - 1.0);
    } else {
      const double m2 = detail::mu2(g);
      rhoR = left.rho * (pR + m2 * pL) / (m2 * pR + pL);
      uR = uL - std::sqrt((pL - pR) * (1.0 / rhoR - 1.0 / left.rho));
    }
    return PipeState::from_primitive(rhoR, uR, pR, g);
  }
  if (family == 1) return lax_iso(left.model, 1, left.rho + strength, left, g);
  if (family != 2) fail(ErrorCode::InvalidArgument, "isentropic family must be 1 or 2");
  const double kappa = left.kappa;
  const double rhoL = left.rho, rhoR = left.rho + strength;
  if (!(rhoR > 0.0)) fail(ErrorCode::NonPositiveDensity, "2-wave strength drives density non-positive");
  const double pL = kappa * std::pow(rhoL, gm), pR = kappa * std::pow(rhoR, gm);
  if (left.model == Model::M3) {
    const double dq = rhoR > rhoL ? -detail::theta3(rhoL, rhoR, kappa, g) : -std::sqrt((rhoL - rhoR) * (pL - pR));
    return PipeState::isentropic(Model::M3, rhoR, left.q + dq, kappa);
  }
  const double uL = left.velocity();
  double uR = 0.0;
  if (rhoR > rhoL) {
    const double cL = std::sqrt(gm * pL / rhoL), cR = std::sqrt(gm * pR / rhoR);
    uR = uL + 2.0 * (cR - cL) / (gm - 1.0);
  } else {
    uR = uL - std::sqrt((pL - pR) * (1.0 / rhoR - 1.0 / rhoL));
  }
  return PipeState::isentropic(Model::M2, rhoR, rhoR * uR, kappa);
}

}  // namespace gasnet
