#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "gasnet/error.hpp"
#include "gasnet/junction.hpp"
#include "gasnet/lax_curves.hpp"
#include "gasnet/newton.hpp"

namespace gasnet {

enum class CompressorMode { AdiabaticEnthalpy, Power };  // (CP1) and (CP2)

struct CompressorControl {
  CompressorMode mode = CompressorMode::AdiabaticEnthalpy;
  double value = 0.0;  ///< H* in J/kg, or P* in W
  double Cp = 1.0;     ///< compressor coefficient, Power mode only

  static CompressorControl head(double H) { return {CompressorMode::AdiabaticEnthalpy, H, 1.0}; }
  static CompressorControl power(double P, double Cp) { return {CompressorMode::Power, P, Cp}; }
};

class CompressorProblem {
 public:
  CompressorProblem(JunctionPipe inlet, JunctionPipe outlet, CompressorControl control, GasConstants gas)
      : inlet_(std::move(inlet)), outlet_(std::move(outlet)), control_(control), gas_(gas) {
    gas_.validate();
    if (inlet_.spec.orientation != Orientation::Incoming || outlet_.spec.orientation != Orientation::Outgoing)
      fail(ErrorCode::InvalidArgument, "compressor needs an incoming inlet and an outgoing outlet");
    for (const auto* p : {&inlet_, &outlet_}) {
      const std::string err = pipe_consistency_error(p->spec, p->state, gas_);
      if (!err.empty()) {
        const ErrorCode code = err.find("subsonic") != std::string::npos ? ErrorCode::NotSubsonic : ErrorCode::InvalidArgument;
        fail(code, "pipe '" + p->spec.id + "': " + err);
      }
    }
    if (std::abs(inlet_.spec.area - outlet_.spec.area) > 1e-12 * inlet_.spec.area)
      fail(ErrorCode::InvalidArgument, "compressor pipes must share the same cross-section");
    if (!(control_.value >= 0.0)) fail(ErrorCode::InvalidArgument, "compressor control value must be non-negative");
    if (control_.mode == CompressorMode::Power && !(control_.Cp > 0.0))
      fail(ErrorCode::InvalidArgument, "compressor coefficient C_p must be positive");
  }

  const JunctionPipe& inlet() const { return inlet_; }
  const JunctionPipe& outlet() const { return outlet_; }
  const CompressorControl& control() const { return control_; }
  const GasConstants& gas() const { return gas_; }
  bool m1_outlet() const { return outlet_.spec.model == Model::M1; }
  std::size_t dim() const { return m1_outlet() ? 3 : 2; }

  /// C = R gamma/(gamma-1), times C_p in Power mode.
  double coefficient() const {
    const double c = gas_.R * gas_.gamma / (gas_.gamma - 1.0);
    return control_.mode == CompressorMode::Power ? control_.Cp * c : c;
  }

  CompressorProblem with_states(const PipeState& in, const PipeState& out) const {
    JunctionPipe a = inlet_, b = outlet_;
    a.state = in;
    b.state = out;
    return CompressorProblem(a, b, control_, gas_);
  }

  CompressorProblem with_control(CompressorControl c) const { return CompressorProblem(inlet_, outlet_, c, gas_); }

 private:
  JunctionPipe inlet_, outlet_;
  CompressorControl control_;
  GasConstants gas_;
};

struct CompressorParams {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double tau2 = 0.0;
};

inline CompressorParams base_params(const CompressorProblem& pb) {
  return {base_parameter(pb.inlet().state, pb.gas()), base_parameter(pb.outlet().state, pb.gas()), 0.0};
}

namespace detail {

struct CompressorEval {
  TraceEval in, out;
};

inline CompressorEval eval_compressor(const CompressorParams& p, const CompressorProblem& pb) {
  const auto& g = pb.gas();
  return {evaluate_trace(pipe_role(pb.inlet().spec), p.sigma1, 0.0, pb.inlet().state, g),
          evaluate_trace(pipe_role(pb.outlet().spec), p.sigma2, p.tau2, pb.outlet().state, g)};
}

}  // namespace detail

inline Eigen::VectorXd phi_compressor(const CompressorParams& p, const CompressorProblem& pb) {
  const auto e = detail::eval_compressor(p, pb);
  const double a = (pb.gas().gamma - 1.0) / pb.gas().gamma;
  const double C = pb.coefficient();
  Eigen::VectorXd r(static_cast<Eigen::Index>(pb.dim()));
  r(0) = e.in.q + e.out.q;
  double head = C * e.in.T * (std::pow(e.out.p / e.in.p, a) - 1.0);
  if (pb.control().mode == CompressorMode::Power) {
    if (!(e.out.q > 0.0)) fail(ErrorCode::NonPositiveFlux, "outlet mass flux must be positive in power mode");
    head *= e.out.q;
  }
  r(1) = head - pb.control().value;
  if (pb.m1_outlet()) r(2) = e.in.s - e.out.s;
  return r;
}

inline Eigen::MatrixXd compressor_jacobian(const CompressorParams& p, const CompressorProblem& pb,
                                           JacobianMode mode = JacobianMode::Analytic) {
  const auto n = static_cast<Eigen::Index>(pb.dim());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  if (mode == JacobianMode::FiniteDifference) {
    for (Eigen::Index c = 0; c < n; ++c) {
      CompressorParams pp = p, pm = p;
      double* vp = c == 0 ? &pp.sigma1 : c == 1 ? &pp.sigma2 : &pp.tau2;
      double* vm = c == 0 ? &pm.sigma1 : c == 1 ? &pm.sigma2 : &pm.tau2;
      const double scale = c == 2 ? std::max(std::abs(p.tau2), pb.outlet().state.rho) : std::abs(*vp);
      const double h = 1e-6 * scale;
      *vp += h;
      *vm -= h;
      J.col(c) = (phi_compressor(pp, pb) - phi_compressor(pm, pb)) / (*vp - *vm);
    }
    return J;
  }
  const auto e = detail::eval_compressor(p, pb);
  const double a = (pb.gas().gamma - 1.0) / pb.gas().gamma;
  const double C = pb.coefficient();
  const double ratio_a = std::pow(e.out.p / e.in.p, a);
  const double Z = ratio_a - 1.0;
  const double T1 = e.in.T;
  // d/dsigma1 and d/dsigma2, d/dtau2 of C T1 Z
  double d1 = C * (e.in.d.dT_dsigma * Z - T1 * a * ratio_a * e.in.d.dp_dsigma / e.in.p);
  double d2 = C * T1 * a * ratio_a * e.out.d.dp_dsigma / e.out.p;
  double d3 = C * T1 * a * ratio_a * e.out.d.dp_dtau / e.out.p;
  if (pb.control().mode == CompressorMode::Power) {
    const double q2 = e.out.q;
    d1 *= q2;
    d2 = d2 * q2 + C * T1 * Z * e.out.d.dq_dsigma;
    d3 = d3 * q2 + C * T1 * Z * e.out.d.dq_dtau;
  }
  J(0, 0) = e.in.d.dq_dsigma;
  J(0, 1) = e.out.d.dq_dsigma;
  J(1, 0) = d1;
  J(1, 1) = d2;
  if (pb.m1_outlet()) {
    J(0, 2) = e.out.d.dq_dtau;
    J(1, 2) = d3;
    J(2, 0) = e.in.d.ds_dsigma;
    J(2, 1) = -e.out.d.ds_dsigma;
    J(2, 2) = -e.out.d.ds_dtau;
  }
  return J;
}

struct CompressorSolution {
  StarSolution star;  ///< two entries: inlet, outlet
  double pressure_ratio = 0.0;
  double head = 0.0;   ///< realized C T1 ((p2/p1)^((gamma-1)/gamma) - 1), CP1 coefficient
  double power = 0.0;  ///< C_p q2 head
  double control_residual = 0.0;
};

inline CompressorSolution solve_compressor(const CompressorProblem& pb, const JunctionOptions& opt = {}) {
  const auto& g = pb.gas();
  const std::size_t n = pb.dim();
  auto to_params = [&](const Eigen::VectorXd& x) {
    return CompressorParams{x(0), x(1), n == 3 ? x(2) : 0.0};
  };
  auto residual = [&](const Eigen::VectorXd& x) { return phi_compressor(to_params(x), pb); };
  auto jacobian = [&](const Eigen::VectorXd& x) { return compressor_jacobian(to_params(x), pb); };
  auto admissible = [&](const Eigen::VectorXd& x) {
    if (!(x(0) > 0.0) || !(x(1) > 0.0)) return false;
    try {
      const auto e = detail::eval_compressor(to_params(x), pb);
      validate_state(e.in.state);
      validate_state(e.out.state);
      return classify_subsonic(e.in.state, g) == SubsonicClass::DMinus &&
             classify_subsonic(e.out.state, g) == SubsonicClass::DPlus;
    } catch (const Error&) {
      return false;
    }
  };
  const CompressorParams b = base_params(pb);
  Eigen::VectorXd x0(static_cast<Eigen::Index>(n));
  x0(0) = b.sigma1;
  x0(1) = b.sigma2;
  if (n == 3) x0(2) = 0.0;
  const double T1 = temperature(pb.inlet().state, g);
  Eigen::VectorXd scale(static_cast<Eigen::Index>(n));
  scale(0) = std::max(std::abs(pb.inlet().state.q), 1e-300);
  scale(1) = pb.coefficient() * T1 * (pb.control().mode == CompressorMode::Power ? std::abs(pb.outlet().state.q) : 1.0);
  if (n == 3) scale(2) = g.cv;

  const NewtonResult nr = damped_newton(residual, jacobian, admissible, x0, scale, opt.newton);
  const CompressorParams p = to_params(nr.x);
  const auto e = detail::eval_compressor(p, pb);
  if (classify_subsonic(e.in.state, g) != SubsonicClass::DMinus || classify_subsonic(e.out.state, g) != SubsonicClass::DPlus)
    fail(ErrorCode::SubsonicViolation, "a compressor star state left its subsonic region");

  CompressorSolution cs;
  StarSolution& s = cs.star;
  s.star_states = {e.in.state, e.out.state};
  s.wave_states = {e.in.intermediate, e.out.intermediate};
  s.sigma = {p.sigma1, p.sigma2};
  s.tau = {0.0, p.tau2};
  s.s_star = e.in.s;
  s.assigned_entropy = {e.in.s, pb.m1_outlet() ? e.out.s : e.in.s};
  s.residual_norm = nr.residual.lpNorm<Eigen::Infinity>();
  s.scaled_residual = nr.scaled_norm;
  s.iterations = nr.iterations;
  const double a = (g.gamma - 1.0) / g.gamma;
  cs.pressure_ratio = e.out.p / e.in.p;
  cs.head = g.R * g.gamma / (g.gamma - 1.0) * e.in.T * (std::pow(cs.pressure_ratio, a) - 1.0);
  cs.power = (pb.control().mode == CompressorMode::Power ? pb.control().Cp : 1.0) * e.out.q * cs.head;
  cs.control_residual = std::abs(nr.residual(1));
  s.h_star = cs.head;
  if (pb.control().value == 0.0)
    s.warnings.push_back("idle compressor (control value 0) lies outside the uniqueness neighbourhood");
  return cs;
}

struct CompressorDiagnostics {
  double mass_residual = 0.0;
  double control_residual = 0.0;
  double entropy_residual = 0.0;       ///< |s1 - s2|, M1 outlet only
  double temperature_ratio_error = 0.0;  ///< |T2/T1 - (p2/p1)^((gamma-1)/gamma)| relative, M1 outlet only
};

inline CompressorDiagnostics verify_compressor(const CompressorSolution& sol, const CompressorProblem& pb) {
  const auto& g = pb.gas();
  const auto& in = sol.star.star_states[0];
  const auto& out = sol.star.star_states[1];
  CompressorDiagnostics d;
  d.mass_residual = std::abs(in.q + out.q);
  const double a = (g.gamma - 1.0) / g.gamma;
  const double p1 = pressure(in, g), p2 = pressure(out, g);
  const double T1 = temperature(in, g), T2 = temperature(out, g);
  double lhs = pb.coefficient() * T1 * (std::pow(p2 / p1, a) - 1.0);
  if (pb.control().mode == CompressorMode::Power) lhs *= out.q;
  d.control_residual = std::abs(lhs - pb.control().value);
  if (pb.m1_outlet()) {
    d.entropy_residual = std::abs(entropy(in, g) - entropy(out, g));
    const double target = std::pow(p2 / p1, a);
    d.temperature_ratio_error = std::abs(T2 / T1 - target) / target;
  }
  return d;
}

}  // namespace gasnet
