#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "gasnet/error.hpp"
#include "gasnet/lax_curves.hpp"
#include "gasnet/newton.hpp"
#include "gasnet/thermo.hpp"

namespace gasnet {

/// Orientation with respect to the flow. In pipe coordinates (x >= 0 away
/// from the junction) incoming pipes carry u < 0 and outgoing pipes u > 0.
enum class Orientation { Incoming, Outgoing };

inline std::string_view to_string(Orientation o) { return o == Orientation::Incoming ? "incoming" : "outgoing"; }

struct PipeSpec {
  std::string id;
  double area = 1.0;  ///< cross-section ||nu||
  Model model = Model::M1;
  Orientation orientation = Orientation::Outgoing;
};

inline PipeRole pipe_role(Model m, Orientation o) {
  if (m != Model::M1) return PipeRole::Isentropic;
  return o == Orientation::Incoming ? PipeRole::M1Incoming : PipeRole::M1Outgoing;
}

inline PipeRole pipe_role(const PipeSpec& p) { return pipe_role(p.model, p.orientation); }

struct JunctionPipe {
  PipeSpec spec;
  PipeState state;
};

/// Checks a pipe's spec against its attached state. Returns an empty string when consistent.
inline std::string pipe_consistency_error(const PipeSpec& spec, const PipeState& s, const GasConstants& g) {
  if (!(spec.area > 0.0) || !std::isfinite(spec.area)) return "area must be positive";
  if (s.model != spec.model) return "state model does not match the pipe model";
  try {
    validate_state(s);
  } catch (const Error& e) {
    return e.what();
  }
  const SubsonicClass c = classify_subsonic(s, g);
  if (c == SubsonicClass::NotSubsonic) return "state is not subsonic with a definite flow direction";
  const SubsonicClass want = spec.orientation == Orientation::Incoming ? SubsonicClass::DMinus : SubsonicClass::DPlus;
  if (c != want) return "flow direction contradicts the declared orientation";
  return {};
}

/// Internal ordering: outgoing M1 pipes, the enthalpy pivot (incoming pipe
/// of maximal entropy), the other incoming pipes (M1, M2, M3), and the
/// outgoing isentropic pipes.
struct JunctionLayout {
  std::vector<std::size_t> order;  ///< internal position -> user index
  std::vector<std::size_t> slot;   ///< user index -> internal position
  std::size_t n0 = 0;              ///< outgoing M1 pipes
  std::size_t n3 = 0;              ///< n0 + number of incoming pipes
  std::size_t size() const { return order.size(); }
  std::size_t dim() const { return order.size() + n0; }
  std::size_t pivot() const { return n0; }
};

class JunctionProblem {
 public:
  JunctionProblem(std::vector<JunctionPipe> pipes, GasConstants gas) : pipes_(std::move(pipes)), gas_(gas) {
    gas_.validate();
    std::size_t n_in = 0;
    for (std::size_t j = 0; j < pipes_.size(); ++j) {
      const auto& p = pipes_[j];
      const std::string err = pipe_consistency_error(p.spec, p.state, gas_);
      if (!err.empty()) {
        const ErrorCode code = err.find("subsonic") != std::string::npos ? ErrorCode::NotSubsonic : ErrorCode::InvalidArgument;
        fail(code, "pipe '" + p.spec.id + "': " + err);
      }
      if (p.spec.orientation == Orientation::Incoming) ++n_in;
    }
    if (n_in == 0 || n_in >= pipes_.size())
      fail(ErrorCode::InvalidArgument, "junction needs at least one incoming and one outgoing pipe (N > dim(I_i) > 0)");
    build_layout();
  }

  const std::vector<JunctionPipe>& pipes() const { return pipes_; }
  const GasConstants& gas() const { return gas_; }
  const JunctionLayout& layout() const { return layout_; }
  std::size_t size() const { return pipes_.size(); }
  PipeRole role(std::size_t j) const { return pipe_role(pipes_[j].spec); }

  /// Same topology, new constant states.
  JunctionProblem with_states(const std::vector<PipeState>& states) const {
    auto p = pipes_;
    for (std::size_t j = 0; j < p.size(); ++j) p[j].state = states.at(j);
    return JunctionProblem(std::move(p), gas_);
  }

  JunctionProblem with_areas(const std::vector<double>& areas) const {
    auto p = pipes_;
    for (std::size_t j = 0; j < p.size(); ++j) p[j].spec.area = areas.at(j);
    return JunctionProblem(std::move(p), gas_);
  }

 private:
  void build_layout() {
    const std::size_t N = pipes_.size();
    auto group = [&](Model m, Orientation o) {
      std::vector<std::size_t> v;
      for (std::size_t j = 0; j < N; ++j)
        if (pipes_[j].spec.model == m && pipes_[j].spec.orientation == o) v.push_back(j);
      return v;
    };
    std::size_t pivot = N;
    double best = -std::numeric_limits<double>::infinity();
    for (Model m : {Model::M1, Model::M2, Model::M3})
      for (std::size_t j : group(m, Orientation::Incoming)) {
        const double s = entropy(pipes_[j].state, gas_);
        if (s > best) best = s, pivot = j;
      }
    auto& L = layout_;
    for (std::size_t j : group(Model::M1, Orientation::Outgoing)) L.order.push_back(j);
    L.n0 = L.order.size();
    L.order.push_back(pivot);
    for (Model m : {Model::M1, Model::M2, Model::M3})
      for (std::size_t j : group(m, Orientation::Incoming))
        if (j != pivot) L.order.push_back(j);
    L.n3 = L.order.size();
    for (Model m : {Model::M2, Model::M3})
      for (std::size_t j : group(m, Orientation::Outgoing)) L.order.push_back(j);
    L.slot.assign(N, 0);
    for (std::size_t k = 0; k < N; ++k) L.slot[L.order[k]] = k;
  }

  std::vector<JunctionPipe> pipes_;
  GasConstants gas_;
  JunctionLayout layout_;
};

/// Wave parameters, indexed by user pipe order. `tau` is read only for
/// outgoing M1 pipes.
struct JunctionParams {
  std::vector<double> sigma;
  std::vector<double> tau;
};

inline JunctionParams base_params(const JunctionProblem& pb) {
  JunctionParams p;
  for (const auto& pipe : pb.pipes()) {
    p.sigma.push_back(base_parameter(pipe.state, pb.gas()));
    p.tau.push_back(0.0);
  }
  return p;
}

inline Eigen::VectorXd pack(const JunctionParams& p, const JunctionLayout& L) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(L.dim()));
  for (std::size_t k = 0; k < L.size(); ++k) x(static_cast<Eigen::Index>(k)) = p.sigma[L.order[k]];
  for (std::size_t k = 0; k < L.n0; ++k) x(static_cast<Eigen::Index>(L.size() + k)) = p.tau[L.order[k]];
  return x;
}

inline JunctionParams unpack(const Eigen::VectorXd& x, const JunctionLayout& L) {
  JunctionParams p;
  p.sigma.assign(L.size(), 0.0);
  p.tau.assign(L.size(), 0.0);
  for (std::size_t k = 0; k < L.size(); ++k) p.sigma[L.order[k]] = x(static_cast<Eigen::Index>(k));
  for (std::size_t k = 0; k < L.n0; ++k) p.tau[L.order[k]] = x(static_cast<Eigen::Index>(L.size() + k));
  return p;
}

inline std::vector<TraceEval> evaluate_traces(const JunctionParams& p, const JunctionProblem& pb) {
  std::vector<TraceEval> ev;
  ev.reserve(pb.size());
  for (std::size_t j = 0; j < pb.size(); ++j)
    ev.push_back(evaluate_trace(pb.role(j), p.sigma[j], p.tau[j], pb.pipes()[j].state, pb.gas()));
  return ev;
}

namespace detail {

struct Mix {
  double s_star = 0.0;
  double denom = 0.0;
};

inline Mix entropy_mix_from(const std::vector<TraceEval>& ev, const JunctionProblem& pb) {
  double num = 0.0, den = 0.0, scale = 0.0;
  for (std::size_t j = 0; j < pb.size(); ++j) {
    if (pb.pipes()[j].spec.orientation != Orientation::Incoming) continue;
    const double a = pb.pipes()[j].spec.area;
    num += a * ev[j].q * ev[j].s;
    den += a * ev[j].q;
    scale += a * std::abs(ev[j].q);
  }
  if (!(std::abs(den) >= 1e-12 * scale) || scale == 0.0) fail(ErrorCode::SingularEntropyMix, "incoming mass flux vanishes");
  return {num / den, den};
}

}  // namespace detail

/// Flux-weighted entropy of the incoming pipes.
inline double entropy_mix(const JunctionProblem& pb, const JunctionParams& p) {
  return detail::entropy_mix_from(evaluate_traces(p, pb), pb).s_star;
}

inline double entropy_mix(const JunctionProblem& pb) { return entropy_mix(pb, base_params(pb)); }

inline Eigen::VectorXd assemble_phi(const JunctionParams& p, const JunctionProblem& pb) {
  const auto& L = pb.layout();
  const std::size_t N = L.size();
  const auto ev = evaluate_traces(p, pb);
  const double s_star = detail::entropy_mix_from(ev, pb).s_star;
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(L.dim()));
  double mass = 0.0;
  for (std::size_t j = 0; j < N; ++j) mass += pb.pipes()[j].spec.area * ev[j].q;
  phi(0) = mass;
  const double h_pivot = ev[L.order[L.pivot()]].h;
  for (std::size_t k = 0; k < N; ++k) {
    if (k == L.pivot()) continue;
    const auto row = static_cast<Eigen::Index>(k < L.n0 ? k + 1 : k);
    phi(row) = h_pivot - ev[L.order[k]].h;
  }
  for (std::size_t k = 0; k < L.n0; ++k) phi(static_cast<Eigen::Index>(N + k)) = ev[L.order[k]].s - s_star;
  return phi;
}

enum class JacobianMode { Analytic, FiniteDifference };

namespace detail {

/// Fills the Jacobian from per-pipe derivatives and s* derivatives, both in user order.
inline Eigen::MatrixXd jacobian_from(const JunctionProblem& pb, const std::vector<CurveDerivatives>& d,
                                     const std::vector<double>& ds_star) {
  const auto& L = pb.layout();
  const std::size_t N = L.size();
  const auto n = static_cast<Eigen::Index>(L.dim());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t k = 0; k < N; ++k) {
    const std::size_t j = L.order[k];
    const double a = pb.pipes()[j].spec.area;
    J(0, static_cast<Eigen::Index>(k)) = a * d[j].dq_dsigma;
    if (k < L.n0) J(0, static_cast<Eigen::Index>(N + k)) = a * d[j].dq_dtau;
  }
  const std::size_t jp = L.order[L.pivot()];
  for (std::size_t k = 0; k < N; ++k) {
    if (k == L.pivot()) continue;
    const std::size_t j = L.order[k];
    const auto row = static_cast<Eigen::Index>(k < L.n0 ? k + 1 : k);
    J(row, static_cast<Eigen::Index>(L.pivot())) = d[jp].dh_dsigma;
    J(row, static_cast<Eigen::Index>(k)) = -d[j].dh_dsigma;
    if (k < L.n0) J(row, static_cast<Eigen::Index>(N + k)) = -d[j].dh_dtau;
  }
  for (std::size_t k = 0; k < L.n0; ++k) {
    const std::size_t j = L.order[k];
    const auto row = static_cast<Eigen::Index>(N + k);
    for (std::size_t m = L.n0; m < L.n3; ++m) J(row, static_cast<Eigen::Index>(m)) = -ds_star[L.order[m]];
    J(row, static_cast<Eigen::Index>(k)) += d[j].ds_dsigma;
    J(row, static_cast<Eigen::Index>(N + k)) = d[j].ds_dtau;
  }
  return J;
}

}  // namespace detail

inline Eigen::MatrixXd assemble_jacobian(const JunctionParams& p, const JunctionProblem& pb,
                                         JacobianMode mode = JacobianMode::Analytic) {
  const auto& L = pb.layout();
  if (mode == JacobianMode::FiniteDifference) {
    const Eigen::VectorXd x = pack(p, L);
    const auto n = x.size();
    Eigen::MatrixXd J(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
      double scale = std::abs(x(c));
      if (c >= static_cast<Eigen::Index>(L.size()))
        scale = std::max(scale, pb.pipes()[L.order[static_cast<std::size_t>(c) - L.size()]].state.rho);
      const double h = 1e-6 * scale;
      Eigen::VectorXd xp = x, xm = x;
      xp(c) += h;
      xm(c) -= h;
      J.col(c) = (assemble_phi(unpack(xp, L), pb) - assemble_phi(unpack(xm, L), pb)) / (xp(c) - xm(c));
    }
    return J;
  }
  const auto ev = evaluate_traces(p, pb);
  const auto mix = detail::entropy_mix_from(ev, pb);
  std::vector<CurveDerivatives> d;
  std::vector<double> ds_star(pb.size(), 0.0);
  for (std::size_t j = 0; j < pb.size(); ++j) {
    d.push_back(ev[j].d);
    if (pb.pipes()[j].spec.orientation == Orientation::Incoming) {
      const double a = pb.pipes()[j].spec.area;
      ds_star[j] = a * (ev[j].d.dq_dsigma * (ev[j].s - mix.s_star) + ev[j].q * ev[j].d.ds_dsigma) / mix.denom;
    }
  }
  return detail::jacobian_from(pb, d, ds_star);
}

/// Jacobian at the base point built from the closed-form base derivatives.
inline Eigen::MatrixXd base_jacobian(const JunctionProblem& pb) {
  const auto& g = pb.gas();
  std::vector<CurveDerivatives> d;
  double denom = 0.0;
  for (const auto& pipe : pb.pipes()) {
    d.push_back(curve_derivatives_at_base(pipe_role(pipe.spec), pipe.state, g));
    if (pipe.spec.orientation == Orientation::Incoming) denom += pipe.spec.area * pipe.state.q;
  }
  const double s_star = entropy_mix(pb);
  std::vector<double> ds_star(pb.size(), 0.0);
  for (std::size_t j = 0; j < pb.size(); ++j) {
    const auto& pipe = pb.pipes()[j];
    if (pipe.spec.orientation != Orientation::Incoming) continue;
    const double s = entropy(pipe.state, g);
    const double u = pipe.state.velocity(), c = sound_speed(pipe.state, g);
    if (pipe.spec.model == Model::M1) {
      ds_star[j] = pipe.spec.area * (u + c) * (s - s_star) / (c * c * denom);
    } else {
      const double lambda2 = pipe.spec.model == Model::M2 ? u + c : c;
      ds_star[j] = pipe.spec.area * lambda2 * (s - s_star) / denom;
    }
  }
  return detail::jacobian_from(pb, d, ds_star);
}

/// The 3x3 blocks D_j (rows: mass, enthalpy of j, entropy of j; columns:
/// sigma_j, sigma_pivot, tau_j) for every outgoing M1 pipe, internal order.
inline std::vector<Eigen::Matrix3d> determinant_blocks(const Eigen::MatrixXd& J, const JunctionLayout& L) {
  std::vector<Eigen::Matrix3d> blocks;
  const auto N = static_cast<Eigen::Index>(L.size());
  const auto pv = static_cast<Eigen::Index>(L.pivot());
  for (std::size_t k = 0; k < L.n0; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const Eigen::Index rows[3] = {0, kk + 1, N + kk};
    const Eigen::Index cols[3] = {kk, pv, N + kk};
    Eigen::Matrix3d D;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) D(r, c) = J(rows[r], cols[c]);
    blocks.push_back(D);
  }
  return blocks;
}

struct JunctionOptions {
  NewtonOptions newton{};
  /// Re-express outgoing isentropic star states with kappa(s*) (pressure
  /// and mass flux kept). Off by default: the coupling residual imposes no
  /// entropy equation on those pipes.
  bool update_isentropic_outlet_kappa = false;
};

struct StarSolution {
  std::vector<PipeState> star_states;  ///< traces at x = 0+, user order
  std::vector<PipeState> wave_states;  ///< states behind the 3-wave of M1 pipes; equal to the trace otherwise
  std::vector<double> sigma;
  std::vector<double> tau;
  std::vector<double> assigned_entropy;  ///< s* on outgoing pipes, own entropy on incoming ones
  double h_star = 0.0;
  double s_star = 0.0;
  double residual_norm = 0.0;  ///< raw infinity norm of the coupling residual
  double scaled_residual = 0.0;
  int iterations = 0;
  std::vector<std::string> warnings;
};

namespace detail {

inline Eigen::VectorXd junction_scales(const JunctionProblem& pb) {
  const auto& L = pb.layout();
  Eigen::VectorXd sc(static_cast<Eigen::Index>(L.dim()));
  double mass = 0.0;
  for (const auto& p : pb.pipes()) mass += p.spec.area * std::abs(p.state.q);
  const double h = std::abs(enthalpy(pb.pipes()[L.order[L.pivot()]].state, pb.gas()));
  sc.setConstant(h > 0.0 ? h : 1.0);
  sc(0) = mass > 0.0 ? mass : 1.0;
  for (std::size_t k = 0; k < L.n0; ++k) sc(static_cast<Eigen::Index>(L.size() + k)) = pb.gas().cv;
  return sc;
}

inline bool orientation_kept(const JunctionProblem& pb, const std::vector<TraceEval>& ev) {
  for (std::size_t j = 0; j < pb.size(); ++j) {
    try {
      validate_state(ev[j].state);
      const SubsonicClass c = classify_subsonic(ev[j].state, pb.gas());
      const SubsonicClass want =
          pb.pipes()[j].spec.orientation == Orientation::Incoming ? SubsonicClass::DMinus : SubsonicClass::DPlus;
      if (c != want) return false;
    } catch (const Error&) {
      return false;
    }
  }
  return true;
}

}  // namespace detail

inline StarSolution solve_junction(const JunctionProblem& pb, const JunctionOptions& opt = {}) {
  const auto& L = pb.layout();
  const auto& g = pb.gas();
  auto residual = [&](const Eigen::VectorXd& x) { return assemble_phi(unpack(x, L), pb); };
  auto jacobian = [&](const Eigen::VectorXd& x) { return assemble_jacobian(unpack(x, L), pb, JacobianMode::Analytic); };
  auto admissible = [&](const Eigen::VectorXd& x) {
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(L.size()); ++i)
      if (!(x(i) > 0.0)) return false;
    return detail::orientation_kept(pb, evaluate_traces(unpack(x, L), pb));
  };
  const NewtonResult nr = damped_newton(residual, jacobian, admissible, pack(base_params(pb), L), detail::junction_scales(pb), opt.newton);

  StarSolution sol;
  const JunctionParams p = unpack(nr.x, L);
  const auto ev = evaluate_traces(p, pb);
  if (!detail::orientation_kept(pb, ev)) fail(ErrorCode::SubsonicViolation, "a star state left its subsonic region");
  sol.sigma = p.sigma;
  sol.tau = p.tau;
  sol.s_star = detail::entropy_mix_from(ev, pb).s_star;
  sol.h_star = ev[L.order[L.pivot()]].h;
  for (std::size_t j = 0; j < pb.size(); ++j) {
    sol.star_states.push_back(ev[j].state);
    sol.wave_states.push_back(ev[j].intermediate);
    const bool out = pb.pipes()[j].spec.orientation == Orientation::Outgoing;
    sol.assigned_entropy.push_back(out && pb.pipes()[j].spec.model != Model::M1 ? sol.s_star : ev[j].s);
  }
  sol.residual_norm = nr.residual.lpNorm<Eigen::Infinity>();
  sol.scaled_residual = nr.scaled_norm;
  sol.iterations = nr.iterations;
  if (opt.update_isentropic_outlet_kappa) {
    const double kappa = kappa_from_entropy(sol.s_star, g);
    for (std::size_t j = 0; j < pb.size(); ++j) {
      auto& s = sol.star_states[j];
      if (s.model == Model::M1 || pb.pipes()[j].spec.orientation != Orientation::Outgoing) continue;
      const double pr = pressure(s, g);
      s = PipeState::isentropic(s.model, std::pow(pr / kappa, 1.0 / g.gamma), s.q, kappa);
      sol.wave_states[j] = s;
    }
    sol.warnings.push_back("outgoing isentropic star states carry kappa(s*); enthalpy equality is not preserved");
  }
  return sol;
}

struct CouplingDiagnostics {
  double mass_residual = 0.0;
  double max_enthalpy_spread = 0.0;  ///< (max h - min h) / |h*|
  double max_entropy_residual = 0.0;
};

/// Recomputes the coupling conditions from the star states alone.
inline CouplingDiagnostics verify_coupling(const StarSolution& sol, const JunctionProblem& pb) {
  const auto& g = pb.gas();
  CouplingDiagnostics d;
  double mass = 0.0, num = 0.0, den = 0.0;
  double hmin = std::numeric_limits<double>::infinity(), hmax = -hmin;
  for (std::size_t j = 0; j < pb.size(); ++j) {
    const auto& s = sol.star_states[j];
    const double a = pb.pipes()[j].spec.area;
    const auto tq = thermo_quantities(s, g);
    mass += a * s.q;
    hmin = std::min(hmin, tq.h);
    hmax = std::max(hmax, tq.h);
    if (pb.pipes()[j].spec.orientation == Orientation::Incoming) {
      num += a * s.q * tq.s;
      den += a * s.q;
    }
  }
  d.mass_residual = std::abs(mass);
  d.max_enthalpy_spread = (hmax - hmin) / std::abs(sol.h_star);
  const double s_star = num / den;
  for (std::size_t j = 0; j < pb.size(); ++j)
    if (pb.role(j) == PipeRole::M1Outgoing)
      d.max_entropy_residual = std::max(d.max_entropy_residual, std::abs(entropy(sol.star_states[j], g) - s_star));
  return d;
}

}  // namespace gasnet
