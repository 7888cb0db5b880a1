#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

#include "gasnet/error.hpp"

namespace gasnet {

/// Ideal polytropic gas constants. All quantities in SI units.
struct GasConstants {
  double gamma = 1.4;
  double R = 287.0;
  double cv = 287.0 / 0.4;
  double cp = 1.4 * 287.0 / 0.4;
  double s0 = 0.0;

  /// Derives cv = R/(gamma-1) and cp = gamma*cv so that the invariants hold exactly.
  static GasConstants from_gamma_r(double gamma, double R, double s0 = 0.0) {
    GasConstants g;
    g.gamma = gamma;
    g.R = R;
    g.cv = R / (gamma - 1.0);
    g.cp = gamma * g.cv;
    g.s0 = s0;
    g.validate();
    return g;
  }

  static GasConstants air() { return from_gamma_r(1.4, 287.0, 0.0); }

  void validate() const {
    if (!(gamma > 1.0)) fail(ErrorCode::InvalidArgument, "gamma must exceed 1");
    if (!(R > 0.0) || !(cv > 0.0)) fail(ErrorCode::InvalidArgument, "R and cv must be positive");
    if (std::abs((cp - cv) - R) > 1e-9 * R) fail(ErrorCode::InvalidArgument, "R must equal cp - cv");
    if (std::abs(cp / cv - gamma) > 1e-9 * gamma) fail(ErrorCode::InvalidArgument, "gamma must equal cp / cv");
    if (!(s0 >= 0.0)) fail(ErrorCode::InvalidArgument, "s0 must be non-negative");
  }
};

enum class Model { M1, M2, M3 };

inline std::string_view to_string(Model m) {
  switch (m) {
    case Model::M1: return "M1";
    case Model::M2: return "M2";
    case Model::M3: return "M3";
  }
  return "?";
}

inline bool is_isentropic(Model m) { return m != Model::M1; }

/// Number of conserved components (and of wave families) of a model.
inline std::size_t system_size(Model m) { return m == Model::M1 ? 3 : 2; }

using Conserved = std::array<double, 3>;

/// Conservative pipe state. `E` is used only by M1, `kappa` only by M2/M3;
/// the unused slot is kept at zero.
struct PipeState {
  Model model = Model::M1;
  double rho = 1.0;
  double q = 0.0;
  double E = 0.0;
  double kappa = 0.0;

  static PipeState euler(double rho, double q, double E) { return {Model::M1, rho, q, E, 0.0}; }

  static PipeState isentropic(Model model, double rho, double q, double kappa) {
    if (model == Model::M1) fail(ErrorCode::InvalidArgument, "isentropic state requires model M2 or M3");
    return {model, rho, q, 0.0, kappa};
  }

  /// M1 state from primitive variables (rho, u, p).
  static PipeState from_primitive(double rho, double u, double p, const GasConstants& g) {
    return euler(rho, rho * u, p / (g.gamma - 1.0) + 0.5 * rho * u * u);
  }

  double velocity() const { return q / rho; }

  Conserved conserved() const { return {rho, q, model == Model::M1 ? E : 0.0}; }

  /// Replaces the conserved components, keeping model and kappa.
  PipeState with_conserved(const Conserved& u) const {
    PipeState s = *this;
    s.rho = u[0];
    s.q = u[1];
    if (model == Model::M1) s.E = u[2];
    return s;
  }

  bool operator==(const PipeState&) const = default;
};

inline void validate_state(const PipeState& s) {
  if (!(s.rho > 0.0) || !std::isfinite(s.rho)) fail(ErrorCode::NonPositiveDensity, "density must be positive");
  if (!std::isfinite(s.q)) fail(ErrorCode::InvalidArgument, "mass flux must be finite");
  if (s.model == Model::M1) {
    if (!(s.E - 0.5 * s.q * s.q / s.rho > 0.0))
      fail(ErrorCode::NonPositivePressure, "internal energy must be positive");
  } else if (!(s.kappa > 0.0)) {
    fail(ErrorCode::InvalidArgument, "kappa must be positive for isentropic models");
  }
}

inline double pressure(const PipeState& s, const GasConstants& g) {
  if (s.model == Model::M1) {
    const double p = (g.gamma - 1.0) * (s.E - 0.5 * s.q * s.q / s.rho);
    if (!(p > 0.0)) fail(ErrorCode::NonPositivePressure, "M1 pressure is not positive");
    return p;
  }
  return s.kappa * std::pow(s.rho, g.gamma);
}

inline double sound_speed(const PipeState& s, const GasConstants& g) {
  if (s.model == Model::M1) return std::sqrt(g.gamma * pressure(s, g) / s.rho);
  return std::sqrt(s.kappa * g.gamma * std::pow(s.rho, g.gamma - 1.0));
}

inline double temperature(const PipeState& s, const GasConstants& g) { return pressure(s, g) / (s.rho * g.R); }

/// Specific entropy of an isentropic model, the inverse of kappa = exp((s - s0)/cv).
inline double isentropic_entropy(double kappa, const GasConstants& g) { return g.cv * std::log(kappa) + g.s0; }

inline double kappa_from_entropy(double s, const GasConstants& g) { return std::exp((s - g.s0) / g.cv); }

struct ThermoQuantities {
  double s = 0.0;  ///< specific entropy
  double h = 0.0;  ///< total enthalpy
  double c = 0.0;  ///< sound speed
};

inline ThermoQuantities thermo_quantities(const PipeState& s, const GasConstants& g) {
  const double p = pressure(s, g);
  const double u = s.velocity();
  switch (s.model) {
    case Model::M1:
      return {g.cv * std::log(p / std::pow(s.rho, g.gamma)) + g.s0, (s.E + p) / s.rho, std::sqrt(g.gamma * p / s.rho)};
    case Model::M2:
    case Model::M3: {
      const double c2 = s.kappa * g.gamma * std::pow(s.rho, g.gamma - 1.0);
      double h = c2 / (g.gamma - 1.0);
      if (s.model == Model::M2) h += 0.5 * u * u;
      return {isentropic_entropy(s.kappa, g), h, std::sqrt(c2)};
    }
  }
  return {};
}

inline double entropy(const PipeState& s, const GasConstants& g) { return thermo_quantities(s, g).s; }
inline double enthalpy(const PipeState& s, const GasConstants& g) { return thermo_quantities(s, g).h; }

/// Characteristic speeds in increasing order; the unused third entry is zero for M2/M3.
struct Eigenvalues {
  std::array<double, 3> lambda{};
  std::size_t count = 0;

  double operator[](std::size_t i) const { return lambda[i]; }
  double front() const { return lambda[0]; }
  double back() const { return lambda[count - 1]; }
};

inline Eigenvalues eigenvalues(const PipeState& s, const GasConstants& g) {
  const double u = s.velocity();
  const double c = sound_speed(s, g);
  switch (s.model) {
    case Model::M1: return {{u - c, u, u + c}, 3};
    case Model::M2: return {{u - c, u + c, 0.0}, 2};
    case Model::M3: return {{-c, c, 0.0}, 2};
  }
  return {};
}

/// Speed of the characteristic family `family` (1-based).
inline double characteristic_speed(const PipeState& s, int family, const GasConstants& g) {
  return eigenvalues(s, g)[static_cast<std::size_t>(family - 1)];
}

enum class SubsonicClass { DPlus, DMinus, NotSubsonic };

inline std::string_view to_string(SubsonicClass c) {
  switch (c) {
    case SubsonicClass::DPlus: return "D_plus";
    case SubsonicClass::DMinus: return "D_minus";
    case SubsonicClass::NotSubsonic: return "NotSubsonic";
  }
  return "?";
}

/// D_plus: 0 < u < c (flow away from the junction); D_minus: -c < u < 0.
/// u == 0 belongs to neither set.
inline SubsonicClass classify_subsonic(const PipeState& s, const GasConstants& g) {
  const double u = s.velocity();
  const double c = sound_speed(s, g);
  if (u > 0.0 && u < c) return SubsonicClass::DPlus;
  if (u < 0.0 && u > -c) return SubsonicClass::DMinus;
  return SubsonicClass::NotSubsonic;
}

/// Physical flux of the model.
inline Conserved flux(const PipeState& s, const GasConstants& g) {
  const double p = pressure(s, g);
  const double u = s.velocity();
  switch (s.model) {
    case Model::M1: return {s.q, s.q * u + p, u * (s.E + p)};
    case Model::M2: return {s.q, s.q * u + p, 0.0};
    case Model::M3: return {s.q, p, 0.0};
  }
  return {};
}

/// Euclidean norm of the difference of the conserved components.
inline double state_distance(const PipeState& a, const PipeState& b) {
  const Conserved ua = a.conserved();
  const Conserved ub = b.conserved();
  double sum = 0.0;
  for (std::size_t i = 0; i < system_size(a.model); ++i) sum += (ua[i] - ub[i]) * (ua[i] - ub[i]);
  return std::sqrt(sum);
}

}  // namespace gasnet
