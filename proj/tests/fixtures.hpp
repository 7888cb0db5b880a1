#pragma once

// Random data generators shared by the unit and acceptance tests.

#include <cmath>
#include <random>
#include <vector>

#include "gasnet/compressor.hpp"
#include "gasnet/junction.hpp"

namespace fixtures {

using namespace gasnet;

inline GasConstants unit_gas() { return GasConstants::from_gamma_r(1.4, 1.0); }

inline Model random_model(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(0, 2);
  return static_cast<Model>(d(rng));
}

inline double uniform(std::mt19937_64& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

/// State of the given model with enthalpy h, signed Mach-like ratio m = u/c
/// and either density (M1) or kappa (M2/M3) fixed; for M1 with
/// `entropy_K` > 0 the density follows from p / rho^gamma = entropy_K.
inline PipeState state_with_enthalpy(Model model, double h, double m, double rho_or_kappa, const GasConstants& g,
                                     double entropy_K = 0.0) {
  const double gm = g.gamma;
  const double c2 = model == Model::M3 ? (gm - 1.0) * h : (gm - 1.0) * h / (1.0 + 0.5 * (gm - 1.0) * m * m);
  const double u = m * std::sqrt(c2);
  if (model == Model::M1) {
    double rho = rho_or_kappa;
    if (entropy_K > 0.0) rho = std::pow(c2 / (gm * entropy_K), 1.0 / (gm - 1.0));
    return PipeState::from_primitive(rho, u, rho * c2 / gm, g);
  }
  const double kappa = rho_or_kappa;
  const double rho = std::pow(c2 / (kappa * gm), 1.0 / (gm - 1.0));
  return PipeState::isentropic(model, rho, rho * u, kappa);
}

/// Random pipe layout and states with Phi = 0 exactly up to rounding.
inline std::vector<JunctionPipe> fixed_point(std::mt19937_64& rng, std::size_t n, const GasConstants& g,
                                             double mach_lo = 0.05, double mach_hi = 0.6) {
  std::vector<JunctionPipe> pipes(n);
  std::uniform_int_distribution<std::size_t> nin(1, n - 1);
  const std::size_t n_in = nin(rng);
  const double h = uniform(rng, 2.5, 4.5);
  double in_flux = 0.0, mix_num = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    auto& p = pipes[j];
    p.spec.id = "p" + std::to_string(j);
    p.spec.model = random_model(rng);
    p.spec.orientation = j < n_in ? Orientation::Incoming : Orientation::Outgoing;
    p.spec.area = uniform(rng, 0.5, 2.0);
  }
  for (std::size_t j = 0; j < n_in; ++j) {
    auto& p = pipes[j];
    const double free = p.spec.model == Model::M1 ? uniform(rng, 0.5, 2.0) : uniform(rng, 0.5, 1.5);
    p.state = state_with_enthalpy(p.spec.model, h, -uniform(rng, mach_lo, mach_hi), free, g);
    const double flux = p.spec.area * std::abs(p.state.q);
    in_flux += flux;
    mix_num += flux * entropy(p.state, g);
  }
  const double K_star = std::exp((mix_num / in_flux - g.s0) / g.cv);
  double out_flux = 0.0;
  for (std::size_t j = n_in; j < n; ++j) {
    auto& p = pipes[j];
    const double free = p.spec.model == Model::M1 ? 1.0 : uniform(rng, 0.5, 1.5);
    p.state = state_with_enthalpy(p.spec.model, h, uniform(rng, mach_lo, mach_hi), free, g, K_star);
    out_flux += p.spec.area * p.state.q;
  }
  for (std::size_t j = n_in; j < n; ++j) pipes[j].spec.area *= in_flux / out_flux;
  return pipes;
}

/// Perturbs a pipe state by independent relative factors within 1 +- rel.
inline PipeState perturbed_state(const PipeState& s, std::mt19937_64& rng, double rel) {
  const double fr = 1.0 + uniform(rng, -rel, rel), fq = 1.0 + uniform(rng, -rel, rel);
  if (s.model == Model::M1) return PipeState::euler(s.rho * fr, s.q * fq, s.E * (1.0 + uniform(rng, -rel, rel)));
  return PipeState::isentropic(s.model, s.rho * fr, s.q * fq, s.kappa);
}

/// Every pipe state perturbed by perturbed_state.
inline std::vector<JunctionPipe> perturbed(std::vector<JunctionPipe> pipes, std::mt19937_64& rng, double rel) {
  for (auto& p : pipes) p.state = perturbed_state(p.state, rng, rel);
  return pipes;
}

/// Random inlet/outlet pair of equal area at rest with respect to a control
/// chosen so that the pair is a compressor fixed point.
struct CompressorCase {
  JunctionPipe inlet, outlet;
  CompressorControl control;
};

inline CompressorCase compressor_fixed_point(std::mt19937_64& rng, Model in_model, Model out_model,
                                             CompressorMode mode, const GasConstants& g) {
  const double gm = g.gamma;
  for (;;) {
    CompressorCase c;
    const double area = uniform(rng, 0.5, 2.0);
    c.inlet.spec = {"in", area, in_model, Orientation::Incoming};
    c.outlet.spec = {"out", area, out_model, Orientation::Outgoing};
    const double free = in_model == Model::M1 ? uniform(rng, 0.5, 2.0) : uniform(rng, 0.5, 1.5);
    c.inlet.state = state_with_enthalpy(in_model, uniform(rng, 2.5, 4.5), -uniform(rng, 0.05, 0.4), free, g);
    const PipeState& in = c.inlet.state;
    const double p1 = pressure(in, g), ratio = uniform(rng, 1.05, 1.6);
    const double p2 = ratio * p1, q2 = -in.q;
    if (out_model == Model::M1) {
      const double K1 = std::exp((entropy(in, g) - g.s0) / g.cv);
      const double rho2 = std::pow(p2 / K1, 1.0 / gm);
      c.outlet.state = PipeState::from_primitive(rho2, q2 / rho2, p2, g);
    } else {
      const double kappa2 = uniform(rng, 0.5, 1.5);
      const double rho2 = std::pow(p2 / kappa2, 1.0 / gm);
      c.outlet.state = PipeState::isentropic(out_model, rho2, q2, kappa2);
    }
    if (classify_subsonic(c.outlet.state, g) != SubsonicClass::DPlus) continue;
    const double head = g.R * gm / (gm - 1.0) * temperature(in, g) * (std::pow(ratio, (gm - 1.0) / gm) - 1.0);
    if (mode == CompressorMode::AdiabaticEnthalpy) {
      c.control = CompressorControl::head(head);
    } else {
      const double Cp = uniform(rng, 0.5, 2.0);
      c.control = CompressorControl::power(Cp * head * q2, Cp);
    }
    return c;
  }
}

}  // namespace fixtures
