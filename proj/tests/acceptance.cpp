// Acceptance suite. Prints one line per criterion; with arguments, runs only
// the named criteria. Exit status is non-zero when any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "gasnet/compressor.hpp"
#include "gasnet/front_tracking.hpp"
#include "gasnet/junction.hpp"
#include "gasnet/riemann.hpp"
#include "oracles.hpp"

using namespace gasnet;

namespace {

const GasConstants g = GasConstants::from_gamma_r(1.4, 1.0);

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string title;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string sci(double a) { return fmt("%.3g", a); }

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// --- 1 --------------------------------------------------------------------

Outcome fixed_point_exactness() {
  std::mt19937_64 rng(1001);
  Outcome o;
  double worst_phi = 0.0, worst_move = 0.0;
  int iterations = 0;
  const int samples = 60;
  for (int k = 0; k < samples; ++k) {
    const JunctionProblem pb(fixtures::fixed_point(rng, 2 + static_cast<std::size_t>(k) % 5, g), g);
    worst_phi = std::max(worst_phi, assemble_phi(base_params(pb), pb).lpNorm<Eigen::Infinity>());
    const auto sol = solve_junction(pb);
    iterations += sol.iterations;
    for (std::size_t j = 0; j < pb.size(); ++j) {
      const auto& a = sol.star_states[j];
      const auto& b = pb.pipes()[j].state;
      worst_move = std::max({worst_move, rel_err(a.rho, b.rho), rel_err(a.q, b.q), a.model == Model::M1 ? rel_err(a.E, b.E) : 0.0});
    }
  }
  o.pass = worst_phi <= 1e-12 && iterations == 0 && worst_move == 0.0;
  o.detail = std::to_string(samples) + " datasets, max |Phi| " + sci(worst_phi) + ", Newton steps " + std::to_string(iterations) +
             ", max state change " + sci(worst_move);
  return o;
}

// --- 2 --------------------------------------------------------------------

Outcome coupling_residuals() {
  std::mt19937_64 rng(1002);
  double mass = 0.0, spread = 0.0, ent = 0.0;
  const int samples = 150;
  for (int k = 0; k < samples; ++k) {
    const JunctionProblem pb(fixtures::perturbed(fixtures::fixed_point(rng, 2 + static_cast<std::size_t>(k) % 5, g, 0.15, 0.45), rng, 0.01), g);
    const auto d = verify_coupling(solve_junction(pb), pb);
    mass = std::max(mass, d.mass_residual);
    spread = std::max(spread, d.max_enthalpy_spread);
    ent = std::max(ent, d.max_entropy_residual);
  }
  Outcome o;
  o.pass = mass <= 1e-10 && spread <= 1e-8 && ent <= 1e-8;
  o.detail = std::to_string(samples) + " problems, mass " + sci(mass) + ", enthalpy spread " + sci(spread) + ", entropy " + sci(ent);
  return o;
}

// --- 3 --------------------------------------------------------------------

Outcome jacobian_fidelity() {
  std::mt19937_64 rng(1003);
  double worst = 0.0;
  long compared = 0, bad_zeros = 0;
  const int samples = 150;
  for (int k = 0; k < samples; ++k) {
    const JunctionProblem pb(fixtures::fixed_point(rng, 2 + static_cast<std::size_t>(k) % 5, g), g);
    const auto& L = pb.layout();
    const Eigen::VectorXd x = pack(base_params(pb), L);
    auto f = [&](const Eigen::VectorXd& y) { return assemble_phi(unpack(y, L), pb); };
    const Eigen::MatrixXd A = assemble_jacobian(base_params(pb), pb, JacobianMode::Analytic);
    Eigen::MatrixXd F(x.size(), x.size());
    for (Eigen::Index c = 0; c < x.size(); ++c) {
      const double scale = c < static_cast<Eigen::Index>(pb.size()) ? std::abs(x(c)) : pb.pipes()[L.order[static_cast<std::size_t>(c) - pb.size()]].state.rho;
      const double h = 1e-6 * scale;
      Eigen::VectorXd xp = x, xm = x;
      xp(c) += h;
      xm(c) -= h;
      F.col(c) = (f(xp) - f(xm)) / (2.0 * h);
    }
    for (Eigen::Index r = 0; r < A.rows(); ++r) {
      // entries that vanish analytically are compared against the row's
      // finite-difference rounding floor instead
      const double row = F.row(r).cwiseAbs().maxCoeff();
      for (Eigen::Index c = 0; c < A.cols(); ++c) {
        const double d = std::abs(A(r, c) - F(r, c));
        const double ref = std::max(std::abs(A(r, c)), std::abs(F(r, c)));
        if (ref > 1e-6 * row) {
          worst = std::max(worst, d / ref);
          ++compared;
        } else if (d > 1e-9 * row) {
          ++bad_zeros;
        }
      }
    }
  }
  Outcome o;
  o.pass = worst <= 1e-6 && bad_zeros == 0;
  o.detail = std::to_string(samples) + " base points, " + std::to_string(compared) + " nonzero entries, max relative error " + sci(worst) +
             ", nonzero FD at analytic zeros " + std::to_string(bad_zeros);
  return o;
}

// --- 4j -------------------------------------------------------------------

Outcome junction_determinants() {
  std::mt19937_64 rng(1004);
  int with_m1 = 0, without = 0, bad_blocks = 0, singular = 0;
  while (with_m1 < 100 || without < 100) {
    const JunctionProblem pb(fixtures::fixed_point(rng, 2 + rng() % 5, g), g);
    const Eigen::MatrixXd J = base_jacobian(pb);
    if (pb.layout().n0 > 0) {
      if (with_m1 >= 100) continue;
      ++with_m1;
      for (const auto& D : determinant_blocks(J, pb.layout()))
        if (!(D.determinant() < 0.0)) ++bad_blocks;
    } else {
      if (without >= 100) continue;
      ++without;
      Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
      if (!lu.isInvertible() || J.determinant() == 0.0) ++singular;
    }
  }
  Outcome o;
  o.pass = bad_blocks == 0 && singular == 0;
  o.detail = std::to_string(with_m1) + " samples with outgoing M1 (blocks with det >= 0: " + std::to_string(bad_blocks) + "), " +
             std::to_string(without) + " without (singular: " + std::to_string(singular) + ")";
  return o;
}

// --- 4c -------------------------------------------------------------------

Outcome compressor_determinants() {
  std::mt19937_64 rng(1005);
  const Model models[] = {Model::M1, Model::M2, Model::M3};
  std::ostringstream os;
  bool pass = true;
  for (bool m1_outlet : {true, false})
    for (CompressorMode mode : {CompressorMode::AdiabaticEnthalpy, CompressorMode::Power}) {
      // claimed sign of det(DPhi): positive with an M1 outlet, negative otherwise
      const double claimed = m1_outlet ? 1.0 : -1.0;
      int agree = 0, positive = 0;
      const int samples = 120;
      for (int k = 0; k < samples; ++k) {
        const Model in = models[rng() % 3];
        const Model out = m1_outlet ? Model::M1 : models[1 + rng() % 2];
        const auto c = fixtures::compressor_fixed_point(rng, in, out, mode, g);
        const CompressorProblem pb(c.inlet, c.outlet, c.control, g);
        const double det = compressor_jacobian(base_params(pb), pb).determinant();
        if (det * claimed > 0.0) ++agree;
        if (det > 0.0) ++positive;
      }
      pass = pass && agree == samples;
      os << (m1_outlet ? "M1 outlet" : "M2/M3 outlet") << (mode == CompressorMode::Power ? " CP2" : " CP1") << ": " << agree << "/"
         << samples << " match claimed sign " << (claimed > 0 ? "+" : "-") << " (det > 0 in " << positive << "); ";
    }
  Outcome o;
  o.pass = pass;
  o.detail = os.str();
  return o;
}

// --- 5 --------------------------------------------------------------------

Outcome riemann_oracle() {
  std::ostringstream os;
  bool pass = true;
  const auto L = PipeState::from_primitive(1.0, 0.0, 1.0, g), R = PipeState::from_primitive(0.125, 0.0, 0.1, g);
  const auto sod = solve_riemann_m1(L, R, g);
  const auto so = oracle::euler_star(L, R, g);
  pass = pass && std::abs(sod.p_star - 0.30313) <= 1e-5 && std::abs(sod.u_star - 0.92745) <= 1e-5 && std::abs(sod.p_star - so.p) <= 1e-5 &&
         std::abs(sod.u_star - so.u) <= 1e-5;
  os << "Sod p* " << fmt("%.6f", sod.p_star) << " u* " << fmt("%.6f", sod.u_star) << "; ";
  std::mt19937_64 rng(1006);
  double worst = 0.0, worst_rh = 0.0;
  int shocks = 0;
  auto u = [&](double a, double b) { return fixtures::uniform(rng, a, b); };
  for (int k = 0; k < 500; ++k) {
    const Model m = static_cast<Model>(k % 3);
    if (m == Model::M1) {
      const auto a = PipeState::from_primitive(u(0.2, 2.0), u(-0.5, 0.5), u(0.2, 2.0), g);
      const auto b = PipeState::from_primitive(u(0.2, 2.0), u(-0.5, 0.5), u(0.2, 2.0), g);
      const auto s = solve_riemann_m1(a, b, g);
      worst = std::max(worst, rel_err(s.p_star, oracle::euler_star(a, b, g).p));
      const PipeState left[2] = {a, s.right_star()}, right[2] = {s.left_star(), b};
      for (int w = 0; w < 2; ++w)
        if (s.waves[w].type == WaveType::Shock) {
          ++shocks;
          worst_rh = std::max(worst_rh, oracle::rh_defect(left[w], right[w], s.waves[w].lo, g));
        }
    } else {
      const double kappa = u(0.5, 2.0);
      const auto a = PipeState::isentropic(m, u(0.2, 2.0), u(-0.4, 0.4), kappa);
      const auto b = PipeState::isentropic(m, u(0.2, 2.0), u(-0.4, 0.4), kappa);
      const auto s = solve_riemann_iso(a, b, m, g);
      worst = std::max(worst, rel_err(s.rho_star, oracle::iso_star(a, b, g).rho));
      const PipeState left[2] = {a, s.star()}, right[2] = {s.star(), b};
      for (int w = 0; w < 2; ++w)
        if (s.waves[w].type == WaveType::Shock) {
          ++shocks;
          worst_rh = std::max(worst_rh, oracle::rh_defect(left[w], right[w], s.waves[w].lo, g));
        }
    }
  }
  pass = pass && worst <= 1e-8 && worst_rh <= 1e-8;
  os << "500 random problems, max star-parameter error " << sci(worst) << ", " << shocks << " shocks, max RH defect " << sci(worst_rh);
  return {pass, os.str()};
}

// --- 6 --------------------------------------------------------------------

struct Network {
  std::vector<PipeSpec> specs;
  std::vector<PipeState> states;
};

// three pipes at a fixed point: M1 in, M2 and M3 out
Network mixed_network() {
  const double h = 3.5;
  const auto in = fixtures::state_with_enthalpy(Model::M1, h, -0.3, 1.0, g);
  const double K = std::exp((entropy(in, g) - g.s0) / g.cv);
  const auto a = fixtures::state_with_enthalpy(Model::M2, h, 0.25, 1.0, g, K);
  const auto b = fixtures::state_with_enthalpy(Model::M3, h, 0.35, 1.0, g, K);
  Network n;
  n.specs = {{"in", 1.0, Model::M1, Orientation::Incoming},
             {"a", 0.5 * std::abs(in.q) / a.q, Model::M2, Orientation::Outgoing},
             {"b", 0.5 * std::abs(in.q) / b.q, Model::M3, Orientation::Outgoing}};
  n.states = {in, a, b};
  return n;
}

PipeState scaled(const PipeState& s, double d, const double dir[3]) {
  if (s.model == Model::M1) return PipeState::euler(s.rho * (1 + d * dir[0]), s.q * (1 + d * dir[1]), s.E * (1 + d * dir[2]));
  return PipeState::isentropic(s.model, s.rho * (1 + d * dir[0]), s.q * (1 + d * dir[1]), s.kappa);
}

Snapshot evolve(const Network& n, const std::vector<Profile>& pr, double eps, double T) {
  TrackingOptions opt;
  opt.epsilon = eps;
  FrontTracker tr(NetworkCoupling::junction(n.specs, g), pr, opt);
  tr.advance_to(T);
  return tr.snapshot();
}

Outcome lipschitz_stability() {
  const Network base = mixed_network();
  const double T = 0.5, X = 4.0;
  const double dir[3][3] = {{1.0, -0.6, 0.8}, {-0.7, 0.5, 0.0}, {0.9, 0.4, 0.0}};
  const double area_dir[3] = {0.5, -1.0, 0.8};
  std::vector<double> r_init, r_area;
  for (double delta : {1e-2, 1e-3, 1e-4}) {
    const double eps = delta / 16.0;
    // initial data perturbed on [0, 1]
    std::vector<Profile> p0, p1;
    double din = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      const PipeState& s = base.states[j];
      const PipeState t = scaled(s, delta, dir[j]);
      p0.push_back({{std::numeric_limits<double>::infinity(), s}});
      p1.push_back({{1.0, t}, {std::numeric_limits<double>::infinity(), s}});
      din += state_distance(s, t);
    }
    r_init.push_back(l1_distance(evolve(base, p0, eps, T), evolve(base, p1, eps, T), X) / din);
    // areas
    Network moved = base;
    double da = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      moved.specs[j].area *= 1.0 + delta * area_dir[j];
      da += std::abs(moved.specs[j].area - base.specs[j].area);
    }
    r_area.push_back(l1_distance(evolve(base, p0, eps, T), evolve(moved, p0, eps, T), X) / da);
  }
  auto spread = [](const std::vector<double>& r) { return *std::max_element(r.begin(), r.end()) / *std::min_element(r.begin(), r.end()); };
  const double si = spread(r_init), sa = spread(r_area);
  Outcome o;
  o.pass = si < 2.0 && sa < 2.0;
  o.detail = "initial-data ratios " + sci(r_init[0]) + ", " + sci(r_init[1]) + ", " + sci(r_init[2]) + " (spread " + fmt("%.3f", si) +
             "); area ratios " + sci(r_area[0]) + ", " + sci(r_area[1]) + ", " + sci(r_area[2]) + " (spread " + fmt("%.3f", sa) + ")";
  return o;
}

// --- 7 and 8 --------------------------------------------------------------

std::vector<Profile> smooth_profiles(const Network& n, double amp, double eps) {
  std::vector<Profile> pr;
  for (std::size_t j = 0; j < n.states.size(); ++j) {
    const PipeState b = n.states[j];
    const double sg = j == 0 ? 1.0 : -1.0;
    const double phase = static_cast<double>(j);
    auto f = [b, sg, amp, phase](double x) {
      const double d = amp * sg * std::exp(-std::pow((x - 0.5) / 0.15, 2)) * std::sin(6.0 * x + phase);
      if (b.model == Model::M1) return PipeState::euler(b.rho * (1 + d), b.q * (1 + 0.5 * d), b.E * (1 + d));
      return PipeState::isentropic(b.model, b.rho * (1 + d), b.q * (1 - 0.7 * d), b.kappa);
    };
    pr.push_back(profile_from_function(f, 1.0, eps));
  }
  return pr;
}

Outcome front_tracking_invariants() {
  const Network n = mixed_network();
  const double amp = 1e-4, eps = 3.3e-5, T = 2.0;
  TrackingOptions opt;
  opt.epsilon = eps;
  opt.track_glimm = true;
  FrontTracker tr(NetworkCoupling::junction(n.specs, g), smooth_profiles(n, amp, eps), opt);
  double umax = 0.0;
  for (const auto& s : n.states) {
    const auto u = s.conserved();
    for (double c : u) umax = std::max(umax, std::abs(c));
  }
  const double floor = 1e4 * std::numeric_limits<double>::epsilon() * umax;
  const double delta = tr.total_variation();
  const std::size_t fronts0 = tr.front_count();
  const auto g0 = tr.glimm();
  double C1 = std::max({1.0, g0.TV / g0.V, g0.V / g0.TV}), tv_max = g0.TV, worst_dy = -1e300, worst_kj = 0.0;
  int y_up = 0, kj_viol = 0, junction = 0;
  tr.advance_to(T, [&](const InteractionRecord& r) {
    const double dy = r.after->Y - r.before->Y;
    worst_dy = std::max(worst_dy, dy);
    if (dy > floor) ++y_up;
    tv_max = std::max(tv_max, r.after->TV);
    if (r.after->V > 0.0 && r.after->TV > 0.0) C1 = std::max({C1, r.after->TV / r.after->V, r.after->V / r.after->TV});
    if (r.kind == EventKind::Junction) {
      ++junction;
      if (r.incident > 0.0) worst_kj = std::max(worst_kj, r.emitted / r.incident);
      if (r.emitted > tr.K_J() * r.incident) ++kj_viol;
    }
  });
  const double tv_bound = C1 * (C1 * delta + tr.K_hat_J() * C1 * C1 * delta * delta);
  const bool premise = tr.K_hat_J() * tr.V0() < tr.K_J();
  const std::size_t front_bound = 20 * fronts0;
  Outcome o;
  o.pass = premise && tr.event_count() >= 50 && y_up == 0 && tv_max <= tv_bound && kj_viol == 0 && tr.max_front_count() <= front_bound;
  std::ostringstream os;
  os << tr.event_count() << " interactions (" << junction << " at the junction); K_J " << fmt("%.3f", tr.K_J()) << ", K^_J V(0) "
     << fmt("%.3f", tr.K_hat_J() * tr.V0()) << "; max dY " << sci(worst_dy) << " (floor " << sci(floor) << ", increases " << y_up
     << "); TV max " << sci(tv_max) << " <= " << sci(tv_bound) << " (delta " << sci(delta) << ", C1 " << fmt("%.3f", C1)
     << "); max |v+|/|v-| " << fmt("%.3f", worst_kj) << "; fronts max " << tr.max_front_count() << " <= " << front_bound;
  o.detail = os.str();
  return o;
}

Outcome epsilon_refinement() {
  const Network n = mixed_network();
  const double amp = 1e-2, eps0 = 4e-3, T = 0.5, X = 3.0;
  std::vector<Snapshot> snaps;
  std::vector<double> eps_list;
  for (int r = 0; r < 4; ++r) {
    const double eps = eps0 / std::pow(2.0, r);
    TrackingOptions opt;
    opt.epsilon = eps;
    opt.max_events = 100000000;
    FrontTracker tr(NetworkCoupling::junction(n.specs, g), smooth_profiles(n, amp, eps), opt);
    tr.advance_to(T);
    snaps.push_back(tr.snapshot());
  }
  std::vector<double> d;
  for (std::size_t r = 1; r < snaps.size(); ++r) d.push_back(l1_distance(snaps[r - 1], snaps[r], X));
  Outcome o;
  o.pass = d[1] < d[0] && d[2] < d[1];
  o.detail = "successive L1 distances " + sci(d[0]) + ", " + sci(d[1]) + ", " + sci(d[2]);
  return o;
}

// --- 9 --------------------------------------------------------------------

Outcome operator_splitting() {
  std::ostringstream os;
  // G = 0 against homogeneous evolution
  const Network n = mixed_network();
  const double eps = 2e-3;
  FrontTracker a(NetworkCoupling::junction(n.specs, g), smooth_profiles(n, 1e-2, eps), [&] {
    TrackingOptions t;
    t.epsilon = eps;
    return t;
  }());
  FrontTracker b = a;
  const double dt = default_split_step(1.0, a);
  double worst = 0.0;
  bool same_shape = true;
  for (int k = 0; k < 8; ++k) {
    a = operator_split_step(a, no_source(), k * dt, dt);
    b.advance_to((k + 1) * dt);
    const auto sa = a.snapshot(), sb = b.snapshot();
    for (std::size_t j = 0; j < sa.size(); ++j) {
      if (sa[j].x.size() != sb[j].x.size()) {
        same_shape = false;
        continue;
      }
      for (std::size_t i = 0; i < sa[j].x.size(); ++i) worst = std::max(worst, std::abs(sa[j].x[i] - sb[j].x[i]));
      for (std::size_t i = 0; i < sa[j].states.size(); ++i) worst = std::max(worst, state_distance(sa[j].states[i], sb[j].states[i]));
    }
  }
  bool pass = same_shape && worst <= 1e-14;
  os << "G = 0: max deviation " << sci(worst) << (same_shape ? "" : " (front sets differ)") << "; ";
  // friction on a uniform state against q' = -k q|q|/rho
  const auto s0 = fixtures::state_with_enthalpy(Model::M3, 3.5, -0.4, 1.0, g);
  const auto s1 = fixtures::state_with_enthalpy(Model::M3, 3.5, 0.4, 1.0, g);
  const std::vector<PipeSpec> specs{{"in", 1.0, Model::M3, Orientation::Incoming}, {"out", 1.0, Model::M3, Orientation::Outgoing}};
  const FrictionSource fr{0.02, 0.5};
  const double T = 1.0, kf = fr.lambda_f / (2.0 * fr.diameter);
  const double exact = s1.q / (1.0 + kf * std::abs(s1.q) * T / s1.rho);
  std::vector<double> errs;
  for (int steps : {10, 20, 40, 80}) {
    FrontTracker tr(NetworkCoupling::junction(specs, g), {{{std::numeric_limits<double>::infinity(), s0}}, {{std::numeric_limits<double>::infinity(), s1}}});
    const double h = T / steps;
    for (int k = 0; k < steps; ++k) tr = operator_split_step(tr, fr, k * h, h);
    errs.push_back(std::abs(tr.sample(1, 1e9).q - exact));
  }
  os << "friction errors";
  for (std::size_t k = 0; k < errs.size(); ++k) {
    os << " " << sci(errs[k]);
    if (k > 0) {
      const double ratio = errs[k - 1] / errs[k];
      if (!(ratio > 1.8 && ratio < 2.2)) pass = false;
    }
  }
  return {pass, os.str()};
}

// --- 10 -------------------------------------------------------------------

Outcome compressor_consistency() {
  std::mt19937_64 rng(1010);
  const Model models[] = {Model::M1, Model::M2, Model::M3};
  double worst = 0.0, worst_tr = 0.0;
  int m1_solves = 0;
  const int samples = 90;
  auto check_tr = [&](const CompressorSolution& s, const CompressorProblem& pb) {
    if (!pb.m1_outlet()) return;
    ++m1_solves;
    worst_tr = std::max(worst_tr, verify_compressor(s, pb).temperature_ratio_error);
  };
  for (int k = 0; k < samples; ++k) {
    auto c = fixtures::compressor_fixed_point(rng, models[k % 3], models[(k / 3) % 3], CompressorMode::Power, g);
    c.inlet.state = fixtures::perturbed_state(c.inlet.state, rng, 0.01);
    c.outlet.state = fixtures::perturbed_state(c.outlet.state, rng, 0.01);
    const CompressorProblem cp2(c.inlet, c.outlet, c.control, g);
    const auto s2 = solve_compressor(cp2);
    check_tr(s2, cp2);
    const double H = c.control.value / (c.control.Cp * s2.star.star_states[1].q);
    const CompressorProblem cp1 = cp2.with_control(CompressorControl::head(H));
    const auto s1 = solve_compressor(cp1);
    check_tr(s1, cp1);
    for (int j = 0; j < 2; ++j) {
      const auto& x = s1.star.star_states[j];
      const auto& y = s2.star.star_states[j];
      worst = std::max({worst, rel_err(x.rho, y.rho), rel_err(x.q, y.q), x.model == Model::M1 ? rel_err(x.E, y.E) : 0.0});
    }
  }
  Outcome o;
  o.pass = worst <= 1e-6 && worst_tr <= 1e-8;
  o.detail = std::to_string(samples) + " problems, max CP2/CP1 star difference " + sci(worst) + "; " + std::to_string(m1_solves) +
             " M1-outlet solves, max temperature-ratio error " + sci(worst_tr);
  return o;
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list{
      {"1", "fixed-point exactness", 1.0, fixed_point_exactness},
      {"2", "coupling-condition residuals", 10.0, coupling_residuals},
      {"3", "Jacobian fidelity", 10.0, jacobian_fidelity},
      {"4j", "junction determinant signs", 20.0, junction_determinants},
      {"4c", "compressor determinant signs as claimed", 20.0, compressor_determinants},
      {"5", "Riemann-solver oracle", 30.0, riemann_oracle},
      {"6", "empirical Lipschitz stability", 10.0, lipschitz_stability},
      {"7", "front-tracking invariants", 60.0, front_tracking_invariants},
      {"8", "epsilon refinement", 120.0, epsilon_refinement},
      {"9", "operator splitting", 30.0, operator_splitting},
      {"10", "compressor consistency", 10.0, compressor_consistency},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> wanted(argv + 1, argv + argc);
  int failures = 0, ran = 0;
  for (const auto& c : criteria()) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("criterion %-3s %s  %s: %s [%.2f s of %.0f s]\n", c.id.c_str(), pass ? "PASS" : "FAIL", c.title.c_str(), o.detail.c_str(), secs,
                c.budget_s);
    std::fflush(stdout);
  }
  if (ran == 0) {
    std::fprintf(stderr, "unknown criterion\n");
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
