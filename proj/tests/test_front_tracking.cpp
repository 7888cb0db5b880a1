#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "gasnet/front_tracking.hpp"
#include "oracles.hpp"

using namespace gasnet;

namespace {

const GasConstants g = GasConstants::from_gamma_r(1.4, 1.0);

/// Balanced two-pipe junction with the given models.
std::vector<JunctionPipe> pass_through(Model in, Model out, double h = 3.5, double mach = 0.3) {
  const auto a = fixtures::state_with_enthalpy(in, h, -mach, 1.0, g);
  const double K = std::exp((entropy(a, g) - g.s0) / g.cv);
  const auto b = fixtures::state_with_enthalpy(out, h, mach, 1.0, g, K);
  return {{{"in", 1.0, in, Orientation::Incoming}, a}, {{"out", std::abs(a.q) / b.q, out, Orientation::Outgoing}, b}};
}

NetworkCoupling coupling_of(const std::vector<JunctionPipe>& pipes) {
  std::vector<PipeSpec> specs;
  for (const auto& p : pipes) specs.push_back(p.spec);
  return NetworkCoupling::junction(specs, g);
}

std::vector<Profile> constant_profiles(const std::vector<JunctionPipe>& pipes) {
  std::vector<Profile> pr;
  for (const auto& p : pipes) pr.push_back({{std::numeric_limits<double>::infinity(), p.state}});
  return pr;
}

TrackingOptions with_epsilon(double eps) {
  TrackingOptions o;
  o.epsilon = eps;
  return o;
}

std::vector<const Front*> physical_fronts(const PipeTrack& p) {
  std::vector<const Front*> out;
  for (const auto& f : p.fronts)
    if (f.physical()) out.push_back(&f);
  return out;
}

}  // namespace

TEST(FrontTracker, FixedPointHasNoFronts) {
  const auto pipes = pass_through(Model::M1, Model::M3);
  FrontTracker tr(coupling_of(pipes), constant_profiles(pipes));
  EXPECT_EQ(tr.front_count(), 0u);
  EXPECT_TRUE(std::isinf(tr.next_event_time()));
  const auto gd = tr.glimm();
  EXPECT_EQ(gd.V, 0.0);
  EXPECT_EQ(gd.Q, 0.0);
  EXPECT_EQ(gd.Y, 0.0);
  try {
    tr.step(std::numeric_limits<double>::infinity());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EventStarvation);
  }
  EXPECT_FALSE(tr.step(2.0).has_value());
  EXPECT_EQ(tr.time(), 2.0);
}

TEST(FrontTracker, RarefactionSliceCount) {
  const auto pipes = pass_through(Model::M3, Model::M3);
  const double eps = 0.01, w = 0.035;
  const auto& base = pipes[1].state;
  const auto R = wave_curve_forward(2, w, base, g);
  auto pr = constant_profiles(pipes);
  pr[1] = {{0.5, base}, {std::numeric_limits<double>::infinity(), R}};
  FrontTracker tr(coupling_of(pipes), pr, with_epsilon(eps));
  const auto& p = tr.pipes()[1];
  ASSERT_EQ(p.fronts.size(), static_cast<std::size_t>(std::ceil(w / eps)));
  double total = 0.0;
  for (std::size_t i = 0; i < p.fronts.size(); ++i) {
    const auto& f = p.fronts[i];
    EXPECT_EQ(f.kind, FrontKind::Rarefaction);
    EXPECT_EQ(f.family, 2);
    EXPECT_LE(std::abs(f.strength), eps * (1.0 + 1e-12));
    // slice speed lies within the fan
    EXPECT_GE(f.speed, characteristic_speed(base, 2, g) - 1e-12);
    EXPECT_LE(f.speed, characteristic_speed(R, 2, g) + 1e-12);
    if (i > 0) EXPECT_GE(f.speed, p.fronts[i - 1].speed);
    total += f.strength;
  }
  EXPECT_NEAR(total, w, 1e-12);
}

TEST(FrontTracker, ShockIsOneFront) {
  const auto pipes = pass_through(Model::M3, Model::M3);
  const auto& base = pipes[1].state;
  const auto R = wave_curve_forward(2, -0.05, base, g);
  auto pr = constant_profiles(pipes);
  pr[1] = {{0.5, base}, {std::numeric_limits<double>::infinity(), R}};
  FrontTracker tr(coupling_of(pipes), pr, with_epsilon(0.01));
  const auto& p = tr.pipes()[1];
  ASSERT_EQ(p.fronts.size(), 1u);
  EXPECT_EQ(p.fronts[0].kind, FrontKind::Shock);
  EXPECT_LT(oracle::rh_defect(p.states[0], p.states[1], p.fronts[0].speed, g), 1e-12);
  // an outgoing-pipe 2-wave leaves the junction: weight 1
  const auto gd = tr.glimm();
  EXPECT_NEAR(gd.V, 0.05, 1e-12);
  EXPECT_EQ(gd.Q, 0.0);
}

TEST(FrontTracker, M3JumpGivesAtMostTwoWaveGroups) {
  const auto pipes = pass_through(Model::M3, Model::M3);
  const auto& base = pipes[1].state;
  auto pr = constant_profiles(pipes);
  pr[1] = {{0.5, base}, {std::numeric_limits<double>::infinity(), PipeState::isentropic(Model::M3, base.rho * 0.9, base.q * 1.2, base.kappa)}};
  FrontTracker tr(coupling_of(pipes), pr, with_epsilon(0.005));
  const auto& p = tr.pipes()[1];
  std::set<int> families;
  for (const auto& f : p.fronts) {
    ASSERT_TRUE(f.physical());
    families.insert(f.family);
    if (f.kind == FrontKind::Rarefaction) EXPECT_LE(std::abs(f.strength), 0.005 * (1.0 + 1e-12));
  }
  EXPECT_LE(families.size(), 2u);
}

TEST(FrontTracker, SodStructure) {
  const auto pipes = pass_through(Model::M1, Model::M1, 3.5, 0.1);
  const auto& L = pipes[1].state;
  const auto R = PipeState::from_primitive(L.rho / 8.0, L.velocity(), pressure(L, g) / 10.0, g);
  auto pr = constant_profiles(pipes);
  pr[1] = {{0.5, L}, {std::numeric_limits<double>::infinity(), R}};
  FrontTracker tr(coupling_of(pipes), pr, with_epsilon(0.01));
  const auto& p = tr.pipes()[1];
  const auto sol = solve_riemann_m1(L, R, g);
  int fan = 0, contact = 0, shock = 0;
  for (std::size_t i = 0; i < p.fronts.size(); ++i) {
    const auto& f = p.fronts[i];
    if (f.family == 1) {
      EXPECT_EQ(f.kind, FrontKind::Rarefaction);
      ++fan;
    } else if (f.family == 2) {
      EXPECT_EQ(f.kind, FrontKind::Contact);
      EXPECT_NEAR(f.speed, sol.u_star, 1e-8);
      ++contact;
    } else {
      EXPECT_EQ(f.kind, FrontKind::Shock);
      EXPECT_NEAR(pressure(p.states[i], g), sol.p_star, 1e-8);
      EXPECT_LT(oracle::rh_defect(p.states[i], p.states[i + 1], f.speed, g), 1e-10);
      ++shock;
    }
  }
  EXPECT_GE(fan, 1);
  EXPECT_EQ(contact, 1);
  EXPECT_EQ(shock, 1);
}

TEST(FrontTracker, JunctionEmissionMatchesStarSolution) {
  std::mt19937_64 rng(101);
  const auto pipes = fixtures::fixed_point(rng, 4, g, 0.2, 0.4);
  auto pr = constant_profiles(pipes);
  const auto perturbed = fixtures::perturbed_state(pipes[0].state, rng, 0.01);
  pr[0] = {{0.3, perturbed}, {std::numeric_limits<double>::infinity(), pipes[0].state}};
  FrontTracker tr(coupling_of(pipes), pr, with_epsilon(0.01));
  auto traces = std::vector<PipeState>{};
  for (std::size_t j = 0; j < pipes.size(); ++j) traces.push_back(pr[j].front().state);
  std::vector<JunctionPipe> jp = pipes;
  jp[0].state = perturbed;
  const auto star = solve_junction(JunctionProblem(jp, g));
  for (std::size_t j = 0; j < pipes.size(); ++j) {
    EXPECT_EQ(tr.pipes()[j].trace().rho, star.star_states[j].rho);
    EXPECT_EQ(tr.pipes()[j].trace().q, star.star_states[j].q);
    EXPECT_FALSE(tr.pipes()[j].fronts.empty());
    // every emitted front leaves the junction
    for (const auto& f : tr.pipes()[j].fronts)
      if (f.x0 == 0.0) EXPECT_GT(f.speed, 0.0);
  }
}

TEST(FrontTracker, CollisionKinematics) {
  const auto pipes = pass_through(Model::M3, Model::M3);
  const auto& A = pipes[1].state;
  // a 2-shock at 0.2 and a 1-shock at 0.6 approach each other
  const auto B = wave_curve_forward(2, -0.02, A, g);
  const auto C = wave_curve_forward(1, 0.02, B, g);
  auto pr = constant_profiles(pipes);
  pr[1] = {{0.2, A}, {0.6, B}, {std::numeric_limits<double>::infinity(), C}};
  FrontTracker tr(coupling_of(pipes), pr, with_epsilon(0.01));
  const auto& p = tr.pipes()[1];
  ASSERT_EQ(p.fronts.size(), 2u);
  const double closing = p.fronts[0].speed - p.fronts[1].speed;
  ASSERT_GT(closing, 0.0);
  const double expected = 0.4 / closing;
  EXPECT_NEAR(tr.next_event_time(), expected, 1e-14);
  const auto rec = tr.step(10.0);
  ASSERT_TRUE(rec.has_value());
  EXPECT_EQ(rec->kind, EventKind::Collision);
  EXPECT_NEAR(rec->time, expected, 1e-14);
  // Q of the approaching pair before the event
  FrontTracker fresh(coupling_of(pipes), pr, with_epsilon(0.01));
  EXPECT_NEAR(fresh.glimm().Q, 0.02 * 0.02, 1e-12);
}

TEST(FrontTracker, WeakCrossingPassesThrough) {
  const auto pipes = pass_through(Model::M3, Model::M3);
  const auto& A = pipes[1].state;
  const auto B = wave_curve_forward(2, -1e-3, A, g);
  const auto C = wave_curve_forward(1, 1e-3, B, g);
  auto pr = constant_profiles(pipes);
  pr[1] = {{0.2, A}, {0.6, B}, {std::numeric_limits<double>::infinity(), C}};
  FrontTracker tr(coupling_of(pipes), pr, with_epsilon(0.1));
  ASSERT_EQ(tr.pipes()[1].fronts.size(), 2u);
  const double s2 = tr.pipes()[1].fronts[0].strength, s1 = tr.pipes()[1].fronts[1].strength;
  const auto rec = tr.step(10.0);
  ASSERT_TRUE(rec.has_value());
  EXPECT_TRUE(rec->simplified);
  const auto phys = physical_fronts(tr.pipes()[1]);
  ASSERT_EQ(phys.size(), 2u);
  EXPECT_EQ(phys[0]->family, 1);
  EXPECT_NEAR(phys[0]->strength, s1, 1e-14);
  EXPECT_EQ(phys[1]->family, 2);
  EXPECT_NEAR(phys[1]->strength, s2, 1e-14);
}

TEST(FrontTracker, SimplifiedShockMerge) {
  const auto pipes = pass_through(Model::M3, Model::M3);
  const auto& A = pipes[1].state;
  const double w1 = -0.02, w2 = -0.03;
  const auto B = wave_curve_forward(2, w1, A, g);
  const auto C = wave_curve_forward(2, w2, B, g);
  auto pr = constant_profiles(pipes);
  pr[1] = {{0.2, A}, {0.5, B}, {std::numeric_limits<double>::infinity(), C}};
  FrontTracker tr(coupling_of(pipes), pr, with_epsilon(0.1));
  EXPECT_NEAR(tr.glimm().Q, std::abs(w1 * w2), 1e-12);
  const auto rec = tr.step(100.0);
  ASSERT_TRUE(rec.has_value());
  EXPECT_EQ(rec->kind, EventKind::Collision);
  EXPECT_TRUE(rec->simplified);
  const auto& p = tr.pipes()[1];
  const auto phys = physical_fronts(p);
  ASSERT_EQ(phys.size(), 1u);
  EXPECT_EQ(phys[0]->kind, FrontKind::Shock);
  EXPECT_NEAR(phys[0]->strength, w1 + w2, 1e-15);
  // the defect between the merged shock state and C travels as a non-physical front
  const auto merged = wave_curve_forward(2, w1 + w2, A, g);
  const double defect = state_distance(merged, C);
  ASSERT_GT(defect, 0.0);
  ASSERT_EQ(p.fronts.size(), 2u);
  EXPECT_FALSE(p.fronts[1].physical());
  EXPECT_NEAR(p.fronts[1].strength, defect, 1e-14);
  EXPECT_EQ(p.fronts[1].speed, tr.lambda_hat());
}

TEST(FrontTracker, AccurateShockMerge) {
  const auto pipes = pass_through(Model::M3, Model::M3);
  const auto& A = pipes[1].state;
  const auto B = wave_curve_forward(2, -0.02, A, g);
  const auto C = wave_curve_forward(2, -0.03, B, g);
  auto pr = constant_profiles(pipes);
  pr[1] = {{0.2, A}, {0.5, B}, {std::numeric_limits<double>::infinity(), C}};
  FrontTracker tr(coupling_of(pipes), pr, with_epsilon(0.001));
  const auto rec = tr.step(100.0);
  ASSERT_TRUE(rec.has_value());
  EXPECT_FALSE(rec->simplified);
  const auto& p = tr.pipes()[1];
  for (std::size_t i = 0; i < p.fronts.size(); ++i) {
    const auto& f = p.fronts[i];
    ASSERT_TRUE(f.physical());
    if (f.kind == FrontKind::Shock) EXPECT_LT(oracle::rh_defect(p.states[i], p.states[i + 1], f.speed, g), 1e-12);
  }
  const auto o = oracle::iso_star(A, C, g);
  bool found = false;
  for (const auto& s : p.states) found = found || std::abs(s.rho - o.rho) < 1e-9;
  EXPECT_TRUE(found);
}

TEST(FrontTracker, WeakWaveReflectsAtJunction) {
  const auto pipes = pass_through(Model::M3, Model::M1);
  const auto& A = pipes[0].state;
  // a 1-wave in the incoming pipe runs towards the junction
  const auto B = wave_curve_forward(1, 1e-4 * A.rho, A, g);
  auto pr = constant_profiles(pipes);
  pr[0] = {{0.3, A}, {std::numeric_limits<double>::infinity(), B}};
  FrontTracker tr(coupling_of(pipes), pr, with_epsilon(0.1));
  ASSERT_EQ(tr.pipes()[0].fronts.size(), 1u);
  const auto rec = tr.step(100.0);
  ASSERT_TRUE(rec.has_value());
  EXPECT_EQ(rec->kind, EventKind::Junction);
  EXPECT_TRUE(rec->simplified);
  EXPECT_EQ(tr.pipes()[1].fronts.size(), 0u);
  ASSERT_EQ(tr.pipes()[0].fronts.size(), 1u);
  EXPECT_FALSE(tr.pipes()[0].fronts[0].physical());
  EXPECT_EQ(tr.pipes()[0].fronts[0].speed, tr.lambda_hat());
}

TEST(FrontTracker, StrongWaveResolvesJunction) {
  const auto pipes = pass_through(Model::M3, Model::M1);
  const auto& A = pipes[0].state;
  const auto B = wave_curve_forward(1, 0.05 * A.rho, A, g);
  auto pr = constant_profiles(pipes);
  pr[0] = {{0.3, A}, {std::numeric_limits<double>::infinity(), B}};
  FrontTracker tr(coupling_of(pipes), pr, with_epsilon(0.01));
  const auto rec = tr.step(100.0);
  ASSERT_TRUE(rec.has_value());
  EXPECT_EQ(rec->kind, EventKind::Junction);
  EXPECT_FALSE(rec->simplified);
  // traces equal a direct re-solve on the new trace data
  std::vector<JunctionPipe> jp = pipes;
  jp[0].state = B;
  const auto star = solve_junction(JunctionProblem(jp, g));
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_NEAR(tr.pipes()[j].trace().rho, star.star_states[j].rho, 1e-12);
    EXPECT_NEAR(tr.pipes()[j].trace().q, star.star_states[j].q, 1e-12);
  }
  EXPECT_FALSE(tr.pipes()[1].fronts.empty());
  EXPECT_LE(rec->emitted, tr.K_J() * rec->incident);
}

TEST(FrontTracker, RejectsBadInput) {
  const auto pipes = pass_through(Model::M3, Model::M3);
  auto pr = constant_profiles(pipes);
  EXPECT_THROW(FrontTracker(coupling_of(pipes), {pr[0]}), Error);
  EXPECT_THROW(FrontTracker(coupling_of(pipes), pr, with_epsilon(0.0)), Error);
  pr[1] = {{0.5, pipes[1].state}, {0.4, pipes[1].state}, {1.0, pipes[1].state}};
  EXPECT_THROW(FrontTracker(coupling_of(pipes), pr), Error);
}

TEST(FrontTracker, EventBudget) {
  const auto pipes = pass_through(Model::M3, Model::M3);
  const auto& A = pipes[1].state;
  const auto B = wave_curve_forward(2, -0.02, A, g);
  const auto C = wave_curve_forward(2, -0.03, B, g);
  auto pr = constant_profiles(pipes);
  pr[1] = {{0.2, A}, {0.5, B}, {std::numeric_limits<double>::infinity(), C}};
  auto opt = with_epsilon(0.1);
  opt.max_events = 0;
  FrontTracker tr(coupling_of(pipes), pr, opt);
  try {
    tr.advance_to(100.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoConvergence);
  }
}

namespace {

/// Smooth perturbation of a pass-through fixed point on every pipe.
struct SmoothCase {
  std::vector<JunctionPipe> pipes;
  std::vector<Profile> profiles;
};

SmoothCase smooth_case(double amp, double eps) {
  SmoothCase c;
  c.pipes = pass_through(Model::M1, Model::M3, 3.5, 0.3);
  for (std::size_t j = 0; j < c.pipes.size(); ++j) {
    const PipeState base = c.pipes[j].state;
    const double sgn = j == 0 ? 1.0 : -1.0;
    auto f = [&, base, sgn](double x) {
      const double b = amp * sgn * std::exp(-std::pow((x - 0.5) / 0.15, 2));
      if (base.model == Model::M1) return PipeState::euler(base.rho * (1 + b), base.q * (1 + 0.5 * b), base.E * (1 + b));
      return PipeState::isentropic(base.model, base.rho * (1 + b), base.q * (1 + 0.5 * b), base.kappa);
    };
    c.profiles.push_back(profile_from_function(f, 1.0, eps));
  }
  return c;
}

}  // namespace

TEST(FrontTracker, SmoothDataRunInvariants) {
  const double eps = 5e-3;
  auto c = smooth_case(0.02, eps);
  auto opt = with_epsilon(eps);
  opt.track_glimm = true;
  opt.record_segments = true;
  FrontTracker tr(coupling_of(c.pipes), c.profiles, opt);
  const double tv0 = tr.total_variation();
  double tv_max = tv0;
  std::vector<std::pair<double, Snapshot>> snaps;
  for (double t : {0.25, 0.5, 0.75, 1.0}) {
    tr.advance_to(t, [&](const InteractionRecord& r) {
      tv_max = std::max(tv_max, r.after->TV);
      if (r.kind == EventKind::Junction && !r.simplified) {
        EXPECT_LE(r.coupling_residual, 1e-10);
        EXPECT_LE(r.emitted, tr.K_J() * r.incident * (1.0 + 1e-9));
      }
    });
    snaps.emplace_back(t, tr.snapshot());
  }
  EXPECT_GT(tr.event_count(), 10u);
  EXPECT_LT(tr.max_front_count(), 20000u);
  // L1 Lipschitz in time
  const double L = tr.lambda_hat() * tv_max;
  for (std::size_t k = 1; k < snaps.size(); ++k)
    EXPECT_LE(l1_distance(snaps[k].second, snaps[k - 1].second, 3.0), L * (snaps[k].first - snaps[k - 1].first) * (1.0 + 1e-9));
  // weak-form residual against a basket of test functions
  const auto segs = tr.segments();
  double scale = 0.0;
  for (const auto& p : c.pipes) scale = std::max(scale, std::sqrt(p.state.conserved()[0] * p.state.conserved()[0] + p.state.q * p.state.q));
  for (int k = 0; k < 10; ++k) {
    TestFunction phi{static_cast<std::size_t>(k % 2), 0.3 + 0.08 * k, 0.25, 0.3 + 0.05 * k, 0.25};
    EXPECT_LE(weak_form_residual(segs, phi, g), 10.0 * eps * scale);
  }
}

TEST(OperatorSplitting, ZeroSourceIsHomogeneousEvolution) {
  auto c = smooth_case(0.02, 5e-3);
  FrontTracker a(coupling_of(c.pipes), c.profiles, with_epsilon(5e-3));
  FrontTracker b = a;
  const double dt = default_split_step(1.0, a);
  for (int k = 0; k < 4; ++k) {
    a = operator_split_step(a, no_source(), k * dt, dt);
    b.advance_to((k + 1) * dt);
  }
  const auto sa = a.snapshot(), sb = b.snapshot();
  ASSERT_EQ(sa.size(), sb.size());
  for (std::size_t j = 0; j < sa.size(); ++j) {
    ASSERT_EQ(sa[j].x, sb[j].x);
    ASSERT_EQ(sa[j].states.size(), sb[j].states.size());
    for (std::size_t i = 0; i < sa[j].states.size(); ++i) EXPECT_TRUE(sa[j].states[i] == sb[j].states[i]);
  }
}

TEST(OperatorSplitting, ConstantSourceIsEulerStep) {
  const auto pipes = pass_through(Model::M1, Model::M2);
  FrontTracker tr(coupling_of(pipes), constant_profiles(pipes));
  const Conserved gvec{0.01, -0.02, 0.03};
  SourceTerm G = [&](double, const PipeState&, std::size_t) { return gvec; };
  const double dt = 0.1;
  tr = operator_split_step(tr, G, 0.0, dt);
  for (std::size_t j = 0; j < 2; ++j) {
    const auto far = tr.sample(j, 1e6);
    const auto u0 = pipes[j].state.conserved(), u1 = far.conserved();
    for (std::size_t c = 0; c < system_size(far.model); ++c) EXPECT_NEAR(u1[c], u0[c] + dt * gvec[c], 1e-15);
  }
}

TEST(OperatorSplitting, FrictionFollowsTheOde) {
  const auto pipes = pass_through(Model::M3, Model::M3, 3.5, 0.4);
  const FrictionSource fr{0.02, 0.5};
  const double T = 1.0;
  double prev_err = 0.0;
  for (int n : {20, 40, 80}) {
    FrontTracker tr(coupling_of(pipes), constant_profiles(pipes), with_epsilon(1e-3));
    const double dt = T / n;
    double last_q = pipes[1].state.q;
    for (int k = 0; k < n; ++k) {
      tr = operator_split_step(tr, fr, k * dt, dt);
      const auto far = tr.sample(1, 1e6);
      EXPECT_LT(far.q, last_q);
      EXPECT_EQ(far.rho, pipes[1].state.rho);
      last_q = far.q;
    }
    const double k = fr.lambda_f / (2.0 * fr.diameter);
    const double q0 = pipes[1].state.q, rho = pipes[1].state.rho;
    const double exact = q0 / (1.0 + k * std::abs(q0) * T / rho);
    const double err = std::abs(last_q - exact);
    EXPECT_LT(err, 1e-2 * std::abs(q0));
    if (prev_err > 0.0) EXPECT_NEAR(prev_err / err, 2.0, 0.3);
    prev_err = err;
  }
}

TEST(OperatorSplitting, SourceLeavingSubsonicRegionThrows) {
  const auto pipes = pass_through(Model::M3, Model::M3);
  FrontTracker tr(coupling_of(pipes), constant_profiles(pipes));
  SourceTerm G = [](double, const PipeState& u, std::size_t) { return Conserved{0.0, -10.0 * u.q, 0.0}; };
  try {
    tr.apply_source(G, 0.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SubsonicViolation);
  }
}

TEST(Profiles, SamplingErrorBelowEpsilon) {
  auto f = [](double x) { return PipeState::isentropic(Model::M3, 1.0 + 0.1 * std::sin(6.0 * x), 0.3, 1.0); };
  for (double eps : {1e-2, 1e-3}) {
    const auto pr = profile_from_function(f, 1.0, eps);
    double err = 0.0;
    const int n = 20000;
    std::size_t k = 0;
    for (int i = 0; i < n; ++i) {
      const double x = (i + 0.5) / n;
      while (k + 1 < pr.size() && x >= pr[k].x_right) ++k;
      err += state_distance(f(x), pr[k].state) / n;
    }
    EXPECT_LE(err, eps);
  }
}

TEST(L1Distance, Basics) {
  Snapshot a{{{0.5}, {PipeState::isentropic(Model::M3, 1.0, 0.0, 1.0), PipeState::isentropic(Model::M3, 2.0, 0.0, 1.0)}}};
  Snapshot b{{{}, {PipeState::isentropic(Model::M3, 1.0, 0.0, 1.0)}}};
  EXPECT_NEAR(l1_distance(a, b, 1.0), 0.5, 1e-15);
  EXPECT_NEAR(l1_distance(a, a, 1.0), 0.0, 1e-15);
}
