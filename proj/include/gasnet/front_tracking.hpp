#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gasnet/compressor.hpp"
#include "gasnet/error.hpp"
#include "gasnet/junction.hpp"
#include "gasnet/lax_curves.hpp"
#include "gasnet/riemann.hpp"

namespace gasnet {

enum class FrontKind { Shock, Rarefaction, Contact, NonPhysical };

inline std::string_view to_string(FrontKind k) {
  switch (k) {
    case FrontKind::Shock: return "shock";
    case FrontKind::Rarefaction: return "rarefaction";
    case FrontKind::Contact: return "contact";
    case FrontKind::NonPhysical: return "non_physical";
  }
  return "?";
}

/// A moving discontinuity. Position is stored as (x0, t0) plus a constant
/// speed so that stopping the clock at arbitrary times never perturbs it.
struct Front {
  double x0 = 0.0;
  double t0 = 0.0;
  double speed = 0.0;
  int family = 0;  ///< 0 for non-physical fronts
  FrontKind kind = FrontKind::Shock;
  double strength = 0.0;  ///< parameter jump right - left; state-jump norm for non-physical fronts

  double position(double t) const { return x0 + speed * (t - t0); }
  bool physical() const { return kind != FrontKind::NonPhysical; }
};

/// Fronts of one pipe in increasing position; states[i] lies left of fronts[i].
struct PipeTrack {
  std::vector<Front> fronts;
  std::vector<PipeState> states;

  const PipeState& trace() const { return states.front(); }
  const PipeState& left_state(std::size_t i) const { return states[i]; }
  const PipeState& right_state(std::size_t i) const { return states[i + 1]; }
};

/// Piecewise-constant profile: each piece holds up to x_right; the last piece
/// extends to infinity (its x_right is ignored).
struct ProfilePiece {
  double x_right = std::numeric_limits<double>::infinity();
  PipeState state;
};
using Profile = std::vector<ProfilePiece>;

/// Piecewise-constant sampling of a BV function on [0, length]; the cell
/// width keeps the L1 sampling error below epsilon.
inline Profile profile_from_function(const std::function<PipeState(double)>& f, double length, double epsilon) {
  const int fine = 4000;
  double tv = 0.0;
  PipeState prev = f(0.0);
  for (int k = 1; k <= fine; ++k) {
    const PipeState cur = f(length * k / fine);
    tv += state_distance(prev, cur);
    prev = cur;
  }
  const double h = tv > 0.0 ? std::min(length / 8.0, epsilon / tv) : length;
  const int cells = std::max(1, static_cast<int>(std::ceil(length / h)));
  Profile out;
  for (int k = 0; k < cells; ++k) {
    const double a = length * k / cells, b = length * (k + 1) / cells;
    const PipeState s = f(0.5 * (a + b));
    if (!out.empty() && out.back().state == s) {
      out.back().x_right = b;
      continue;
    }
    out.push_back({b, s});
  }
  out.push_back({std::numeric_limits<double>::infinity(), f(length)});
  return out;
}

/// Junction or compressor coupling as seen by the simulator.
class NetworkCoupling {
 public:
  static NetworkCoupling junction(std::vector<PipeSpec> pipes, GasConstants g, JunctionOptions opt = {}) {
    NetworkCoupling c;
    c.pipes_ = std::move(pipes);
    c.gas_ = g;
    c.opt_ = opt;
    return c;
  }

  static NetworkCoupling compressor(PipeSpec inlet, PipeSpec outlet, CompressorControl control, GasConstants g,
                                    JunctionOptions opt = {}) {
    NetworkCoupling c;
    c.pipes_ = {std::move(inlet), std::move(outlet)};
    c.gas_ = g;
    c.control_ = control;
    c.opt_ = opt;
    return c;
  }

  const std::vector<PipeSpec>& pipes() const { return pipes_; }
  const GasConstants& gas() const { return gas_; }
  bool is_compressor() const { return control_.has_value(); }
  const std::optional<CompressorControl>& control() const { return control_; }
  const JunctionOptions& options() const { return opt_; }

  StarSolution solve(const std::vector<PipeState>& traces) const {
    if (control_) {
      CompressorProblem pb({pipes_[0], traces.at(0)}, {pipes_[1], traces.at(1)}, *control_, gas_);
      return solve_compressor(pb, opt_).star;
    }
    std::vector<JunctionPipe> jp;
    for (std::size_t j = 0; j < pipes_.size(); ++j) jp.push_back({pipes_[j], traces.at(j)});
    return solve_junction(JunctionProblem(std::move(jp), gas_), opt_);
  }

 private:
  std::vector<PipeSpec> pipes_;
  GasConstants gas_;
  std::optional<CompressorControl> control_;
  JunctionOptions opt_;
};

struct TrackingOptions {
  double epsilon = 1e-2;        ///< rarefaction slice size; the simplified solver acts below epsilon^2
  double lambda_hat = 0.0;      ///< non-physical speed; 0 picks 1.1 x the fastest characteristic at t = 0
  double K_hat_J = 0.0;         ///< 0 picks 1 / (2 V(0))
  std::size_t max_events = 1000000;
  double skip_tolerance = 1e-12;  ///< relative size below which a wave is not emitted
  bool estimate_kj = true;
  bool track_glimm = false;       ///< evaluate Y before and after every event
  bool record_segments = false;   ///< keep front trajectories for weak-form checks
};

enum class EventKind { Collision, Junction, Source };

inline std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::Collision: return "collision";
    case EventKind::Junction: return "junction";
    case EventKind::Source: return "source";
  }
  return "?";
}

struct GlimmDiagnostics {
  double V = 0.0;
  double Q = 0.0;
  double Y = 0.0;
  double TV = 0.0;
  double K_J = 0.0;
  double K_hat_J = 0.0;
  std::size_t fronts = 0;
  std::size_t nonphysical = 0;
};

struct InteractionRecord {
  double time = 0.0;
  EventKind kind = EventKind::Collision;
  std::size_t pipe = 0;
  bool simplified = false;
  double incident = 0.0;  ///< |v^-| at the junction; |v_a| |v_b| for collisions
  double emitted = 0.0;   ///< total strength of the outgoing fronts
  double coupling_residual = 0.0;  ///< scaled residual of the junction re-solve, if any
  std::optional<GlimmDiagnostics> before, after;
};

/// Trajectory piece of one front, for weak-form checks.
struct FrontSegment {
  std::size_t pipe = 0;
  double x0 = 0.0, t0 = 0.0, t1 = 0.0, speed = 0.0;
  bool physical = true;
  PipeState left, right;
};

struct PipeProfile {
  std::vector<double> x;  ///< breakpoints
  std::vector<PipeState> states;
};
using Snapshot = std::vector<PipeProfile>;

using SourceTerm = std::function<Conserved(double t, const PipeState& u, std::size_t pipe)>;

inline SourceTerm no_source() {
  return [](double, const PipeState&, std::size_t) { return Conserved{0.0, 0.0, 0.0}; };
}

/// Wall friction G = (0, -lambda_f q|q| / (2 D rho), 0).
struct FrictionSource {
  double lambda_f = 0.0;
  double diameter = 1.0;
  Conserved operator()(double, const PipeState& u, std::size_t) const {
    return {0.0, -lambda_f * u.q * std::abs(u.q) / (2.0 * diameter * u.rho), 0.0};
  }
};

namespace detail {

inline bool approaching_family(PipeRole role, int family) {
  if (role == PipeRole::M1Incoming) return family == 1 || family == 2;
  return family == 1;
}

inline double front_speed(int family, FrontKind kind, const PipeState& a, const PipeState& b, const GasConstants& g) {
  if (kind == FrontKind::Contact) return a.velocity();
  const double avg = 0.5 * (characteristic_speed(a, family, g) + characteristic_speed(b, family, g));
  if (kind == FrontKind::Rarefaction) return avg;
  const double drho = b.rho - a.rho;
  if (std::abs(drho) <= 1e-10 * a.rho) return avg;
  return (b.q - a.q) / drho;
}

}  // namespace detail

class FrontTracker {
 public:
  FrontTracker(NetworkCoupling coupling, const std::vector<Profile>& initial, TrackingOptions opt = {})
      : coupling_(std::move(coupling)), opt_(opt) {
    const auto& specs = coupling_.pipes();
    if (initial.size() != specs.size()) fail(ErrorCode::InvalidArgument, "one initial profile per pipe is required");
    if (!(opt_.epsilon > 0.0)) fail(ErrorCode::InvalidArgument, "epsilon must be positive");
    pipes_.resize(specs.size());
    for (std::size_t j = 0; j < specs.size(); ++j) {
      const Profile& pr = initial[j];
      if (pr.empty()) fail(ErrorCode::InvalidArgument, "empty initial profile for pipe '" + specs[j].id + "'");
      for (std::size_t k = 0; k < pr.size(); ++k) {
        if (pr[k].state.model != specs[j].model) fail(ErrorCode::InvalidArgument, "profile model mismatch in pipe '" + specs[j].id + "'");
        validate_state(pr[k].state);
        if (k + 1 < pr.size() && !(pr[k].x_right > (k ? pr[k - 1].x_right : 0.0)))
          fail(ErrorCode::InvalidArgument, "profile breakpoints must increase from x > 0");
      }
    }
    // The junction Riemann problem and then every interior jump.
    std::vector<PipeState> traces;
    for (const auto& pr : initial) traces.push_back(pr.front().state);
    for (std::size_t j = 0; j < specs.size(); ++j) pipes_[j].states = {traces[j]};
    star_ = coupling_.solve(traces);
    if (opt_.lambda_hat > 0.0) {
      lambda_hat_ = opt_.lambda_hat;
    } else {
      double m = 0.0;
      auto upd = [&](const PipeState& s) {
        const auto ev = eigenvalues(s, gas());
        for (std::size_t i = 0; i < ev.count; ++i) m = std::max(m, std::abs(ev[i]));
      };
      for (const auto& pr : initial)
        for (const auto& piece : pr) upd(piece.state);
      for (const auto& s : star_.star_states) upd(s);
      for (const auto& s : star_.wave_states) upd(s);
      lambda_hat_ = 1.1 * m;
    }
    if (opt_.estimate_kj) estimate_kj(traces);
    emit_from_star(star_, 0.0);
    for (std::size_t j = 0; j < specs.size(); ++j) {
      const Profile& pr = initial[j];
      for (std::size_t k = 0; k + 1 < pr.size(); ++k) {
        Emission e = accurate(pr[k].state, pr[k + 1].state, pr[k].x_right, 0.0, specs[j].model);
        append(pipes_[j], e, pr[k + 1].state);
      }
    }
    const GlimmDiagnostics g0 = glimm_raw(1.0);
    V0_ = g0.V;
    K_hat_J_ = opt_.K_hat_J > 0.0 ? opt_.K_hat_J : (V0_ > 0.0 ? 1.0 / (2.0 * V0_) : 1.0);
    update_max_fronts();
  }

  double time() const { return t_; }
  const std::vector<PipeTrack>& pipes() const { return pipes_; }
  const NetworkCoupling& coupling() const { return coupling_; }
  const GasConstants& gas() const { return coupling_.gas(); }
  const TrackingOptions& options() const { return opt_; }
  const StarSolution& last_star() const { return star_; }
  double lambda_hat() const { return lambda_hat_; }
  double K_J() const { return K_J_; }
  double K_hat_J() const { return K_hat_J_; }
  double V0() const { return V0_; }
  std::size_t event_count() const { return events_; }
  std::size_t max_front_count() const { return max_fronts_; }

  std::size_t front_count() const {
    std::size_t n = 0;
    for (const auto& p : pipes_) n += p.fronts.size();
    return n;
  }

  /// Time of the next collision or junction hit; infinity if none.
  double next_event_time() const {
    Pending ev = find_next();
    return ev.time;
  }

  /// Processes the next event if it happens no later than `horizon`;
  /// otherwise moves the clock to `horizon` and returns nothing.
  std::optional<InteractionRecord> step(double horizon) {
    const Pending ev = find_next();
    if (ev.time > horizon || !std::isfinite(ev.time)) {
      if (!std::isfinite(horizon)) fail(ErrorCode::EventStarvation, "no further events and no finite horizon");
      t_ = horizon;
      return std::nullopt;
    }
    if (++events_ > opt_.max_events) fail(ErrorCode::NoConvergence, "front-tracking event budget exhausted");
    t_ = std::max(t_, ev.time);
    InteractionRecord rec;
    rec.time = t_;
    rec.pipe = ev.pipe;
    if (opt_.track_glimm) rec.before = glimm();
    if (ev.junction) {
      rec.kind = EventKind::Junction;
      junction_event(ev.pipe, rec);
      touch_all();
    } else {
      rec.kind = EventKind::Collision;
      collision_event(ev.pipe, ev.index, rec);
      touch(ev.pipe);
    }
    if (opt_.track_glimm) rec.after = glimm();
    update_max_fronts();
    return rec;
  }

  /// Runs every event up to time t and stops the clock there.
  void advance_to(double t, const std::function<void(const InteractionRecord&)>& on_event = {}) {
    while (auto rec = step(t))
      if (on_event) on_event(*rec);
  }

  /// Adds dt * G(t0, U) to every constant state, then re-resolves the fronts
  /// whose neighbouring states changed and the junction.
  InteractionRecord apply_source(const SourceTerm& G, double t0, double dt) {
    const auto& g = gas();
    InteractionRecord rec;
    rec.time = t_;
    rec.kind = EventKind::Source;
    if (opt_.track_glimm) rec.before = glimm();
    bool trace_changed = false;
    for (std::size_t j = 0; j < pipes_.size(); ++j) {
      PipeTrack& p = pipes_[j];
      std::vector<PipeState> next = p.states;
      std::vector<char> changed(next.size(), 0);
      const std::size_t m = system_size(coupling_.pipes()[j].model);
      for (std::size_t i = 0; i < next.size(); ++i) {
        const Conserved src = G(t0, p.states[i], j);
        Conserved u = p.states[i].conserved();
        for (std::size_t c = 0; c < m; ++c) u[c] += dt * src[c];
        next[i] = p.states[i].with_conserved(u);
        if (next[i] == p.states[i]) continue;
        changed[i] = 1;
        validate_state(next[i]);
        const SubsonicClass want = coupling_.pipes()[j].orientation == Orientation::Incoming ? SubsonicClass::DMinus : SubsonicClass::DPlus;
        if (classify_subsonic(next[i], g) != want)
          fail(ErrorCode::SubsonicViolation, "source term pushed a state of pipe '" + coupling_.pipes()[j].id + "' out of its subsonic region");
      }
      if (changed[0]) trace_changed = true;
      if (std::find(changed.begin(), changed.end(), 1) != changed.end()) touch(j);
      PipeTrack rebuilt;
      rebuilt.states.push_back(next[0]);
      for (std::size_t i = 0; i < p.fronts.size(); ++i) {
        const Front& f = p.fronts[i];
        if (!changed[i] && !changed[i + 1]) {
          rebuilt.fronts.push_back(f);
          rebuilt.states.push_back(next[i + 1]);
          continue;
        }
        record_segment(j, f, p.states[i], p.states[i + 1]);
        const double x = f.position(t_);
        if (!f.physical()) {
          Front nf = f;
          nf.x0 = x;
          nf.t0 = t_;
          nf.strength = state_distance(next[i], next[i + 1]);
          rebuilt.fronts.push_back(nf);
          rebuilt.states.push_back(next[i + 1]);
          continue;
        }
        Emission e = reresolve(next[i], next[i + 1], f.family, x, coupling_.pipes()[j].model);
        rec.emitted += e.total;
        append(rebuilt, e, next[i + 1]);
      }
      p = std::move(rebuilt);
    }
    if (trace_changed) {
      star_ = coupling_.solve(traces());
      rec.coupling_residual = star_.scaled_residual;
      rec.emitted += emit_from_star(star_, t_);
      touch_all();
    }
    if (opt_.track_glimm) rec.after = glimm();
    update_max_fronts();
    return rec;
  }

  std::vector<PipeState> traces() const {
    std::vector<PipeState> t;
    for (const auto& p : pipes_) t.push_back(p.trace());
    return t;
  }

  double total_variation() const {
    double tv = 0.0;
    for (const auto& p : pipes_)
      for (std::size_t i = 0; i + 1 < p.states.size(); ++i) tv += state_distance(p.states[i], p.states[i + 1]);
    return tv;
  }

  GlimmDiagnostics glimm() const { return glimm_raw(K_hat_J_); }

  /// State at position x of pipe j; a point on a front takes the right state.
  PipeState sample(std::size_t j, double x) const {
    const PipeTrack& p = pipes_.at(j);
    std::size_t i = 0;
    while (i < p.fronts.size() && p.fronts[i].position(t_) <= x) ++i;
    return p.states[i];
  }

  Snapshot snapshot() const {
    Snapshot s;
    for (const auto& p : pipes_) {
      PipeProfile pp;
      for (const auto& f : p.fronts) pp.x.push_back(std::max(0.0, f.position(t_)));
      pp.states = p.states;
      s.push_back(std::move(pp));
    }
    return s;
  }

  /// Recorded trajectories plus the live fronts up to the current time.
  std::vector<FrontSegment> segments() const {
    std::vector<FrontSegment> out = segments_;
    for (std::size_t j = 0; j < pipes_.size(); ++j) {
      const auto& p = pipes_[j];
      for (std::size_t i = 0; i < p.fronts.size(); ++i) {
        const Front& f = p.fronts[i];
        out.push_back({j, f.x0, f.t0, t_, f.speed, f.physical(), p.states[i], p.states[i + 1]});
      }
    }
    return out;
  }

 private:
  struct Emission {
    std::vector<Front> fronts;
    std::vector<PipeState> rights;  ///< right state of every front; the last one is replaced on append
    double total = 0.0;
  };

  struct Pending {
    double time = std::numeric_limits<double>::infinity();
    std::size_t pipe = 0;
    std::size_t index = 0;
    bool junction = false;
  };

  double param_tol(int family, const PipeState& s) const {
    return opt_.skip_tolerance * std::abs(wave_parameter(family, s, gas()));
  }

  void push_front(Emission& e, int family, FrontKind kind, double strength, const PipeState& a, const PipeState& b,
                  double x, double t) const {
    Front f;
    f.x0 = x;
    f.t0 = t;
    f.family = family;
    f.kind = kind;
    f.strength = strength;
    f.speed = kind == FrontKind::NonPhysical ? lambda_hat_ : detail::front_speed(family, kind, a, b, gas());
    e.fronts.push_back(f);
    e.rights.push_back(b);
    e.total += std::abs(strength);
  }

  /// One wave from a to b, sliced when it is a rarefaction.
  void push_wave(Emission& e, int family, const PipeState& a, const PipeState& b, double x, double t) const {
    const auto& g = gas();
    const double w = wave_parameter(family, b, g) - wave_parameter(family, a, g);
    if (a.model == Model::M1 && family == 2) {
      push_front(e, family, FrontKind::Contact, w, a, b, x, t);
      return;
    }
    if (is_compressive(family, a, b, g)) {
      push_front(e, family, FrontKind::Shock, w, a, b, x, t);
      return;
    }
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(w) / opt_.epsilon - 1e-9)));
    PipeState left = a;
    for (int k = 1; k <= n; ++k) {
      const PipeState right = k == n ? b : wave_curve_forward(family, w * k / n, a, g);
      push_front(e, family, FrontKind::Rarefaction, wave_parameter(family, right, g) - wave_parameter(family, left, g),
                 left, right, x, t);
      left = right;
    }
  }

  void push_nonphysical(Emission& e, const PipeState& a, const PipeState& b, double x, double t) const {
    const double d = state_distance(a, b);
    const double ref = std::max(std::abs(b.rho), 1.0);
    if (d <= 1e-13 * ref) return;
    push_front(e, 0, FrontKind::NonPhysical, d, a, b, x, t);
  }

  /// Fronts along a chain of states, each link a single wave of the given family.
  Emission chain_fronts(const std::vector<PipeState>& chain, const std::vector<int>& families, double x, double t) const {
    Emission e;
    PipeState cur = chain.front();
    for (std::size_t i = 0; i < families.size(); ++i) {
      const int fam = families[i];
      const double w = wave_parameter(fam, chain[i + 1], gas()) - wave_parameter(fam, chain[i], gas());
      if (std::abs(w) <= param_tol(fam, chain[i])) continue;
      push_wave(e, fam, cur, chain[i + 1], x, t);
      cur = chain[i + 1];
    }
    return e;
  }

  /// Fronts of prescribed families and strengths applied in order from `left`,
  /// closed by a non-physical front towards `right`.
  Emission forward_fronts(const PipeState& left, const PipeState& right, const std::vector<std::pair<int, double>>& waves,
                          double x, double t) const {
    Emission e;
    PipeState cur = left;
    for (const auto& [fam, w] : waves) {
      if (w == 0.0) continue;
      const PipeState next = wave_curve_forward(fam, w, cur, gas());
      push_wave(e, fam, cur, next, x, t);
      cur = next;
    }
    push_nonphysical(e, cur, right, x, t);
    return e;
  }

  /// Riemann tolerance at the rounding level of the data, so that emitted
  /// waves lie on their curves to machine precision.
  RiemannOptions tight(const PipeState& L, const PipeState& R) const {
    const double c = sound_speed(L, gas()) + sound_speed(R, gas());
    const double scale = L.model == Model::M3 ? std::abs(L.q) + std::abs(R.q) + c * (L.rho + R.rho)
                                              : std::abs(L.velocity()) + std::abs(R.velocity()) + c;
    return {16.0 * std::numeric_limits<double>::epsilon() * scale, 200};
  }

  std::vector<PipeState> riemann_chain(const PipeState& L, const PipeState& R, Model model) const {
    if (model == Model::M1) {
      const auto sol = solve_riemann_m1(L, R, gas(), tight(L, R));
      return {L, sol.left_star(), sol.right_star(), R};
    }
    const auto sol = solve_riemann_iso(L, R, model, gas(), tight(L, R));
    return {L, sol.star(), R};
  }

  static std::vector<int> families_of(Model model) { return model == Model::M1 ? std::vector<int>{1, 2, 3} : std::vector<int>{1, 2}; }

  Emission accurate(const PipeState& L, const PipeState& R, double x, double t, Model model) const {
    return chain_fronts(riemann_chain(L, R, model), families_of(model), x, t);
  }

  /// Riemann solve keeping the given family; the other waves below epsilon^2
  /// are folded into a non-physical front.
  Emission reresolve(const PipeState& L, const PipeState& R, int keep, double x, Model model) const {
    const std::vector<PipeState> chain = riemann_chain(L, R, model);
    const std::vector<int> fams = families_of(model);
    const double eps2 = opt_.epsilon * opt_.epsilon;
    bool fold = false;
    std::vector<std::pair<int, double>> waves;
    for (std::size_t i = 0; i < fams.size(); ++i) {
      const double w = wave_parameter(fams[i], chain[i + 1], gas()) - wave_parameter(fams[i], chain[i], gas());
      if (std::abs(w) <= param_tol(fams[i], chain[i])) continue;
      if (fams[i] != keep && std::abs(w) < eps2) {
        fold = true;
        continue;
      }
      waves.emplace_back(fams[i], w);
    }
    if (!fold) return chain_fronts(chain, fams, x, t_);
    return forward_fronts(L, R, waves, x, t_);
  }

  /// Inserts emitted fronts after the current last state of `p`; `right` is
  /// the state that follows them.
  static void append(PipeTrack& p, Emission& e, const PipeState& right) {
    for (std::size_t k = 0; k < e.fronts.size(); ++k) {
      p.fronts.push_back(e.fronts[k]);
      p.states.push_back(k + 1 == e.fronts.size() ? right : e.rights[k]);
    }
  }

  /// Emits the waves between the star traces and the current traces.
  double emit_from_star(const StarSolution& star, double t) {
    double total = 0.0;
    for (std::size_t j = 0; j < pipes_.size(); ++j) {
      PipeTrack& p = pipes_[j];
      const PipeState old = p.trace();
      const PipeRole role = pipe_role(coupling_.pipes()[j]);
      Emission e = role == PipeRole::M1Outgoing
                       ? chain_fronts({star.star_states[j], star.wave_states[j], old}, {2, 3}, 0.0, t)
                       : chain_fronts({star.star_states[j], old}, {role == PipeRole::M1Incoming ? 3 : 2}, 0.0, t);
      if (e.fronts.empty()) continue;
      PipeTrack np;
      np.states.push_back(star.star_states[j]);
      append(np, e, old);
      for (std::size_t i = 0; i < p.fronts.size(); ++i) {
        np.fronts.push_back(p.fronts[i]);
        np.states.push_back(p.states[i + 1]);
      }
      p = std::move(np);
      total += e.total;
    }
    return total;
  }

  void record_segment(std::size_t j, const Front& f, const PipeState& l, const PipeState& r) {
    if (!opt_.record_segments) return;
    segments_.push_back({j, f.x0, f.t0, t_, f.speed, f.physical(), l, r});
  }

  void touch(std::size_t j) {
    if (stale_.size() != pipes_.size()) stale_.assign(pipes_.size(), 1);
    stale_[j] = 1;
  }

  void touch_all() { stale_.assign(pipes_.size(), 1); }

  Pending pipe_next(std::size_t j) const {
    Pending best;
    const auto& fr = pipes_[j].fronts;
    if (!fr.empty() && fr[0].speed < 0.0) {
      const double th = std::max(t_, fr[0].t0 - fr[0].x0 / fr[0].speed);
      best = {th, j, 0, true};
    }
    for (std::size_t i = 0; i + 1 < fr.size(); ++i) {
      const double closing = fr[i].speed - fr[i + 1].speed;
      if (!(closing > 0.0)) continue;
      const double gap = std::max(0.0, fr[i + 1].position(t_) - fr[i].position(t_));
      const double tc = t_ + gap / closing;
      if (tc < best.time) best = {tc, j, i, false};
    }
    return best;
  }

  Pending find_next() const {
    if (stale_.size() != pipes_.size()) stale_.assign(pipes_.size(), 1);
    next_.resize(pipes_.size());
    Pending best;
    for (std::size_t j = 0; j < pipes_.size(); ++j) {
      if (stale_[j]) {
        next_[j] = pipe_next(j);
        stale_[j] = 0;
      }
      if (next_[j].time < best.time) best = next_[j];
    }
    return best;
  }

  void replace(PipeTrack& p, std::size_t i, Emission& e) {
    // fronts i, i+1 and the state between them give way to e; the vectors
    // are overwritten in place where the sizes allow it
    const PipeState right = p.states[i + 2];
    const std::size_t n = e.fronts.size();
    if (n == 0) {
      // the two fronts annihilated; merge the neighbouring regions
      const auto fi = p.fronts.begin() + static_cast<std::ptrdiff_t>(i);
      const auto si = p.states.begin() + static_cast<std::ptrdiff_t>(i) + 1;
      p.fronts.erase(fi, fi + 2);
      p.states.erase(si, si + 2);
      p.states[i] = right;
      return;
    }
    const std::size_t keep = std::min<std::size_t>(n, 2);
    for (std::size_t k = 0; k < keep; ++k) {
      p.fronts[i + k] = e.fronts[k];
      p.states[i + 1 + k] = k + 1 == n ? right : e.rights[k];
    }
    if (n == 1) {
      p.fronts.erase(p.fronts.begin() + static_cast<std::ptrdiff_t>(i) + 1);
      p.states.erase(p.states.begin() + static_cast<std::ptrdiff_t>(i) + 2);
    } else if (n > 2) {
      std::vector<PipeState> rights(e.rights.begin() + 2, e.rights.begin() + static_cast<std::ptrdiff_t>(n));
      rights.back() = right;
      p.fronts.insert(p.fronts.begin() + static_cast<std::ptrdiff_t>(i) + 2, e.fronts.begin() + 2, e.fronts.end());
      p.states.insert(p.states.begin() + static_cast<std::ptrdiff_t>(i) + 3, rights.begin(), rights.end());
    }
  }

  void collision_event(std::size_t j, std::size_t i, InteractionRecord& rec) {
    PipeTrack& p = pipes_[j];
    const Front a = p.fronts[i], b = p.fronts[i + 1];
    const PipeState L = p.states[i], M = p.states[i + 1], R = p.states[i + 2];
    record_segment(j, a, L, M);
    record_segment(j, b, M, R);
    const double x = std::max(0.0, 0.5 * (a.position(t_) + b.position(t_)));
    const Model model = coupling_.pipes()[j].model;
    const double eps2 = opt_.epsilon * opt_.epsilon;
    rec.incident = std::abs(a.strength) * std::abs(b.strength);
    Emission e;
    if (!a.physical() && b.physical()) {
      rec.simplified = true;
      e = forward_fronts(L, R, {{b.family, b.strength}}, x, t_);
    } else if (!a.physical() || !b.physical()) {
      e = accurate(L, R, x, t_, model);
    } else if (rec.incident < eps2) {
      rec.simplified = true;
      if (a.family == b.family)
        e = forward_fronts(L, R, {{a.family, a.strength + b.strength}}, x, t_);
      else
        e = forward_fronts(L, R, {{b.family, b.strength}, {a.family, a.strength}}, x, t_);
    } else {
      e = accurate(L, R, x, t_, model);
    }
    rec.emitted = e.total;
    replace(p, i, e);
  }

  void junction_event(std::size_t j, InteractionRecord& rec) {
    PipeTrack& p = pipes_[j];
    const Front f = p.fronts[0];
    rec.incident = std::abs(f.strength);
    record_segment(j, f, p.states[0], p.states[1]);
    if (rec.incident < opt_.epsilon * opt_.epsilon) {
      // reflect into a non-physical front; the junction trace is kept
      rec.simplified = true;
      Front nf;
      nf.x0 = 0.0;
      nf.t0 = t_;
      nf.family = 0;
      nf.kind = FrontKind::NonPhysical;
      nf.speed = lambda_hat_;
      nf.strength = state_distance(p.states[0], p.states[1]);
      p.fronts[0] = nf;
      rec.emitted = nf.strength;
      return;
    }
    p.fronts.erase(p.fronts.begin());
    p.states.erase(p.states.begin());
    star_ = coupling_.solve(traces());
    rec.coupling_residual = star_.scaled_residual;
    rec.emitted = emit_from_star(star_, t_);
  }

  GlimmDiagnostics glimm_raw(double khat) const {
    GlimmDiagnostics d;
    d.K_J = K_J_;
    d.K_hat_J = khat;
    for (std::size_t j = 0; j < pipes_.size(); ++j) {
      const PipeRole role = pipe_role(coupling_.pipes()[j]);
      const auto& fr = pipes_[j].fronts;
      double np_sum = 0.0;
      double fam_sum[4] = {0, 0, 0, 0}, shock_sum[4] = {0, 0, 0, 0};
      for (const auto& f : fr) {
        const double v = std::abs(f.strength);
        ++d.fronts;
        if (!f.physical()) {
          ++d.nonphysical;
          d.V += v;
          np_sum += v;
          continue;
        }
        d.V += (detail::approaching_family(role, f.family) ? 2.0 * K_J_ : 1.0) * v;
        double left = np_sum;
        for (int k = f.family + 1; k <= 3; ++k) left += fam_sum[k];
        left += f.kind == FrontKind::Shock ? fam_sum[f.family] : shock_sum[f.family];
        d.Q += left * v;
        fam_sum[f.family] += v;
        if (f.kind == FrontKind::Shock) shock_sum[f.family] += v;
      }
    }
    d.TV = total_variation();
    d.Y = d.V + khat * d.Q;
    return d;
  }

  /// K_J from small incident waves on every approaching family at the t = 0 traces.
  void estimate_kj(const std::vector<PipeState>& traces0) {
    const auto& g = gas();
    std::vector<PipeState> base = star_.star_states;
    double worst = 0.0;
    for (std::size_t k = 0; k < base.size(); ++k) {
      const PipeRole role = pipe_role(coupling_.pipes()[k]);
      for (int fam = 1; fam <= family_count(base[k].model); ++fam) {
        if (!detail::approaching_family(role, fam)) continue;
        for (double sgn : {1.0, -1.0}) {
          const double w = sgn * 1e-4 * wave_parameter(fam, base[k], g);
          std::vector<PipeState> tr = base;
          tr[k] = wave_curve_forward(fam, w, base[k], g);
          const StarSolution s = coupling_.solve(tr);
          double emitted = 0.0;
          for (std::size_t j = 0; j < tr.size(); ++j) {
            const PipeRole rj = pipe_role(coupling_.pipes()[j]);
            if (rj == PipeRole::M1Outgoing) {
              emitted += std::abs(s.wave_states[j].rho - s.star_states[j].rho);
              emitted += std::abs(pressure(tr[j], g) - s.sigma[j]);
            } else {
              emitted += std::abs(wave_parameter(rj == PipeRole::M1Incoming ? 3 : 2, tr[j], g) - s.sigma[j]);
            }
          }
          worst = std::max(worst, emitted / std::abs(w));
          worst = std::max(worst, state_distance(base[k], tr[k]) / std::abs(w));
        }
      }
    }
    (void)traces0;
    K_J_ = std::max(1.0, 2.0 * worst);
  }

  void update_max_fronts() { max_fronts_ = std::max(max_fronts_, front_count()); }

  NetworkCoupling coupling_;
  TrackingOptions opt_;
  std::vector<PipeTrack> pipes_;
  StarSolution star_;
  double t_ = 0.0;
  double lambda_hat_ = 0.0;
  double K_J_ = 1.0;
  double K_hat_J_ = 1.0;
  double V0_ = 0.0;
  std::size_t events_ = 0;
  std::size_t max_fronts_ = 0;
  std::vector<FrontSegment> segments_;
  // next event per pipe, recomputed only for pipes whose fronts changed
  mutable std::vector<Pending> next_;
  mutable std::vector<char> stale_;
};

/// One splitting step: homogeneous evolution to t0 + dt, then the explicit
/// source increment evaluated on the evolved state.
inline FrontTracker operator_split_step(FrontTracker state, const SourceTerm& G, double t0, double dt) {
  state.advance_to(t0 + dt);
  state.apply_source(G, t0, dt);
  return state;
}

/// Splitting step from a CFL-type length scale: length / (4 max speed).
inline double default_split_step(double length, const FrontTracker& tr) { return length / (4.0 * tr.lambda_hat()); }

/// L1 distance of two snapshots on [0, x_max], Euclidean norm of the
/// conserved difference; x_max defaults to the last breakpoint.
inline double l1_distance(const Snapshot& a, const Snapshot& b, double x_max = -1.0) {
  if (a.size() != b.size()) fail(ErrorCode::InvalidArgument, "snapshots have different pipe counts");
  double total = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const auto& A = a[j];
    const auto& B = b[j];
    double X = x_max;
    if (X < 0.0) {
      X = 0.0;
      if (!A.x.empty()) X = std::max(X, A.x.back());
      if (!B.x.empty()) X = std::max(X, B.x.back());
    }
    std::size_t ia = 0, ib = 0;
    double x = 0.0;
    while (x < X) {
      const double na = ia < A.x.size() ? A.x[ia] : std::numeric_limits<double>::infinity();
      const double nb = ib < B.x.size() ? B.x[ib] : std::numeric_limits<double>::infinity();
      const double next = std::min({na, nb, X});
      if (next > x) total += (next - x) * state_distance(A.states[ia], B.states[ib]);
      x = std::max(x, next);
      if (na <= x && ia < A.x.size()) ++ia;
      else if (nb <= x && ib < B.x.size()) ++ib;
      else if (next >= X) break;
    }
  }
  return total;
}

/// Compactly supported test function bump(x) * bump(t) on one pipe.
struct TestFunction {
  std::size_t pipe = 0;
  double xc = 1.0, rx = 0.5;
  double tc = 1.0, rt = 0.5;

  static double bump(double z) { return std::abs(z) < 1.0 ? std::exp(-1.0 / (1.0 - z * z)) : 0.0; }
  double operator()(double x, double t) const { return bump((x - xc) / rx) * bump((t - tc) / rt); }
};

/// Weak-form residual of the front-tracking solution against one test
/// function: for piecewise-constant data it reduces to the sum over fronts of
/// the line integral of (s [U] - [F(U)]) phi. Returns the Euclidean norm.
inline double weak_form_residual(const std::vector<FrontSegment>& segs, const TestFunction& phi, const GasConstants& g) {
  static const double gx[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                               0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
  static const double gw[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                               0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
  double r[3] = {0.0, 0.0, 0.0};
  for (const auto& s : segs) {
    if (s.pipe != phi.pipe) continue;
    const double a = std::max(s.t0, phi.tc - phi.rt), b = std::min(s.t1, phi.tc + phi.rt);
    if (!(b > a)) continue;
    const Conserved ul = s.left.conserved(), ur = s.right.conserved();
    const Conserved fl = flux(s.left, g), fr = flux(s.right, g);
    const int sub = 16;
    double integral = 0.0;
    for (int k = 0; k < sub; ++k) {
      const double lo = a + (b - a) * k / sub, hi = a + (b - a) * (k + 1) / sub;
      for (int q = 0; q < 8; ++q) {
        const double t = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gx[q];
        integral += 0.5 * (hi - lo) * gw[q] * phi(s.x0 + s.speed * (t - s.t0), t);
      }
    }
    for (std::size_t c = 0; c < system_size(s.left.model); ++c)
      r[c] += (s.speed * (ur[c] - ul[c]) - (fr[c] - fl[c])) * integral;
  }
  return std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
}

}  // namespace gasnet
