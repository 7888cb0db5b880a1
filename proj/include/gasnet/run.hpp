#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <nlohmann/json.hpp>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gasnet/front_tracking.hpp"
#include "gasnet/output.hpp"
#include "gasnet/riemann.hpp"
#include "gasnet/scenario.hpp"

namespace gasnet {

struct CompressorReport {
  double pressure_ratio = 0.0;
  double head = 0.0;   ///< realized adiabatic head
  double power = 0.0;  ///< C_p q2 head
  double control_residual = 0.0;
};

struct LadderRun {
  double epsilon = 0.0;
  std::size_t interactions = 0;
  std::size_t max_fronts = 0;
};

struct LadderDistance {
  double epsilon_a = 0.0, epsilon_b = 0.0;
  double distance = 0.0;
};

struct RunSummary {
  std::string name;
  RunMode mode = RunMode::Riemann;
  std::string status = "ok";  ///< "ok" or "residual_exceeded"
  double horizon = 0.0;
  double epsilon = 0.0;
  int newton_iterations = 0;
  double scaled_residual = 0.0;  ///< largest scaled coupling residual of any junction solve
  double max_mass_residual = 0.0;
  double max_enthalpy_residual = 0.0;
  double max_entropy_residual = 0.0;
  double max_control_residual = 0.0;
  std::size_t interactions = 0;
  std::size_t max_fronts = 0;
  double K_J = 0.0, K_hat_J = 0.0, lambda_hat = 0.0;
  std::optional<CompressorReport> compressor;
  std::vector<LadderRun> ladder;
  std::vector<LadderDistance> distances;
  std::vector<std::string> warnings;
};

struct RunResult {
  std::vector<SnapshotRecord> records;
  RunSummary summary;
};

inline nlohmann::json to_json(const RunSummary& s) {
  using nlohmann::json;
  json j = {{"name", s.name},
            {"mode", std::string(to_string(s.mode))},
            {"status", s.status},
            {"horizon", s.horizon},
            {"epsilon", s.epsilon},
            {"newton_iterations", s.newton_iterations},
            {"scaled_residual", s.scaled_residual},
            {"max_mass_residual", s.max_mass_residual},
            {"max_enthalpy_residual", s.max_enthalpy_residual},
            {"max_entropy_residual", s.max_entropy_residual},
            {"max_control_residual", s.max_control_residual},
            {"interactions", s.interactions},
            {"max_fronts", s.max_fronts},
            {"K_J", s.K_J},
            {"K_hat_J", s.K_hat_J},
            {"lambda_hat", s.lambda_hat},
            {"warnings", s.warnings}};
  if (s.compressor)
    j["compressor"] = {{"pressure_ratio", s.compressor->pressure_ratio},
                       {"head", s.compressor->head},
                       {"power", s.compressor->power},
                       {"control_residual", s.compressor->control_residual}};
  if (!s.ladder.empty()) {
    json runs = json::array(), dist = json::array();
    for (const auto& r : s.ladder)
      runs.push_back({{"epsilon", r.epsilon}, {"interactions", r.interactions}, {"max_fronts", r.max_fronts}});
    for (const auto& d : s.distances)
      dist.push_back({{"epsilon_a", d.epsilon_a}, {"epsilon_b", d.epsilon_b}, {"l1_distance", d.distance}});
    j["ladder"] = {{"runs", runs}, {"distances", dist}};
  }
  return j;
}

/// Coupling residuals recomputed from trace states given in scenario pipe order.
inline SnapshotDiagnostics trace_residuals(const Scenario& s, const std::vector<PipeState>& traces) {
  const auto& g = s.constants;
  const auto& pipes = s.topology.pipes;
  SnapshotDiagnostics d;
  if (s.coupling.compressor) {
    const auto order = s.network_order();
    const PipeState& in = traces[order[0]];
    const PipeState& out = traces[order[1]];
    const auto& c = *s.coupling.compressor;
    d.mass_residual = std::abs(in.q + out.q);
    const double a = (g.gamma - 1.0) / g.gamma;
    double realized = g.R / a * temperature(in, g) * (std::pow(pressure(out, g) / pressure(in, g), a) - 1.0);
    if (c.mode == CompressorMode::Power) realized *= c.Cp * out.q;
    d.control_residual = std::abs(realized - c.value);
    if (out.model == Model::M1) d.entropy_residual = std::abs(entropy(in, g) - entropy(out, g));
    return d;
  }
  double mass = 0.0, num = 0.0, den = 0.0, hsum = 0.0;
  double hmin = std::numeric_limits<double>::infinity(), hmax = -hmin;
  for (std::size_t j = 0; j < pipes.size(); ++j) {
    const auto tq = thermo_quantities(traces[j], g);
    const double aq = pipes[j].spec.area * traces[j].q;
    mass += aq;
    hmin = std::min(hmin, tq.h);
    hmax = std::max(hmax, tq.h);
    hsum += tq.h;
    if (pipes[j].spec.orientation == Orientation::Incoming) {
      num += aq * tq.s;
      den += aq;
    }
  }
  d.mass_residual = std::abs(mass);
  d.enthalpy_residual = (hmax - hmin) / std::abs(hsum / static_cast<double>(pipes.size()));
  const double s_star = num / den;
  for (std::size_t j = 0; j < pipes.size(); ++j)
    if (pipe_role(pipes[j].spec) == PipeRole::M1Outgoing)
      d.entropy_residual = std::max(d.entropy_residual, std::abs(entropy(traces[j], g) - s_star));
  return d;
}

inline CompressorReport compressor_report(const Scenario& s, const std::vector<PipeState>& traces) {
  const auto& g = s.constants;
  const auto order = s.network_order();
  const PipeState& in = traces[order[0]];
  const PipeState& out = traces[order[1]];
  const double a = (g.gamma - 1.0) / g.gamma;
  CompressorReport r;
  r.pressure_ratio = pressure(out, g) / pressure(in, g);
  r.head = g.R / a * temperature(in, g) * (std::pow(r.pressure_ratio, a) - 1.0);
  r.power = s.coupling.compressor->Cp * out.q * r.head;
  r.control_residual = trace_residuals(s, traces).control_residual;
  return r;
}

namespace detail {

inline std::string bare_message(const Error& e) {
  const std::string w = e.what();
  const auto k = w.find(": ");
  return k == std::string::npos ? w : w.substr(k + 2);
}

/// Initial profiles with seeded multiplicative noise on rho and q.
inline std::vector<Profile> perturbed_initial(const Scenario& s) {
  auto out = s.initial;
  if (!(s.run.perturbation > 0.0)) return out;
  std::mt19937_64 rng(s.run.seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (auto& pr : out)
    for (auto& piece : pr) {
      PipeState& u = piece.state;
      const double e = u.model == Model::M1 ? u.E - 0.5 * u.q * u.q / u.rho : 0.0;
      u.rho *= 1.0 + s.run.perturbation * U(rng);
      u.q *= 1.0 + s.run.perturbation * U(rng);
      if (u.model == Model::M1) u.E = e + 0.5 * u.q * u.q / u.rho;
    }
  return out;
}

inline std::vector<double> grid(const GridConfig& c) {
  std::vector<double> x(c.points);
  for (std::size_t k = 0; k < c.points; ++k) x[k] = c.length * static_cast<double>(k) / static_cast<double>(c.points - 1);
  return x;
}

template <class T>
std::vector<T> to_network(const std::vector<T>& v, const std::vector<std::size_t>& order) {
  std::vector<T> out;
  for (std::size_t k : order) out.push_back(v[k]);
  return out;
}

template <class T>
std::vector<T> to_user(const std::vector<T>& v, const std::vector<std::size_t>& order) {
  std::vector<T> out(v.size());
  for (std::size_t k = 0; k < order.size(); ++k) out[order[k]] = v[k];
  return out;
}

inline void fill_glimm(SnapshotDiagnostics& d, const FrontTracker& tr) {
  const auto gd = tr.glimm();
  d.V = gd.V;
  d.Q = gd.Q;
  d.Y = gd.Y;
  d.TV = gd.TV;
  d.fronts = gd.fronts;
}

inline void absorb(RunSummary& sum, const SnapshotDiagnostics& d) {
  sum.max_mass_residual = std::max(sum.max_mass_residual, d.mass_residual);
  sum.max_enthalpy_residual = std::max(sum.max_enthalpy_residual, d.enthalpy_residual);
  sum.max_entropy_residual = std::max(sum.max_entropy_residual, d.entropy_residual);
  sum.max_control_residual = std::max(sum.max_control_residual, d.control_residual);
}

inline SnapshotRecord tracker_record(const Scenario& s, const FrontTracker& tr, const std::vector<std::size_t>& order) {
  SnapshotRecord rec;
  rec.time = tr.time();
  const auto xs = grid(s.run.grid);
  const auto traces = to_user(tr.traces(), order);
  for (std::size_t j = 0; j < s.topology.pipes.size(); ++j) {
    const auto& pipe = s.topology.pipes[j];
    PipeSnapshot p{pipe.spec.id, pipe.spec.model, pipe.kappa, xs, {}, traces[j]};
    for (double x : xs) p.states.push_back(x == 0.0 ? traces[j] : tr.sample(order[j], x));
    rec.pipes.push_back(std::move(p));
  }
  rec.diagnostics = trace_residuals(s, traces);
  fill_glimm(rec.diagnostics, tr);
  return rec;
}

inline TrackingOptions tracking_options(const Scenario& s, double epsilon) {
  TrackingOptions o;
  o.epsilon = epsilon;
  o.max_events = s.run.max_events;
  return o;
}

}  // namespace detail

/// Runs a validated scenario. Records are passed to `on_record` as they are
/// produced and also returned.
inline RunResult run_scenario(const Scenario& s, const std::function<void(const SnapshotRecord&)>& on_record = {}) {
  RunResult res;
  RunSummary& sum = res.summary;
  sum.name = s.name;
  sum.mode = s.run.mode;
  sum.horizon = s.run.horizon;
  sum.epsilon = s.run.epsilon;
  const auto& g = s.constants;
  const auto order = s.network_order();
  const NetworkCoupling coupling = s.network();
  auto emit = [&](SnapshotRecord rec) {
    detail::absorb(sum, rec.diagnostics);
    if (on_record) on_record(rec);
    res.records.push_back(std::move(rec));
  };
  std::string where = "initial";
  try {
    const auto initial = detail::perturbed_initial(s);
    const auto profiles = detail::to_network(initial, order);
    if (s.run.mode == RunMode::Riemann) {
      where = "coupling";
      const FrontTracker tr(coupling, profiles, detail::tracking_options(s, s.run.epsilon));
      const StarSolution& star = tr.last_star();
      sum.newton_iterations = star.iterations;
      sum.scaled_residual = star.scaled_residual;
      sum.warnings = star.warnings;
      sum.K_J = tr.K_J();
      sum.K_hat_J = tr.K_hat_J();
      sum.lambda_hat = tr.lambda_hat();
      sum.max_fronts = tr.front_count();
      const auto stars = detail::to_user(star.star_states, order);
      const RiemannOptions ro{1e-13, 200};
      std::vector<std::function<PipeState(double)>> fan;
      for (std::size_t j = 0; j < stars.size(); ++j) {
        const PipeState S = stars[j], U = initial[j].front().state;
        if (S.model == Model::M1) {
          const auto sol = solve_riemann_m1(S, U, g, ro);
          fan.push_back([=](double xi) { return sample_solution(sol, S, U, xi, g); });
        } else {
          const auto sol = solve_riemann_iso(S, U, S.model, g, ro);
          fan.push_back([=](double xi) { return sample_solution(sol, S, U, xi, g); });
        }
      }
      const auto xs = detail::grid(s.run.grid);
      for (double t : s.run.snapshot_times()) {
        SnapshotRecord rec;
        rec.time = t;
        for (std::size_t j = 0; j < stars.size(); ++j) {
          const auto& pipe = s.topology.pipes[j];
          PipeSnapshot p{pipe.spec.id, pipe.spec.model, pipe.kappa, xs, {}, stars[j]};
          for (double x : xs) {
            if (x == 0.0) p.states.push_back(t > 0.0 ? stars[j] : initial[j].front().state);
            else p.states.push_back(t > 0.0 ? fan[j](x / t) : initial[j].front().state);
          }
          rec.pipes.push_back(std::move(p));
        }
        rec.diagnostics = trace_residuals(s, stars);
        detail::fill_glimm(rec.diagnostics, tr);
        emit(std::move(rec));
      }
      if (s.coupling.compressor) sum.compressor = compressor_report(s, stars);
    } else {
      std::vector<double> eps = s.run.epsilons;
      if (eps.empty()) eps = {s.run.epsilon};
      std::vector<Snapshot> finals;
      const std::size_t keep = static_cast<std::size_t>(std::min_element(eps.begin(), eps.end()) - eps.begin());
      for (std::size_t r = 0; r < eps.size(); ++r) {
        where = "run";
        FrontTracker tr(coupling, profiles, detail::tracking_options(s, eps[r]));
        const bool record = r == keep;
        if (record) {
          sum.epsilon = eps[r];
          sum.newton_iterations = tr.last_star().iterations;
          sum.scaled_residual = tr.last_star().scaled_residual;
          sum.warnings = tr.last_star().warnings;
          sum.K_J = tr.K_J();
          sum.K_hat_J = tr.K_hat_J();
          sum.lambda_hat = tr.lambda_hat();
        }
        auto on_event = [&](const InteractionRecord& ir) {
          if (record && ir.kind == EventKind::Junction) sum.scaled_residual = std::max(sum.scaled_residual, ir.coupling_residual);
        };
        SourceTerm G = no_source();
        if (s.run.source.friction) G = FrictionSource{s.run.source.lambda_f, s.run.source.diameter};
        const double dt = s.run.split_step > 0.0 ? s.run.split_step : default_split_step(s.run.grid.length, tr);
        std::size_t k = 0;
        auto advance = [&](double t) {
          while (s.run.source.friction && static_cast<double>(k + 1) * dt <= t) {
            where = "run";
            tr.advance_to(static_cast<double>(k + 1) * dt, on_event);
            where = "run.source";
            tr.apply_source(G, static_cast<double>(k) * dt, dt);
            ++k;
          }
          where = "run";
          tr.advance_to(t, on_event);
        };
        for (double t : s.run.snapshot_times()) {
          advance(t);
          if (record) emit(detail::tracker_record(s, tr, order));
        }
        advance(s.run.horizon);
        finals.push_back(detail::to_user(tr.snapshot(), order));
        if (record) {
          sum.interactions = tr.event_count();
          sum.max_fronts = tr.max_front_count();
        }
        if (s.run.epsilons.size() > 1) sum.ladder.push_back({eps[r], tr.event_count(), tr.max_front_count()});
      }
      if (s.run.epsilons.size() > 1)
        for (std::size_t a = 0; a < finals.size(); ++a)
          for (std::size_t b = a + 1; b < finals.size(); ++b)
            sum.distances.push_back({eps[a], eps[b], l1_distance(finals[a], finals[b], s.run.grid.length)});
      if (s.coupling.compressor) {
        std::vector<PipeState> last;
        for (const auto& p : res.records.back().pipes) last.push_back(p.trace);
        sum.compressor = compressor_report(s, last);
      }
    }
  } catch (const ScenarioError&) {
    throw;
  } catch (const Error& e) {
    std::string path = where;
    if (e.code() == ErrorCode::NoConvergence && where == "run" && std::string(e.what()).find("budget") != std::string::npos)
      path = "run.max_events";
    fail(e.code(), "scenario '" + s.name + "', " + path + ": " + detail::bare_message(e));
  }
  const double tol = s.run.tolerances.residual;
  const double q_scale = std::max(1.0, [&] {
    double m = 0.0;
    for (const auto& pr : s.initial) m = std::max(m, std::abs(pr.front().state.q));
    return m;
  }());
  double control_scale = 1.0;
  if (s.coupling.compressor) control_scale = std::max(1.0, s.coupling.compressor->value);
  if (sum.max_mass_residual > tol * q_scale || sum.max_enthalpy_residual > tol || sum.max_entropy_residual > tol * g.cv ||
      sum.max_control_residual > tol * control_scale)
    sum.status = "residual_exceeded";
  return res;
}

}  // namespace gasnet
