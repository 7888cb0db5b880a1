#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gasnet/compressor.hpp"
#include "gasnet/error.hpp"
#include "gasnet/front_tracking.hpp"
#include "gasnet/junction.hpp"
#include "gasnet/thermo.hpp"

namespace gasnet {

struct ScenarioPipe {
  PipeSpec spec;
  double kappa = 0.0;  ///< M2/M3 only
};

struct Topology {
  std::vector<ScenarioPipe> pipes;
};

struct CouplingConfig {
  std::optional<CompressorControl> compressor;  ///< empty: junction
};

enum class RunMode { Riemann, Simulate };

inline std::string_view to_string(RunMode m) { return m == RunMode::Riemann ? "riemann" : "simulate"; }

struct GridConfig {
  std::size_t points = 101;
  double length = 1.0;
};

struct Tolerances {
  double newton = 1e-10;  ///< scaled coupling residual
  int max_iter = 50;
  double residual = 1e-8;  ///< largest accepted diagnostic residual
};

struct SourceConfig {
  bool friction = false;
  double lambda_f = 0.0;
  double diameter = 1.0;
};

struct RunConfig {
  RunMode mode = RunMode::Riemann;
  double horizon = 1.0;
  double epsilon = 1e-2;
  std::vector<double> epsilons;      ///< non-empty: one simulation per entry
  std::vector<double> output_times;  ///< empty: {0, horizon}
  GridConfig grid;
  Tolerances tolerances;
  SourceConfig source;
  double split_step = 0.0;  ///< 0 picks length / (4 lambda_hat)
  std::size_t max_events = 1000000;
  std::uint64_t seed = 0;
  double perturbation = 0.0;  ///< relative amplitude of seeded noise on the initial data

  std::vector<double> snapshot_times() const {
    if (!output_times.empty()) return output_times;
    return {0.0, horizon};
  }
};

struct Scenario {
  std::string name;
  GasConstants constants;
  Topology topology;
  CouplingConfig coupling;
  std::vector<Profile> initial;  ///< one per pipe, topology order
  RunConfig run;

  std::vector<PipeSpec> specs() const {
    std::vector<PipeSpec> s;
    for (const auto& p : topology.pipes) s.push_back(p.spec);
    return s;
  }

  std::vector<PipeState> traces() const {
    std::vector<PipeState> t;
    for (const auto& pr : initial) t.push_back(pr.front().state);
    return t;
  }

  JunctionOptions junction_options() const {
    JunctionOptions o;
    o.newton.tol = run.tolerances.newton;
    o.newton.max_iter = run.tolerances.max_iter;
    return o;
  }

  NetworkCoupling network() const {
    if (coupling.compressor) {
      const auto& p = topology.pipes;
      const bool first_in = p[0].spec.orientation == Orientation::Incoming;
      return NetworkCoupling::compressor(p[first_in ? 0 : 1].spec, p[first_in ? 1 : 0].spec, *coupling.compressor,
                                         constants, junction_options());
    }
    return NetworkCoupling::junction(specs(), constants, junction_options());
  }

  /// Positions of the pipes inside `network()` (the compressor puts the inlet first).
  std::vector<std::size_t> network_order() const {
    if (coupling.compressor && topology.pipes[0].spec.orientation != Orientation::Incoming) return {1, 0};
    std::vector<std::size_t> o(topology.pipes.size());
    for (std::size_t j = 0; j < o.size(); ++j) o[j] = j;
    return o;
  }
};

struct ValidationIssue {
  std::string path;
  std::string message;
};

class ScenarioError : public Error {
 public:
  ScenarioError(ErrorCode code, std::vector<ValidationIssue> issues)
      : Error(code, join(issues)), issues_(std::move(issues)) {}

  const std::vector<ValidationIssue>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<ValidationIssue>& v) {
    std::string s;
    for (const auto& i : v) s += (s.empty() ? "" : "; ") + i.path + ": " + i.message;
    return s;
  }

  std::vector<ValidationIssue> issues_;
};

namespace detail {

using nlohmann::json;

class Reader {
 public:
  std::vector<ValidationIssue> issues;

  void issue(const std::string& path, const std::string& msg) { issues.push_back({path, msg}); }

  bool object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
      issue(path, "expected an object");
      return false;
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || it.key() == a;
      if (!ok) issue(join(path, it.key()), "unknown field");
    }
    return true;
  }

  std::optional<double> number(const json& j, const std::string& path, const char* key, bool required = true) {
    if (!j.contains(key)) {
      if (required) issue(join(path, key), "missing field");
      return std::nullopt;
    }
    const json& v = j.at(key);
    if (!v.is_number()) {
      issue(join(path, key), "expected a number");
      return std::nullopt;
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
      issue(join(path, key), "must be finite");
      return std::nullopt;
    }
    return x;
  }

  double number_or(const json& j, const std::string& path, const char* key, double fallback) {
    return number(j, path, key, false).value_or(fallback);
  }

  std::optional<double> positive(const json& j, const std::string& path, const char* key, bool required = true) {
    auto x = number(j, path, key, required);
    if (x && !(*x > 0.0)) {
      issue(join(path, key), "must be positive");
      return std::nullopt;
    }
    return x;
  }

  std::optional<std::string> string(const json& j, const std::string& path, const char* key, bool required = true) {
    if (!j.contains(key)) {
      if (required) issue(join(path, key), "missing field");
      return std::nullopt;
    }
    if (!j.at(key).is_string()) {
      issue(join(path, key), "expected a string");
      return std::nullopt;
    }
    return j.at(key).get<std::string>();
  }

  std::optional<std::uint64_t> count(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) return std::nullopt;
    const json& v = j.at(key);
    if (!v.is_number_unsigned()) {
      issue(join(path, key), "expected a non-negative integer");
      return std::nullopt;
    }
    return v.get<std::uint64_t>();
  }

  static std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
  static std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }
};

inline std::optional<Model> parse_model(const std::string& s) {
  if (s == "M1") return Model::M1;
  if (s == "M2") return Model::M2;
  if (s == "M3") return Model::M3;
  return std::nullopt;
}

inline std::optional<PipeState> read_state(Reader& r, const json& j, const std::string& path, const ScenarioPipe& pipe,
                                           const GasConstants& g) {
  const bool m1 = pipe.spec.model == Model::M1;
  if (m1) {
    if (!r.object(j, path, {"rho", "q", "E", "u", "p"})) return std::nullopt;
  } else if (!r.object(j, path, {"rho", "q", "u"})) {
    return std::nullopt;
  }
  const auto rho = r.positive(j, path, "rho");
  const bool has_q = j.contains("q"), has_u = j.contains("u");
  if (has_q == has_u) {
    r.issue(path, "give exactly one of q or u");
    return std::nullopt;
  }
  const auto v = r.number(j, path, has_q ? "q" : "u");
  std::optional<double> E, p;
  if (m1) {
    const bool has_E = j.contains("E"), has_p = j.contains("p");
    if (has_E == has_p) {
      r.issue(path, "give exactly one of E or p");
      return std::nullopt;
    }
    if (has_E != has_q) {
      r.issue(path, "use either conserved (rho, q, E) or primitive (rho, u, p) variables");
      return std::nullopt;
    }
    if (has_E) E = r.number(j, path, "E");
    else p = r.positive(j, path, "p");
    if (!E && !p) return std::nullopt;
  }
  if (!rho || !v) return std::nullopt;
  const double q = has_q ? *v : *rho * *v;
  PipeState s = m1 ? (E ? PipeState::euler(*rho, q, *E) : PipeState::from_primitive(*rho, *v, *p, g))
                   : PipeState::isentropic(pipe.spec.model, *rho, q, pipe.kappa);
  try {
    validate_state(s);
  } catch (const Error& e) {
    r.issue(path, e.what());
    return std::nullopt;
  }
  return s;
}

inline std::optional<Profile> read_initial(Reader& r, const json& j, const std::string& path, const ScenarioPipe& pipe,
                                           const GasConstants& g) {
  if (j.is_object()) {
    auto s = read_state(r, j, path, pipe, g);
    if (!s) return std::nullopt;
    return Profile{{std::numeric_limits<double>::infinity(), *s}};
  }
  if (!j.is_array() || j.empty()) {
    r.issue(path, "expected a state object or a non-empty list of profile pieces");
    return std::nullopt;
  }
  Profile pr;
  bool ok = true;
  double last = 0.0;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string pp = Reader::index(path, k);
    if (!r.object(j[k], pp, {"x_right", "state"})) {
      ok = false;
      continue;
    }
    const bool final_piece = k + 1 == j.size();
    double x = std::numeric_limits<double>::infinity();
    if (final_piece) {
      if (j[k].contains("x_right")) {
        r.issue(Reader::join(pp, "x_right"), "the last piece extends to infinity and takes no right edge");
        ok = false;
      }
    } else {
      const auto xr = r.number(j[k], pp, "x_right");
      if (!xr) {
        ok = false;
      } else if (!(*xr > last)) {
        r.issue(Reader::join(pp, "x_right"), "right edges must increase from 0");
        ok = false;
      } else {
        x = last = *xr;
      }
    }
    if (!j[k].contains("state")) {
      r.issue(Reader::join(pp, "state"), "missing field");
      ok = false;
      continue;
    }
    auto s = read_state(r, j[k]["state"], Reader::join(pp, "state"), pipe, g);
    if (!s) {
      ok = false;
      continue;
    }
    pr.push_back({x, *s});
  }
  if (!ok) return std::nullopt;
  return pr;
}

inline void read_run(Reader& r, const json& j, RunConfig& run) {
  const std::string path = "run";
  if (!r.object(j, path,
                {"mode", "horizon", "epsilon", "epsilons", "output_times", "grid", "tolerances", "source", "split_step",
                 "max_events", "seed", "perturbation"}))
    return;
  if (auto m = r.string(j, path, "mode", false)) {
    if (*m == "riemann") run.mode = RunMode::Riemann;
    else if (*m == "simulate") run.mode = RunMode::Simulate;
    else r.issue("run.mode", "expected 'riemann' or 'simulate'");
  }
  if (auto h = r.positive(j, path, "horizon", false)) run.horizon = *h;
  if (auto e = r.positive(j, path, "epsilon", false)) run.epsilon = *e;
  auto list = [&](const char* key, std::vector<double>& out, bool positive) {
    if (!j.contains(key)) return;
    const json& a = j.at(key);
    const std::string p = Reader::join(path, key);
    if (!a.is_array()) {
      r.issue(p, "expected a list of numbers");
      return;
    }
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (!a[k].is_number() || !std::isfinite(a[k].get<double>())) {
        r.issue(Reader::index(p, k), "expected a finite number");
        continue;
      }
      const double x = a[k].get<double>();
      if (positive ? !(x > 0.0) : !(x >= 0.0)) r.issue(Reader::index(p, k), positive ? "must be positive" : "must be non-negative");
      else out.push_back(x);
    }
  };
  list("epsilons", run.epsilons, true);
  list("output_times", run.output_times, false);
  for (std::size_t k = 1; k < run.output_times.size(); ++k)
    if (!(run.output_times[k] > run.output_times[k - 1])) r.issue(Reader::index("run.output_times", k), "times must increase");
  for (double t : run.output_times)
    if (t > run.horizon) r.issue("run.output_times", "times must not exceed the horizon");
  if (run.epsilons.size() == 1) r.issue("run.epsilons", "a ladder needs at least two epsilons");
  if (j.contains("grid") && r.object(j["grid"], "run.grid", {"points", "length"})) {
    if (auto n = r.count(j["grid"], "run.grid", "points")) {
      if (*n < 2) r.issue("run.grid.points", "need at least two grid points");
      else run.grid.points = static_cast<std::size_t>(*n);
    }
    if (auto l = r.positive(j["grid"], "run.grid", "length", false)) run.grid.length = *l;
  }
  if (j.contains("tolerances") && r.object(j["tolerances"], "run.tolerances", {"newton", "max_iter", "residual"})) {
    const json& t = j["tolerances"];
    if (auto x = r.positive(t, "run.tolerances", "newton", false)) run.tolerances.newton = *x;
    if (auto x = r.count(t, "run.tolerances", "max_iter")) {
      if (*x == 0) r.issue("run.tolerances.max_iter", "must be positive");
      else run.tolerances.max_iter = static_cast<int>(*x);
    }
    if (auto x = r.positive(t, "run.tolerances", "residual", false)) run.tolerances.residual = *x;
  }
  if (j.contains("source")) {
    const json& s = j["source"];
    if (s.is_string()) {
      if (s.get<std::string>() != "none") r.issue("run.source", "expected 'none' or {\"friction\": {...}}");
    } else if (r.object(s, "run.source", {"friction"})) {
      if (!s.contains("friction")) {
        r.issue("run.source.friction", "missing field");
      } else if (r.object(s["friction"], "run.source.friction", {"lambda_f", "diameter"})) {
        run.source.friction = true;
        if (auto x = r.number(s["friction"], "run.source.friction", "lambda_f")) {
          if (*x < 0.0) r.issue("run.source.friction.lambda_f", "must be non-negative");
          run.source.lambda_f = *x;
        }
        if (auto x = r.positive(s["friction"], "run.source.friction", "diameter")) run.source.diameter = *x;
      }
    }
  }
  if (j.contains("split_step")) {
    if (auto x = r.number(j, path, "split_step")) {
      if (*x < 0.0) r.issue("run.split_step", "must be non-negative");
      else run.split_step = *x;
    }
  }
  if (j.contains("max_events")) {
    if (auto n = r.count(j, path, "max_events")) {
      if (*n == 0) r.issue("run.max_events", "must be positive");
      else run.max_events = static_cast<std::size_t>(*n);
    }
  }
  if (auto s = r.count(j, path, "seed")) run.seed = *s;
  if (j.contains("perturbation")) {
    if (auto x = r.number(j, path, "perturbation")) {
      if (*x < 0.0 || *x >= 0.5) r.issue("run.perturbation", "must lie in [0, 0.5)");
      else run.perturbation = *x;
    }
  }
}

/// Solver-level checks on a structurally valid scenario.
inline void check_solver_invariants(Reader& r, const Scenario& s, const std::vector<bool>& pipe_ok) {
  const auto& pipes = s.topology.pipes;
  std::size_t n_in = 0;
  for (std::size_t j = 0; j < pipes.size(); ++j) {
    if (pipes[j].spec.orientation == Orientation::Incoming) ++n_in;
    if (!pipe_ok[j]) continue;
    const std::string err = pipe_consistency_error(pipes[j].spec, s.initial[j].front().state, s.constants);
    if (!err.empty()) r.issue("initial." + pipes[j].spec.id, err);
  }
  if (s.coupling.compressor) {
    if (pipes.size() != 2 || n_in != 1) {
      r.issue("topology.pipes", "a compressor couples exactly one incoming and one outgoing pipe");
    } else if (std::abs(pipes[0].spec.area - pipes[1].spec.area) > 1e-12 * pipes[0].spec.area) {
      r.issue("topology.pipes[1].area", "compressor pipes must share the same cross-section");
    }
  } else if (n_in == 0 || n_in >= pipes.size()) {
    r.issue("topology.pipes", "a junction needs N > dim(I_i) > 0: at least one incoming and one outgoing pipe");
  }
  if (s.run.mode == RunMode::Riemann)
    for (std::size_t j = 0; j < pipes.size(); ++j)
      if (pipe_ok[j] && s.initial[j].size() != 1)
        r.issue("initial." + pipes[j].spec.id, "riemann mode needs a constant state per pipe");
}

}  // namespace detail

/// Parses and validates a scenario document. Comments are accepted.
inline Scenario parse_scenario_text(const std::string& text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ScenarioError(ErrorCode::ParseError, {{"", e.what()}});
  }
  detail::Reader r;
  Scenario s;
  if (!r.object(doc, "", {"name", "constants", "topology", "coupling", "initial", "run"}))
    throw ScenarioError(ErrorCode::ValidationError, r.issues);
  s.name = r.string(doc, "", "name", false).value_or("scenario");

  bool gas_ok = true;
  if (doc.contains("constants")) {
    const json& c = doc["constants"];
    if (r.object(c, "constants", {"gamma", "R", "s0"})) {
      const auto gamma = r.number(c, "constants", "gamma");
      const auto R = r.positive(c, "constants", "R");
      const double s0 = r.number_or(c, "constants", "s0", 0.0);
      gas_ok = gamma && R;
      if (gamma && !(*gamma > 1.0)) {
        r.issue("constants.gamma", "must exceed 1");
        gas_ok = false;
      }
      if (s0 < 0.0) {
        r.issue("constants.s0", "must be non-negative");
        gas_ok = false;
      }
      if (gas_ok) s.constants = GasConstants::from_gamma_r(*gamma, *R, s0);
    } else {
      gas_ok = false;
    }
  } else {
    r.issue("constants", "missing field");
    gas_ok = false;
  }

  std::vector<bool> pipe_ok;
  if (!doc.contains("topology")) {
    r.issue("topology", "missing field");
  } else if (r.object(doc["topology"], "topology", {"pipes"})) {
    const json& ps = doc["topology"].value("pipes", json());
    if (!ps.is_array() || ps.empty()) {
      r.issue("topology.pipes", "expected a non-empty list");
    } else {
      std::set<std::string> seen;
      for (std::size_t k = 0; k < ps.size(); ++k) {
        const std::string path = detail::Reader::index("topology.pipes", k);
        ScenarioPipe p;
        bool ok = r.object(ps[k], path, {"id", "area", "model", "orientation", "kappa"});
        if (ok) {
          const auto id = r.string(ps[k], path, "id");
          if (id) {
            if (id->empty()) r.issue(path + ".id", "must not be empty");
            else if (!seen.insert(*id).second) r.issue(path + ".id", "duplicate pipe id '" + *id + "'");
            p.spec.id = *id;
          }
          const auto area = r.positive(ps[k], path, "area");
          if (area) p.spec.area = *area;
          const auto model = r.string(ps[k], path, "model");
          std::optional<Model> m;
          if (model && !(m = detail::parse_model(*model))) r.issue(path + ".model", "expected M1, M2 or M3");
          if (m) p.spec.model = *m;
          const auto orient = r.string(ps[k], path, "orientation");
          if (orient) {
            if (*orient == "incoming") p.spec.orientation = Orientation::Incoming;
            else if (*orient == "outgoing") p.spec.orientation = Orientation::Outgoing;
            else r.issue(path + ".orientation", "expected 'incoming' or 'outgoing'");
          }
          std::optional<double> kappa;
          if (m && *m == Model::M1) {
            if (ps[k].contains("kappa")) r.issue(path + ".kappa", "only M2 and M3 pipes take kappa");
          } else if (m) {
            kappa = r.positive(ps[k], path, "kappa");
            if (kappa) p.kappa = *kappa;
          }
          ok = id && !id->empty() && area && m && orient && (*m == Model::M1 || kappa);
        }
        pipe_ok.push_back(ok);
        s.topology.pipes.push_back(p);
      }
    }
  }

  if (!doc.contains("coupling")) {
    r.issue("coupling", "missing field");
  } else if (r.object(doc["coupling"], "coupling", {"junction", "compressor"})) {
    const json& c = doc["coupling"];
    if (c.contains("junction") == c.contains("compressor")) {
      r.issue("coupling", "give exactly one of junction or compressor");
    } else if (c.contains("junction")) {
      r.object(c["junction"], "coupling.junction", {});
    } else if (r.object(c["compressor"], "coupling.compressor", {"head", "power", "c_p"})) {
      const json& k = c["compressor"];
      const std::string path = "coupling.compressor";
      if (k.contains("head") == k.contains("power")) {
        r.issue(path, "give exactly one of head (CP1) or power (CP2)");
      } else if (k.contains("head")) {
        if (k.contains("c_p")) r.issue(path + ".c_p", "only power control takes c_p");
        if (auto H = r.number(k, path, "head")) {
          if (*H < 0.0) r.issue(path + ".head", "must be non-negative");
          else s.coupling.compressor = CompressorControl::head(*H);
        }
      } else {
        const auto P = r.number(k, path, "power");
        const auto Cp = r.positive(k, path, "c_p");
        if (P && *P < 0.0) r.issue(path + ".power", "must be non-negative");
        else if (P && Cp) s.coupling.compressor = CompressorControl::power(*P, *Cp);
      }
    }
  }

  if (doc.contains("run")) detail::read_run(r, doc["run"], s.run);

  bool initial_ok = false;
  if (!doc.contains("initial")) {
    r.issue("initial", "missing field");
  } else if (doc["initial"].is_object()) {
    const json& in = doc["initial"];
    std::map<std::string, std::size_t> index;
    for (std::size_t j = 0; j < s.topology.pipes.size(); ++j) index[s.topology.pipes[j].spec.id] = j;
    for (auto it = in.begin(); it != in.end(); ++it)
      if (!index.count(it.key())) r.issue("initial." + it.key(), "no pipe with this id");
    s.initial.resize(s.topology.pipes.size());
    initial_ok = gas_ok;
    for (std::size_t j = 0; j < s.topology.pipes.size(); ++j) {
      const auto& pipe = s.topology.pipes[j];
      if (!pipe_ok[j]) {
        initial_ok = false;
        continue;
      }
      const std::string path = "initial." + pipe.spec.id;
      if (!in.contains(pipe.spec.id)) {
        r.issue(path, "missing initial data");
        pipe_ok[j] = false;
        initial_ok = false;
        continue;
      }
      if (!gas_ok) continue;
      auto pr = detail::read_initial(r, in[pipe.spec.id], path, pipe, s.constants);
      if (pr) s.initial[j] = std::move(*pr);
      else pipe_ok[j] = initial_ok = false;
    }
  } else {
    r.issue("initial", "expected an object keyed by pipe id");
  }

  if (initial_ok || (!s.initial.empty() && gas_ok)) {
    std::vector<bool> ok = pipe_ok;
    for (std::size_t j = 0; j < ok.size(); ++j) ok[j] = ok[j] && !s.initial[j].empty();
    detail::check_solver_invariants(r, s, ok);
  }
  if (!r.issues.empty()) throw ScenarioError(ErrorCode::ValidationError, r.issues);
  return s;
}

inline Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open scenario '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str());
}

/// Canonical document: every field explicit, states in conserved variables.
inline nlohmann::json to_json(const Scenario& s) {
  using nlohmann::json;
  json doc;
  doc["name"] = s.name;
  doc["constants"] = {{"gamma", s.constants.gamma}, {"R", s.constants.R}, {"s0", s.constants.s0}};
  json pipes = json::array();
  for (const auto& p : s.topology.pipes) {
    json jp = {{"id", p.spec.id},
               {"area", p.spec.area},
               {"model", std::string(to_string(p.spec.model))},
               {"orientation", std::string(to_string(p.spec.orientation))}};
    if (p.spec.model != Model::M1) jp["kappa"] = p.kappa;
    pipes.push_back(jp);
  }
  doc["topology"] = {{"pipes", pipes}};
  if (s.coupling.compressor) {
    const auto& c = *s.coupling.compressor;
    if (c.mode == CompressorMode::AdiabaticEnthalpy) doc["coupling"] = {{"compressor", {{"head", c.value}}}};
    else doc["coupling"] = {{"compressor", {{"power", c.value}, {"c_p", c.Cp}}}};
  } else {
    doc["coupling"] = {{"junction", json::object()}};
  }
  auto state = [](const PipeState& u) {
    json j = {{"rho", u.rho}, {"q", u.q}};
    if (u.model == Model::M1) j["E"] = u.E;
    return j;
  };
  json initial = json::object();
  for (std::size_t j = 0; j < s.initial.size(); ++j) {
    const auto& pr = s.initial[j];
    if (pr.size() == 1) {
      initial[s.topology.pipes[j].spec.id] = state(pr[0].state);
      continue;
    }
    json pieces = json::array();
    for (std::size_t k = 0; k < pr.size(); ++k) {
      json piece = {{"state", state(pr[k].state)}};
      if (k + 1 < pr.size()) piece["x_right"] = pr[k].x_right;
      pieces.push_back(piece);
    }
    initial[s.topology.pipes[j].spec.id] = pieces;
  }
  doc["initial"] = initial;
  const auto& r = s.run;
  json source = "none";
  if (r.source.friction) source = {{"friction", {{"lambda_f", r.source.lambda_f}, {"diameter", r.source.diameter}}}};
  doc["run"] = {{"mode", std::string(to_string(r.mode))},
                {"horizon", r.horizon},
                {"epsilon", r.epsilon},
                {"epsilons", r.epsilons},
                {"output_times", r.output_times},
                {"grid", {{"points", r.grid.points}, {"length", r.grid.length}}},
                {"tolerances", {{"newton", r.tolerances.newton}, {"max_iter", r.tolerances.max_iter}, {"residual", r.tolerances.residual}}},
                {"source", source},
                {"split_step", r.split_step},
                {"max_events", r.max_events},
                {"seed", r.seed},
                {"perturbation", r.perturbation}};
  return doc;
}

}  // namespace gasnet
