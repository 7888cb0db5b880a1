// Command-line front end: riemann, simulate, check, diagnose.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gasnet.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kValidation = 2, kSolver = 3, kIo = 4 };

int exit_code(gasnet::ErrorCode c) {
  using gasnet::ErrorCode;
  switch (c) {
    case ErrorCode::ParseError:
    case ErrorCode::ValidationError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::NotSubsonic:
      return kValidation;
    case ErrorCode::IoError:
      return kIo;
    default:
      return kSolver;
  }
}

struct Overrides {
  std::optional<double> epsilon, horizon, tol;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) gasnet::fail(gasnet::ErrorCode::IoError, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

gasnet::Scenario load(const std::string& path, const Overrides& o) {
  const std::string text = read_file(path);
  json doc;
  try {
    doc = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw gasnet::ScenarioError(gasnet::ErrorCode::ParseError, {{"", e.what()}});
  }
  if (doc.is_object()) {
    json& run = doc["run"];
    if (run.is_null()) run = json::object();
    if (run.is_object()) {
      if (o.mode) run["mode"] = *o.mode;
      if (o.epsilon) run["epsilon"] = *o.epsilon;
      if (o.horizon) run["horizon"] = *o.horizon;
      if (o.seed) run["seed"] = *o.seed;
      if (o.tol) {
        if (!run.contains("tolerances") || !run["tolerances"].is_object()) run["tolerances"] = json::object();
        run["tolerances"]["newton"] = *o.tol;
      }
    }
  }
  return gasnet::parse_scenario_text(doc.dump());
}

void report_error(const std::string& path, const gasnet::Error& e) {
  if (const auto* se = dynamic_cast<const gasnet::ScenarioError*>(&e)) {
    for (const auto& i : se->issues())
      spdlog::error("{}: {}: {}", path, i.path.empty() ? "<document>" : i.path, i.message);
    return;
  }
  spdlog::error("{}: {}", path, e.what());
}

fs::path output_dir(const std::string& out, const gasnet::Scenario& s, bool many) {
  return many ? fs::path(out) / s.name : fs::path(out);
}

int run_one(const std::string& path, const Overrides& o, const std::string& out, const std::string& format, bool many) {
  try {
    const auto s = load(path, o);
    spdlog::info("{}: {} mode, {} pipes, horizon {}", s.name, gasnet::to_string(s.run.mode), s.topology.pipes.size(),
                 s.run.horizon);
    const auto res = gasnet::run_scenario(s, [&](const gasnet::SnapshotRecord& r) {
      spdlog::debug("{}: snapshot t = {} fronts = {}", s.name, r.time, r.diagnostics.fronts);
    });
    const fs::path dir = output_dir(out, s, many);
    const auto fmt = format == "json" ? gasnet::OutputFormat::Json : gasnet::OutputFormat::Csv;
    gasnet::write_outputs(res.records, fmt, dir, s.constants);
    const json summary = gasnet::to_json(res.summary);
    gasnet::write_text_file(dir / "summary.json", summary.dump(1) + "\n");
    {
      static std::mutex mu;
      std::lock_guard<std::mutex> lock(mu);
      std::cout << summary.dump() << std::endl;
    }
    for (const auto& w : res.summary.warnings) spdlog::warn("{}: {}", s.name, w);
    if (res.summary.status != "ok") {
      spdlog::error("{}: coupling residuals exceed run.tolerances.residual", s.name);
      return kSolver;
    }
    return kOk;
  } catch (const gasnet::Error& e) {
    report_error(path, e);
    return exit_code(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    spdlog::error("{}: {}", path, e.what());
    return kIo;
  }
}

int check_one(const std::string& path, const Overrides& o) {
  try {
    const auto s = load(path, o);
    std::cout << "ok " << path << " (" << s.name << ")" << std::endl;
    return kOk;
  } catch (const gasnet::Error& e) {
    report_error(path, e);
    return exit_code(e.code());
  }
}

int diagnose(const std::string& path, const Overrides& o, const std::string& input, const std::string& out) {
  try {
    const auto s = load(path, o);
    const std::string file = input.empty() ? (fs::path(out) / "records.json").string() : input;
    const auto records = gasnet::read_records(read_file(file));
    json rows = json::array();
    double worst_mass = 0.0, worst_h = 0.0, worst_s = 0.0, worst_c = 0.0, worst_drift = 0.0;
    for (const auto& r : records) {
      if (r.pipes.size() != s.topology.pipes.size())
        gasnet::fail(gasnet::ErrorCode::ValidationError, "records do not match the scenario topology");
      std::vector<gasnet::PipeState> traces;
      double tv = 0.0;
      for (std::size_t j = 0; j < r.pipes.size(); ++j) {
        if (r.pipes[j].id != s.topology.pipes[j].spec.id)
          gasnet::fail(gasnet::ErrorCode::ValidationError, "pipe '" + r.pipes[j].id + "' is not in the scenario");
        traces.push_back(r.pipes[j].trace);
        for (std::size_t k = 0; k + 1 < r.pipes[j].states.size(); ++k)
          tv += gasnet::state_distance(r.pipes[j].states[k], r.pipes[j].states[k + 1]);
      }
      const auto d = gasnet::trace_residuals(s, traces);
      worst_mass = std::max(worst_mass, d.mass_residual);
      worst_h = std::max(worst_h, d.enthalpy_residual);
      worst_s = std::max(worst_s, d.entropy_residual);
      worst_c = std::max(worst_c, d.control_residual);
      const double drift = std::max({std::abs(d.mass_residual - r.diagnostics.mass_residual),
                                     std::abs(d.enthalpy_residual - r.diagnostics.enthalpy_residual),
                                     std::abs(d.entropy_residual - r.diagnostics.entropy_residual),
                                     std::abs(d.control_residual - r.diagnostics.control_residual)});
      worst_drift = std::max(worst_drift, drift);
      rows.push_back({{"time", r.time},
                      {"mass_residual", d.mass_residual},
                      {"enthalpy_residual", d.enthalpy_residual},
                      {"entropy_residual", d.entropy_residual},
                      {"control_residual", d.control_residual},
                      {"grid_TV", tv},
                      {"stored_TV", r.diagnostics.TV},
                      {"V", r.diagnostics.V},
                      {"Q", r.diagnostics.Q},
                      {"Y", r.diagnostics.Y},
                      {"fronts", r.diagnostics.fronts}});
    }
    const double tol = s.run.tolerances.residual;
    double control_scale = 1.0;
    if (s.coupling.compressor) control_scale = std::max(1.0, s.coupling.compressor->value);
    double q_scale = 1.0;
    for (const auto& pr : s.initial) q_scale = std::max(q_scale, std::abs(pr.front().state.q));
    const bool ok = worst_mass <= tol * q_scale && worst_h <= tol && worst_s <= tol * s.constants.cv &&
                    worst_c <= tol * control_scale;
    json report = {{"name", s.name},
                   {"records", records.size()},
                   {"status", ok ? "ok" : "residual_exceeded"},
                   {"max_mass_residual", worst_mass},
                   {"max_enthalpy_residual", worst_h},
                   {"max_entropy_residual", worst_s},
                   {"max_control_residual", worst_c},
                   {"max_stored_residual_drift", worst_drift},
                   {"snapshots", rows}};
    std::cout << report.dump(1) << std::endl;
    return ok ? kOk : kSolver;
  } catch (const gasnet::Error& e) {
    report_error(path, e);
    return exit_code(e.code());
  }
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("gasnet");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("GASNET_LOG")) {
    const auto lvl = spdlog::level::from_str(env);
    if (lvl != spdlog::level::off || std::string(env) == "off") spdlog::set_level(lvl);
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Gas network junction and compressor solver"};
  app.require_subcommand(1);

  std::vector<std::string> scenarios;
  std::string out = "out", format = "csv", input;
  double epsilon = 0.0, horizon = 0.0, tol = 0.0;
  std::uint64_t seed = 0;
  unsigned jobs = 1;

  auto common = [&](CLI::App* sub, bool outputs) {
    sub->add_option("--scenario", scenarios, "Scenario document(s)")->required()->check(CLI::ExistingFile);
    sub->add_option("--epsilon", epsilon, "Front-tracking epsilon")->check(CLI::PositiveNumber);
    sub->add_option("--horizon", horizon, "Final time")->check(CLI::PositiveNumber);
    sub->add_option("--tol", tol, "Newton tolerance on the scaled coupling residual")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Seed for the initial-data perturbation");
    if (outputs) {
      sub->add_option("--out", out, "Output directory");
      sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
      sub->add_option("--jobs", jobs, "Scenarios run in parallel")->check(CLI::PositiveNumber);
    }
  };
  auto* riemann = app.add_subcommand("riemann", "Solve the generalized Riemann problem at the coupling");
  auto* simulate = app.add_subcommand("simulate", "Front-tracking simulation");
  auto* check = app.add_subcommand("check", "Validate scenario documents only");
  auto* diag = app.add_subcommand("diagnose", "Recompute coupling residuals from stored JSON records");
  common(riemann, true);
  common(simulate, true);
  common(check, false);
  common(diag, false);
  diag->add_option("--out", out, "Directory holding records.json");
  diag->add_option("--input", input, "Records file (default <out>/records.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  Overrides o;
  auto set = [](CLI::App* sub, const char* name, double v, std::optional<double>& dst) {
    if (sub->count(name)) dst = v;
  };
  CLI::App* used = app.get_subcommands().front();
  set(used, "--epsilon", epsilon, o.epsilon);
  set(used, "--horizon", horizon, o.horizon);
  set(used, "--tol", tol, o.tol);
  if (used->count("--seed")) o.seed = seed;

  if (used == check) {
    int rc = kOk;
    for (const auto& p : scenarios) rc = std::max(rc, check_one(p, o));
    return rc;
  }
  if (used == diag) {
    if (scenarios.size() != 1) {
      spdlog::error("diagnose takes exactly one scenario");
      return kValidation;
    }
    return diagnose(scenarios[0], o, input, out);
  }

  o.mode = used == riemann ? "riemann" : "simulate";
  const bool many = scenarios.size() > 1;
  std::vector<int> codes(scenarios.size(), kOk);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < scenarios.size();) codes[k] = run_one(scenarios[k], o, out, format, many);
  };
  const unsigned n = std::min<unsigned>(jobs, static_cast<unsigned>(scenarios.size()));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < n; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return *std::max_element(codes.begin(), codes.end());
}
