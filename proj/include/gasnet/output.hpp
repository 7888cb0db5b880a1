#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "gasnet/error.hpp"
#include "gasnet/thermo.hpp"

namespace gasnet {

struct PipeSnapshot {
  std::string id;
  Model model = Model::M1;
  double kappa = 0.0;
  std::vector<double> x;
  std::vector<PipeState> states;
  PipeState trace;  ///< x = 0+

  bool operator==(const PipeSnapshot&) const = default;
};

struct SnapshotDiagnostics {
  double mass_residual = 0.0;
  double enthalpy_residual = 0.0;  ///< junction: relative spread of h over the traces
  double entropy_residual = 0.0;
  double control_residual = 0.0;   ///< compressor only
  double V = 0.0, Q = 0.0, Y = 0.0, TV = 0.0;
  std::size_t fronts = 0;

  bool operator==(const SnapshotDiagnostics&) const = default;
};

struct SnapshotRecord {
  double time = 0.0;
  std::vector<PipeSnapshot> pipes;
  SnapshotDiagnostics diagnostics;

  bool operator==(const SnapshotRecord&) const = default;
};

/// Shortest representation that reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline const char* csv_header() { return "t,pipe,x,rho,q,E,p,u,s,h,c\n"; }

inline void write_csv(std::ostream& os, const std::vector<SnapshotRecord>& records, const GasConstants& g) {
  os << csv_header();
  for (const auto& rec : records)
    for (const auto& p : rec.pipes)
      for (std::size_t k = 0; k < p.x.size(); ++k) {
        const PipeState& u = p.states[k];
        const auto tq = thermo_quantities(u, g);
        os << format_double(rec.time) << ',' << p.id << ',' << format_double(p.x[k]) << ',' << format_double(u.rho) << ','
           << format_double(u.q) << ',';
        if (u.model == Model::M1) os << format_double(u.E);
        os << ',' << format_double(pressure(u, g)) << ',' << format_double(u.velocity()) << ',' << format_double(tq.s) << ','
           << format_double(tq.h) << ',' << format_double(tq.c) << '\n';
      }
}

inline void write_diagnostics_csv(std::ostream& os, const std::vector<SnapshotRecord>& records) {
  os << "t,mass_residual,enthalpy_residual,entropy_residual,control_residual,V,Q,Y,TV,fronts\n";
  for (const auto& rec : records) {
    const auto& d = rec.diagnostics;
    os << format_double(rec.time) << ',' << format_double(d.mass_residual) << ',' << format_double(d.enthalpy_residual) << ','
       << format_double(d.entropy_residual) << ',' << format_double(d.control_residual) << ',' << format_double(d.V) << ','
       << format_double(d.Q) << ',' << format_double(d.Y) << ',' << format_double(d.TV) << ',' << d.fronts << '\n';
  }
}

namespace detail {

inline nlohmann::json state_json(const PipeState& u) {
  nlohmann::json j = {{"rho", u.rho}, {"q", u.q}};
  if (u.model == Model::M1) j["E"] = u.E;
  return j;
}

inline Model model_from(const std::string& s) {
  if (s == "M1") return Model::M1;
  if (s == "M2") return Model::M2;
  if (s == "M3") return Model::M3;
  fail(ErrorCode::ParseError, "unknown model '" + s + "'");
}

}  // namespace detail

inline nlohmann::json records_to_json(const std::vector<SnapshotRecord>& records) {
  using nlohmann::json;
  json out = json::array();
  for (const auto& rec : records) {
    json pipes = json::array();
    for (const auto& p : rec.pipes) {
      std::vector<double> rho, q, E;
      for (const auto& u : p.states) {
        rho.push_back(u.rho);
        q.push_back(u.q);
        E.push_back(u.E);
      }
      json jp = {{"id", p.id}, {"model", std::string(to_string(p.model))}, {"x", p.x}, {"rho", rho}, {"q", q}};
      if (p.model == Model::M1) jp["E"] = E;
      else jp["kappa"] = p.kappa;
      jp["trace"] = detail::state_json(p.trace);
      pipes.push_back(jp);
    }
    const auto& d = rec.diagnostics;
    out.push_back({{"time", rec.time},
                   {"pipes", pipes},
                   {"diagnostics",
                    {{"mass_residual", d.mass_residual},
                     {"enthalpy_residual", d.enthalpy_residual},
                     {"entropy_residual", d.entropy_residual},
                     {"control_residual", d.control_residual},
                     {"V", d.V},
                     {"Q", d.Q},
                     {"Y", d.Y},
                     {"TV", d.TV},
                     {"fronts", d.fronts}}}});
  }
  return {{"records", out}};
}

inline std::vector<SnapshotRecord> records_from_json(const nlohmann::json& doc) {
  std::vector<SnapshotRecord> out;
  try {
    for (const auto& jr : doc.at("records")) {
      SnapshotRecord rec;
      rec.time = jr.at("time").get<double>();
      for (const auto& jp : jr.at("pipes")) {
        PipeSnapshot p;
        p.id = jp.at("id").get<std::string>();
        p.model = detail::model_from(jp.at("model").get<std::string>());
        if (p.model != Model::M1) p.kappa = jp.at("kappa").get<double>();
        p.x = jp.at("x").get<std::vector<double>>();
        const auto rho = jp.at("rho").get<std::vector<double>>();
        const auto q = jp.at("q").get<std::vector<double>>();
        std::vector<double> E(rho.size(), 0.0);
        if (p.model == Model::M1) E = jp.at("E").get<std::vector<double>>();
        if (rho.size() != p.x.size() || q.size() != p.x.size() || E.size() != p.x.size())
          fail(ErrorCode::ParseError, "pipe '" + p.id + "': state arrays do not match the grid");
        auto make = [&](double r, double m, double e) {
          return p.model == Model::M1 ? PipeState::euler(r, m, e) : PipeState::isentropic(p.model, r, m, p.kappa);
        };
        for (std::size_t k = 0; k < p.x.size(); ++k) p.states.push_back(make(rho[k], q[k], E[k]));
        const auto& t = jp.at("trace");
        p.trace = make(t.at("rho").get<double>(), t.at("q").get<double>(), p.model == Model::M1 ? t.at("E").get<double>() : 0.0);
        rec.pipes.push_back(std::move(p));
      }
      const auto& d = jr.at("diagnostics");
      auto& D = rec.diagnostics;
      D.mass_residual = d.at("mass_residual").get<double>();
      D.enthalpy_residual = d.at("enthalpy_residual").get<double>();
      D.entropy_residual = d.at("entropy_residual").get<double>();
      D.control_residual = d.at("control_residual").get<double>();
      D.V = d.at("V").get<double>();
      D.Q = d.at("Q").get<double>();
      D.Y = d.at("Y").get<double>();
      D.TV = d.at("TV").get<double>();
      D.fronts = d.at("fronts").get<std::size_t>();
      out.push_back(std::move(rec));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("malformed records document: ") + e.what());
  }
  return out;
}

inline std::vector<SnapshotRecord> read_records(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::ParseError, e.what());
  }
  return records_from_json(doc);
}

enum class OutputFormat { Csv, Json };

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  os << text;
  os.flush();
  if (!os) fail(ErrorCode::IoError, "write to '" + path.string() + "' failed");
}

/// Writes snapshots.csv + diagnostics.csv, or records.json, into `dir`.
/// Returns the paths written.
inline std::vector<std::filesystem::path> write_outputs(const std::vector<SnapshotRecord>& records, OutputFormat format,
                                                        const std::filesystem::path& dir, const GasConstants& g) {
  std::vector<std::filesystem::path> written;
  if (format == OutputFormat::Csv) {
    std::ostringstream a, b;
    write_csv(a, records, g);
    write_diagnostics_csv(b, records);
    write_text_file(dir / "snapshots.csv", a.str());
    write_text_file(dir / "diagnostics.csv", b.str());
    written = {dir / "snapshots.csv", dir / "diagnostics.csv"};
  } else {
    write_text_file(dir / "records.json", records_to_json(records).dump(1) + "\n");
    written = {dir / "records.json"};
  }
  return written;
}

}  // namespace gasnet
