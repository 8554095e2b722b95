#include "decaylab/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#ifndef DECAYLAB_VERSION
#define DECAYLAB_VERSION "0.0.0"
#endif

namespace decaylab::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << std::setprecision(17);
  return os;
}

void header_line(std::ostream& os, const nlohmann::json& header) {
  os << "# " << header.dump() << "\n";
}

nlohmann::json num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double num_back(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  return j.get<double>();
}

std::string file_stem(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_' || c == '=') {
      out += c;
    } else {
      out += '_';
    }
  }
  return out;
}

}  // namespace

std::string code_version() { return DECAYLAB_VERSION; }

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_norms_csv(const std::filesystem::path& path, const Trajectory& traj,
                     const nlohmann::json& header) {
  auto os = open_out(path);
  header_line(os, header);
  os << "t,field,m,p,value\n";
  for (const auto& [key, s] : traj.tracks) {
    const std::string field = s.tag.empty() ? s.field : s.field + "@" + s.tag;
    const std::string m = s.s ? format_number(*s.s) : std::to_string(s.m);
    const std::string p = format_number(s.p);
    for (std::size_t i = 0; i < s.size(); ++i) {
      os << s.t[i] << "," << csv_cell(field) << "," << m << "," << p << "," << s.value[i] << "\n";
    }
  }
}

void write_steps_csv(const std::filesystem::path& path, const Trajectory& traj,
                     const nlohmann::json& header) {
  auto os = open_out(path);
  header_line(os, header);
  os << "t,dt,z,dz,d2z,dissipation\n";
  for (const auto& r : traj.steps) {
    os << r.t << "," << r.dt << "," << r.z << "," << r.dz << "," << r.d2z << "," << r.dissipation
       << "\n";
  }
}

void write_series_files(const std::filesystem::path& dir, const Trajectory& traj) {
  std::filesystem::create_directories(dir);
  for (const auto& [key, s] : traj.tracks) {
    auto os = open_out(dir / (file_stem(key) + ".dat"));
    os << "# " << key << "\n";
    for (std::size_t i = 0; i < s.size(); ++i) os << s.t[i] << " " << s.value[i] << "\n";
  }
}

nlohmann::json series_to_json(const DecaySeries& s) {
  nlohmann::json j;
  j["key"] = s.key();
  j["field"] = s.field;
  j["m"] = s.m;
  j["p"] = num(s.p);
  j["s"] = s.s ? nlohmann::json(*s.s) : nlohmann::json(nullptr);
  j["tag"] = s.tag;
  j["t"] = s.t;
  j["value"] = s.value;
  if (s.fit_window) j["fit_window"] = {s.fit_window->first, s.fit_window->second};
  if (s.fitted_exponent) j["fitted_exponent"] = *s.fitted_exponent;
  if (s.fit_residual) j["fit_residual"] = *s.fit_residual;
  nlohmann::json ts = nlohmann::json::object();
  for (const auto& [a, v] : s.tail_sup) ts[format_number(a)] = num(v);
  j["tail_sup"] = ts;
  j["caveats"] = s.caveats;
  return j;
}

nlohmann::json trajectory_to_json(const Trajectory& traj, const nlohmann::json& header) {
  nlohmann::json j;
  j["header"] = header;
  j["z0_norm"] = traj.z0_norm;
  j["nu"] = traj.nu;
  j["wall_seconds"] = traj.wall_seconds;
  j["eigen_modes"] = traj.eigen_modes;
  j["pade_modes"] = traj.pade_modes;
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& r : traj.steps) steps.push_back({r.t, r.dt, r.z, r.dz, r.d2z, r.dissipation});
  j["steps"] = std::move(steps);
  nlohmann::json tracks = nlohmann::json::array();
  for (const auto& [key, s] : traj.tracks) tracks.push_back(series_to_json(s));
  j["tracks"] = std::move(tracks);
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : traj.events) events.push_back({{"t", e.t}, {"what", e.what}});
  j["events"] = std::move(events);
  std::vector<std::string> files;
  for (const auto& f : traj.checkpoint_files) files.push_back(f.string());
  j["checkpoint_files"] = files;
  return j;
}

Trajectory trajectory_from_json(const nlohmann::json& j, const SimConfig& config) {
  Trajectory tr;
  tr.config = config;
  tr.z0_norm = j.at("z0_norm").get<double>();
  tr.nu = j.at("nu").get<double>();
  tr.wall_seconds = j.at("wall_seconds").get<double>();
  tr.eigen_modes = j.at("eigen_modes").get<std::size_t>();
  tr.pade_modes = j.at("pade_modes").get<std::size_t>();
  for (const auto& r : j.at("steps")) {
    tr.steps.push_back({r[0].get<double>(), r[1].get<double>(), r[2].get<double>(),
                        r[3].get<double>(), r[4].get<double>(), r[5].get<double>()});
  }
  for (const auto& t : j.at("tracks")) {
    DecaySeries s;
    s.field = t.at("field").get<std::string>();
    s.m = t.at("m").get<int>();
    s.p = num_back(t.at("p"));
    if (!t.at("s").is_null()) s.s = t.at("s").get<double>();
    s.tag = t.at("tag").get<std::string>();
    s.t = t.at("t").get<std::vector<double>>();
    s.value = t.at("value").get<std::vector<double>>();
    tr.tracks.emplace(s.key(), std::move(s));
  }
  for (const auto& e : j.at("events")) {
    tr.events.push_back({e.at("t").get<double>(), e.at("what").get<std::string>()});
  }
  for (const auto& f : j.at("checkpoint_files")) tr.checkpoint_files.emplace_back(f.get<std::string>());
  return tr;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto os = open_out(path);
  os << j.dump(2) << "\n";
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return nlohmann::json::parse(is);
}

}  // namespace decaylab::io
