#pragma once

// Maneuver logs, CSV ingestion/export, dataset manifests, and derivation of
// body-frame velocities from earth-fixed poses.

#include <array>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"
#include "shipid/actuation.hpp"
#include "shipid/error.hpp"
#include "shipid/model.hpp"

namespace shipid {

inline constexpr double kDefaultDt = 0.2;  // s
inline constexpr double kTimestampTolerance = 1e-6;  // s

/// Time-stamped record of one maneuver. alpha1/alpha2 are the measured
/// (feedback) azimuth angles; vel is absent until measured or derived.
struct ManeuverLog {
  std::string label;
  double dt = kDefaultDt;
  std::vector<double> t;
  std::vector<InputCommand> cmd;
  std::vector<double> alpha1;
  std::vector<double> alpha2;
  std::vector<Pose> pose;
  std::optional<std::vector<BodyVelocity>> vel;
  Vec3 weight = Vec3::Ones();  // diagonal of W_j

  std::size_t size() const { return t.size(); }
  bool has_velocities() const { return vel.has_value(); }

  ShipState state_at(std::size_t k) const {
    if (!vel) throw Error(ErrorKind::kValidation, "maneuver '" + label + "' has no velocities");
    return {alpha1[k], alpha2[k], pose[k], (*vel)[k]};
  }

  std::vector<ShipState> states() const {
    std::vector<ShipState> out;
    out.reserve(size());
    for (std::size_t k = 0; k < size(); ++k) out.push_back(state_at(k));
    return out;
  }

  void validate() const {
    const std::size_t n = t.size();
    if (n < 2) throw Error(ErrorKind::kInsufficientData, "maneuver '" + label + "' has < 2 samples");
    if (cmd.size() != n || alpha1.size() != n || alpha2.size() != n || pose.size() != n ||
        (vel && vel->size() != n)) {
      throw Error(ErrorKind::kValidation, "maneuver '" + label + "' has series of unequal length");
    }
    if (!(dt > 0.0)) throw Error(ErrorKind::kValidation, "maneuver '" + label + "' needs dt > 0");
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (std::abs(t[k + 1] - t[k] - dt) > kTimestampTolerance) {
        throw Error(ErrorKind::kValidation,
                    "maneuver '" + label + "' has a non-uniform timestamp at sample " +
                        std::to_string(k + 1));
      }
    }
    if (!(weight.array() >= 0.0).all() || !weight.allFinite()) {
      throw Error(ErrorKind::kValidation, "maneuver '" + label + "' has invalid weights");
    }
  }
};

struct Dataset {
  std::vector<ManeuverLog> maneuvers;

  double dt() const {
    if (maneuvers.empty()) throw Error(ErrorKind::kValidation, "dataset is empty");
    return maneuvers.front().dt;
  }

  std::size_t total_samples() const {
    std::size_t n = 0;
    for (const auto& m : maneuvers) n += m.size();
    return n;
  }

  /// First n maneuvers in dataset order.
  Dataset prefix(std::size_t n) const {
    Dataset d;
    d.maneuvers.assign(maneuvers.begin(),
                       maneuvers.begin() + static_cast<std::ptrdiff_t>(std::min(n, maneuvers.size())));
    return d;
  }

  void validate() const {
    if (maneuvers.empty()) throw Error(ErrorKind::kValidation, "dataset is empty");
    for (const auto& m : maneuvers) {
      m.validate();
      if (std::abs(m.dt - maneuvers.front().dt) > 1e-12) {
        throw Error(ErrorKind::kValidation, "dataset mixes sampling periods");
      }
    }
  }
};

/// Removes 2*pi jumps so consecutive samples differ by less than pi.
inline std::vector<double> unwrap_heading(std::span<const double> psi) {
  std::vector<double> out(psi.begin(), psi.end());
  double offset = 0.0;
  for (std::size_t k = 1; k < out.size(); ++k) {
    const double raw_step = psi[k] - psi[k - 1];
    offset -= 2.0 * std::numbers::pi * std::round(raw_step / (2.0 * std::numbers::pi));
    out[k] = psi[k] + offset;
  }
  return out;
}

/// Second-order finite differences: central inside, one-sided at the ends.
inline std::vector<Vec3> finite_difference(std::span<const Vec3> series, double dt) {
  const std::size_t n = series.size();
  if (n < 3) throw Error(ErrorKind::kInsufficientData, "finite differencing needs >= 3 samples");
  if (!(dt > 0.0)) throw Error(ErrorKind::kValidation, "finite differencing needs dt > 0");
  std::vector<Vec3> out(n);
  out[0] = (-3.0 * series[0] + 4.0 * series[1] - series[2]) / (2.0 * dt);
  for (std::size_t k = 1; k + 1 < n; ++k) out[k] = (series[k + 1] - series[k - 1]) / (2.0 * dt);
  out[n - 1] = (3.0 * series[n - 1] - 4.0 * series[n - 2] + series[n - 3]) / (2.0 * dt);
  return out;
}

/// Earth-frame rates (x', y', psi') of a pose series.
inline std::vector<Vec3> finite_difference_pose(std::span<const Pose> poses, double dt) {
  std::vector<Vec3> eta;
  eta.reserve(poses.size());
  for (const auto& p : poses) eta.push_back(p.vec());
  return finite_difference(eta, dt);
}

/// v = J(psi)^T eta' at each sample; r is psi' itself.
inline std::vector<BodyVelocity> derive_body_velocities(std::span<const Pose> poses, double dt) {
  const auto eta_dot = finite_difference_pose(poses, dt);
  std::vector<BodyVelocity> out;
  out.reserve(poses.size());
  for (std::size_t k = 0; k < poses.size(); ++k) {
    const Vec3 body = rotation_matrix(poses[k].psi).transpose() * eta_dot[k];
    out.push_back({body[0], body[1], eta_dot[k][2]});
  }
  return out;
}

/// Copy of the log with velocities derived from poses when none were logged.
inline ManeuverLog with_velocities(ManeuverLog log) {
  if (!log.vel) log.vel = derive_body_velocities(log.pose, log.dt);
  return log;
}

inline Dataset with_velocities(Dataset d) {
  for (auto& m : d.maneuvers) m = with_velocities(std::move(m));
  return d;
}

namespace detail {

inline std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view field = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
      field.remove_suffix(1);
    }
    out.push_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double parse_double(std::string_view field, std::size_t row, std::string_view column) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ParseError(row, "row " + std::to_string(row) + ": column '" + std::string(column) +
                              "' is not a number: '" + std::string(field) + "'");
  }
  if (!std::isfinite(value)) {
    throw ParseError(row, "row " + std::to_string(row) + ": column '" + std::string(column) +
                              "' is not finite");
  }
  return value;
}

/// Parsed numeric table with named columns.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::optional<std::size_t> column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  }

  std::size_t require(std::string_view name, const std::string& path) const {
    if (auto c = column(name)) return *c;
    throw ParseError(0, path + ": missing column '" + std::string(name) + "'");
  }
};

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(0, path.string() + ": empty file");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // BOM
  for (auto f : split_csv(line)) table.header.emplace_back(f);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++row;
    const auto fields = split_csv(line);
    if (fields.size() != table.header.size()) {
      throw ParseError(row, path.string() + ": row " + std::to_string(row) + " has " +
                                std::to_string(fields.size()) + " fields, expected " +
                                std::to_string(table.header.size()));
    }
    std::vector<double> values;
    values.reserve(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      values.push_back(parse_double(fields[i], row, table.header[i]));
    }
    table.rows.push_back(std::move(values));
  }
  return table;
}

inline double uniform_dt(std::span<const double> t, const std::string& path) {
  if (t.size() < 2) throw ParseError(0, path + ": need at least 2 rows");
  const double dt = t[1] - t[0];
  if (!(dt > 0.0)) throw ParseError(2, path + ": row 2: timestamps must increase");
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (std::abs(t[k] - t[k - 1] - dt) > kTimestampTolerance) {
      throw ParseError(k + 1, path + ": row " + std::to_string(k + 1) +
                                  ": non-uniform timestamp " + format_double(t[k]));
    }
  }
  return dt;
}

inline std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  return out;
}

inline void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

}  // namespace detail

inline constexpr std::array<std::string_view, 10> kManeuverColumns{
    "t", "n1", "n2", "alpha1_cmd", "alpha2_cmd", "alpha1", "alpha2", "x", "y", "psi"};
inline constexpr std::array<std::string_view, 3> kVelocityColumns{"u", "v", "r"};

/// Reads a maneuver CSV. Velocity columns are optional; heading is unwrapped.
inline ManeuverLog load_maneuver_csv(const std::filesystem::path& path, std::string label = {}) {
  const auto table = detail::read_csv(path);
  const std::string where = path.string();
  std::array<std::size_t, 10> col{};
  for (std::size_t i = 0; i < kManeuverColumns.size(); ++i) {
    col[i] = table.require(kManeuverColumns[i], where);
  }
  const auto cu = table.column("u"), cv = table.column("v"), cr = table.column("r");
  const bool has_vel = cu && cv && cr;
  if ((cu || cv || cr) && !has_vel) {
    throw ParseError(0, where + ": velocity columns must be given together (u,v,r)");
  }

  ManeuverLog log;
  log.label = label.empty() ? path.stem().string() : std::move(label);
  std::vector<double> psi;
  for (const auto& row : table.rows) {
    log.t.push_back(row[col[0]]);
    log.cmd.push_back({row[col[1]], row[col[2]], row[col[3]], row[col[4]]});
    log.alpha1.push_back(row[col[5]]);
    log.alpha2.push_back(row[col[6]]);
    log.pose.push_back({row[col[7]], row[col[8]], row[col[9]]});
    psi.push_back(row[col[9]]);
  }
  log.dt = detail::uniform_dt(log.t, where);
  const auto unwrapped = unwrap_heading(psi);
  for (std::size_t k = 0; k < log.pose.size(); ++k) log.pose[k].psi = unwrapped[k];
  if (has_vel) {
    std::vector<BodyVelocity> vel;
    for (const auto& row : table.rows) vel.push_back({row[*cu], row[*cv], row[*cr]});
    log.vel = std::move(vel);
  }
  return log;
}

inline void save_maneuver_csv(const ManeuverLog& log, const std::filesystem::path& path) {
  log.validate();
  auto out = detail::open_for_write(path);
  using detail::format_double;
  out << "t,n1,n2,alpha1_cmd,alpha2_cmd,alpha1,alpha2,x,y,psi";
  if (log.vel) out << ",u,v,r";
  out << '\n';
  for (std::size_t k = 0; k < log.size(); ++k) {
    const auto& c = log.cmd[k];
    const auto& p = log.pose[k];
    out << format_double(log.t[k]) << ',' << format_double(c.n1) << ',' << format_double(c.n2)
        << ',' << format_double(c.alpha1_d) << ',' << format_double(c.alpha2_d) << ','
        << format_double(log.alpha1[k]) << ',' << format_double(log.alpha2[k]) << ','
        << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(p.psi);
    if (log.vel) {
      const auto& w = (*log.vel)[k];
      out << ',' << format_double(w.u) << ',' << format_double(w.v) << ',' << format_double(w.r);
    }
    out << '\n';
  }
  detail::finish_write(out, path);
}

/// Trajectory CSV: t,alpha1,alpha2,x,y,psi,u,v,r (radians).
inline void export_trajectory_csv(std::span<const ShipState> trajectory, double t0, double dt,
                                  const std::filesystem::path& path) {
  if (trajectory.empty()) throw Error(ErrorKind::kValidation, "refusing to export an empty trajectory");
  auto out = detail::open_for_write(path);
  using detail::format_double;
  out << "t,alpha1,alpha2,x,y,psi,u,v,r\n";
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    const auto s = trajectory[k].vec();
    out << format_double(t0 + static_cast<double>(k) * dt);
    for (int i = 0; i < 8; ++i) out << ',' << format_double(s[i]);
    out << '\n';
  }
  detail::finish_write(out, path);
}

struct Trajectory {
  std::vector<double> t;
  std::vector<ShipState> states;
};

inline Trajectory load_trajectory_csv(const std::filesystem::path& path) {
  const auto table = detail::read_csv(path);
  static constexpr std::array<std::string_view, 9> kCols{"t", "alpha1", "alpha2", "x", "y",
                                                         "psi", "u", "v", "r"};
  std::array<std::size_t, 9> col{};
  for (std::size_t i = 0; i < kCols.size(); ++i) col[i] = table.require(kCols[i], path.string());
  Trajectory traj;
  for (const auto& row : table.rows) {
    traj.t.push_back(row[col[0]]);
    StateVector s;
    for (int i = 0; i < 8; ++i) s[i] = row[col[static_cast<std::size_t>(i + 1)]];
    traj.states.push_back(ShipState::from(s));
  }
  if (traj.states.empty()) throw ParseError(0, path.string() + ": no rows");
  return traj;
}

/// Commands-only CSV (t,n1,n2,alpha1_cmd,alpha2_cmd) used by the simulate command.
inline std::pair<std::vector<InputCommand>, double> load_command_csv(
    const std::filesystem::path& path) {
  const auto table = detail::read_csv(path);
  const std::string where = path.string();
  const std::size_t ct = table.require("t", where), c1 = table.require("n1", where),
                    c2 = table.require("n2", where), c3 = table.require("alpha1_cmd", where),
                    c4 = table.require("alpha2_cmd", where);
  std::vector<double> t;
  std::vector<InputCommand> cmds;
  for (const auto& row : table.rows) {
    t.push_back(row[ct]);
    cmds.push_back({row[c1], row[c2], row[c3], row[c4]});
  }
  return {std::move(cmds), detail::uniform_dt(t, where)};
}

/// Manifest JSON:
///   {"dt": 0.2, "maneuvers": [{"path": "m01.csv", "label": "...", "weights": [1,1,1]}]}
/// Paths are resolved relative to the manifest's directory.
inline Dataset load_dataset(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open manifest " + manifest_path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, manifest_path.string() + ": " + e.what());
  }
  if (!j.contains("maneuvers") || !j["maneuvers"].is_array()) {
    throw ParseError(0, manifest_path.string() + ": missing 'maneuvers' array");
  }
  const auto base = manifest_path.parent_path();
  Dataset d;
  try {
    for (const auto& entry : j["maneuvers"]) {
      const std::filesystem::path rel = entry.at("path").get<std::string>();
      const auto label = entry.value("label", rel.stem().string());
      auto log = load_maneuver_csv(rel.is_absolute() ? rel : base / rel, label);
      if (entry.contains("weights")) {
        const auto w = entry["weights"].get<std::vector<double>>();
        if (w.size() != 3) throw ParseError(0, "weights must have three entries");
        log.weight = Vec3(w[0], w[1], w[2]);
      }
      if (j.contains("dt") && std::abs(j["dt"].get<double>() - log.dt) > kTimestampTolerance) {
        throw Error(ErrorKind::kValidation,
                    "maneuver '" + log.label + "' sampling period disagrees with manifest dt");
      }
      d.maneuvers.push_back(std::move(log));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, manifest_path.string() + ": malformed maneuver entry: " + e.what());
  }
  d.validate();
  return d;
}

/// Writes one CSV per maneuver plus manifest.json into dir.
inline std::filesystem::path save_dataset(const Dataset& d, const std::filesystem::path& dir) {
  d.validate();
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["dt"] = d.dt();
  manifest["maneuvers"] = nlohmann::json::array();
  for (std::size_t i = 0; i < d.maneuvers.size(); ++i) {
    const auto& m = d.maneuvers[i];
    char name[32];
    std::snprintf(name, sizeof(name), "m%02zu.csv", i + 1);
    save_maneuver_csv(m, dir / name);
    manifest["maneuvers"].push_back(
        {{"path", name}, {"label", m.label}, {"weights", {m.weight[0], m.weight[1], m.weight[2]}}});
  }
  const auto path = dir / "manifest.json";
  auto out = detail::open_for_write(path);
  out << manifest.dump(2) << '\n';
  detail::finish_write(out, path);
  return path;
}

}  // namespace shipid
