#pragma once

// Model validation: windowed n-step prediction, per-channel RMSE,
// relative-error comparison of two models, and report/plot generation.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "shipid/actuation.hpp"
#include "shipid/dataio.hpp"
#include "shipid/error.hpp"
#include "shipid/model.hpp"
#include "shipid/svg.hpp"
#include "shipid/whole_ship.hpp"

namespace shipid {

inline constexpr std::size_t kChannelCount = 8;
inline constexpr std::array<const char*, kChannelCount> kChannelNames{
    "x", "y", "psi", "u", "v", "r", "alpha1", "alpha2"};
enum Channel : std::size_t { kX, kY, kPsi, kU, kV, kR, kAlpha1, kAlpha2 };

using ChannelValues = std::array<double, kChannelCount>;

inline ChannelValues channels(const ShipState& s) {
  return {s.pose.x, s.pose.y, s.pose.psi, s.vel.u, s.vel.v, s.vel.r, s.alpha1, s.alpha2};
}

/// Root mean square of the pairwise differences.
inline double rmse(std::span<const double> predicted, std::span<const double> measured) {
  if (predicted.size() != measured.size()) {
    throw Error(ErrorKind::kValidation, "rmse: series lengths differ");
  }
  if (predicted.empty()) throw Error(ErrorKind::kValidation, "rmse: empty series");
  double se = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - measured[i];
    se += d * d;
  }
  return std::sqrt(se / static_cast<double>(predicted.size()));
}

namespace detail {

/// Per-channel series; heading is unwrapped.
inline std::array<std::vector<double>, kChannelCount> channel_series(
    std::span<const ShipState> states) {
  std::array<std::vector<double>, kChannelCount> out;
  for (const auto& s : states) {
    const auto c = channels(s);
    for (std::size_t i = 0; i < kChannelCount; ++i) out[i].push_back(c[i]);
  }
  out[kPsi] = unwrap_heading(out[kPsi]);
  return out;
}

}  // namespace detail

/// Per-channel RMSE of two state series; heading compared after unwrapping.
inline ChannelValues rmse(std::span<const ShipState> predicted,
                          std::span<const ShipState> measured) {
  if (predicted.size() != measured.size()) {
    throw Error(ErrorKind::kValidation, "rmse: series lengths differ");
  }
  if (predicted.empty()) throw Error(ErrorKind::kValidation, "rmse: empty series");
  const auto p = detail::channel_series(predicted);
  const auto m = detail::channel_series(measured);
  ChannelValues out{};
  for (std::size_t i = 0; i < kChannelCount; ++i) out[i] = rmse(p[i], m[i]);
  return out;
}

struct PredictionReport {
  std::string label;
  std::size_t horizon = 1;          // steps per window
  ChannelValues rmse{};
  std::vector<double> t;            // time of each predicted sample
  std::vector<ShipState> predicted;
  std::vector<ShipState> measured;
};

/// Splits the log into windows of n steps. Each window starts from the
/// measured full state and is rolled forward under the logged commands; every
/// predicted sample is compared with the measurement. A shorter final window
/// covers the remainder.
template <ShipParameterSet P>
PredictionReport predict_n_steps(const P& p, const ThrusterModel& thr, const ManeuverLog& input,
                                 std::size_t n) {
  if (n < 1) throw Error(ErrorKind::kValidation, "prediction horizon must be >= 1");
  const ManeuverLog log = input.has_velocities() ? input : with_velocities(input);
  log.validate();
  if (log.size() <= n) {
    throw Error(ErrorKind::kInsufficientData,
                "maneuver '" + log.label + "' has " + std::to_string(log.size()) +
                    " samples, fewer than one " + std::to_string(n) + "-step window");
  }
  const auto dyn = make_dynamics(p);
  PredictionReport report;
  report.label = log.label;
  report.horizon = n;
  const std::size_t last = log.size() - 1;
  for (std::size_t start = 0; start < last; start += n) {
    const std::size_t steps = std::min(n, last - start);
    StateVector s = log.state_at(start).vec();
    for (std::size_t j = 0; j < steps; ++j) {
      const std::size_t k = start + j;
      try {
        s = whole_ship_step(dyn, thr, s, log.cmd[k], log.dt);
      } catch (const IntegrationBlowup&) {
        throw IntegrationBlowup(k, "maneuver '" + log.label + "': prediction blew up at step " +
                                       std::to_string(k));
      }
      report.t.push_back(log.t[k + 1]);
      report.predicted.push_back(ShipState::from(s));
      report.measured.push_back(log.state_at(k + 1));
    }
  }
  report.rmse = rmse(std::span<const ShipState>(report.predicted),
                     std::span<const ShipState>(report.measured));
  return report;
}

inline std::vector<std::size_t> default_horizons() {
  std::vector<std::size_t> h{1};
  for (std::size_t n = 5; n <= 50; n += 5) h.push_back(n);
  return h;
}

// ---------------------------------------------------------------------------
// Relative-error comparison

inline constexpr std::size_t kComparisonVariables = 9;
inline constexpr std::array<const char*, kComparisonVariables> kComparisonNames{
    "surge_velocity",     "sway_velocity",     "yaw_velocity",
    "surge_acceleration", "sway_acceleration", "yaw_acceleration",
    "surge_distance",     "sway_distance",     "yaw_distance"};

/// Relative errors in percent; nullopt when the measured RMS is zero.
/// Infinity marks a model whose rollout blew up.
using RelativeErrors = std::array<std::optional<double>, kComparisonVariables>;

struct ComparisonReport {
  std::string name_a = "22-parameter";
  std::string name_b = "6-parameter";
  RelativeErrors model_a{};
  RelativeErrors model_b{};
};

inline constexpr double kNotApplicableRms = 1e-12;

/// 100 * RMSE(pred - meas) / RMS(meas) per variable over full rollouts of
/// every maneuver. Accelerations come from finite differences of the
/// velocities; distances are x, y and the unwrapped heading.
template <ShipParameterSet P>
RelativeErrors relative_errors(const P& p, const ThrusterModel& thr, const Dataset& input) {
  const Dataset d = with_velocities(input);
  d.validate();
  std::array<double, kComparisonVariables> err_sq{}, meas_sq{};
  bool blew_up = false;
  for (const auto& log : d.maneuvers) {
    const auto measured = log.states();
    std::vector<ShipState> predicted;
    try {
      predicted = simulate(p, thr, measured.front(),
                           std::span(log.cmd).first(log.size() - 1), log.dt);
    } catch (const IntegrationBlowup&) {
      blew_up = true;
      continue;
    }
    std::vector<Vec3> vp, vm, dp, dm;
    for (std::size_t k = 0; k < measured.size(); ++k) {
      vp.push_back(predicted[k].vel.vec());
      vm.push_back(measured[k].vel.vec());
    }
    const auto ap = finite_difference(vp, log.dt);
    const auto am = finite_difference(vm, log.dt);
    const auto sp = detail::channel_series(predicted);
    const auto sm = detail::channel_series(measured);
    for (std::size_t k = 0; k < measured.size(); ++k) {
      const std::array<double, kComparisonVariables> pv{
          vp[k][0], vp[k][1], vp[k][2], ap[k][0], ap[k][1], ap[k][2],
          sp[kX][k], sp[kY][k], sp[kPsi][k]};
      const std::array<double, kComparisonVariables> mv{
          vm[k][0], vm[k][1], vm[k][2], am[k][0], am[k][1], am[k][2],
          sm[kX][k], sm[kY][k], sm[kPsi][k]};
      for (std::size_t i = 0; i < kComparisonVariables; ++i) {
        err_sq[i] += (pv[i] - mv[i]) * (pv[i] - mv[i]);
        meas_sq[i] += mv[i] * mv[i];
      }
    }
  }
  RelativeErrors out{};
  const auto samples = static_cast<double>(d.total_samples());
  for (std::size_t i = 0; i < kComparisonVariables; ++i) {
    if (std::sqrt(meas_sq[i] / samples) <= kNotApplicableRms) continue;
    out[i] = blew_up ? std::numeric_limits<double>::infinity()
                     : 100.0 * std::sqrt(err_sq[i] / meas_sq[i]);
  }
  return out;
}

template <ShipParameterSet A, ShipParameterSet B>
ComparisonReport relative_error_table(const A& model_a, const B& model_b,
                                      const ThrusterModel& thr, const Dataset& dataset) {
  ComparisonReport report;
  report.model_a = relative_errors(model_a, thr, dataset);
  report.model_b = relative_errors(model_b, thr, dataset);
  return report;
}

// ---------------------------------------------------------------------------
// Report files

namespace detail {

inline nlohmann::ordered_json relative_errors_json(const RelativeErrors& e) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < kComparisonVariables; ++i) {
    if (!e[i]) {
      out[kComparisonNames[i]] = "n/a";
    } else if (std::isinf(*e[i])) {
      out[kComparisonNames[i]] = "diverged";
    } else {
      out[kComparisonNames[i]] = *e[i];
    }
  }
  return out;
}

inline std::string cell(const std::optional<double>& v) {
  if (!v) return "n/a";
  if (std::isinf(*v)) return "diverged";
  return format_double(*v);
}

inline std::string file_stem(std::size_t index, const std::string& label) {
  std::string s = std::to_string(index + 1);
  if (s.size() < 2) s.insert(0, "0");
  s += "_";
  for (char c : label) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '+';
    s += ok ? c : '_';
  }
  return s;
}

}  // namespace detail

inline nlohmann::ordered_json comparison_json(const ComparisonReport& r) {
  nlohmann::ordered_json j;
  j["metric"] = "100 * RMSE(predicted - measured) / RMS(measured), full rollouts";
  j[r.name_a] = detail::relative_errors_json(r.model_a);
  j[r.name_b] = detail::relative_errors_json(r.model_b);
  return j;
}

/// CSV with columns `variable,<name_a>,<name_b>` (percent).
inline void write_comparison_csv(const ComparisonReport& r, const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  out << "# relative error = 100 * RMSE(predicted - measured) / RMS(measured)\n";
  out << "variable," << r.name_a << "," << r.name_b << "\n";
  for (std::size_t i = 0; i < kComparisonVariables; ++i) {
    out << kComparisonNames[i] << "," << detail::cell(r.model_a[i]) << ","
        << detail::cell(r.model_b[i]) << "\n";
  }
  detail::finish_write(out, path);
}

struct ValidationSuiteResult {
  std::vector<PredictionReport> reports;  // maneuver-major, horizon-minor
  std::vector<std::filesystem::path> files;
};

/// Runs predict_n_steps for every (maneuver, horizon) pair. When out_dir is
/// non-empty writes rmse.csv, summary.json, one trajectory overlay per
/// maneuver, and an RMSE-vs-horizon bar chart.
template <ShipParameterSet P>
ValidationSuiteResult validation_suite(const P& p, const ThrusterModel& thr,
                                       const Dataset& dataset,
                                       const std::vector<std::size_t>& horizons = default_horizons(),
                                       const std::filesystem::path& out_dir = {}) {
  if (horizons.empty()) throw Error(ErrorKind::kValidation, "horizon list is empty");
  for (std::size_t h : horizons) {
    if (h < 1) throw Error(ErrorKind::kValidation, "prediction horizon must be >= 1");
  }
  if (dataset.maneuvers.empty()) throw Error(ErrorKind::kValidation, "dataset is empty");

  ValidationSuiteResult result;
  for (const auto& log : dataset.maneuvers) {
    const ManeuverLog full = log.has_velocities() ? log : with_velocities(log);
    for (std::size_t h : horizons) result.reports.push_back(predict_n_steps(p, thr, full, h));
  }
  if (out_dir.empty()) return result;

  const std::size_t nh = horizons.size();
  const auto csv_path = out_dir / "rmse.csv";
  {
    auto out = detail::open_for_write(csv_path);
    out << "maneuver,horizon,channel,rmse\n";
    for (const auto& r : result.reports) {
      for (std::size_t c = 0; c < kChannelCount; ++c) {
        out << r.label << "," << r.horizon << "," << kChannelNames[c] << ","
            << detail::format_double(r.rmse[c]) << "\n";
      }
    }
    detail::finish_write(out, csv_path);
  }
  result.files.push_back(csv_path);

  // Mean RMSE over maneuvers per horizon and channel.
  std::vector<ChannelValues> mean(nh, ChannelValues{});
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      mean[i % nh][c] += result.reports[i].rmse[c] / static_cast<double>(dataset.maneuvers.size());
    }
  }

  nlohmann::ordered_json summary;
  summary["horizons"] = horizons;
  summary["channels"] = kChannelNames;
  auto& mean_json = summary["mean_rmse"];
  for (std::size_t h = 0; h < nh; ++h) {
    nlohmann::ordered_json row;
    row["horizon"] = horizons[h];
    for (std::size_t c = 0; c < kChannelCount; ++c) row[kChannelNames[c]] = mean[h][c];
    mean_json.push_back(row);
  }
  auto& man_json = summary["maneuvers"];
  for (std::size_t m = 0; m < dataset.maneuvers.size(); ++m) {
    nlohmann::ordered_json entry;
    entry["label"] = dataset.maneuvers[m].label;
    for (std::size_t h = 0; h < nh; ++h) {
      const auto& r = result.reports[m * nh + h];
      nlohmann::ordered_json row;
      row["horizon"] = r.horizon;
      for (std::size_t c = 0; c < kChannelCount; ++c) row[kChannelNames[c]] = r.rmse[c];
      entry["rmse"].push_back(row);
    }
    man_json.push_back(entry);
  }
  const auto summary_path = out_dir / "summary.json";
  {
    auto out = detail::open_for_write(summary_path);
    out << summary.dump(2) << "\n";
    detail::finish_write(out, summary_path);
  }
  result.files.push_back(summary_path);

  const std::vector<std::string> colors{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e"};
  std::vector<std::string> groups;
  for (std::size_t h : horizons) groups.push_back(std::to_string(h));
  std::vector<svg::Series> bars;
  for (std::size_t c = kU; c <= kR; ++c) {
    svg::Series s{kChannelNames[c], colors[c - kU], {}, {}};
    for (std::size_t h = 0; h < nh; ++h) s.y.push_back(mean[h][c]);
    bars.push_back(std::move(s));
  }
  const auto bar_path = out_dir / "rmse_vs_horizon.svg";
  {
    auto out = detail::open_for_write(bar_path);
    out << svg::bar_chart("Mean velocity RMSE vs prediction horizon (steps)", "RMSE", groups, bars);
    detail::finish_write(out, bar_path);
  }
  result.files.push_back(bar_path);

  for (std::size_t m = 0; m < dataset.maneuvers.size(); ++m) {
    const auto& shortest = result.reports[m * nh];
    const auto& longest = result.reports[m * nh + nh - 1];
    std::vector<svg::Series> lines;
    svg::Series meas{"measured", "#000000", {}, {}};
    for (const auto& s : shortest.measured) {
      meas.x.push_back(s.pose.y);
      meas.y.push_back(s.pose.x);
    }
    lines.push_back(std::move(meas));
    for (const auto* r : {&shortest, &longest}) {
      svg::Series s{std::to_string(r->horizon) + "-step", r == &shortest ? colors[0] : colors[1],
                    {}, {}, true};
      for (const auto& st : r->predicted) {
        s.x.push_back(st.pose.y);
        s.y.push_back(st.pose.x);
      }
      lines.push_back(std::move(s));
      if (nh == 1) break;
    }
    const auto path =
        out_dir / ("trajectory_" + detail::file_stem(m, dataset.maneuvers[m].label) + ".svg");
    auto out = detail::open_for_write(path);
    out << svg::line_chart(dataset.maneuvers[m].label, "y (m)", "x (m)", lines, true);
    detail::finish_write(out, path);
    result.files.push_back(path);
  }
  return result;
}

}  // namespace shipid
