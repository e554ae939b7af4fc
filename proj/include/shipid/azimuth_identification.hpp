#pragma once

// Identification of the azimuth rotation model from commanded and measured
// angle logs, plus loaders for the azimuth and bollard-pull CSV files.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "shipid/actuation.hpp"
#include "shipid/dataio.hpp"
#include "shipid/error.hpp"
#include "shipid/integrator.hpp"
#include "shipid/nls.hpp"

namespace shipid {

/// Commanded and measured angle of one azimuth thruster (radians).
struct AzimuthLog {
  double dt = kDefaultDt;
  std::vector<double> t;
  std::vector<double> alpha_cmd;
  std::vector<double> alpha_meas;

  std::size_t size() const { return t.size(); }

  void validate() const {
    if (alpha_cmd.size() != t.size() || alpha_meas.size() != t.size()) {
      throw Error(ErrorKind::kValidation, "azimuth log has series of unequal length");
    }
    if (t.size() < 2) throw Error(ErrorKind::kInsufficientData, "azimuth log has < 2 samples");
    if (!(dt > 0.0)) throw Error(ErrorKind::kValidation, "azimuth log needs dt > 0");
  }
};

struct AzimuthFit {
  AzimuthModel model;
  double one_step_rmse = 0.0;  // rad
  double rollout_rmse = 0.0;   // rad, free simulation from the first sample
  double correlation = 0.0;    // Pearson, simulated vs measured angle
  SolveReport report;
};

/// One RK4 step of the angle ODE with the command held over the step.
inline double azimuth_step(const AzimuthModel& model, double alpha, double alpha_cmd, double dt) {
  return rk4_step([&](double a, double cmd) { return azimuth_rate(model, a, cmd); }, alpha,
                  alpha_cmd, dt);
}

/// Angle response to a command series; cmd[k] is held over [t_k, t_k + dt].
inline std::vector<double> simulate_azimuth(const AzimuthModel& model, double alpha0,
                                            std::span<const double> cmd, double dt) {
  std::vector<double> out;
  out.reserve(cmd.size() + 1);
  out.push_back(alpha0);
  for (double c : cmd) out.push_back(azimuth_step(model, out.back(), c, dt));
  return out;
}

namespace detail {

inline double pearson(std::span<const double> a, std::span<const double> b) {
  const auto n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ma += a[i], mb += b[i];
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return saa > 0.0 && sbb > 0.0 ? sab / std::sqrt(saa * sbb) : 0.0;
}

}  // namespace detail

/// Fits (K_alpha, epsilon) to the squared one-step prediction error of the
/// angle ODE. Needs at least one step where the thruster is rotating.
inline AzimuthFit estimate_azimuth_params(const AzimuthLog& log, const SolveOptions& options = {}) {
  log.validate();
  const std::size_t n = log.size();
  constexpr double kMoving = 1e-9;  // rad

  double rate_sum = 0.0;
  std::size_t moving = 0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double err = log.alpha_cmd[k] - log.alpha_meas[k];
    const double step = log.alpha_meas[k + 1] - log.alpha_meas[k];
    if (std::abs(err) > kMoving && std::abs(step) > kMoving) {
      rate_sum += std::abs(step) / log.dt;
      ++moving;
    }
  }
  if (moving == 0) {
    throw Error(ErrorKind::kUnidentifiable,
                "azimuth log has no commanded-angle transition; K_alpha is unidentifiable");
  }

  NlsProblem problem;
  problem.residual = [&log, n](const Eigen::VectorXd& theta) {
    const AzimuthModel m{theta[0], theta[1]};
    Eigen::VectorXd r(static_cast<Eigen::Index>(n - 1));
    for (std::size_t k = 0; k + 1 < n; ++k) {
      r[static_cast<Eigen::Index>(k)] =
          azimuth_step(m, log.alpha_meas[k], log.alpha_cmd[k], log.dt) - log.alpha_meas[k + 1];
    }
    return r;
  };
  problem.lower = Eigen::Vector2d(1e-9, 0.0);
  problem.upper = Eigen::Vector2d(1e3, 10.0);

  // Start from the mean observed slew rate. The cost is not smooth in epsilon
  // near 0, so a few smoothing widths are tried and the best fit is kept.
  const double k0 = rate_sum / static_cast<double>(moving);
  AzimuthFit fit;
  bool first = true;
  for (double eps0 : {0.0, 1e-3, 1e-2}) {
    SolveReport report = solve(problem, Eigen::Vector2d(k0, eps0), options);
    if (first || report.cost < fit.report.cost) fit.report = std::move(report);
    first = false;
  }
  fit.model = {fit.report.theta[0], fit.report.theta[1]};

  const Eigen::VectorXd r = problem.residual(fit.report.theta);
  fit.one_step_rmse = std::sqrt(r.squaredNorm() / static_cast<double>(r.size()));
  const auto sim = simulate_azimuth(fit.model, log.alpha_meas.front(),
                                    std::span(log.alpha_cmd).first(n - 1), log.dt);
  double se = 0.0;
  for (std::size_t k = 0; k < n; ++k) se += (sim[k] - log.alpha_meas[k]) * (sim[k] - log.alpha_meas[k]);
  fit.rollout_rmse = std::sqrt(se / static_cast<double>(n));
  fit.correlation = detail::pearson(sim, log.alpha_meas);
  return fit;
}

namespace detail {

inline void require_header(const CsvTable& table, const std::vector<std::string>& expected,
                           const std::filesystem::path& path) {
  if (table.header != expected) {
    std::string joined;
    for (const auto& name : expected) joined += (joined.empty() ? "" : ",") + name;
    throw ParseError(0, path.string() + ": expected header " + joined);
  }
}

}  // namespace detail

/// Reads `t,alpha_cmd,alpha_meas` (radians) with uniform timestamps.
inline AzimuthLog load_azimuth_csv(const std::filesystem::path& path) {
  const auto table = detail::read_csv(path);
  detail::require_header(table, {"t", "alpha_cmd", "alpha_meas"}, path);
  AzimuthLog log;
  for (const auto& row : table.rows) {
    log.t.push_back(row[0]);
    log.alpha_cmd.push_back(row[1]);
    log.alpha_meas.push_back(row[2]);
  }
  log.dt = detail::uniform_dt(log.t, path.string());
  return log;
}

/// Reads bollard-pull samples `rps,force_N`.
inline std::vector<ThrustSample> load_bollard_csv(const std::filesystem::path& path) {
  const auto table = detail::read_csv(path);
  detail::require_header(table, {"rps", "force_N"}, path);
  std::vector<ThrustSample> out;
  for (const auto& row : table.rows) out.push_back({row[0], row[1]});
  return out;
}

}  // namespace shipid
