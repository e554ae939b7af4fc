#pragma once

// Parameter estimation for the ship models: empirical initialization,
// equation-error (LO) and output-error (GO) residuals, straight-line
// stability constraints, and the incremental LO+GO combination.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "shipid/actuation.hpp"
#include "shipid/dataio.hpp"
#include "shipid/error.hpp"
#include "shipid/model.hpp"
#include "shipid/nls.hpp"
#include "shipid/whole_ship.hpp"

namespace shipid {

/// Hull data of the scaled tug (defaults) or any other hull.
struct HullSpecs {
  double m = 187.6;       // kg
  double L = 2.152;       // m
  double B = 0.6952;      // m
  double D = 0.2485;      // draft, m
  double rho = 1000.0;    // kg/m^3
  double dispv = 0.1876;  // m^3
  double x_g = 0.0;       // m, gravity center ahead of the origin

  void validate() const {
    for (double value : {m, L, B, D, rho, dispv}) {
      if (!std::isfinite(value) || value <= 0.0) {
        throw Error(ErrorKind::kValidation, "hull specs must be positive and finite");
      }
    }
    if (!std::isfinite(x_g)) throw Error(ErrorKind::kValidation, "x_g must be finite");
  }
};

/// Strip-theory added-mass terms and yaw inertia.
struct AddedMassTerms {
  double X_udot = 0.0;
  double Y_vdot = 0.0;
  double N_rdot = 0.0;
  double I_z = 0.0;
};

inline AddedMassTerms strip_theory_terms(const HullSpecs& s) {
  s.validate();
  const double a = s.L / 2.0;
  const double b = s.B / 2.0;
  const double pi = std::numbers::pi;
  AddedMassTerms t;
  t.X_udot = -0.05 * s.m;
  t.Y_vdot = -0.5 * s.rho * s.D * s.D * s.L;
  t.N_rdot = -(0.1 * s.m * s.B * s.B + s.rho * pi * s.D * s.D * s.L * s.L * s.L) / 24.0;
  t.I_z = 4.0 / 15.0 * pi * s.rho * a * b * b * (a * a + b * b);
  return t;
}

/// Inertia from strip theory (Y_rdot and N_vdot taken as zero); every
/// damping coefficient starts at zero.
inline ShipParams22 init_params_empirical(const HullSpecs& s) {
  const auto t = strip_theory_terms(s);
  ShipParams22 p;  // damping terms default to 0
  p.m11 = s.m - t.X_udot;
  p.m22 = s.m - t.Y_vdot;
  p.m23 = s.m * s.x_g;
  p.m32 = s.m * s.x_g;
  p.m33 = t.I_z - t.N_rdot;
  return p;
}

inline ShipParams6 init_params6_empirical(const HullSpecs& s) {
  const auto p = init_params_empirical(s);
  return ShipParams6{p.m11, p.m22, p.m33, 0.0, 0.0, 0.0};
}

/// Values that must be positive for a dynamically stable hull:
/// [m11, m22, m33, -X_u, -X_u (Y_v N_r - Y_r N_v)]. With paper_literal the
/// last two entries use X_u instead of -X_u.
inline std::vector<double> stability_constraints(const ShipParams22& p,
                                                 bool paper_literal = false) {
  const double surge = paper_literal ? p.X_u : -p.X_u;
  const double sway_yaw = p.Y_v * p.N_r - p.Y_r * p.N_v;
  return {p.m11, p.m22, p.m33, surge, surge * sway_yaw};
}

inline std::vector<double> stability_constraints(const ShipParams6& p, bool = false) {
  return {p.m11, p.m22, p.m33};
}

inline std::vector<std::string> stability_constraint_names(const ShipParams22&) {
  return {"m11", "m22", "m33", "surge_damping", "sway_yaw_damping"};
}

inline std::vector<std::string> stability_constraint_names(const ShipParams6&) {
  return {"m11", "m22", "m33"};
}

inline constexpr double kResidualClamp = 1e6;

struct ResidualDiagnostics {
  bool clamped = false;  // rollout failed or residuals hit the clamp
};

namespace detail {

inline std::size_t residual_rows(const Dataset& d) {
  std::size_t rows = 0;
  for (const auto& m : d.maneuvers) rows += 3 * (m.size() - 1);
  return rows;
}

inline void require_velocities(const Dataset& d) {
  for (const auto& m : d.maneuvers) {
    if (!m.vel) {
      throw Error(ErrorKind::kValidation,
                  "maneuver '" + m.label + "' has no velocity channels; derive them first");
    }
  }
}

inline void clamp_residuals(Eigen::VectorXd& r, ResidualDiagnostics* diag) {
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    if (!std::isfinite(r[i]) || std::abs(r[i]) > kResidualClamp) {
      r[i] = std::isfinite(r[i]) ? std::copysign(kResidualClamp, r[i]) : kResidualClamp;
      if (diag) diag->clamped = true;
    }
  }
}

enum class Anchor { kMeasured, kPredicted };

/// Shared body of the LO and GO residuals. With kMeasured every step starts
/// from the logged velocity; with kPredicted the velocity is carried forward
/// from the previous prediction. Azimuth angles always come from the log.
template <ShipParameterSet P>
Eigen::VectorXd velocity_residuals(const P& p, const Dataset& d, const ThrusterModel& thr,
                                   Anchor anchor, ResidualDiagnostics* diag) {
  require_velocities(d);
  Eigen::VectorXd r(static_cast<Eigen::Index>(residual_rows(d)));
  std::optional<VelocityDynamics<P>> dyn;
  try {
    dyn.emplace(p);
  } catch (const Error&) {
    r.setConstant(kResidualClamp);
    if (diag) diag->clamped = true;
    return r;
  }
  Eigen::Index row = 0;
  for (const auto& m : d.maneuvers) {
    const auto& vel = *m.vel;
    const Vec3 w = m.weight.cwiseSqrt();
    const std::size_t n = m.size();
    Vec3 current = vel[0].vec();
    std::size_t k = 0;
    try {
      for (; k + 1 < n; ++k) {
        const Vec3 start = anchor == Anchor::kMeasured ? vel[k].vec() : current;
        current = velocity_step(*dyn, thr, m.alpha1[k], m.alpha2[k], start, m.cmd[k], m.dt);
        r.segment<3>(row) = w.cwiseProduct(current - vel[k + 1].vec());
        row += 3;
      }
    } catch (const IntegrationBlowup&) {
      for (; k + 1 < n; ++k) {
        r.segment<3>(row).setConstant(kResidualClamp);
        row += 3;
      }
      if (diag) diag->clamped = true;
    }
  }
  clamp_residuals(r, diag);
  return r;
}

}  // namespace detail

/// Equation-error residuals: one RK4 step from each measured state, compared
/// with the next measured velocity, weighted by W_j^(1/2).
template <ShipParameterSet P>
Eigen::VectorXd build_lo_residuals(const P& p, const Dataset& d, const ThrusterModel& thr = {},
                                   ResidualDiagnostics* diag = nullptr) {
  return detail::velocity_residuals(p, d, thr, detail::Anchor::kMeasured, diag);
}

/// Output-error residuals: velocities rolled out from the first measured
/// sample of each maneuver under the logged inputs.
template <ShipParameterSet P>
Eigen::VectorXd build_go_residuals(const P& p, const Dataset& d, const ThrusterModel& thr = {},
                                   ResidualDiagnostics* diag = nullptr) {
  return detail::velocity_residuals(p, d, thr, detail::Anchor::kPredicted, diag);
}

enum class EstimationMode { kLO, kGO, kCombined };

inline const char* to_string(EstimationMode m) {
  switch (m) {
    case EstimationMode::kLO: return "lo";
    case EstimationMode::kGO: return "go";
    case EstimationMode::kCombined: return "combined";
  }
  return "unknown";
}

struct EstimationConfig {
  double lambda = 1e-4;
  double default_bound = 1e4;           // |theta_i| <= default_bound unless overridden
  std::optional<Eigen::VectorXd> lower;
  std::optional<Eigen::VectorXd> upper;
  std::vector<bool> free;               // empty: all parameters estimated
  std::vector<Vec3> weights;            // empty: use the weights stored in the logs
  bool constraints_enabled = true;
  bool paper_literal_constraints = false;
  double violation_tolerance = 1e-6;
  SolveOptions solver{.max_iterations = 200};
  EstimationMode mode = EstimationMode::kCombined;
  ThrusterModel thruster;
};

enum class Method { kLO, kGO };

inline const char* to_string(Method m) { return m == Method::kLO ? "LO" : "GO"; }

/// One solver run inside an estimation, as recorded in the provenance log.
struct Attempt {
  std::size_t stage = 0;  // number of maneuvers in the subset
  Method method = Method::kGO;
  std::string start;      // "initial", "previous", or "lo"
  SolveStatus status = SolveStatus::kStalled;
  double cost = 0.0;
  int iterations = 0;
  double max_violation = 0.0;
  bool clamped = false;
  bool success = false;
};

template <ShipParameterSet P>
struct EstimationResult {
  std::optional<P> p_lo;
  std::optional<P> p_go;
  bool degraded = false;
  std::vector<std::string> labels;
  std::vector<double> lo_rms;  // per maneuver, at the returned parameters
  std::vector<double> go_rms;
  std::vector<SolveReport> reports;
  std::vector<Attempt> provenance;

  const P& best() const {
    if (p_go) return *p_go;
    if (p_lo) return *p_lo;
    throw Error(ErrorKind::kSolver, "estimation produced no parameters");
  }
};

namespace detail {

inline Dataset apply_weights(Dataset d, const EstimationConfig& cfg) {
  if (cfg.weights.empty()) return d;
  if (cfg.weights.size() != d.maneuvers.size()) {
    throw Error(ErrorKind::kValidation, "weight list length does not match the maneuver count");
  }
  for (std::size_t i = 0; i < d.maneuvers.size(); ++i) d.maneuvers[i].weight = cfg.weights[i];
  return d;
}

/// Maps the free entries of the parameter vector to/from the solver's theta.
template <ShipParameterSet P>
class ParameterMap {
 public:
  ParameterMap(const P& base, const std::vector<bool>& free) : base_(to_vector(base)) {
    if (!free.empty() && free.size() != P::kSize) {
      throw Error(ErrorKind::kValidation, "free-parameter mask has the wrong length");
    }
    for (std::size_t i = 0; i < P::kSize; ++i) {
      if (free.empty() || free[i]) index_.push_back(static_cast<Eigen::Index>(i));
    }
    if (index_.empty()) throw Error(ErrorKind::kValidation, "no free parameters");
  }

  Eigen::VectorXd reduce(const Eigen::VectorXd& full) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(index_.size()));
    for (std::size_t i = 0; i < index_.size(); ++i) out[static_cast<Eigen::Index>(i)] = full[index_[i]];
    return out;
  }

  Eigen::VectorXd expand(const Eigen::VectorXd& theta) const {
    Eigen::VectorXd full = base_;
    for (std::size_t i = 0; i < index_.size(); ++i) full[index_[i]] = theta[static_cast<Eigen::Index>(i)];
    return full;
  }

  P params(const Eigen::VectorXd& theta) const { return from_vector<P>(expand(theta)); }

 private:
  Eigen::VectorXd base_;
  std::vector<Eigen::Index> index_;
};

template <ShipParameterSet P>
struct RunOutcome {
  P params;
  SolveReport report;
  Attempt attempt;
};

template <ShipParameterSet P>
RunOutcome<P> run_method(Method method, const Dataset& d, const P& start,
                         const EstimationConfig& cfg) {
  const ParameterMap<P> map(start, cfg.free);
  const ThrusterModel thr = cfg.thruster;
  NlsProblem problem;
  problem.ridge = cfg.lambda;
  const Anchor anchor = method == Method::kLO ? Anchor::kMeasured : Anchor::kPredicted;
  problem.residual = [&d, &map, thr, anchor](const Eigen::VectorXd& theta) {
    return velocity_residuals(map.params(theta), d, thr, anchor, nullptr);
  };
  const Eigen::VectorXd full_lower =
      cfg.lower ? *cfg.lower : Eigen::VectorXd::Constant(P::kSize, -cfg.default_bound);
  const Eigen::VectorXd full_upper =
      cfg.upper ? *cfg.upper : Eigen::VectorXd::Constant(P::kSize, cfg.default_bound);
  if (full_lower.size() != static_cast<Eigen::Index>(P::kSize) ||
      full_upper.size() != static_cast<Eigen::Index>(P::kSize)) {
    throw Error(ErrorKind::kValidation, "bounds must have one entry per parameter");
  }
  problem.lower = map.reduce(full_lower);
  problem.upper = map.reduce(full_upper);
  if (cfg.constraints_enabled) {
    const auto names = stability_constraint_names(start);
    for (std::size_t i = 0; i < names.size(); ++i) {
      problem.inequalities.push_back(
          {names[i],
           [&map, i, literal = cfg.paper_literal_constraints](const Eigen::VectorXd& theta) {
             return stability_constraints(map.params(theta), literal)[i];
           },
           ConstraintSense::kPositive});
    }
  }

  RunOutcome<P> out{start, solve(problem, map.reduce(to_vector(start)), cfg.solver), {}};
  out.params = map.params(out.report.theta);
  ResidualDiagnostics diag;
  velocity_residuals(out.params, d, thr, anchor, &diag);
  double violation = 0.0;
  if (cfg.constraints_enabled) {
    for (double h : stability_constraints(out.params, cfg.paper_literal_constraints)) {
      violation = std::max(violation, -h);
    }
  }
  out.attempt.stage = d.maneuvers.size();
  out.attempt.method = method;
  out.attempt.status = out.report.status;
  out.attempt.cost = out.report.cost;
  out.attempt.iterations = out.report.iterations;
  out.attempt.max_violation = violation;
  out.attempt.clamped = diag.clamped;
  out.attempt.success = out.report.converged() && !diag.clamped &&
                        violation <= cfg.violation_tolerance;
  return out;
}

inline double rms(const Eigen::VectorXd& r) {
  return r.size() == 0 ? 0.0 : std::sqrt(r.squaredNorm() / static_cast<double>(r.size()));
}

template <ShipParameterSet P>
void fill_residual_summary(EstimationResult<P>& result, const Dataset& d,
                           const ThrusterModel& thr) {
  const P& p = result.best();
  for (const auto& m : d.maneuvers) {
    Dataset single;
    single.maneuvers.push_back(m);
    result.labels.push_back(m.label);
    result.lo_rms.push_back(rms(build_lo_residuals(p, single, thr)));
    result.go_rms.push_back(rms(build_go_residuals(p, single, thr)));
  }
}

}  // namespace detail

template <ShipParameterSet P>
EstimationResult<P> estimate_lo(const Dataset& dataset, const P& p0,
                                const EstimationConfig& cfg = {}) {
  validate_params(p0);
  const Dataset d = detail::apply_weights(dataset, cfg);
  d.validate();
  auto run = detail::run_method(Method::kLO, d, p0, cfg);
  run.attempt.start = "initial";
  EstimationResult<P> result;
  result.p_lo = run.params;
  result.reports.push_back(std::move(run.report));
  result.provenance.push_back(run.attempt);
  detail::fill_residual_summary(result, d, cfg.thruster);
  return result;
}

template <ShipParameterSet P>
EstimationResult<P> estimate_go(const Dataset& dataset, const P& p0,
                                const EstimationConfig& cfg = {}) {
  validate_params(p0);
  const Dataset d = detail::apply_weights(dataset, cfg);
  d.validate();
  auto run = detail::run_method(Method::kGO, d, p0, cfg);
  run.attempt.start = "initial";
  EstimationResult<P> result;
  result.p_go = run.params;
  result.degraded = !run.attempt.success;
  result.reports.push_back(std::move(run.report));
  result.provenance.push_back(run.attempt);
  detail::fill_residual_summary(result, d, cfg.thruster);
  return result;
}

/// Incremental LO+GO combination. Stage n fits GO on the first n maneuvers,
/// warm-started from the previous stage. When GO fails (not converged,
/// clamped rollout, or a constraint violated), LO is solved on the same
/// subset from the initial guess and GO is restarted from the LO estimate.
/// If GO still fails on the full dataset the LO estimate is returned and the
/// result marked degraded.
template <ShipParameterSet P>
EstimationResult<P> estimate_combined(const Dataset& dataset, const P& p0,
                                      const EstimationConfig& cfg = {}) {
  validate_params(p0);
  const Dataset full = detail::apply_weights(dataset, cfg);
  full.validate();
  const std::size_t n_max = full.maneuvers.size();

  EstimationResult<P> result;
  P current = p0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const Dataset subset = full.prefix(n);
    auto go = detail::run_method(Method::kGO, subset, current, cfg);
    go.attempt.start = n == 1 ? "initial" : "previous";
    result.provenance.push_back(go.attempt);
    result.reports.push_back(go.report);
    if (go.attempt.success) {
      current = go.params;
      if (n == n_max) result.p_go = current;
      continue;
    }

    auto lo = detail::run_method(Method::kLO, subset, p0, cfg);
    lo.attempt.start = "initial";
    result.provenance.push_back(lo.attempt);
    result.reports.push_back(lo.report);
    result.p_lo = lo.params;

    auto retry = detail::run_method(Method::kGO, subset, lo.params, cfg);
    retry.attempt.start = "lo";
    result.provenance.push_back(retry.attempt);
    result.reports.push_back(retry.report);
    if (retry.attempt.success) {
      current = retry.params;
    } else {
      // Carry forward whichever candidate rolls out best on this subset.
      const auto go_cost = [&](const P& p) {
        return build_go_residuals(p, subset, cfg.thruster).squaredNorm();
      };
      double best_cost = go_cost(retry.params);
      P best = retry.params;
      for (const P* candidate : {&go.params, &lo.params}) {
        const double c = go_cost(*candidate);
        if (c < best_cost) {
          best_cost = c;
          best = *candidate;
        }
      }
      current = best;
    }
    if (n == n_max) {
      if (retry.attempt.success) {
        result.p_go = current;
      } else {
        result.degraded = true;
      }
    }
  }
  detail::fill_residual_summary(result, full, cfg.thruster);
  return result;
}

template <ShipParameterSet P>
EstimationResult<P> estimate(const Dataset& dataset, const P& p0, const EstimationConfig& cfg) {
  switch (cfg.mode) {
    case EstimationMode::kLO: return estimate_lo(dataset, p0, cfg);
    case EstimationMode::kGO: return estimate_go(dataset, p0, cfg);
    case EstimationMode::kCombined: return estimate_combined(dataset, p0, cfg);
  }
  throw Error(ErrorKind::kValidation, "unknown estimation mode");
}

/// Fits the 6-parameter baseline with the same machinery: LO on the whole
/// dataset, then GO warm-started from the LO estimate.
inline EstimationResult<ShipParams6> estimate_6param(const Dataset& dataset,
                                                     const EstimationConfig& cfg = {},
                                                     const ShipParams6& p0 =
                                                         init_params6_empirical(HullSpecs{})) {
  auto lo = estimate_lo(dataset, p0, cfg);
  auto go = estimate_go(dataset, *lo.p_lo, cfg);
  go.p_lo = lo.p_lo;
  go.provenance.insert(go.provenance.begin(), lo.provenance.begin(), lo.provenance.end());
  go.reports.insert(go.reports.begin(), lo.reports.begin(), lo.reports.end());
  go.provenance.back().start = "lo";
  return go;
}

}  // namespace shipid
