#pragma once

// JSON forms of parameters, hull specs, solver and estimation settings,
// scenarios, the global tool configuration, and estimation results.

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "shipid/actuation.hpp"
#include "shipid/dataio.hpp"
#include "shipid/error.hpp"
#include "shipid/estimation.hpp"
#include "shipid/model.hpp"
#include "shipid/nls.hpp"
#include "shipid/synthgen.hpp"
#include "shipid/validation.hpp"

namespace shipid {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kEstimationResultSchema = "shipid.estimation_result/1";
inline constexpr std::string_view kPredictionReportSchema = "shipid.prediction_report/1";

namespace detail {

inline void check_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                       const std::string& context) {
  if (!j.is_object()) throw Error(ErrorKind::kValidation, context + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw Error(ErrorKind::kValidation, context + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read_opt(const Json& j, const char* key, T& out, const std::string& context) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::kValidation, context + ": key '" + key + "' has the wrong type");
  }
}

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, path.string() + ": " + e.what());
  }
}

inline void write_json_file(const Json& j, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << j.dump(2) << "\n";
  finish_write(out, path);
}

inline std::array<double, 3> vec3_array(const Vec3& v) { return {v[0], v[1], v[2]}; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Parameters

template <ShipParameterSet P>
Json params_to_json(const P& p) {
  Json j = Json::object();
  const auto values = to_array(p);
  for (std::size_t i = 0; i < P::kSize; ++i) j[std::string(P::kNames[i])] = values[i];
  return j;
}

/// Accepts an object with exactly the parameter keys, or an array in the
/// canonical order.
template <ShipParameterSet P>
P params_from_json(const Json& j) {
  std::array<double, P::kSize> values{};
  try {
    if (j.is_array()) {
      if (j.size() != P::kSize) {
        throw Error(ErrorKind::kValidation, "parameter array needs " + std::to_string(P::kSize) +
                                                " entries, got " + std::to_string(j.size()));
      }
      for (std::size_t i = 0; i < P::kSize; ++i) values[i] = j[i].get<double>();
    } else if (j.is_object()) {
      for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (auto name : P::kNames) known = known || key == name;
        if (!known) throw Error(ErrorKind::kValidation, "unknown parameter key '" + key + "'");
      }
      for (std::size_t i = 0; i < P::kSize; ++i) {
        const std::string key(P::kNames[i]);
        if (!j.contains(key)) throw Error(ErrorKind::kValidation, "missing parameter '" + key + "'");
        values[i] = j.at(key).get<double>();
      }
    } else {
      throw Error(ErrorKind::kValidation, "parameters must be a JSON object or array");
    }
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::kValidation, "parameter values must be numbers");
  }
  P p = from_span<P>(values);
  validate_params(p);
  return p;
}

template <ShipParameterSet P>
P load_params(const std::filesystem::path& path) {
  const Json j = detail::read_json_file(path);
  try {
    return params_from_json<P>(j);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

template <ShipParameterSet P>
void save_params(const P& p, const std::filesystem::path& path) {
  detail::write_json_file(params_to_json(p), path);
}

// ---------------------------------------------------------------------------
// Hull specs, thrusters, solver and estimation settings

inline Json specs_to_json(const HullSpecs& s) {
  return Json{{"m", s.m},     {"L", s.L},         {"B", s.B},    {"D", s.D},
              {"rho", s.rho}, {"dispv", s.dispv}, {"x_g", s.x_g}};
}

inline HullSpecs specs_from_json(const Json& j) {
  const std::string ctx = "hull specs";
  detail::check_keys(j, {"m", "L", "B", "D", "rho", "dispv", "x_g"}, ctx);
  HullSpecs s;
  detail::read_opt(j, "m", s.m, ctx);
  detail::read_opt(j, "L", s.L, ctx);
  detail::read_opt(j, "B", s.B, ctx);
  detail::read_opt(j, "D", s.D, ctx);
  detail::read_opt(j, "rho", s.rho, ctx);
  detail::read_opt(j, "dispv", s.dispv, ctx);
  detail::read_opt(j, "x_g", s.x_g, ctx);
  s.validate();
  return s;
}

inline Json thruster_to_json(const ThrusterModel& t) {
  return Json{{"thrust_coefficients", t.thrust.coefficients},
              {"thrust_divisor", t.thrust.divisor},
              {"geometry",
               {{"lx1", t.geometry.lx1},
                {"ly1", t.geometry.ly1},
                {"lx2", t.geometry.lx2},
                {"ly2", t.geometry.ly2}}},
              {"azimuth1", {{"K_alpha", t.azimuth1.K_alpha}, {"epsilon", t.azimuth1.epsilon}}},
              {"azimuth2", {{"K_alpha", t.azimuth2.K_alpha}, {"epsilon", t.azimuth2.epsilon}}}};
}

inline ThrusterModel thruster_from_json(const Json& j) {
  const std::string ctx = "thruster";
  detail::check_keys(j, {"thrust_coefficients", "thrust_divisor", "geometry", "azimuth1", "azimuth2"},
                     ctx);
  ThrusterModel t;
  detail::read_opt(j, "thrust_coefficients", t.thrust.coefficients, ctx);
  detail::read_opt(j, "thrust_divisor", t.thrust.divisor, ctx);
  if (t.thrust.coefficients.empty() || !(t.thrust.divisor != 0.0)) {
    throw Error(ErrorKind::kValidation, "thruster: polynomial needs coefficients and a non-zero divisor");
  }
  if (j.contains("geometry")) {
    const auto& g = j.at("geometry");
    detail::check_keys(g, {"lx1", "ly1", "lx2", "ly2"}, "thruster geometry");
    detail::read_opt(g, "lx1", t.geometry.lx1, ctx);
    detail::read_opt(g, "ly1", t.geometry.ly1, ctx);
    detail::read_opt(g, "lx2", t.geometry.lx2, ctx);
    detail::read_opt(g, "ly2", t.geometry.ly2, ctx);
  }
  for (auto [key, model] : {std::pair{"azimuth1", &t.azimuth1}, std::pair{"azimuth2", &t.azimuth2}}) {
    if (!j.contains(key)) continue;
    const auto& a = j.at(key);
    detail::check_keys(a, {"K_alpha", "epsilon"}, std::string("thruster ") + key);
    detail::read_opt(a, "K_alpha", model->K_alpha, ctx);
    detail::read_opt(a, "epsilon", model->epsilon, ctx);
    model->validate();
  }
  return t;
}

inline Json solve_options_to_json(const SolveOptions& o) {
  return Json{{"max_iterations", o.max_iterations},
              {"gradient_tolerance", o.gradient_tolerance},
              {"step_tolerance", o.step_tolerance},
              {"initial_damping", o.initial_damping},
              {"penalty_initial", o.penalty_initial},
              {"penalty_growth", o.penalty_growth},
              {"penalty_rounds", o.penalty_rounds},
              {"fd_step", o.fd_step},
              {"constraint_tolerance", o.constraint_tolerance},
              {"max_rejections", o.max_rejections},
              {"threads", o.threads}};
}

/// Keys not present keep the values already in `base`.
inline SolveOptions solve_options_from_json(const Json& j, SolveOptions o = {}) {
  const std::string ctx = "solver options";
  detail::check_keys(j,
                     {"max_iterations", "gradient_tolerance", "step_tolerance", "initial_damping",
                      "penalty_initial", "penalty_growth", "penalty_rounds", "fd_step",
                      "constraint_tolerance", "max_rejections", "threads"},
                     ctx);
  detail::read_opt(j, "max_iterations", o.max_iterations, ctx);
  detail::read_opt(j, "gradient_tolerance", o.gradient_tolerance, ctx);
  detail::read_opt(j, "step_tolerance", o.step_tolerance, ctx);
  detail::read_opt(j, "initial_damping", o.initial_damping, ctx);
  detail::read_opt(j, "penalty_initial", o.penalty_initial, ctx);
  detail::read_opt(j, "penalty_growth", o.penalty_growth, ctx);
  detail::read_opt(j, "penalty_rounds", o.penalty_rounds, ctx);
  detail::read_opt(j, "fd_step", o.fd_step, ctx);
  detail::read_opt(j, "constraint_tolerance", o.constraint_tolerance, ctx);
  detail::read_opt(j, "max_rejections", o.max_rejections, ctx);
  detail::read_opt(j, "threads", o.threads, ctx);
  if (o.max_iterations < 1 || o.max_rejections < 1 || o.penalty_rounds < 1 ||
      !(o.fd_step > 0.0) || !(o.initial_damping > 0.0) || !(o.penalty_growth >= 1.0) ||
      !(o.gradient_tolerance >= 0.0) || !(o.step_tolerance >= 0.0)) {
    throw Error(ErrorKind::kValidation, "solver options out of range");
  }
  return o;
}

inline EstimationMode mode_from_string(std::string_view s) {
  if (s == "lo") return EstimationMode::kLO;
  if (s == "go") return EstimationMode::kGO;
  if (s == "combined") return EstimationMode::kCombined;
  throw Error(ErrorKind::kValidation, "unknown estimation mode '" + std::string(s) + "'");
}

template <ShipParameterSet P>
Json estimation_config_to_json(const EstimationConfig& c) {
  Json j;
  j["lambda"] = c.lambda;
  j["default_bound"] = c.default_bound;
  const auto bound_json = [](const std::optional<Eigen::VectorXd>& b) -> Json {
    if (!b) return nullptr;
    return params_to_json(from_vector<P>(*b));
  };
  j["lower"] = bound_json(c.lower);
  j["upper"] = bound_json(c.upper);
  Json fixed = Json::array();
  for (std::size_t i = 0; i < c.free.size(); ++i) {
    if (!c.free[i]) fixed.push_back(std::string(P::kNames[i]));
  }
  j["fixed"] = fixed;
  Json weights = Json::array();
  for (const auto& w : c.weights) weights.push_back(detail::vec3_array(w));
  j["weights"] = weights;
  j["constraints_enabled"] = c.constraints_enabled;
  j["paper_literal_constraints"] = c.paper_literal_constraints;
  j["violation_tolerance"] = c.violation_tolerance;
  j["mode"] = to_string(c.mode);
  j["solver"] = solve_options_to_json(c.solver);
  j["thruster"] = thruster_to_json(c.thruster);
  return j;
}

/// Bounds are objects keyed by parameter name (missing names fall back to
/// +/-default_bound); "fixed" lists parameters held at their initial value.
template <ShipParameterSet P>
EstimationConfig estimation_config_from_json(const Json& j, EstimationConfig c = {}) {
  const std::string ctx = "estimation config";
  detail::check_keys(j,
                     {"lambda", "default_bound", "lower", "upper", "fixed", "weights",
                      "constraints_enabled", "paper_literal_constraints", "violation_tolerance",
                      "mode", "solver", "thruster"},
                     ctx);
  detail::read_opt(j, "lambda", c.lambda, ctx);
  detail::read_opt(j, "default_bound", c.default_bound, ctx);
  if (!(c.lambda >= 0.0)) throw Error(ErrorKind::kValidation, ctx + ": lambda must be >= 0");
  if (!(c.default_bound > 0.0)) throw Error(ErrorKind::kValidation, ctx + ": default_bound must be > 0");
  const auto read_bound = [&](const char* key, double fill) -> std::optional<Eigen::VectorXd> {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    const auto& b = j.at(key);
    if (!b.is_object()) throw Error(ErrorKind::kValidation, ctx + ": " + key + " must be an object");
    Eigen::VectorXd v = Eigen::VectorXd::Constant(P::kSize, fill);
    for (const auto& [name, value] : b.items()) {
      bool found = false;
      for (std::size_t i = 0; i < P::kSize; ++i) {
        if (P::kNames[i] == name) {
          if (!value.is_number()) throw Error(ErrorKind::kValidation, ctx + ": bound must be a number");
          v[static_cast<Eigen::Index>(i)] = value.template get<double>();
          found = true;
        }
      }
      if (!found) throw Error(ErrorKind::kValidation, ctx + ": unknown parameter '" + name + "' in " + key);
    }
    return v;
  };
  c.lower = read_bound("lower", -c.default_bound);
  c.upper = read_bound("upper", c.default_bound);
  if (c.lower && !c.upper) c.upper = Eigen::VectorXd::Constant(P::kSize, c.default_bound);
  if (c.upper && !c.lower) c.lower = Eigen::VectorXd::Constant(P::kSize, -c.default_bound);
  if (j.contains("fixed")) {
    std::vector<std::string> fixed;
    detail::read_opt(j, "fixed", fixed, ctx);
    c.free.clear();
    if (!fixed.empty()) {
      c.free.assign(P::kSize, true);
      for (const auto& name : fixed) {
        bool found = false;
        for (std::size_t i = 0; i < P::kSize; ++i) {
          if (P::kNames[i] == name) c.free[i] = false, found = true;
        }
        if (!found) throw Error(ErrorKind::kValidation, ctx + ": unknown fixed parameter '" + name + "'");
      }
    }
  }
  if (j.contains("weights")) {
    std::vector<std::array<double, 3>> w;
    detail::read_opt(j, "weights", w, ctx);
    c.weights.clear();
    for (const auto& a : w) {
      if (a[0] < 0.0 || a[1] < 0.0 || a[2] < 0.0) {
        throw Error(ErrorKind::kValidation, ctx + ": weights must be >= 0");
      }
      c.weights.emplace_back(a[0], a[1], a[2]);
    }
  }
  detail::read_opt(j, "constraints_enabled", c.constraints_enabled, ctx);
  detail::read_opt(j, "paper_literal_constraints", c.paper_literal_constraints, ctx);
  detail::read_opt(j, "violation_tolerance", c.violation_tolerance, ctx);
  if (j.contains("mode")) {
    std::string mode;
    detail::read_opt(j, "mode", mode, ctx);
    c.mode = mode_from_string(mode);
  }
  if (j.contains("solver")) c.solver = solve_options_from_json(j.at("solver"), c.solver);
  if (j.contains("thruster")) c.thruster = thruster_from_json(j.at("thruster"));
  return c;
}

// ---------------------------------------------------------------------------
// Scenarios

inline ManeuverKind maneuver_kind_from_string(std::string_view s) {
  if (s == "straight_line") return ManeuverKind::kStraightLine;
  if (s == "zigzag") return ManeuverKind::kZigzag;
  if (s == "turning_circle") return ManeuverKind::kTurningCircle;
  throw Error(ErrorKind::kValidation, "unknown maneuver kind '" + std::string(s) + "'");
}

inline Json plan_to_json(const ManeuverPlan& p) {
  return Json{{"kind", to_string(p.kind)},
              {"rps", p.rps},
              {"zigzag_deviation", p.zigzag_deviation},
              {"zigzag_initial_angle", p.zigzag_initial_angle},
              {"circle_angle", p.circle_angle},
              {"duration", p.duration},
              {"dt", p.dt},
              {"label", p.label}};
}

inline ManeuverPlan plan_from_json(const Json& j, double default_dt = kDefaultDt) {
  const std::string ctx = "maneuver plan";
  detail::check_keys(j,
                     {"kind", "rps", "zigzag_deviation", "zigzag_initial_angle", "circle_angle",
                      "duration", "dt", "label"},
                     ctx);
  ManeuverPlan p;
  p.dt = default_dt;
  if (!j.contains("kind")) throw Error(ErrorKind::kValidation, ctx + ": missing 'kind'");
  std::string kind;
  detail::read_opt(j, "kind", kind, ctx);
  p.kind = maneuver_kind_from_string(kind);
  detail::read_opt(j, "rps", p.rps, ctx);
  detail::read_opt(j, "zigzag_deviation", p.zigzag_deviation, ctx);
  detail::read_opt(j, "zigzag_initial_angle", p.zigzag_initial_angle, ctx);
  detail::read_opt(j, "circle_angle", p.circle_angle, ctx);
  detail::read_opt(j, "duration", p.duration, ctx);
  detail::read_opt(j, "dt", p.dt, ctx);
  detail::read_opt(j, "label", p.label, ctx);
  p.validate();
  return p;
}

inline Json noise_to_json(const NoiseSpec& n) {
  return Json{{"pose_sigma", n.pose_sigma}, {"vel_sigma", n.vel_sigma}, {"seed", n.seed}};
}

inline NoiseSpec noise_from_json(const Json& j) {
  const std::string ctx = "noise";
  detail::check_keys(j, {"pose_sigma", "vel_sigma", "seed"}, ctx);
  NoiseSpec n;
  detail::read_opt(j, "pose_sigma", n.pose_sigma, ctx);
  detail::read_opt(j, "vel_sigma", n.vel_sigma, ctx);
  detail::read_opt(j, "seed", n.seed, ctx);
  n.validate();
  return n;
}

/// Maneuver plans plus measurement noise. Angles in radians.
struct Scenario {
  std::vector<ManeuverPlan> plans = standard_12_plans();
  NoiseSpec noise;
};

inline Json scenario_to_json(const Scenario& s) {
  Json plans = Json::array();
  for (const auto& p : s.plans) plans.push_back(plan_to_json(p));
  return Json{{"maneuvers", plans}, {"noise", noise_to_json(s.noise)}};
}

/// "maneuvers" may be a list of plans or the string "standard12".
inline Scenario scenario_from_json(const Json& j, double default_dt = kDefaultDt) {
  detail::check_keys(j, {"maneuvers", "noise"}, "scenario");
  Scenario s;
  if (j.contains("maneuvers")) {
    const auto& m = j.at("maneuvers");
    if (m.is_string()) {
      if (m.get<std::string>() != "standard12") {
        throw Error(ErrorKind::kValidation, "scenario: unknown maneuver schedule '" +
                                                m.get<std::string>() + "'");
      }
      StandardScheduleOptions o;
      o.dt = default_dt;
      s.plans = standard_12_plans(o);
    } else if (m.is_array()) {
      s.plans.clear();
      for (const auto& p : m) s.plans.push_back(plan_from_json(p, default_dt));
    } else {
      throw Error(ErrorKind::kValidation, "scenario: 'maneuvers' must be a list or \"standard12\"");
    }
  }
  if (s.plans.empty()) throw Error(ErrorKind::kValidation, "scenario contains no maneuvers");
  if (j.contains("noise")) s.noise = noise_from_json(j.at("noise"));
  return s;
}

// ---------------------------------------------------------------------------
// Global tool configuration

struct GlobalConfig {
  std::optional<std::uint64_t> seed;  // overrides scenario.noise.seed
  double dt = kDefaultDt;
  Scenario scenario;
  HullSpecs specs;
  EstimationConfig estimation;
  std::vector<std::size_t> horizons = default_horizons();
};

inline GlobalConfig global_config_from_json(const Json& j) {
  detail::check_keys(j, {"seed", "dt", "scenario", "specs", "estimation", "solver", "horizons"},
                     "config");
  GlobalConfig g;
  if (j.contains("seed")) {
    std::uint64_t seed = 0;
    detail::read_opt(j, "seed", seed, "config");
    g.seed = seed;
  }
  detail::read_opt(j, "dt", g.dt, "config");
  if (!(g.dt > 0.0)) throw Error(ErrorKind::kValidation, "config: dt must be > 0");
  StandardScheduleOptions o;
  o.dt = g.dt;
  g.scenario.plans = standard_12_plans(o);
  if (j.contains("scenario")) g.scenario = scenario_from_json(j.at("scenario"), g.dt);
  if (j.contains("specs")) g.specs = specs_from_json(j.at("specs"));
  if (j.contains("estimation")) {
    g.estimation = estimation_config_from_json<ShipParams22>(j.at("estimation"));
  }
  if (j.contains("solver")) g.estimation.solver = solve_options_from_json(j.at("solver"), g.estimation.solver);
  if (j.contains("horizons")) {
    detail::read_opt(j, "horizons", g.horizons, "config");
    if (g.horizons.empty()) throw Error(ErrorKind::kValidation, "config: horizon list is empty");
  }
  return g;
}

inline GlobalConfig load_global_config(const std::filesystem::path& path) {
  const Json j = detail::read_json_file(path);
  try {
    return global_config_from_json(j);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Reports

inline Json solve_report_to_json(const SolveReport& r, bool include_trace) {
  Json j;
  j["status"] = to_string(r.status);
  j["converged"] = r.converged();
  j["cost"] = r.cost;
  j["data_cost"] = r.data_cost;
  j["iterations"] = r.iterations;
  j["rounds"] = r.rounds;
  j["max_violation"] = r.max_violation;
  j["constraint_margins"] = r.constraint_margins;
  j["warnings"] = r.warnings;
  if (include_trace) {
    Json trace = Json::array();
    for (const auto& t : r.trace) {
      trace.push_back(Json{{"iteration", t.iteration},
                           {"round", t.round},
                           {"cost", t.cost},
                           {"damping", t.damping}});
    }
    j["trace"] = trace;
  }
  return j;
}

inline Json attempt_to_json(const Attempt& a) {
  return Json{{"stage", a.stage},
              {"method", to_string(a.method)},
              {"start", a.start},
              {"status", to_string(a.status)},
              {"cost", a.cost},
              {"iterations", a.iterations},
              {"max_violation", a.max_violation},
              {"clamped", a.clamped},
              {"success", a.success}};
}

struct ResultContext {
  std::string mode;                 // lo, go, combined, six
  std::optional<Json> initial;      // initial parameters
  std::optional<Json> init_source;  // e.g. {"method": "empirical", "specs": {...}, ...}
  std::optional<EstimationConfig> config;
  bool include_trace = false;
};

/// Canonical result document; keys appear in a fixed order.
template <ShipParameterSet P>
Json estimation_result_to_json(const EstimationResult<P>& r, const ResultContext& ctx = {}) {
  Json j;
  j["schema"] = kEstimationResultSchema;
  j["model"] = P::kSize == ShipParams22::kSize ? "22-parameter" : "6-parameter";
  j["mode"] = ctx.mode;
  j["degraded"] = r.degraded;
  j["parameters"] = params_to_json(r.best());
  j["p_lo"] = r.p_lo ? params_to_json(*r.p_lo) : Json(nullptr);
  j["p_go"] = r.p_go ? params_to_json(*r.p_go) : Json(nullptr);
  j["initial"] = ctx.initial ? *ctx.initial : Json(nullptr);
  j["initialization"] = ctx.init_source ? *ctx.init_source : Json(nullptr);
  j["config"] = ctx.config ? estimation_config_to_json<P>(*ctx.config) : Json(nullptr);
  Json maneuvers = Json::array();
  for (std::size_t i = 0; i < r.labels.size(); ++i) {
    maneuvers.push_back(Json{{"label", r.labels[i]},
                             {"lo_rms", r.lo_rms[i]},
                             {"go_rms", r.go_rms[i]}});
  }
  j["maneuvers"] = maneuvers;
  Json provenance = Json::array();
  for (const auto& a : r.provenance) provenance.push_back(attempt_to_json(a));
  j["provenance"] = provenance;
  Json reports = Json::array();
  for (const auto& rep : r.reports) reports.push_back(solve_report_to_json(rep, ctx.include_trace));
  j["solver_reports"] = reports;
  return j;
}

template <ShipParameterSet P>
void export_report_json(const EstimationResult<P>& r, const std::filesystem::path& path,
                        const ResultContext& ctx = {}) {
  detail::write_json_file(estimation_result_to_json(r, ctx), path);
}

inline Json prediction_report_to_json(const PredictionReport& r) {
  Json rmse;
  for (std::size_t c = 0; c < kChannelCount; ++c) rmse[kChannelNames[c]] = r.rmse[c];
  return Json{{"schema", kPredictionReportSchema},
              {"maneuver", r.label},
              {"horizon", r.horizon},
              {"samples", r.predicted.size()},
              {"rmse", rmse}};
}

inline void export_report_json(const PredictionReport& r, const std::filesystem::path& path) {
  detail::write_json_file(prediction_report_to_json(r), path);
}

}  // namespace shipid
