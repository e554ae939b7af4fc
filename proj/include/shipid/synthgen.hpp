#pragma once

// Synthetic maneuver generation (straight line, zigzag, turning circle) from a
// ground-truth ship model, with optional Gaussian measurement noise.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "shipid/actuation.hpp"
#include "shipid/dataio.hpp"
#include "shipid/error.hpp"
#include "shipid/model.hpp"
#include "shipid/whole_ship.hpp"

namespace shipid {

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

enum class ManeuverKind { kStraightLine, kZigzag, kTurningCircle };

inline const char* to_string(ManeuverKind k) {
  switch (k) {
    case ManeuverKind::kStraightLine: return "straight_line";
    case ManeuverKind::kZigzag: return "zigzag";
    case ManeuverKind::kTurningCircle: return "turning_circle";
  }
  return "unknown";
}

/// Angles in radians. A +A+B zigzag is zigzag_deviation = A,
/// zigzag_initial_angle = +B.
struct ManeuverPlan {
  ManeuverKind kind = ManeuverKind::kStraightLine;
  double rps = 5.0;
  double zigzag_deviation = deg_to_rad(20.0);
  double zigzag_initial_angle = deg_to_rad(20.0);
  double circle_angle = deg_to_rad(10.0);
  double duration = 73.0;  // s
  double dt = kDefaultDt;  // s
  std::string label;

  void validate() const {
    if (!(rps >= 0.0) || !std::isfinite(rps)) {
      throw Error(ErrorKind::kValidation, "maneuver plan: rps must be >= 0");
    }
    if (!(dt > 0.0)) throw Error(ErrorKind::kValidation, "maneuver plan: dt must be > 0");
    if (!(duration >= 10.0 * dt)) {
      throw Error(ErrorKind::kValidation, "maneuver plan: duration must be >= 10 dt");
    }
    if (kind == ManeuverKind::kZigzag &&
        (!(zigzag_deviation > 0.0) || zigzag_initial_angle == 0.0 ||
         !std::isfinite(zigzag_initial_angle))) {
      throw Error(ErrorKind::kValidation,
                  "maneuver plan: zigzag needs a positive deviation and a non-zero angle");
    }
    if (kind == ManeuverKind::kTurningCircle && (circle_angle == 0.0 || !std::isfinite(circle_angle))) {
      throw Error(ErrorKind::kValidation, "maneuver plan: turning circle needs a non-zero angle");
    }
  }

  std::size_t steps() const { return static_cast<std::size_t>(std::llround(duration / dt)); }

  std::string default_label() const {
    char buf[96];
    switch (kind) {
      case ManeuverKind::kStraightLine:
        std::snprintf(buf, sizeof(buf), "straight_%grps", rps);
        break;
      case ManeuverKind::kZigzag:
        std::snprintf(buf, sizeof(buf), "zigzag_%+g%+g_%grps", rad_to_deg(zigzag_deviation),
                      rad_to_deg(zigzag_initial_angle), rps);
        break;
      case ManeuverKind::kTurningCircle:
        std::snprintf(buf, sizeof(buf), "circle_%gdeg_%grps", rad_to_deg(circle_angle), rps);
        break;
    }
    return buf;
  }
};

/// Standard deviations of white measurement noise on (x, y, psi) and (u, v, r).
struct NoiseSpec {
  std::array<double, 3> pose_sigma{0.0, 0.0, 0.0};
  std::array<double, 3> vel_sigma{0.0, 0.0, 0.0};
  std::uint64_t seed = 0;

  bool is_zero() const {
    for (double s : pose_sigma) if (s != 0.0) return false;
    for (double s : vel_sigma) if (s != 0.0) return false;
    return true;
  }

  void validate() const {
    for (double s : pose_sigma) {
      if (!(s >= 0.0)) throw Error(ErrorKind::kValidation, "noise deviations must be >= 0");
    }
    for (double s : vel_sigma) {
      if (!(s >= 0.0)) throw Error(ErrorKind::kValidation, "noise deviations must be >= 0");
    }
  }
};

/// SplitMix64 mixing step; used to derive per-maneuver seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Sign of the yaw moment produced when both pods sit at angle alpha with equal
/// thrust. Decides which heading excursion ends a zigzag leg.
inline double yaw_turn_sign(double alpha, const ThrusterGeometry& g) {
  const auto t = config_matrix(alpha, alpha, g);
  const double moment = t(2, 0) + t(2, 1);
  return moment > 0.0 ? 1.0 : (moment < 0.0 ? -1.0 : 0.0);
}

/// Simulates one maneuver. The command for sample k is decided from the true
/// state at sample k and held until sample k+1; a zigzag flips its azimuth
/// command once the heading has moved more than zigzag_deviation from the
/// initial heading in the direction the current command turns the ship.
template <ShipParameterSet P>
ManeuverLog generate_maneuver(const ManeuverPlan& plan, const P& true_params,
                              const ThrusterModel& thr, const ShipState& x0,
                              const NoiseSpec& noise) {
  plan.validate();
  noise.validate();
  const auto dyn = make_dynamics(true_params);
  const std::size_t steps = plan.steps();

  double alpha_d = 0.0;
  switch (plan.kind) {
    case ManeuverKind::kStraightLine: alpha_d = 0.0; break;
    case ManeuverKind::kZigzag: alpha_d = plan.zigzag_initial_angle; break;
    case ManeuverKind::kTurningCircle: alpha_d = plan.circle_angle; break;
  }
  const double deviation = plan.zigzag_deviation;

  ManeuverLog log;
  log.label = plan.label.empty() ? plan.default_label() : plan.label;
  log.dt = plan.dt;
  std::vector<ShipState> truth;
  truth.reserve(steps + 1);

  StateVector s = x0.vec();
  const double psi0 = x0.pose.psi;
  for (std::size_t k = 0; k <= steps; ++k) {
    if (plan.kind == ManeuverKind::kZigzag) {
      const double turned = yaw_turn_sign(alpha_d, thr.geometry) * (s[4] - psi0);
      if (turned > deviation) alpha_d = -alpha_d;
    }
    const InputCommand cmd{plan.rps, plan.rps, alpha_d, alpha_d};
    log.t.push_back(static_cast<double>(k) * plan.dt);
    log.cmd.push_back(cmd);
    truth.push_back(ShipState::from(s));
    if (k == steps) break;
    try {
      s = whole_ship_step(dyn, thr, s, cmd, plan.dt);
    } catch (const IntegrationBlowup&) {
      throw IntegrationBlowup(k, "maneuver '" + log.label + "' (" + to_string(plan.kind) + ", " +
                                     std::to_string(plan.rps) + " rps) blew up at step " +
                                     std::to_string(k));
    }
  }

  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const bool noisy = !noise.is_zero();
  std::vector<BodyVelocity> vel;
  vel.reserve(truth.size());
  for (const auto& st : truth) {
    log.alpha1.push_back(st.alpha1);
    log.alpha2.push_back(st.alpha2);
    Pose p = st.pose;
    BodyVelocity w = st.vel;
    if (noisy) {
      p.x += noise.pose_sigma[0] * gauss(rng);
      p.y += noise.pose_sigma[1] * gauss(rng);
      p.psi += noise.pose_sigma[2] * gauss(rng);
      w.u += noise.vel_sigma[0] * gauss(rng);
      w.v += noise.vel_sigma[1] * gauss(rng);
      w.r += noise.vel_sigma[2] * gauss(rng);
    }
    log.pose.push_back(p);
    vel.push_back(w);
  }
  log.vel = std::move(vel);
  return log;
}

/// Runs every plan; maneuver i uses seed mix_seed(noise.seed + i).
template <ShipParameterSet P>
Dataset generate_dataset(const std::vector<ManeuverPlan>& plans, const P& true_params,
                         const ThrusterModel& thr, const NoiseSpec& noise,
                         const ShipState& x0 = {}) {
  if (plans.empty()) throw Error(ErrorKind::kValidation, "scenario contains no maneuvers");
  Dataset d;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    NoiseSpec per = noise;
    per.seed = mix_seed(noise.seed + i);
    d.maneuvers.push_back(generate_maneuver(plans[i], true_params, thr, x0, per));
  }
  return d;
}

struct StandardScheduleOptions {
  std::array<double, 4> rps{3.0, 5.0, 7.0, 10.0};
  double zigzag_deviation = deg_to_rad(20.0);
  double zigzag_angle = deg_to_rad(20.0);
  // (azimuth angle rad, rps) for each turning circle
  std::vector<std::array<double, 2>> circles{{deg_to_rad(10.0), 5.0},
                                             {deg_to_rad(20.0), 5.0},
                                             {deg_to_rad(30.0), 5.0},
                                             {deg_to_rad(30.0), 7.0}};
  double duration = 73.0;
  double dt = kDefaultDt;
};

/// 4 straight lines, 4 +20+20 zigzags, 4 turning circles.
inline std::vector<ManeuverPlan> standard_12_plans(const StandardScheduleOptions& o = {}) {
  std::vector<ManeuverPlan> plans;
  for (double rps : o.rps) {
    ManeuverPlan p;
    p.kind = ManeuverKind::kStraightLine;
    p.rps = rps;
    p.duration = o.duration;
    p.dt = o.dt;
    plans.push_back(p);
  }
  for (double rps : o.rps) {
    ManeuverPlan p;
    p.kind = ManeuverKind::kZigzag;
    p.rps = rps;
    p.zigzag_deviation = o.zigzag_deviation;
    p.zigzag_initial_angle = o.zigzag_angle;
    p.duration = o.duration;
    p.dt = o.dt;
    plans.push_back(p);
  }
  for (const auto& [angle, rps] : o.circles) {
    ManeuverPlan p;
    p.kind = ManeuverKind::kTurningCircle;
    p.rps = rps;
    p.circle_angle = angle;
    p.duration = o.duration;
    p.dt = o.dt;
    plans.push_back(p);
  }
  return plans;
}

template <ShipParameterSet P>
Dataset standard_12_maneuvers(const P& true_params, const ThrusterModel& thr,
                              const NoiseSpec& noise, const StandardScheduleOptions& o = {}) {
  return generate_dataset(standard_12_plans(o), true_params, thr, noise);
}

/// Validation schedule: at each shaft speed, +A+A and +A-A zigzags for
/// A = 10, 20, 30 deg (24 runs), followed by the four turning circles.
inline std::vector<ManeuverPlan> validation_28_plans(const StandardScheduleOptions& o = {}) {
  std::vector<ManeuverPlan> plans;
  for (double rps : o.rps) {
    for (double sign : {1.0, -1.0}) {
      for (double a : {deg_to_rad(10.0), deg_to_rad(20.0), deg_to_rad(30.0)}) {
        ManeuverPlan p;
        p.kind = ManeuverKind::kZigzag;
        p.rps = rps;
        p.zigzag_deviation = a;
        p.zigzag_initial_angle = sign * a;
        p.duration = o.duration;
        p.dt = o.dt;
        plans.push_back(p);
      }
    }
  }
  const auto circles = standard_12_plans(o);
  plans.insert(plans.end(), circles.end() - static_cast<std::ptrdiff_t>(o.circles.size()),
               circles.end());
  return plans;
}

}  // namespace shipid
