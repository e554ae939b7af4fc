#include <gtest/gtest.h>

#include <cmath>
#include <span>

#include "test_support.hpp"

using namespace shipid;

namespace {

NoiseSpec a2_noise(std::uint64_t seed) {
  return NoiseSpec{{0.02, 0.02, 0.01}, {0.01, 0.01, 0.005}, seed};
}

}  // namespace

TEST(Synthgen, StraightLineStaysOnCourse) {
  ThrusterModel thr;
  thr.azimuth2 = thr.azimuth1;
  ManeuverPlan plan;
  plan.kind = ManeuverKind::kStraightLine;
  const auto log = generate_maneuver(plan, reference_tug_params(), thr, ShipState{}, NoiseSpec{});
  for (const auto& p : log.pose) {
    EXPECT_EQ(p.y, 0.0);
    EXPECT_EQ(p.psi, 0.0);
  }
  EXPECT_GT(log.pose.back().x, 10.0);
}

TEST(Synthgen, ZigzagFlipsWhenDeviationFirstExceeded) {
  ManeuverPlan plan;
  plan.kind = ManeuverKind::kZigzag;
  plan.duration = 120;
  const ThrusterModel thr;
  const auto log = generate_maneuver(plan, reference_tug_params(), thr, ShipState{}, NoiseSpec{});
  double current = plan.zigzag_initial_angle;
  int flips = 0;
  for (std::size_t k = 0; k < log.size(); ++k) {
    const double turned = yaw_turn_sign(current, thr.geometry) * log.pose[k].psi;
    if (turned > plan.zigzag_deviation) {
      current = -current;
      ++flips;
    }
    ASSERT_EQ(log.cmd[k].alpha1_d, current) << "sample " << k;
  }
  EXPECT_GE(flips, 2);
}

TEST(Synthgen, ZigzagMirrorSymmetry) {
  ThrusterModel thr;
  thr.azimuth2 = thr.azimuth1;
  ManeuverPlan plan;
  plan.kind = ManeuverKind::kZigzag;
  const auto p = reference_tug_params();
  const auto a = generate_maneuver(plan, p, thr, ShipState{}, NoiseSpec{});
  plan.zigzag_initial_angle = -plan.zigzag_initial_angle;
  const auto b = generate_maneuver(plan, p, thr, ShipState{}, NoiseSpec{});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    ASSERT_NEAR(a.pose[k].psi, -b.pose[k].psi, 1e-12) << k;
    ASSERT_NEAR(a.pose[k].y, -b.pose[k].y, 1e-12) << k;
    ASSERT_NEAR(a.pose[k].x, b.pose[k].x, 1e-12) << k;
  }
}

TEST(Synthgen, SameSeedIsBitwiseIdentical) {
  const auto p = reference_tug_params();
  const auto a = standard_12_maneuvers(p, ThrusterModel{}, a2_noise(42));
  const auto b = standard_12_maneuvers(p, ThrusterModel{}, a2_noise(42));
  const auto c = standard_12_maneuvers(p, ThrusterModel{}, a2_noise(43));
  for (std::size_t i = 0; i < a.maneuvers.size(); ++i) {
    EXPECT_EQ(a.maneuvers[i].pose, b.maneuvers[i].pose);
    EXPECT_EQ(a.maneuvers[i].vel, b.maneuvers[i].vel);
  }
  EXPECT_NE(a.maneuvers[0].pose, c.maneuvers[0].pose);
  // Distinct maneuvers draw distinct noise.
  EXPECT_NE(a.maneuvers[0].pose[5].y, a.maneuvers[1].pose[5].y);
}

TEST(Synthgen, StandardScheduleShape) {
  const auto d = standard_12_maneuvers(reference_tug_params(), ThrusterModel{}, NoiseSpec{});
  ASSERT_EQ(d.maneuvers.size(), 12u);
  EXPECT_EQ(d.total_samples(), 4392u);
  EXPECT_EQ(d.maneuvers[0].label, "straight_3rps");
  EXPECT_EQ(d.maneuvers[4].label, "zigzag_+20+20_3rps");
  EXPECT_EQ(d.maneuvers[11].label, "circle_30deg_7rps");
  EXPECT_NO_THROW(d.validate());
  EXPECT_EQ(validation_28_plans().size(), 28u);
}

TEST(Synthgen, SampleCountIsConfigurable) {
  StandardScheduleOptions o;
  o.duration = 36.4;
  const auto d = standard_12_maneuvers(reference_tug_params(), ThrusterModel{}, NoiseSpec{}, o);
  EXPECT_EQ(d.total_samples(), 12u * 183u);
}

TEST(Synthgen, NoiselessReplayReproducesStates) {
  const auto p = reference_tug_params();
  const ThrusterModel thr;
  const auto d = standard_12_maneuvers(p, thr, NoiseSpec{});
  for (const auto& log : d.maneuvers) {
    const auto states = log.states();
    const auto replay = simulate(p, thr, states.front(), std::span(log.cmd).first(log.size() - 1), log.dt);
    for (std::size_t k = 0; k < states.size(); ++k) {
      ASSERT_LT((replay[k].vec() - states[k].vec()).cwiseAbs().maxCoeff(), 1e-12) << log.label;
    }
  }
}

TEST(Synthgen, NoiselessPosesGiveSecondOrderVelocities) {
  const auto p = reference_tug_params();
  auto worst_error = [&](double dt) {
    ManeuverPlan plan;
    plan.kind = ManeuverKind::kZigzag;
    plan.dt = dt;
    plan.duration = 40;
    const auto log = generate_maneuver(plan, p, ThrusterModel{}, ShipState{}, NoiseSpec{});
    const auto derived = derive_body_velocities(log.pose, dt);
    double worst = 0;
    // Skip the ends and the command switches, where the motion is not smooth.
    for (std::size_t k = 2; k + 2 < log.size(); ++k) {
      if (log.cmd[k + 1] != log.cmd[k] || log.cmd[k] != log.cmd[k - 1]) continue;
      worst = std::max(worst, (derived[k].vec() - (*log.vel)[k].vec()).cwiseAbs().maxCoeff());
    }
    return worst;
  };
  const double e1 = worst_error(0.1);
  EXPECT_LT(e1, 1e-3);
  EXPECT_GT(e1 / worst_error(0.05), 3.0);
}

TEST(Synthgen, InvalidPlansAndNoise) {
  ManeuverPlan plan;
  plan.kind = ManeuverKind::kZigzag;
  plan.zigzag_deviation = 0;
  EXPECT_THROW(generate_maneuver(plan, reference_tug_params(), ThrusterModel{}, ShipState{}, NoiseSpec{}),
               Error);
  NoiseSpec noise;
  noise.vel_sigma[1] = -1;
  EXPECT_THROW(generate_maneuver(ManeuverPlan{}, reference_tug_params(), ThrusterModel{}, ShipState{}, noise),
               Error);
  EXPECT_THROW(generate_dataset({}, reference_tug_params(), ThrusterModel{}, NoiseSpec{}), Error);
}

TEST(Synthgen, SixParameterTruthIsSupported) {
  // The published baseline has almost no yaw damping, so only the straight
  // runs stay bounded under its own dynamics.
  auto plans = standard_12_plans();
  plans.resize(4);
  const auto d = generate_dataset(plans, reference_tug_params6(), ThrusterModel{}, NoiseSpec{});
  ASSERT_EQ(d.maneuvers.size(), 4u);
  for (const auto& log : d.maneuvers) {
    for (const auto& w : *log.vel) EXPECT_TRUE(std::isfinite(w.u) && std::abs(w.v) < 1e-9);
  }
}
