#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "test_support.hpp"

using namespace shipid;
using shipid::testing::kPropertyCases;
using shipid::testing::TempDir;
using shipid::testing::uniform;

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

/// Values spanning many magnitudes, including subnormal-adjacent and
/// 17-digit cases.
double wild(std::mt19937_64& g) {
  const double mantissa = uniform(g, -1, 1);
  const int exponent = static_cast<int>(uniform(g, -300, 300));
  return std::ldexp(mantissa, exponent / 2);
}

ManeuverLog random_log(std::mt19937_64& g, bool with_vel) {
  ManeuverLog log;
  log.label = "case";
  log.dt = 0.2;
  const int n = 3 + static_cast<int>(uniform(g, 0, 6));
  double psi = uniform(g, -3, 3);
  for (int k = 0; k < n; ++k) {
    log.t.push_back(0.2 * k);
    log.cmd.push_back({wild(g), wild(g), wild(g), wild(g)});
    log.alpha1.push_back(wild(g));
    log.alpha2.push_back(wild(g));
    log.pose.push_back({wild(g), wild(g), psi});
    psi += uniform(g, -3, 3);  // steps below pi, so unwrapping is a no-op
  }
  if (with_vel) {
    std::vector<BodyVelocity> vel;
    for (int k = 0; k < n; ++k) vel.push_back({wild(g), wild(g), wild(g)});
    log.vel = vel;
  }
  return log;
}

}  // namespace

TEST(ManeuverCsv, MinimalFile) {
  TempDir dir("min");
  write_file(dir / "m.csv",
             "t,n1,n2,alpha1_cmd,alpha2_cmd,alpha1,alpha2,x,y,psi\n"
             "0,5,5,0,0,0,0,0,0,0\n0.2,5,5,0,0,0,0,0.1,0,0\n0.4,5,5,0,0,0,0,0.2,0,0\n");
  const auto log = load_maneuver_csv(dir / "m.csv");
  EXPECT_EQ(log.size(), 3u);
  EXPECT_NEAR(log.dt, 0.2, 1e-15);
  EXPECT_FALSE(log.has_velocities());
  EXPECT_EQ(log.label, "m");
}

TEST(ManeuverCsv, NonUniformTimestampNamesRow) {
  TempDir dir("nonuniform");
  write_file(dir / "m.csv",
             "t,n1,n2,alpha1_cmd,alpha2_cmd,alpha1,alpha2,x,y,psi\n"
             "0,5,5,0,0,0,0,0,0,0\n0.2,5,5,0,0,0,0,0,0,0\n0.5,5,5,0,0,0,0,0,0,0\n");
  try {
    load_maneuver_csv(dir / "m.csv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 3u);
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos);
  }
}

TEST(ManeuverCsv, BadNumberAndMissingColumn) {
  TempDir dir("bad");
  write_file(dir / "a.csv", "t,n1,n2,alpha1_cmd,alpha2_cmd,alpha1,alpha2,x,y,psi\n0,5,x,0,0,0,0,0,0,0\n");
  try {
    load_maneuver_csv(dir / "a.csv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 1u);
  }
  write_file(dir / "b.csv", "t,n1,n2\n0,1,2\n0.2,1,2\n");
  EXPECT_THROW(load_maneuver_csv(dir / "b.csv"), ParseError);
  write_file(dir / "c.csv", "t,n1,n2,alpha1_cmd,alpha2_cmd,alpha1,alpha2,x,y,psi,u\n");
  EXPECT_THROW(load_maneuver_csv(dir / "c.csv"), ParseError);
  try {
    load_maneuver_csv(dir / "missing.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

TEST(ManeuverCsv, RoundTripIsLosslessProperty) {
  TempDir dir("roundtrip");
  auto g = shipid::testing::rng(40);
  for (int i = 0; i < kPropertyCases; ++i) {
    const auto log = random_log(g, i % 2 == 0);
    const auto path = dir / "m.csv";
    save_maneuver_csv(log, path);
    const auto back = load_maneuver_csv(path, "case");
    ASSERT_EQ(back.t, log.t) << i;
    ASSERT_EQ(back.cmd, log.cmd) << i;
    ASSERT_EQ(back.alpha1, log.alpha1) << i;
    ASSERT_EQ(back.alpha2, log.alpha2) << i;
    ASSERT_EQ(back.pose, log.pose) << i;
    ASSERT_EQ(back.vel, log.vel) << i;
  }
}

TEST(ManeuverCsv, HeadingIsUnwrappedOnLoad) {
  TempDir dir("wrap");
  write_file(dir / "m.csv",
             "t,n1,n2,alpha1_cmd,alpha2_cmd,alpha1,alpha2,x,y,psi\n"
             "0,0,0,0,0,0,0,0,0,3.1\n0.2,0,0,0,0,0,0,0,0,-3.1\n0.4,0,0,0,0,0,0,0,0,-2.9\n");
  const auto log = load_maneuver_csv(dir / "m.csv");
  EXPECT_NEAR(log.pose[1].psi, -3.1 + 2 * std::numbers::pi, 1e-12);
  EXPECT_NEAR(log.pose[2].psi, -2.9 + 2 * std::numbers::pi, 1e-12);
}

TEST(FiniteDifference, LinearRamp) {
  std::vector<Vec3> s;
  for (int k = 0; k < 10; ++k) s.push_back(Vec3::Constant(2.0 * 0.1 * k));
  for (const auto& d : finite_difference(s, 0.1)) EXPECT_TRUE(d.isApprox(Vec3::Constant(2), 1e-12));
}

TEST(FiniteDifference, QuadraticIsExact) {
  std::vector<Vec3> s;
  for (int k = 0; k < 10; ++k) s.push_back(Vec3::Constant(0.01 * k * k));
  const auto d = finite_difference(s, 0.1);
  for (int k = 0; k < 10; ++k) EXPECT_NEAR(d[k][0], 0.2 * k, 1e-12) << k;
}

TEST(FiniteDifference, ConstantIsZeroAndShortSeriesFails) {
  std::vector<Vec3> s(5, Vec3(1, 2, 3));
  for (const auto& d : finite_difference(s, 0.2)) EXPECT_TRUE(d.isZero(0.0));
  std::vector<Vec3> two(2, Vec3::Zero());
  EXPECT_THROW(finite_difference(two, 0.2), Error);
}

TEST(BodyVelocities, ZeroHeadingEqualsEarthVelocity) {
  std::vector<Pose> poses;
  for (int k = 0; k < 5; ++k) poses.push_back({0.3 * 0.2 * k, -0.1 * 0.2 * k, 0});
  for (const auto& w : derive_body_velocities(poses, 0.2)) {
    EXPECT_NEAR(w.u, 0.3, 1e-12);
    EXPECT_NEAR(w.v, -0.1, 1e-12);
    EXPECT_NEAR(w.r, 0.0, 1e-15);
  }
}

TEST(BodyVelocities, NorthboundShipHeadingEast) {
  std::vector<Pose> poses;
  for (int k = 0; k < 5; ++k) poses.push_back({0.2 * k, 0, std::numbers::pi / 2});
  for (const auto& w : derive_body_velocities(poses, 0.2)) {
    EXPECT_NEAR(w.u, 0.0, 1e-12);
    EXPECT_NEAR(w.v, -1.0, 1e-12);
  }
}

TEST(BodyVelocities, StationaryShip) {
  std::vector<Pose> poses(6, Pose{5, -2, 0.4});
  for (const auto& w : derive_body_velocities(poses, 0.2)) {
    EXPECT_NEAR(w.u, 0.0, 1e-12);
    EXPECT_NEAR(w.v, 0.0, 1e-12);
    EXPECT_NEAR(w.r, 0.0, 1e-12);
  }
}

TEST(BodyVelocities, SecondOrderAccurate) {
  const auto p = reference_tug_params();
  const ThrusterModel thr;
  auto max_error = [&](double dt) {
    const auto steps = static_cast<std::size_t>(std::llround(20.0 / dt));
    std::vector<InputCommand> cmds(steps, InputCommand{5, 5, 0.3, 0.3});
    const auto traj = simulate(p, thr, ShipState{0, 0, {}, {0.5, 0, 0}}, cmds, dt);
    std::vector<Pose> poses;
    for (const auto& s : traj) poses.push_back(s.pose);
    const auto derived = derive_body_velocities(poses, dt);
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
      worst = std::max(worst, (derived[k].vec() - traj[k].vel.vec()).cwiseAbs().maxCoeff());
    }
    return worst;
  };
  const double ratio = max_error(0.1) / max_error(0.05);
  EXPECT_GT(ratio, 3.5);
  EXPECT_LT(ratio, 4.5);
}

TEST(TrajectoryCsv, RoundTripAndEmptyRejected) {
  TempDir dir("traj");
  auto g = shipid::testing::rng(41);
  std::vector<ShipState> states;
  for (int k = 0; k < 20; ++k) {
    states.push_back({uniform(g, -1, 1), uniform(g, -1, 1), {wild(g), wild(g), wild(g)},
                      {wild(g), wild(g), wild(g)}});
  }
  export_trajectory_csv(states, 1.0, 0.2, dir / "t.csv");
  const auto back = load_trajectory_csv(dir / "t.csv");
  EXPECT_EQ(back.states, states);
  EXPECT_DOUBLE_EQ(back.t.front(), 1.0);
  EXPECT_THROW(export_trajectory_csv({}, 0.0, 0.2, dir / "e.csv"), Error);
  EXPECT_FALSE(std::filesystem::exists(dir / "e.csv"));
}

TEST(Dataset, ManifestRoundTrip) {
  TempDir dir("dataset");
  auto g = shipid::testing::rng(42);
  Dataset d;
  for (int i = 0; i < 3; ++i) {
    auto log = random_log(g, true);
    log.label = "run" + std::to_string(i);
    log.weight = Vec3(1, 2, 0.5 + i);
    d.maneuvers.push_back(log);
  }
  const auto manifest = save_dataset(d, dir.path());
  const auto back = load_dataset(manifest);
  ASSERT_EQ(back.maneuvers.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(back.maneuvers[i].label, d.maneuvers[i].label);
    EXPECT_EQ(back.maneuvers[i].weight, d.maneuvers[i].weight);
    EXPECT_EQ(back.maneuvers[i].pose, d.maneuvers[i].pose);
  }
}

TEST(Dataset, MalformedManifests) {
  TempDir dir("manifest");
  auto expect_kind = [&](const std::string& text, ErrorKind kind) {
    write_file(dir / "manifest.json", text);
    try {
      load_dataset(dir / "manifest.json");
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), kind) << text;
    }
  };
  expect_kind("{", ErrorKind::kParse);
  expect_kind("{\"dt\": 0.2}", ErrorKind::kParse);
  expect_kind("{\"maneuvers\": [{\"label\": \"x\"}]}", ErrorKind::kParse);
  expect_kind("{\"maneuvers\": []}", ErrorKind::kValidation);
}
