#include <gtest/gtest.h>

#include <cmath>
#include <algorithm>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "test_support.hpp"

using namespace shipid;
using shipid::testing::kPropertyCases;
using shipid::testing::TempDir;
using shipid::testing::uniform;

namespace {

Dataset small_dataset(double duration = 30.0) {
  StandardScheduleOptions o;
  o.duration = duration;
  return standard_12_maneuvers(reference_tug_params(), ThrusterModel{}, NoiseSpec{}, o);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Rmse, IdenticalSeries) {
  const std::vector<double> a{1, 2, 3};
  EXPECT_EQ(rmse(a, a), 0.0);
}

TEST(Rmse, ConstantOffset) {
  const std::vector<double> a{1, 2, 3}, b{1.5, 2.5, 3.5};
  EXPECT_NEAR(rmse(a, b), 0.5, 1e-15);
}

TEST(Rmse, HandArithmetic) {
  const std::vector<double> a{0, 0}, b{3, 4};
  EXPECT_NEAR(rmse(a, b), std::sqrt(12.5), 1e-15);
  EXPECT_NEAR(rmse(a, b), 3.5355, 1e-4);
}

TEST(Rmse, RejectsMismatchedOrEmpty) {
  const std::vector<double> a{1}, b{1, 2}, e;
  EXPECT_THROW(rmse(a, b), Error);
  EXPECT_THROW(rmse(e, e), Error);
}

TEST(Rmse, PermutationInvariantProperty) {
  auto g = shipid::testing::rng(60);
  for (int i = 0; i < kPropertyCases; ++i) {
    const int n = 2 + static_cast<int>(uniform(g, 0, 30));
    std::vector<double> a, b;
    for (int k = 0; k < n; ++k) {
      a.push_back(uniform(g, -10, 10));
      b.push_back(uniform(g, -10, 10));
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), g);
    std::vector<double> pa, pb;
    for (std::size_t k : order) {
      pa.push_back(a[k]);
      pb.push_back(b[k]);
    }
    ASSERT_NEAR(rmse(a, b), rmse(pa, pb), 1e-12);
  }
}

TEST(Rmse, HeadingIsComparedUnwrapped) {
  std::vector<ShipState> a(3), b(3);
  a[0].pose.psi = 3.1;
  a[1].pose.psi = 3.2;
  a[2].pose.psi = 3.3;
  b = a;
  for (auto& s : b) s.pose.psi = std::remainder(s.pose.psi, 2 * std::numbers::pi);
  EXPECT_NEAR(rmse(a, b)[kPsi], 0.0, 1e-12);
}

TEST(Prediction, OneStepAtTruthIsExact) {
  const auto d = small_dataset();
  for (const auto& log : d.maneuvers) {
    const auto r = predict_n_steps(reference_tug_params(), ThrusterModel{}, log, 1);
    for (double v : r.rmse) EXPECT_LT(v, 1e-9) << log.label;
  }
}

TEST(Prediction, AllHorizonsZeroAtTruth) {
  const auto d = small_dataset(15.0);
  const auto suite = validation_suite(reference_tug_params(), ThrusterModel{}, d);
  for (const auto& r : suite.reports) {
    for (double v : r.rmse) EXPECT_LT(v, 1e-8) << r.label << " n=" << r.horizon;
  }
}

TEST(Prediction, FullHorizonIsSingleRollout) {
  const auto d = small_dataset();
  const auto& log = d.maneuvers[5];
  auto p = reference_tug_params();
  p.N_r *= 1.2;
  const auto r = predict_n_steps(p, ThrusterModel{}, log, log.size() - 1);
  const auto rollout = simulate(p, ThrusterModel{}, log.state_at(0),
                                std::span(log.cmd).first(log.size() - 1), log.dt);
  ASSERT_EQ(r.predicted.size(), log.size() - 1);
  for (std::size_t k = 0; k < r.predicted.size(); ++k) EXPECT_EQ(r.predicted[k], rollout[k + 1]);
  // The velocity part of the rollout is what the output-error residual compares.
  Dataset single;
  single.maneuvers.push_back(log);
  const auto go = build_go_residuals(p, single);
  for (std::size_t k = 0; k < r.predicted.size(); ++k) {
    EXPECT_NEAR(go[3 * k], r.predicted[k].vel.u - (*log.vel)[k + 1].u, 1e-12);
  }
}

TEST(Prediction, OneStepMatchesEquationErrorResidual) {
  const auto d = small_dataset();
  auto p = reference_tug_params();
  p.Y_v *= 0.8;
  for (const auto& log : d.maneuvers) {
    Dataset single;
    single.maneuvers.push_back(log);
    const auto lo = build_lo_residuals(p, single);
    const auto r = predict_n_steps(p, ThrusterModel{}, log, 1);
    for (std::size_t k = 0; k < r.predicted.size(); ++k) {
      const Vec3 err = r.predicted[k].vel.vec() - r.measured[k].vel.vec();
      ASSERT_TRUE(err.isApprox(lo.segment<3>(3 * static_cast<Eigen::Index>(k)), 1e-12)) << k;
    }
  }
}

TEST(Prediction, ErrorGrowsWithHorizon) {
  const auto d = small_dataset();
  auto p = reference_tug_params();
  p.Y_v *= 1.05;
  p.N_r *= 0.95;
  p.X_u *= 1.05;
  const auto suite = validation_suite(p, ThrusterModel{}, d, {1, 50});
  ChannelValues one{}, fifty{};
  for (std::size_t m = 0; m < d.maneuvers.size(); ++m) {
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      one[c] += suite.reports[2 * m].rmse[c];
      fifty[c] += suite.reports[2 * m + 1].rmse[c];
    }
  }
  for (std::size_t c : {kU, kV, kR}) EXPECT_GE(fifty[c], one[c]) << kChannelNames[c];
}

TEST(Prediction, RejectsBadHorizons) {
  const auto d = small_dataset(5.0);
  EXPECT_THROW(predict_n_steps(reference_tug_params(), ThrusterModel{}, d.maneuvers[0], 0), Error);
  try {
    predict_n_steps(reference_tug_params(), ThrusterModel{}, d.maneuvers[0], 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInsufficientData);
  }
  EXPECT_THROW(validation_suite(reference_tug_params(), ThrusterModel{}, d, {}), Error);
}

TEST(Prediction, DefaultHorizons) {
  const std::vector<std::size_t> expected{1, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
  EXPECT_EQ(default_horizons(), expected);
}

TEST(RelativeErrors, ZeroForGeneratingModel) {
  const auto d = small_dataset();
  const auto e = relative_errors(reference_tug_params(), ThrusterModel{}, d);
  for (std::size_t i = 0; i < kComparisonVariables; ++i) {
    ASSERT_TRUE(e[i].has_value()) << kComparisonNames[i];
    EXPECT_LT(*e[i], 1e-6) << kComparisonNames[i];
  }
}

TEST(RelativeErrors, SwayIsNotApplicableOnPureSurge) {
  auto d = small_dataset();
  d.maneuvers.resize(4);  // straight lines only
  ThrusterModel thr;
  thr.azimuth2 = thr.azimuth1;
  auto p = reference_tug_params();
  p.X_u *= 1.5;
  const auto e = relative_errors(p, thr, d);
  EXPECT_TRUE(e[0].has_value());
  EXPECT_GT(*e[0], 0.0);
  EXPECT_FALSE(e[1].has_value());
  EXPECT_FALSE(e[2].has_value());
}

TEST(RelativeErrors, SixParameterFitIsWorseEverywhere) {
  const auto d = small_dataset();
  EstimationConfig cfg;
  cfg.lambda = 0;
  const auto six = estimate_6param(d, cfg);
  auto p = reference_tug_params();
  p.N_r *= 1.01;  // a near-exact 22-parameter model
  const auto table = relative_error_table(p, six.best(), ThrusterModel{}, d);
  for (std::size_t i = 0; i < kComparisonVariables; ++i) {
    ASSERT_TRUE(table.model_a[i] && table.model_b[i]);
    EXPECT_GT(*table.model_b[i], *table.model_a[i]) << kComparisonNames[i];
  }
}

TEST(Reports, FilesAreWrittenAndDeterministic) {
  TempDir a("reports_a"), b("reports_b");
  const auto d = small_dataset(10.0);
  auto p = reference_tug_params();
  p.Y_r *= 1.1;
  const auto ra = validation_suite(p, ThrusterModel{}, d, {1, 5}, a.path());
  validation_suite(p, ThrusterModel{}, d, {1, 5}, b.path());
  ASSERT_EQ(ra.files.size(), 3u + d.maneuvers.size());
  for (const auto& f : ra.files) {
    ASSERT_TRUE(std::filesystem::exists(f));
    EXPECT_EQ(slurp(f), slurp(b.path() / f.filename())) << f;
  }
  const auto summary = nlohmann::json::parse(slurp(a / "summary.json"));
  EXPECT_EQ(summary["horizons"].size(), 2u);
  EXPECT_EQ(summary["maneuvers"].size(), d.maneuvers.size());
  const auto csv = slurp(a / "rmse.csv");
  EXPECT_EQ(csv.rfind("maneuver,horizon,channel,rmse\n", 0), 0u);
  EXPECT_NE(slurp(a / "rmse_vs_horizon.svg").find("<svg"), std::string::npos);
}

TEST(Reports, ComparisonFiles) {
  TempDir dir("comparison");
  ComparisonReport r;
  r.name_a = "full";
  r.name_b = "six";
  r.model_a[0] = 1.5;
  r.model_b[0] = std::numeric_limits<double>::infinity();
  write_comparison_csv(r, dir / "c.csv");
  const auto text = slurp(dir / "c.csv");
  EXPECT_NE(text.find("surge_velocity,1.5,diverged"), std::string::npos);
  EXPECT_NE(text.find("sway_velocity,n/a,n/a"), std::string::npos);
  const auto j = comparison_json(r);
  EXPECT_EQ(j["six"]["surge_velocity"], "diverged");
  EXPECT_EQ(j["full"]["surge_velocity"], 1.5);
}
