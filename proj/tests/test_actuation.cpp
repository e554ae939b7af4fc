#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "test_support.hpp"

using namespace shipid;
using shipid::testing::kPropertyCases;
using shipid::testing::uniform;

namespace {

const std::vector<double> kReferenceCoefficients{-0.0001773, 0.001187, 0.04978, 0.151, 1.974, 0.0722};

}  // namespace

TEST(ThrustPolynomial, ConstantTermAtZeroSpeed) {
  EXPECT_NEAR(ThrustPolynomial{}(0.0), 0.0361, 1e-15);
}

TEST(ThrustPolynomial, ValueAtOneRps) {
  EXPECT_NEAR(ThrustPolynomial{}(1.0), 1.12399485, 1e-12);
}

TEST(ThrustPolynomial, ZeroPolynomial) {
  const ThrustPolynomial zero{{0, 0, 0, 0, 0, 0}, 2.0};
  for (double n : {-3.0, 0.0, 2.5, 10.0}) EXPECT_EQ(zero(n), 0.0);
}

TEST(ConfigMatrix, ZeroAngles) {
  const auto t = config_matrix(0, 0, ThrusterGeometry{});
  EXPECT_TRUE(t.col(0).isApprox(Vec3(1, 0, 0.163), 1e-15));
  EXPECT_TRUE(t.col(1).isApprox(Vec3(1, 0, -0.163), 1e-15));
}

TEST(ConfigMatrix, RightAngles) {
  const double h = std::numbers::pi / 2;
  const auto t = config_matrix(h, h, ThrusterGeometry{});
  for (int c = 0; c < 2; ++c) {
    EXPECT_NEAR(t(0, c), 0.0, 1e-15);
    EXPECT_NEAR(t(1, c), 1.0, 1e-15);
    EXPECT_NEAR(t(2, c), -0.8, 1e-15);
  }
}

TEST(ConfigMatrix, ZeroGeometryHasNoYawRow) {
  EXPECT_TRUE(config_matrix(0, 0, ThrusterGeometry{0, 0, 0, 0}).row(2).isZero(0.0));
}

TEST(ConfigMatrix, ForceRowsHaveUnitColumns) {
  auto g = shipid::testing::rng(10);
  for (int i = 0; i < kPropertyCases; ++i) {
    const auto t = config_matrix(uniform(g, -7, 7), uniform(g, -7, 7), ThrusterGeometry{});
    ASSERT_NEAR(t.topRows<2>().col(0).norm(), 1.0, 1e-15);
    ASSERT_NEAR(t.topRows<2>().col(1).norm(), 1.0, 1e-15);
  }
}

TEST(Torques, SymmetricZeroAngle) {
  const auto tau = torques(0, 0, 1, 1, ThrusterGeometry{});
  EXPECT_NEAR(tau.tau_u, 2.0, 1e-15);
  EXPECT_NEAR(tau.tau_v, 0.0, 1e-15);
  EXPECT_NEAR(tau.tau_r, 0.0, 1e-15);
}

TEST(Torques, RightAngles) {
  const double h = std::numbers::pi / 2;
  const auto tau = torques(h, h, 1, 1, ThrusterGeometry{});
  EXPECT_NEAR(tau.tau_u, 0.0, 1e-15);
  EXPECT_NEAR(tau.tau_v, 2.0, 1e-15);
  EXPECT_NEAR(tau.tau_r, -1.6, 1e-15);
}

TEST(Torques, ZeroForce) {
  EXPECT_EQ(torques(0.3, -1.2, 0, 0, ThrusterGeometry{}), ControlTorque{});
}

TEST(Torques, LinearInForceProperty) {
  auto g = shipid::testing::rng(11);
  const ThrusterGeometry geom;
  for (int i = 0; i < kPropertyCases; ++i) {
    const double a1 = uniform(g, -4, 4), a2 = uniform(g, -4, 4);
    const double f1 = uniform(g, -50, 50), f2 = uniform(g, -50, 50);
    const double g1 = uniform(g, -50, 50), g2 = uniform(g, -50, 50);
    const double s = uniform(g, -3, 3);
    const Vec3 lhs = torques(a1, a2, s * f1 + g1, s * f2 + g2, geom).vec();
    const Vec3 rhs = s * torques(a1, a2, f1, f2, geom).vec() + torques(a1, a2, g1, g2, geom).vec();
    ASSERT_LT((lhs - rhs).norm(), 1e-12 * (1 + rhs.norm())) << "case " << i;
  }
}

TEST(AzimuthRate, AtSetpointIsZero) {
  EXPECT_EQ(azimuth_rate({0.1151, 0.0}, 0.4, 0.4), 0.0);
  EXPECT_EQ(azimuth_rate({0.1151, 0.01}, 0.4, 0.4), 0.0);
}

TEST(AzimuthRate, SignModelSaturates) {
  EXPECT_EQ(azimuth_rate({0.1151, 0.0}, 0.0, 0.2), 0.1151);
}

TEST(AzimuthRate, SmoothedValue) {
  EXPECT_NEAR(azimuth_rate({1.0, 1.0}, 0.0, 1.0), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(AzimuthRate, OddAndBoundedProperty) {
  auto g = shipid::testing::rng(12);
  for (int i = 0; i < kPropertyCases; ++i) {
    const AzimuthModel m{uniform(g, 0.01, 2.0), uniform(g, 1e-4, 1.0)};
    const double alpha = uniform(g, -3, 3);
    const double err = uniform(g, -3, 3);
    const double up = azimuth_rate(m, alpha, alpha + err);
    const double down = azimuth_rate(m, alpha, alpha - err);
    ASSERT_NEAR(up, -down, 1e-15) << "case " << i;
    ASSERT_LT(std::abs(up), m.K_alpha) << "case " << i;
    const AzimuthModel sign_model{m.K_alpha, 0.0};
    ASSERT_LE(std::abs(azimuth_rate(sign_model, alpha, alpha + err)), m.K_alpha);
  }
}

TEST(ThrustFit, RecoversExactPolynomial) {
  const ThrustPolynomial truth;
  std::vector<ThrustSample> samples;
  for (double n : {0.0, 2.0, 4.0, 6.0, 8.0, 10.0}) samples.push_back({n, truth(n)});
  const auto fit = fit_thrust_polynomial(samples, 5);
  ASSERT_EQ(fit.polynomial.coefficients.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_NEAR(fit.polynomial.coefficients[i], kReferenceCoefficients[i],
                1e-9 * std::abs(kReferenceCoefficients[i]))
        << "coefficient " << i;
  }
  EXPECT_LT(fit.residual_norm, 1e-9);
}

TEST(ThrustFit, DegreeZeroIsMean) {
  std::vector<ThrustSample> samples{{1, 3}, {2, 5}, {3, 7}};
  const auto fit = fit_thrust_polynomial(samples, 0, 1.0);
  ASSERT_EQ(fit.polynomial.coefficients.size(), 1u);
  EXPECT_NEAR(fit.polynomial.coefficients[0], 5.0, 1e-14);
}

TEST(ThrustFit, NoisyFitMatchesNormalEquations) {
  auto g = shipid::testing::rng(13);
  std::normal_distribution<double> noise(0.0, 0.5);
  const ThrustPolynomial truth;
  std::vector<ThrustSample> samples;
  for (int i = 0; i <= 40; ++i) {
    const double n = 0.25 * i;
    samples.push_back({n, truth(n) + noise(g)});
  }
  const int degree = 3;
  const auto fit = fit_thrust_polynomial(samples, degree);

  Eigen::MatrixXd a(samples.size(), degree + 1);
  Eigen::VectorXd b(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (int j = 0; j <= degree; ++j) a(i, j) = std::pow(samples[i].rps, degree - j);
    b[i] = 2.0 * samples[i].force;
  }
  const Eigen::VectorXd oracle = (a.transpose() * a).ldlt().solve(a.transpose() * b);
  for (int j = 0; j <= degree; ++j) {
    EXPECT_NEAR(fit.polynomial.coefficients[j], oracle[j], 1e-8 * (1 + std::abs(oracle[j])));
  }
  const double oracle_residual = (a * oracle / 2.0 - b / 2.0).norm();
  EXPECT_NEAR(fit.residual_norm, oracle_residual, 1e-9 * oracle_residual);
}

TEST(ThrustFit, TooFewDistinctSpeeds) {
  std::vector<ThrustSample> samples{{1, 3}, {1, 3.1}, {2, 5}};
  try {
    fit_thrust_polynomial(samples, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInsufficientData);
  }
}

TEST(AzimuthIdentification, RecoversBothGains) {
  for (double k : {0.1151, 0.1161}) {
    const AzimuthModel truth{k, 0.0};
    AzimuthLog log;
    log.dt = 0.2;
    std::vector<double> cmd;
    for (int i = 0; i < 300; ++i) cmd.push_back(i < 100 ? 0.5 : (i < 200 ? -0.4 : 0.9));
    const auto alpha = simulate_azimuth(truth, 0.0, cmd, log.dt);
    for (int i = 0; i < 300; ++i) {
      log.t.push_back(0.2 * i);
      log.alpha_cmd.push_back(cmd[i]);
      log.alpha_meas.push_back(alpha[i]);
    }
    const auto fit = estimate_azimuth_params(log);
    EXPECT_NEAR(fit.model.K_alpha, k, 0.01 * k);
    EXPECT_GT(fit.correlation, 0.999);
  }
}

TEST(AzimuthIdentification, ConstantAngleIsUnidentifiable) {
  AzimuthLog log;
  for (int i = 0; i < 50; ++i) {
    log.t.push_back(0.2 * i);
    log.alpha_cmd.push_back(0.3);
    log.alpha_meas.push_back(0.3);
  }
  try {
    estimate_azimuth_params(log);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnidentifiable);
  }
}
