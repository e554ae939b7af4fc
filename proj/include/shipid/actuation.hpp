#pragma once

// Twin azimuth thruster: force polynomial, configuration matrix, and the
// azimuth-angle rotation dynamics.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "shipid/error.hpp"
#include "shipid/model.hpp"

namespace shipid {

/// Thruster positions relative to the body origin, m.
struct ThrusterGeometry {
  double lx1 = -0.8;
  double ly1 = 0.163;
  double lx2 = -0.8;
  double ly2 = -0.163;
};

/// f(n) = (c5 n^5 + ... + c0) / divisor. Coefficients stored highest power first.
struct ThrustPolynomial {
  std::vector<double> coefficients{-0.0001773, 0.001187, 0.04978, 0.151, 1.974, 0.0722};
  double divisor = 2.0;

  double operator()(double rps) const {
    double acc = 0.0;
    for (double c : coefficients) acc = acc * rps + c;
    return acc / divisor;
  }
};

/// alpha' = K (alpha_d - alpha) / sqrt((alpha_d - alpha)^2 + eps^2).
struct AzimuthModel {
  double K_alpha = 0.1151;  // rad/s
  double epsilon = 0.0;     // rad

  void validate() const {
    if (!(K_alpha > 0.0) || !std::isfinite(K_alpha) || !(epsilon >= 0.0) ||
        !std::isfinite(epsilon)) {
      throw Error(ErrorKind::kValidation, "azimuth model needs K_alpha > 0 and epsilon >= 0");
    }
  }
};

/// Shaft speeds (RPS) and azimuth angle commands (rad).
struct InputCommand {
  double n1 = 0.0;
  double n2 = 0.0;
  double alpha1_d = 0.0;
  double alpha2_d = 0.0;

  bool operator==(const InputCommand&) const = default;
};

struct ThrusterModel {
  ThrustPolynomial thrust;
  ThrusterGeometry geometry;
  AzimuthModel azimuth1{0.1151, 0.0};
  AzimuthModel azimuth2{0.1161, 0.0};
};

inline double thrust_from_rps(const ThrustPolynomial& poly, double rps) { return poly(rps); }

/// 3x2 map from thruster forces to (tau_u, tau_v, tau_r).
inline Eigen::Matrix<double, 3, 2> config_matrix(double alpha1, double alpha2,
                                                 const ThrusterGeometry& g) {
  const double c1 = std::cos(alpha1), s1 = std::sin(alpha1);
  const double c2 = std::cos(alpha2), s2 = std::sin(alpha2);
  Eigen::Matrix<double, 3, 2> t;
  t << c1, c2, s1, s2, g.lx1 * s1 + g.ly1 * c1, g.lx2 * s2 + g.ly2 * c2;
  return t;
}

inline ControlTorque torques(double alpha1, double alpha2, double f1, double f2,
                             const ThrusterGeometry& g) {
  const Vec3 tau = config_matrix(alpha1, alpha2, g) * Eigen::Vector2d(f1, f2);
  return {tau[0], tau[1], tau[2]};
}

inline double azimuth_rate(const AzimuthModel& model, double alpha, double alpha_d) {
  const double err = alpha_d - alpha;
  if (model.epsilon == 0.0) {
    if (err == 0.0) return 0.0;
    return err > 0.0 ? model.K_alpha : -model.K_alpha;
  }
  return model.K_alpha * err / std::sqrt(err * err + model.epsilon * model.epsilon);
}

struct PolynomialFit {
  ThrustPolynomial polynomial;
  double residual_norm = 0.0;  // ||A c / divisor - f||_2 over the samples
};

struct ThrustSample {
  double rps = 0.0;
  double force = 0.0;  // N
};

/// Least-squares fit of divisor * f against a polynomial in n. Abscissae are
/// scaled to [-1, 1] before the solve to keep the Vandermonde system well
/// conditioned.
inline PolynomialFit fit_thrust_polynomial(std::span<const ThrustSample> samples, int degree,
                                           double divisor = 2.0) {
  if (degree < 0 || degree > 5) {
    throw Error(ErrorKind::kValidation, "thrust polynomial degree must be in [0, 5]");
  }
  std::vector<double> abscissae;
  for (const auto& s : samples) {
    if (!std::isfinite(s.rps) || !std::isfinite(s.force)) {
      throw Error(ErrorKind::kValidation, "non-finite bollard-pull sample");
    }
    abscissae.push_back(s.rps);
  }
  std::sort(abscissae.begin(), abscissae.end());
  const auto distinct = std::unique(abscissae.begin(), abscissae.end()) - abscissae.begin();
  if (distinct < degree + 1) {
    throw Error(ErrorKind::kInsufficientData,
                "need at least " + std::to_string(degree + 1) + " distinct shaft speeds, got " +
                    std::to_string(distinct));
  }

  double scale = 0.0;
  for (const auto& s : samples) scale = std::max(scale, std::abs(s.rps));
  if (scale == 0.0) scale = 1.0;

  const auto rows = static_cast<Eigen::Index>(samples.size());
  const Eigen::Index cols = degree + 1;
  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double t = samples[static_cast<std::size_t>(i)].rps / scale;
    double p = 1.0;
    for (Eigen::Index j = 0; j < cols; ++j) {
      a(i, j) = p;  // ascending powers
      p *= t;
    }
    b[i] = divisor * samples[static_cast<std::size_t>(i)].force;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < cols) {
    throw Error(ErrorKind::kInsufficientData, "bollard-pull design matrix is rank deficient");
  }
  const Eigen::VectorXd scaled = qr.solve(b);

  PolynomialFit fit;
  fit.polynomial.divisor = divisor;
  fit.polynomial.coefficients.assign(static_cast<std::size_t>(cols), 0.0);
  for (Eigen::Index j = 0; j < cols; ++j) {
    fit.polynomial.coefficients[static_cast<std::size_t>(cols - 1 - j)] =
        scaled[j] / std::pow(scale, static_cast<double>(j));
  }
  double ss = 0.0;
  for (const auto& s : samples) {
    const double e = fit.polynomial(s.rps) - s.force;
    ss += e * e;
  }
  fit.residual_norm = std::sqrt(ss);
  return fit;
}

}  // namespace shipid
