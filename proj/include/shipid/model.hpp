#pragma once

// Surge-decoupled 3-DOF ship dynamics (22 parameters), the 6-parameter
// baseline model, and the planar kinematics shared by both.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "shipid/error.hpp"

namespace shipid {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Inertia and damping coefficients of the surge-decoupled model.
/// kFields fixes the canonical 22-element ordering used by every
/// serialization and by the estimator's parameter vector.
struct ShipParams22 {
  double m11 = 1.0, m22 = 1.0, m23 = 0.0, m32 = 0.0, m33 = 1.0;
  double X_u = 0.0, X_uu_abs = 0.0, X_uuu = 0.0;
  double Y_v = 0.0, Y_vv_abs = 0.0, Y_vvv = 0.0, Y_rv_abs = 0.0, Y_r = 0.0, Y_vr_abs = 0.0,
         Y_rr_abs = 0.0;
  double N_v = 0.0, N_vv_abs = 0.0, N_rv_abs = 0.0, N_r = 0.0, N_rr_abs = 0.0, N_rrr = 0.0,
         N_vr_abs = 0.0;

  static constexpr std::size_t kSize = 22;
  static constexpr std::array<double ShipParams22::*, kSize> kFields{
      &ShipParams22::m11,      &ShipParams22::m22,      &ShipParams22::m23,
      &ShipParams22::m32,      &ShipParams22::m33,      &ShipParams22::X_u,
      &ShipParams22::X_uu_abs, &ShipParams22::X_uuu,    &ShipParams22::Y_v,
      &ShipParams22::Y_vv_abs, &ShipParams22::Y_vvv,    &ShipParams22::Y_rv_abs,
      &ShipParams22::Y_r,      &ShipParams22::Y_vr_abs, &ShipParams22::Y_rr_abs,
      &ShipParams22::N_v,      &ShipParams22::N_vv_abs, &ShipParams22::N_rv_abs,
      &ShipParams22::N_r,      &ShipParams22::N_rr_abs, &ShipParams22::N_rrr,
      &ShipParams22::N_vr_abs};
  static constexpr std::array<std::string_view, kSize> kNames{
      "m11",      "m22",   "m23",      "m32",      "m33",      "X_u",      "X_uu_abs", "X_uuu",
      "Y_v",      "Y_vv_abs", "Y_vvv", "Y_rv_abs", "Y_r",      "Y_vr_abs", "Y_rr_abs", "N_v",
      "N_vv_abs", "N_rv_abs", "N_r",   "N_rr_abs", "N_rrr",    "N_vr_abs"};
  static constexpr std::array<std::size_t, 3> kMassIndices{0, 1, 4};

  bool operator==(const ShipParams22&) const = default;
};

/// Remark-1 style baseline: diagonal inertia and linear diagonal damping.
struct ShipParams6 {
  double m11 = 1.0, m22 = 1.0, m33 = 1.0;
  double d11 = 0.0, d22 = 0.0, d33 = 0.0;

  static constexpr std::size_t kSize = 6;
  static constexpr std::array<double ShipParams6::*, kSize> kFields{
      &ShipParams6::m11, &ShipParams6::m22, &ShipParams6::m33,
      &ShipParams6::d11, &ShipParams6::d22, &ShipParams6::d33};
  static constexpr std::array<std::string_view, kSize> kNames{"m11", "m22", "m33",
                                                             "d11", "d22", "d33"};
  static constexpr std::array<std::size_t, 3> kMassIndices{0, 1, 2};

  bool operator==(const ShipParams6&) const = default;
};

template <class P>
concept ShipParameterSet = requires {
  { P::kSize } -> std::convertible_to<std::size_t>;
  P::kFields;
  P::kNames;
  P::kMassIndices;
};

template <ShipParameterSet P>
std::array<double, P::kSize> to_array(const P& p) {
  std::array<double, P::kSize> out{};
  for (std::size_t i = 0; i < P::kSize; ++i) out[i] = p.*P::kFields[i];
  return out;
}

template <ShipParameterSet P>
Eigen::VectorXd to_vector(const P& p) {
  Eigen::VectorXd out(P::kSize);
  for (std::size_t i = 0; i < P::kSize; ++i) out[static_cast<Eigen::Index>(i)] = p.*P::kFields[i];
  return out;
}

template <ShipParameterSet P>
P from_span(std::span<const double> values) {
  if (values.size() != P::kSize) {
    throw Error(ErrorKind::kValidation, "expected " + std::to_string(P::kSize) +
                                            " parameter values, got " +
                                            std::to_string(values.size()));
  }
  P p;
  for (std::size_t i = 0; i < P::kSize; ++i) p.*P::kFields[i] = values[i];
  return p;
}

template <ShipParameterSet P>
P from_vector(const Eigen::VectorXd& v) {
  return from_span<P>(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

/// Throws kValidation unless all entries are finite and the masses positive.
template <ShipParameterSet P>
void validate_params(const P& p) {
  for (std::size_t i = 0; i < P::kSize; ++i) {
    if (!std::isfinite(p.*P::kFields[i])) {
      throw Error(ErrorKind::kValidation,
                  "parameter " + std::string(P::kNames[i]) + " is not finite");
    }
  }
  for (std::size_t i : P::kMassIndices) {
    if (!(p.*P::kFields[i] > 0.0)) {
      throw Error(ErrorKind::kValidation,
                  "parameter " + std::string(P::kNames[i]) + " must be positive");
    }
  }
}

/// Estimated tug parameters used as ground truth throughout the toolkit.
inline ShipParams22 reference_tug_params() {
  ShipParams22 p;
  p.m11 = 138.0574;
  p.m22 = 106.6003;
  p.m23 = 1.1254;
  p.m32 = -16.0598;
  p.m33 = 15.6476;
  p.X_u = -8.9859;
  p.X_uu_abs = -31.4285;
  p.X_uuu = -6.8953;
  p.Y_v = -71.9041;
  p.Y_vv_abs = -77.6429;
  p.Y_vvv = -27.1394;
  p.Y_rv_abs = -43.2207;
  p.Y_r = -26.0498;
  p.Y_vr_abs = 26.7652;
  p.Y_rr_abs = 7.7996;
  p.N_v = -14.8953;
  p.N_vv_abs = -1.6306;
  p.N_rv_abs = 8.7911;
  p.N_r = -26.7122;
  p.N_rr_abs = -9.8284;
  p.N_rrr = -9.2320;
  p.N_vr_abs = -2.3474;
  return p;
}

inline ShipParams6 reference_tug_params6() {
  return ShipParams6{216.4727, 183.4906, 0.0632, 44.1878, 152.9380, 0.2629};
}

/// Embeds the baseline model into the 22-parameter layout (no coupling,
/// linear damping only).
inline ShipParams22 embed(const ShipParams6& p) {
  ShipParams22 q;
  q.m11 = p.m11;
  q.m22 = p.m22;
  q.m33 = p.m33;
  q.X_u = -p.d11;
  q.Y_v = -p.d22;
  q.N_r = -p.d33;
  return q;
}

struct BodyVelocity {
  double u = 0.0;
  double v = 0.0;
  double r = 0.0;

  Vec3 vec() const { return {u, v, r}; }
  static BodyVelocity from(const Vec3& w) { return {w[0], w[1], w[2]}; }
  bool operator==(const BodyVelocity&) const = default;
};

/// Earth-fixed position and heading. psi is never wrapped.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;

  Vec3 vec() const { return {x, y, psi}; }
  static Pose from(const Vec3& w) { return {w[0], w[1], w[2]}; }
  bool operator==(const Pose&) const = default;
};

struct ControlTorque {
  double tau_u = 0.0;
  double tau_v = 0.0;
  double tau_r = 0.0;

  Vec3 vec() const { return {tau_u, tau_v, tau_r}; }
  bool operator==(const ControlTorque&) const = default;
};

/// Whole-ship state, laid out as [alpha1, alpha2, x, y, psi, u, v, r].
using StateVector = Eigen::Matrix<double, 8, 1>;

struct ShipState {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  Pose pose;
  BodyVelocity vel;

  StateVector vec() const {
    StateVector s;
    s << alpha1, alpha2, pose.x, pose.y, pose.psi, vel.u, vel.v, vel.r;
    return s;
  }
  static ShipState from(const StateVector& s) {
    return {s[0], s[1], {s[2], s[3], s[4]}, {s[5], s[6], s[7]}};
  }
  bool operator==(const ShipState&) const = default;
};

/// Planar rotation from body to earth frame.
inline Mat3 rotation_matrix(double psi) {
  const double c = std::cos(psi);
  const double s = std::sin(psi);
  Mat3 j;
  j << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  return j;
}

namespace detail {

inline void check_invertible(const Mat3& m) {
  const double norm_inf = m.cwiseAbs().rowwise().sum().maxCoeff();
  const double scale = std::max(1.0, norm_inf * norm_inf * norm_inf);
  const double det = m.determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-12 * scale) {
    throw Error(ErrorKind::kDegenerateParameters,
                "mass matrix is singular (det=" + std::to_string(det) + ")");
  }
}

inline double sq(double a) { return a * a; }

}  // namespace detail

inline Mat3 mass_matrix(const ShipParams22& p) {
  Mat3 m;
  m << p.m11, 0.0, 0.0, 0.0, p.m22, p.m23, 0.0, p.m32, p.m33;
  detail::check_invertible(m);
  return m;
}

inline Mat3 mass_matrix(const ShipParams6& p) {
  Mat3 m = Vec3(p.m11, p.m22, p.m33).asDiagonal();
  detail::check_invertible(m);
  return m;
}

inline Mat3 coriolis_matrix(const ShipParams22& p, const BodyVelocity& w) {
  const double c13 = -p.m22 * w.v - p.m23 * w.r;
  const double c23 = p.m11 * w.u;
  Mat3 c = Mat3::Zero();
  c(0, 2) = c13;
  c(1, 2) = c23;
  c(2, 0) = -c13;
  c(2, 1) = -c23;
  return c;
}

inline Mat3 coriolis_matrix(const ShipParams6& p, const BodyVelocity& w) {
  Mat3 c = Mat3::Zero();
  c(0, 2) = -p.m22 * w.v;
  c(1, 2) = p.m11 * w.u;
  c(2, 0) = p.m22 * w.v;
  c(2, 1) = -p.m11 * w.u;
  return c;
}

inline Mat3 damping_matrix(const ShipParams22& p, const BodyVelocity& w) {
  using detail::sq;
  const double au = std::abs(w.u);
  const double av = std::abs(w.v);
  const double ar = std::abs(w.r);
  Mat3 d = Mat3::Zero();
  d(0, 0) = -p.X_u - p.X_uu_abs * au - p.X_uuu * sq(w.u);
  d(1, 1) = -p.Y_v - p.Y_vv_abs * av - p.Y_rv_abs * ar - p.Y_vvv * sq(w.v);
  d(1, 2) = -p.Y_r - p.Y_vr_abs * av - p.Y_rr_abs * ar;
  d(2, 1) = -p.N_v - p.N_vv_abs * av - p.N_rv_abs * ar;
  d(2, 2) = -p.N_r - p.N_vr_abs * av - p.N_rr_abs * ar - p.N_rrr * sq(w.r);
  return d;
}

inline Mat3 damping_matrix(const ShipParams6& p, const BodyVelocity&) {
  return Vec3(p.d11, p.d22, p.d33).asDiagonal();
}

/// Velocity dynamics M v' = -C(v) v - D(v) v + tau with M^-1 cached.
/// Construction throws kDegenerateParameters for a singular M.
template <ShipParameterSet P>
class VelocityDynamics {
 public:
  using Params = P;

  explicit VelocityDynamics(const P& p) : params_(p), mass_inv_(mass_matrix(p).inverse()) {}

  Vec3 acceleration(const Vec3& vel, const Vec3& tau) const {
    const BodyVelocity w = BodyVelocity::from(vel);
    const Vec3 rhs = tau - coriolis_matrix(params_, w) * vel - damping_matrix(params_, w) * vel;
    return mass_inv_ * rhs;
  }

  const P& params() const { return params_; }

 private:
  P params_;
  Mat3 mass_inv_;
};

using SurgeDecoupledDynamics = VelocityDynamics<ShipParams22>;
using SimplifiedDynamics = VelocityDynamics<ShipParams6>;

inline Vec3 dynamics_rhs_22(const ShipParams22& p, const BodyVelocity& vel,
                            const ControlTorque& tau) {
  return SurgeDecoupledDynamics(p).acceleration(vel.vec(), tau.vec());
}

inline Vec3 dynamics_rhs_6(const ShipParams6& p, const BodyVelocity& vel,
                           const ControlTorque& tau) {
  return SimplifiedDynamics(p).acceleration(vel.vec(), tau.vec());
}

}  // namespace shipid
