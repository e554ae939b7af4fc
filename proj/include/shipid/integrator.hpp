#pragma once

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "shipid/error.hpp"

namespace shipid {

namespace detail {

inline bool all_finite(double x) { return std::isfinite(x); }

template <class Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& x) {
  return x.allFinite();
}

}  // namespace detail

/// Classical 4th-order Runge-Kutta step for an autonomous system x' = f(x).
/// Works on doubles and fixed-size Eigen vectors. Throws IntegrationBlowup if
/// any stage or the result is non-finite.
template <class State, class Rhs>
State rk4_step(Rhs&& rhs, const State& x, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::kValidation, "rk4_step: dt must be positive");
  const State k1 = rhs(x);
  const State k2 = rhs(State(x + 0.5 * dt * k1));
  const State k3 = rhs(State(x + 0.5 * dt * k2));
  const State k4 = rhs(State(x + dt * k3));
  const State next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!detail::all_finite(k1) || !detail::all_finite(k2) || !detail::all_finite(k3) ||
      !detail::all_finite(k4) || !detail::all_finite(next)) {
    throw IntegrationBlowup(0, "rk4_step produced a non-finite state");
  }
  return next;
}

/// RK4 step of x' = f(x, u) with the input held constant over the step.
template <class State, class Input, class Rhs>
State rk4_step(Rhs&& rhs, const State& x, const Input& input, double dt) {
  return rk4_step([&](const State& s) { return State(rhs(s, input)); }, x, dt);
}

}  // namespace shipid
