#pragma once

// Command-to-state ship model: azimuth rotation, thrust, configuration
// matrix, velocity dynamics, and kinematics integrated together.

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "shipid/actuation.hpp"
#include "shipid/error.hpp"
#include "shipid/integrator.hpp"
#include "shipid/model.hpp"

namespace shipid {

template <ShipParameterSet P>
VelocityDynamics<P> make_dynamics(const P& p) {
  return VelocityDynamics<P>(p);
}

inline ControlTorque thruster_torques(const ThrusterModel& thr, double alpha1, double alpha2,
                                      const InputCommand& cmd) {
  return torques(alpha1, alpha2, thrust_from_rps(thr.thrust, cmd.n1),
                 thrust_from_rps(thr.thrust, cmd.n2), thr.geometry);
}

template <ShipParameterSet P>
StateVector whole_ship_rhs(const VelocityDynamics<P>& dyn, const ThrusterModel& thr,
                           const StateVector& s, const InputCommand& cmd) {
  StateVector rate;
  rate[0] = azimuth_rate(thr.azimuth1, s[0], cmd.alpha1_d);
  rate[1] = azimuth_rate(thr.azimuth2, s[1], cmd.alpha2_d);
  const Vec3 vel = s.tail<3>();
  rate.segment<3>(2) = rotation_matrix(s[4]) * vel;
  const ControlTorque tau = thruster_torques(thr, s[0], s[1], cmd);
  rate.tail<3>() = dyn.acceleration(vel, tau.vec());
  return rate;
}

/// Rate of every state component, packed in a ShipState for readability.
inline ShipState whole_ship_rhs(const ShipParams22& p, const ThrusterModel& thr,
                                const ShipState& state, const InputCommand& cmd) {
  return ShipState::from(whole_ship_rhs(make_dynamics(p), thr, state.vec(), cmd));
}

template <ShipParameterSet P>
StateVector whole_ship_step(const VelocityDynamics<P>& dyn, const ThrusterModel& thr,
                            const StateVector& s, const InputCommand& cmd, double dt) {
  return rk4_step(
      [&](const StateVector& x, const InputCommand& u) { return whole_ship_rhs(dyn, thr, x, u); },
      s, cmd, dt);
}

/// Forward rollout; cmds[k] is held over [t_k, t_k + dt]. Returns
/// cmds.size() + 1 states starting with x0.
template <ShipParameterSet P>
std::vector<ShipState> simulate(const VelocityDynamics<P>& dyn, const ThrusterModel& thr,
                                const ShipState& x0, std::span<const InputCommand> cmds,
                                double dt) {
  if (cmds.empty()) throw Error(ErrorKind::kValidation, "simulate: command series is empty");
  std::vector<ShipState> out;
  out.reserve(cmds.size() + 1);
  out.push_back(x0);
  StateVector s = x0.vec();
  for (std::size_t k = 0; k < cmds.size(); ++k) {
    try {
      s = whole_ship_step(dyn, thr, s, cmds[k], dt);
    } catch (const IntegrationBlowup&) {
      throw IntegrationBlowup(k, "integration blew up at step " + std::to_string(k));
    }
    out.push_back(ShipState::from(s));
  }
  return out;
}

template <ShipParameterSet P>
std::vector<ShipState> simulate(const P& p, const ThrusterModel& thr, const ShipState& x0,
                                std::span<const InputCommand> cmds, double dt) {
  return simulate(make_dynamics(p), thr, x0, cmds, dt);
}

/// Reduced state [alpha1, alpha2, u, v, r]: the velocity dynamics do not
/// depend on pose, so one-step velocity prediction only needs this subset.
using AngleVelocityState = Eigen::Matrix<double, 5, 1>;

template <ShipParameterSet P>
AngleVelocityState angle_velocity_rhs(const VelocityDynamics<P>& dyn, const ThrusterModel& thr,
                                      const AngleVelocityState& s, const InputCommand& cmd) {
  AngleVelocityState rate;
  rate[0] = azimuth_rate(thr.azimuth1, s[0], cmd.alpha1_d);
  rate[1] = azimuth_rate(thr.azimuth2, s[1], cmd.alpha2_d);
  const ControlTorque tau = thruster_torques(thr, s[0], s[1], cmd);
  rate.tail<3>() = dyn.acceleration(s.tail<3>(), tau.vec());
  return rate;
}

/// One RK4 step of the velocity dynamics from (alpha, v) under a held command.
/// Matches the velocity part of whole_ship_step from the same state.
template <ShipParameterSet P>
Vec3 velocity_step(const VelocityDynamics<P>& dyn, const ThrusterModel& thr, double alpha1,
                   double alpha2, const Vec3& vel, const InputCommand& cmd, double dt) {
  AngleVelocityState s;
  s << alpha1, alpha2, vel;
  const AngleVelocityState next = rk4_step(
      [&](const AngleVelocityState& x, const InputCommand& u) {
        return angle_velocity_rhs(dyn, thr, x, u);
      },
      s, cmd, dt);
  return next.tail<3>();
}

}  // namespace shipid
