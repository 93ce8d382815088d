#pragma once

#include "driverl/track.hpp"

namespace driverl {

inline constexpr double kWheelbase = 0.33;     ///< [m]
inline constexpr double kMaxSteer = 0.4;       ///< [rad]
inline constexpr double kMaxSteerRate = 3.2;   ///< [rad/s]
inline constexpr double kSimDt = 0.02;         ///< [s]
inline constexpr double kMaxLapTime = 60.0;    ///< [s]
inline constexpr double kMinProjection = 0.05; ///< lower bound on 1 - n*kappa

struct VehicleState {
  double s = 0.0;
  double n = 0.0;
  double dphi = 0.0;
  double delta = 0.0;
  double v = 0.0;
};

struct ControlInput {
  double ddelta = 0.0;
  double a = 0.0;
};

/// Time derivative of the Frenet bicycle model with centerline curvature kappa.
VehicleState dynamics_rhs(const VehicleState& x, const ControlInput& u, double kappa);

/// Plain RK4 step with curvature given as a function of s.
template <class KappaFn>
VehicleState integrate_rk4_fn(const VehicleState& x, const ControlInput& u, KappaFn&& kappa, double dt) {
  auto axpy = [](const VehicleState& a, double h, const VehicleState& d) {
    return VehicleState{a.s + h * d.s, a.n + h * d.n, a.dphi + h * d.dphi, a.delta + h * d.delta,
                        a.v + h * d.v};
  };
  const VehicleState k1 = dynamics_rhs(x, u, kappa(x.s));
  const VehicleState x2 = axpy(x, 0.5 * dt, k1);
  const VehicleState k2 = dynamics_rhs(x2, u, kappa(x2.s));
  const VehicleState x3 = axpy(x, 0.5 * dt, k2);
  const VehicleState k3 = dynamics_rhs(x3, u, kappa(x3.s));
  const VehicleState x4 = axpy(x, dt, k3);
  const VehicleState k4 = dynamics_rhs(x4, u, kappa(x4.s));
  VehicleState sum = axpy(axpy(axpy(k1, 2.0, k2), 2.0, k3), 1.0, k4);
  return axpy(x, dt / 6.0, sum);
}

/// Plain RK4 step against the track centerline: no clamping, no wrapping of s.
VehicleState integrate_rk4(const VehicleState& x, const ControlInput& u, const TrackGeometry& track,
                           double dt);

/// Simulator step: RK4, steering clamped to +-kMaxSteer, s wrapped.
/// Throws ValidationError for dt outside (0, 0.1] and SimulationFault when
/// 1 - n*kappa(s) <= 0.05 or the result is not finite.
VehicleState step_dynamics(const VehicleState& x, const ControlInput& u, const TrackGeometry& track,
                           double dt);

/// v^2 tan(delta) / L.
double lateral_acceleration(const VehicleState& x, double wheelbase = kWheelbase);

}  // namespace driverl
