#include <algorithm>
#include <cmath>

#include "driverl/error.hpp"
#include "driverl/vehicle.hpp"

namespace driverl {

VehicleState dynamics_rhs(const VehicleState& x, const ControlInput& u, double kappa) {
  VehicleState d;
  const double denom = std::max(1.0 - x.n * kappa, 1e-3);
  d.s = x.v * std::cos(x.dphi) / denom;
  d.n = x.v * std::sin(x.dphi);
  d.dphi = x.v * std::tan(x.delta) / kWheelbase - kappa * d.s;
  d.delta = u.ddelta;
  d.v = u.a;
  return d;
}

VehicleState integrate_rk4(const VehicleState& x, const ControlInput& u, const TrackGeometry& track,
                           double dt) {
  return integrate_rk4_fn(x, u, [&track](double s) { return track.curvature(s); }, dt);
}

VehicleState step_dynamics(const VehicleState& x, const ControlInput& u, const TrackGeometry& track,
                           double dt) {
  if (!(dt > 0.0 && dt <= 0.1)) throw ValidationError("dt must lie in (0, 0.1]");
  if (!std::isfinite(u.ddelta) || !std::isfinite(u.a)) throw SimulationFault("non-finite control input");
  if (1.0 - x.n * track.curvature(x.s) <= kMinProjection) {
    throw SimulationFault("singular projection: 1 - n*kappa <= 0.05");
  }
  VehicleState out = integrate_rk4(x, u, track, dt);
  out.delta = std::clamp(out.delta, -kMaxSteer, kMaxSteer);
  out.s = track.centerline.wrap_s(out.s);
  if (!std::isfinite(out.s) || !std::isfinite(out.n) || !std::isfinite(out.dphi) ||
      !std::isfinite(out.v)) {
    throw SimulationFault("state became non-finite");
  }
  return out;
}

double lateral_acceleration(const VehicleState& x, double wheelbase) {
  return x.v * x.v * std::tan(x.delta) / wheelbase;
}

}  // namespace driverl
