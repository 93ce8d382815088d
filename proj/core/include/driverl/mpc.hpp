#pragma once

#include <string>
#include <vector>

#include "driverl/lap.hpp"
#include "driverl/mpc_params.hpp"
#include "driverl/track.hpp"
#include "driverl/vehicle.hpp"

namespace driverl {

/// Lateral reference the MPC tracks, as an offset from the centerline.
struct ReferenceProfile {
  enum class Kind { raceline, sine, left_wall };
  Kind kind = Kind::raceline;
  double amplitude = 0.0;   ///< sine [m]
  double wavelength = 1.0;  ///< sine [m]
  double clearance = 0.0;   ///< left_wall: distance kept from the left wall [m]

  static ReferenceProfile raceline() { return {}; }
  static ReferenceProfile sine(double amplitude, double wavelength);
  static ReferenceProfile left_wall(double clearance);

  double offset(const TrackGeometry& track, double s) const;
  double heading(const TrackGeometry& track, double s) const;
  std::string key() const;
};

struct MpcOptions {
  int horizon = 20;
  double dt = 0.05;
  int max_sqp_iterations = 3;
  double sqp_tolerance = 1e-3;  ///< early stop on the input update [inf-norm]
  double rho_linear = 1e3;      ///< exact (L1) penalty on constraint slacks
  double rho_quadratic = 1e3;   ///< L2 penalty on constraint slacks
  double qp_tolerance = 1e-6;
};

enum class MpcStatus { optimal, relaxed, max_iter, infeasible };

std::string to_string(MpcStatus status);

struct MpcSolution {
  ControlInput first_input;
  std::vector<VehicleState> predicted_states;  ///< x_0 .. x_N (nonlinear rollout)
  std::vector<ControlInput> predicted_inputs;  ///< u_0 .. u_{N-1}
  double cost = 0.0;                           ///< stage cost of the rollout
  double violation = 0.0;                      ///< largest bound violation of the rollout
  MpcStatus status = MpcStatus::infeasible;
  int sqp_iterations = 0;
  int qp_iterations = 0;
  double kkt_residual = 0.0;
};

/// v_ref(s): track speed profile clamped into the velocity bounds, or the
/// midpoint of the bounds when both are non-positive (reversing).
double reference_velocity(const TrackGeometry& track, const MpcParams& params, double s);

/// Receding-horizon controller (successive linearization + condensed QP).
/// Not reentrant; one instance per episode.
class MpcController : public Controller {
 public:
  MpcController(const TrackGeometry& track, MpcParams params,
                ReferenceProfile reference = ReferenceProfile::raceline(), MpcOptions options = {});

  MpcSolution solve(const VehicleState& x0);

  /// Solves and returns the first input; throws SolverFault when infeasible.
  ControlInput control(const VehicleState& state, double t) override;

  void reset() { warm_.clear(); }
  const MpcParams& params() const { return params_; }
  const ReferenceProfile& reference() const { return reference_; }
  const MpcOptions& options() const { return options_; }

  /// Stage cost and largest bound violation of a state/input sequence.
  double rollout_cost(const std::vector<VehicleState>& xs, const std::vector<ControlInput>& us) const;
  double rollout_violation(const std::vector<VehicleState>& xs) const;

 private:
  std::vector<VehicleState> rollout(const VehicleState& x0, const std::vector<ControlInput>& us) const;

  const TrackGeometry& track_;
  MpcParams params_;
  ReferenceProfile reference_;
  MpcOptions options_;
  std::vector<ControlInput> warm_;
};

/// One-shot solve with a fresh controller.
MpcSolution solve_mpc(const VehicleState& state, const TrackGeometry& track, const MpcParams& params,
                      int horizon = 20);

/// Start state used for every lap: on the reference clamped into the
/// default corridor, aligned with it, steady steering, default v_ref.
VehicleState initial_state(const TrackGeometry& track);

}  // namespace driverl
