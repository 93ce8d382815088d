#include "driverl/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "driverl/error.hpp"
#include "driverl/qp.hpp"

namespace driverl {

namespace {

using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;
using Mat52 = Eigen::Matrix<double, 5, 2>;

constexpr int kS = 0, kN = 1, kPhi = 2, kDelta = 3, kV = 4;
constexpr double kBoundTolerance = 1e-6;
constexpr double kInputRegularization = 1e-4;

Vec5 to_vec(const VehicleState& x) { return Vec5(x.s, x.n, x.dphi, x.delta, x.v); }
VehicleState from_vec(const Vec5& v) { return {v[0], v[1], v[2], v[3], v[4]}; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string to_string(MpcStatus status) {
  switch (status) {
    case MpcStatus::optimal:
      return "optimal";
    case MpcStatus::relaxed:
      return "relaxed";
    case MpcStatus::max_iter:
      return "max_iter";
    case MpcStatus::infeasible:
      return "infeasible";
  }
  return "infeasible";
}

ReferenceProfile ReferenceProfile::sine(double amplitude, double wavelength) {
  ReferenceProfile r;
  r.kind = Kind::sine;
  r.amplitude = amplitude;
  r.wavelength = wavelength;
  return r;
}

ReferenceProfile ReferenceProfile::left_wall(double clearance) {
  ReferenceProfile r;
  r.kind = Kind::left_wall;
  r.clearance = clearance;
  return r;
}

double ReferenceProfile::offset(const TrackGeometry& track, double s) const {
  switch (kind) {
    case Kind::raceline:
      return track.reference_offset(s);
    case Kind::sine:
      return amplitude * std::sin(2.0 * std::numbers::pi * s / wavelength);
    case Kind::left_wall:
      return track.width_left_at(s) - clearance;
  }
  return 0.0;
}

double ReferenceProfile::heading(const TrackGeometry& track, double s) const {
  if (kind == Kind::raceline) return track.reference_heading(s);
  constexpr double h = 0.01;
  const double slope = (offset(track, s + h) - offset(track, s - h)) / (2.0 * h);
  return std::atan2(slope, 1.0 - track.curvature(s) * offset(track, s));
}

std::string ReferenceProfile::key() const {
  switch (kind) {
    case Kind::raceline:
      return "raceline";
    case Kind::sine:
      return "sine:a=" + fmt(amplitude) + ",l=" + fmt(wavelength);
    case Kind::left_wall:
      return "left_wall:c=" + fmt(clearance);
  }
  return "raceline";
}

double reference_velocity(const TrackGeometry& track, const MpcParams& params, double s) {
  if (params.v_max <= 0.0 && params.v_min < 0.0) return 0.5 * (params.v_min + params.v_max);
  double profile = track.reference_speed(s);
  if (!std::isfinite(profile)) profile = params.v_max;
  const double lo = params.v_min > 0.0 ? std::max(params.v_min, 0.1) : params.v_min;
  return std::min(std::max(profile, lo), params.v_max);
}

MpcController::MpcController(const TrackGeometry& track, MpcParams params, ReferenceProfile reference,
                             MpcOptions options)
    : track_(track), params_(params), reference_(reference), options_(options) {
  if (options_.horizon < 5) throw ValidationError("MPC horizon must be at least 5");
  if (!(options_.dt > 0.0)) throw ValidationError("MPC dt must be positive");
}

std::vector<VehicleState> MpcController::rollout(const VehicleState& x0,
                                                 const std::vector<ControlInput>& us) const {
  std::vector<VehicleState> xs;
  xs.reserve(us.size() + 1);
  xs.push_back(x0);
  auto kappa = [this](double s) { return track_.curvature(s); };
  for (const auto& u : us) xs.push_back(integrate_rk4_fn(xs.back(), u, kappa, options_.dt));
  return xs;
}

double MpcController::rollout_cost(const std::vector<VehicleState>& xs,
                                   const std::vector<ControlInput>& us) const {
  double cost = 0.0;
  for (std::size_t k = 1; k < xs.size(); ++k) {
    const auto& x = xs[k];
    const double en = x.n - reference_.offset(track_, x.s);
    const double ev = x.v - reference_velocity(track_, params_, x.s);
    const double ea = x.dphi - reference_.heading(track_, x.s);
    cost += params_.qn * en * en + params_.qv * ev * ev + params_.qalpha * ea * ea;
  }
  for (const auto& u : us) cost += params_.qddelta * u.ddelta * u.ddelta + params_.qac * u.a * u.a;
  return cost;
}

double MpcController::rollout_violation(const std::vector<VehicleState>& xs) const {
  double worst = 0.0;
  const double m = params_.track_safety_margin;
  for (std::size_t k = 1; k < xs.size(); ++k) {
    const auto& x = xs[k];
    const double hi = track_.width_left_at(x.s) - m;
    const double lo = -track_.width_right_at(x.s) + m;
    worst = std::max({worst, x.n - hi, lo - x.n, x.v - params_.v_max, params_.v_min - x.v,
                      std::abs(x.delta) - kMaxSteer,
                      std::abs(lateral_acceleration(x)) - params_.alat_max});
  }
  return worst;
}

MpcSolution MpcController::solve(const VehicleState& x0) {
  const int N = options_.horizon;
  const double m = params_.track_safety_margin;
  MpcSolution sol;
  sol.predicted_states.push_back(x0);

  auto clamp_input = [&](ControlInput u) {
    u.ddelta = std::clamp(u.ddelta, -kMaxSteerRate, kMaxSteerRate);
    u.a = std::clamp(u.a, params_.a_min, params_.a_max);
    return u;
  };

  // Penalized merit of a candidate input sequence.
  auto merit_of = [&](const std::vector<VehicleState>& xs, const std::vector<ControlInput>& us) {
    double pen = 0.0;
    for (std::size_t k = 1; k < xs.size(); ++k) {
      const auto& x = xs[k];
      const double hi = track_.width_left_at(x.s) - m;
      const double lo = -track_.width_right_at(x.s) + m;
      for (double viol : {x.n - hi, lo - x.n, x.v - params_.v_max, params_.v_min - x.v,
                          std::abs(x.delta) - kMaxSteer,
                          std::abs(lateral_acceleration(x)) - params_.alat_max}) {
        if (viol > 0.0) pen += options_.rho_linear * viol + 0.5 * options_.rho_quadratic * viol * viol;
      }
    }
    return rollout_cost(xs, us) + pen;
  };

  struct Candidate {
    std::vector<ControlInput> us;
    std::vector<VehicleState> xs;
    double merit;
  };
  auto evaluate = [&](std::vector<ControlInput> us) {
    for (auto& u : us) u = clamp_input(u);
    Candidate c{std::move(us), {}, 0.0};
    c.xs = rollout(x0, c.us);
    c.merit = merit_of(c.xs, c.us);
    return c;
  };

  std::vector<ControlInput> guess(static_cast<std::size_t>(N));
  if (static_cast<int>(warm_.size()) == N) guess = warm_;
  Candidate best = evaluate(guess);
  {
    Candidate zero = evaluate(std::vector<ControlInput>(static_cast<std::size_t>(N)));
    if (zero.merit < best.merit) best = std::move(zero);
  }

  for (const auto& x : best.xs) {
    if (-track_.width_right_at(x.s) + m > track_.width_left_at(x.s) - m) {
      sol.status = MpcStatus::infeasible;
      sol.first_input = {};
      warm_.clear();
      return sol;
    }
  }

  const int nu = 2 * N;
  const int nz = nu + 2;
  const int i_sd = nu, i_sa = nu + 1;
  auto kappa = [this](double s) { return track_.curvature(s); };
  bool converged = false;
  bool qp_ok = true;
  std::vector<Eigen::Matrix<double, 5, Eigen::Dynamic>> S(static_cast<std::size_t>(N + 1),
                                                         Eigen::Matrix<double, 5, Eigen::Dynamic>::Zero(5, nz));

  for (int it = 0; it < options_.max_sqp_iterations; ++it) {
    sol.sqp_iterations = it + 1;
    const auto& X = best.xs;
    const auto& U = best.us;

    // Sensitivities of the rollout w.r.t. the input sequence.
    S[0].setZero();
    for (int k = 0; k < N; ++k) {
      const Vec5 xk = to_vec(X[static_cast<std::size_t>(k)]);
      const ControlInput uk = U[static_cast<std::size_t>(k)];
      Mat5 A;
      Mat52 B;
      for (int i = 0; i < 5; ++i) {
        const double h = 1e-6 * std::max(1.0, std::abs(xk[i]));
        Vec5 xp = xk, xm = xk;
        xp[i] += h;
        xm[i] -= h;
        A.col(i) = (to_vec(integrate_rk4_fn(from_vec(xp), uk, kappa, options_.dt)) -
                    to_vec(integrate_rk4_fn(from_vec(xm), uk, kappa, options_.dt))) /
                   (2.0 * h);
      }
      for (int j = 0; j < 2; ++j) {
        constexpr double h = 1e-6;
        ControlInput up = uk, um = uk;
        (j == 0 ? up.ddelta : up.a) += h;
        (j == 0 ? um.ddelta : um.a) -= h;
        B.col(j) = (to_vec(integrate_rk4_fn(from_vec(xk), up, kappa, options_.dt)) -
                    to_vec(integrate_rk4_fn(from_vec(xk), um, kappa, options_.dt))) /
                   (2.0 * h);
      }
      S[static_cast<std::size_t>(k + 1)].noalias() = A * S[static_cast<std::size_t>(k)];
      S[static_cast<std::size_t>(k + 1)].middleCols(2 * k, 2) += B;
    }

    QpProblem qp(nz);
    for (int k = 1; k <= N; ++k) {
      const auto& x = X[static_cast<std::size_t>(k)];
      const auto& Sk = S[static_cast<std::size_t>(k)];
      const double en = x.n - reference_.offset(track_, x.s);
      const double ev = x.v - reference_velocity(track_, params_, x.s);
      const double ea = x.dphi - reference_.heading(track_, x.s);
      qp.H.noalias() += 2.0 * params_.qn * Sk.row(kN).transpose() * Sk.row(kN);
      qp.H.noalias() += 2.0 * params_.qv * Sk.row(kV).transpose() * Sk.row(kV);
      qp.H.noalias() += 2.0 * params_.qalpha * Sk.row(kPhi).transpose() * Sk.row(kPhi);
      qp.g.noalias() += 2.0 * params_.qn * en * Sk.row(kN).transpose();
      qp.g.noalias() += 2.0 * params_.qv * ev * Sk.row(kV).transpose();
      qp.g.noalias() += 2.0 * params_.qalpha * ea * Sk.row(kPhi).transpose();
    }
    for (int k = 0; k < N; ++k) {
      const auto& u = U[static_cast<std::size_t>(k)];
      qp.H(2 * k, 2 * k) += 2.0 * (params_.qddelta + kInputRegularization);
      qp.H(2 * k + 1, 2 * k + 1) += 2.0 * (params_.qac + kInputRegularization);
      qp.g[2 * k] += 2.0 * params_.qddelta * u.ddelta;
      qp.g[2 * k + 1] += 2.0 * params_.qac * u.a;
      qp.lb[2 * k] = -kMaxSteerRate - u.ddelta;
      qp.ub[2 * k] = kMaxSteerRate - u.ddelta;
      qp.lb[2 * k + 1] = params_.a_min - u.a;
      qp.ub[2 * k + 1] = params_.a_max - u.a;
    }
    qp.H(i_sd, i_sd) = options_.rho_quadratic;
    qp.H(i_sa, i_sa) = options_.rho_quadratic;
    qp.g[i_sd] = options_.rho_linear;
    qp.g[i_sa] = options_.rho_linear;
    qp.lb[i_sd] = 0.0;
    qp.lb[i_sa] = 0.0;

    qp.G_soft = Eigen::MatrixXd::Zero(4 * N, nz);
    qp.h_soft.resize(4 * N);
    qp.G_hard = Eigen::MatrixXd::Zero(4 * N, nz);
    qp.h_hard.resize(4 * N);
    for (int k = 1; k <= N; ++k) {
      const auto& x = X[static_cast<std::size_t>(k)];
      const auto& Sk = S[static_cast<std::size_t>(k)];
      const int r = 4 * (k - 1);
      const double hi = track_.width_left_at(x.s) - m;
      const double lo = -track_.width_right_at(x.s) + m;
      qp.G_soft.row(r) = Sk.row(kN);
      qp.h_soft[r] = hi - x.n;
      qp.G_soft.row(r + 1) = -Sk.row(kN);
      qp.h_soft[r + 1] = x.n - lo;
      qp.G_soft.row(r + 2) = Sk.row(kV);
      qp.h_soft[r + 2] = params_.v_max - x.v;
      qp.G_soft.row(r + 3) = -Sk.row(kV);
      qp.h_soft[r + 3] = x.v - params_.v_min;

      qp.G_hard.row(r) = Sk.row(kDelta);
      qp.G_hard(r, i_sd) = -1.0;
      qp.h_hard[r] = kMaxSteer - x.delta;
      qp.G_hard.row(r + 1) = -Sk.row(kDelta);
      qp.G_hard(r + 1, i_sd) = -1.0;
      qp.h_hard[r + 1] = kMaxSteer + x.delta;

      const double tn = std::tan(x.delta);
      const double glat = x.v * x.v * tn / kWheelbase;
      const double gv = 2.0 * x.v * tn / kWheelbase;
      const double c = std::cos(x.delta);
      const double gd = x.v * x.v / (kWheelbase * c * c);
      const Eigen::RowVectorXd row = gv * Sk.row(kV) + gd * Sk.row(kDelta);
      qp.G_hard.row(r + 2) = row;
      qp.G_hard(r + 2, i_sa) = -1.0;
      qp.h_hard[r + 2] = params_.alat_max - glat;
      qp.G_hard.row(r + 3) = -row;
      qp.G_hard(r + 3, i_sa) = -1.0;
      qp.h_hard[r + 3] = params_.alat_max + glat;
    }
    qp.rho1 = Eigen::VectorXd::Constant(4 * N, options_.rho_linear);
    qp.rho2 = Eigen::VectorXd::Constant(4 * N, options_.rho_quadratic);

    const QpResult res = solve_qp(qp, {60, options_.qp_tolerance});
    sol.qp_iterations += res.iterations;
    sol.kkt_residual = res.kkt_residual;
    if (res.status == QpStatus::numerical_error) {
      qp_ok = false;
      break;
    }
    qp_ok = res.status == QpStatus::solved;

    const double step_norm = res.z.head(nu).lpNorm<Eigen::Infinity>();
    bool accepted = false;
    for (double alpha : {1.0, 0.5, 0.25}) {
      std::vector<ControlInput> trial = U;
      for (int k = 0; k < N; ++k) {
        trial[static_cast<std::size_t>(k)].ddelta += alpha * res.z[2 * k];
        trial[static_cast<std::size_t>(k)].a += alpha * res.z[2 * k + 1];
      }
      Candidate c = evaluate(std::move(trial));
      if (c.merit <= best.merit) {
        best = std::move(c);
        accepted = true;
        break;
      }
    }
    if (!accepted || step_norm < options_.sqp_tolerance) {
      converged = qp_ok;
      break;
    }
  }

  sol.predicted_inputs = best.us;
  sol.predicted_states = best.xs;
  sol.cost = rollout_cost(best.xs, best.us);
  sol.violation = rollout_violation(best.xs);
  sol.first_input = clamp_input(best.us.front());
  if (!converged) {
    sol.status = MpcStatus::max_iter;
  } else {
    sol.status = sol.violation <= kBoundTolerance ? MpcStatus::optimal : MpcStatus::relaxed;
  }

  warm_.assign(best.us.begin() + 1, best.us.end());
  warm_.push_back(best.us.back());
  return sol;
}

ControlInput MpcController::control(const VehicleState& state, double) {
  const MpcSolution sol = solve(state);
  if (sol.status == MpcStatus::infeasible) {
    throw SolverFault("MPC infeasible: track_safety_margin exceeds the half-width");
  }
  return sol.first_input;
}

MpcSolution solve_mpc(const VehicleState& state, const TrackGeometry& track, const MpcParams& params,
                      int horizon) {
  MpcOptions opt;
  opt.horizon = horizon;
  MpcController ctrl(track, params, ReferenceProfile::raceline(), opt);
  return ctrl.solve(state);
}

VehicleState initial_state(const TrackGeometry& track) {
  const MpcParams defaults;
  VehicleState x;
  x.s = 0.0;
  const double lo = -track.width_right_at(0.0) + defaults.track_safety_margin;
  const double hi = track.width_left_at(0.0) - defaults.track_safety_margin;
  x.n = lo <= hi ? std::clamp(track.reference_offset(0.0), lo, hi) : 0.0;
  x.dphi = track.reference_heading(0.0);
  const double kappa = track.raceline ? track.raceline->curvature.front() : track.curvature(0.0);
  x.delta = std::clamp(std::atan(kWheelbase * kappa), -kMaxSteer, kMaxSteer);
  x.v = reference_velocity(track, defaults, 0.0);
  return x;
}

}  // namespace driverl
