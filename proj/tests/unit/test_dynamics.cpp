#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "driverl/error.hpp"
#include "driverl/lap.hpp"
#include "driverl/maps.hpp"
#include "driverl/mpc.hpp"
#include "driverl/vehicle.hpp"

using namespace driverl;

namespace {

TrackGeometry straight_loop() {
  // long thin stadium; s in [0, 200) lies on the first straight
  std::vector<Vec2> pts;
  for (int i = 0; i < 400; ++i) pts.emplace_back(i * 1.0, 0.0);
  for (int i = 0; i < 100; ++i) {
    const double th = -std::numbers::pi / 2 + std::numbers::pi * i / 100;
    pts.emplace_back(400.0 + 20.0 * std::cos(th), 20.0 + 20.0 * std::sin(th));
  }
  for (int i = 0; i < 400; ++i) pts.emplace_back(400.0 - i * 1.0, 40.0);
  for (int i = 0; i < 100; ++i) {
    const double th = std::numbers::pi / 2 + std::numbers::pi * i / 100;
    pts.emplace_back(20.0 * std::cos(th), 20.0 + 20.0 * std::sin(th));
  }
  std::vector<double> w(pts.size(), 2.0);
  return make_track(pts, w, w);
}

struct ConstantController : Controller {
  ControlInput u;
  ControlInput control(const VehicleState&, double) override { return u; }
};

}  // namespace

TEST(Dynamics, StraightLineMotion) {
  const auto f = [](double) { return 0.0; };
  const VehicleState x{0.0, 0.0, 0.0, 0.0, 1.0};
  const VehicleState y = integrate_rk4_fn(x, {}, f, 0.1);
  EXPECT_NEAR(y.s, 0.1, 1e-15);
  EXPECT_EQ(y.n, 0.0);
  EXPECT_EQ(y.dphi, 0.0);
  EXPECT_EQ(y.delta, 0.0);
  EXPECT_EQ(y.v, 1.0);
}

TEST(Dynamics, PerpendicularMotion) {
  const VehicleState d = dynamics_rhs({0.0, 0.0, std::numbers::pi / 2, 0.0, 1.0}, {}, 0.0);
  EXPECT_NEAR(d.s, 0.0, 1e-15);
  EXPECT_NEAR(d.n, 1.0, 1e-15);
}

TEST(Dynamics, ProjectionFactor) {
  const VehicleState d = dynamics_rhs({0.0, 1.0, 0.0, 0.0, 2.0}, {}, 0.1);
  EXPECT_NEAR(d.s, 2.0 / 0.9, 1e-12);
  EXPECT_NEAR(d.dphi, -0.1 * 2.0 / 0.9, 1e-12);
}

TEST(Dynamics, LateralAcceleration) {
  EXPECT_EQ(lateral_acceleration({0, 0, 0, 0.0, 2.0}), 0.0);
  EXPECT_NEAR(lateral_acceleration({0, 0, 0, std::atan(0.5 * 0.33), 2.0}), 2.0, 1e-12);
  EXPECT_NEAR(lateral_acceleration({0, 0, 0, 0.1, 3.0}, 0.33), 9.0 * std::tan(0.1) / 0.33, 1e-12);
  EXPECT_NEAR(lateral_acceleration({0, 0, 0, 0.1, 3.0}, 0.33), 2.737, 1e-3);
}

TEST(Dynamics, HeadingConstantWithoutSteeringOnStraight) {
  const auto f = [](double) { return 0.0; };
  VehicleState x{0.0, 0.2, 0.1, 0.0, 2.0};
  for (int i = 0; i < 100; ++i) x = integrate_rk4_fn(x, {0.0, 0.5}, f, 0.02);
  EXPECT_EQ(x.dphi, 0.1);
}

TEST(Dynamics, SteeringIsClampedAndSWrapped) {
  const auto& t = builtin_map(kTrainMap);
  VehicleState x{t.total_length() - 0.01, 0.0, 0.0, 0.39, 2.0};
  x = step_dynamics(x, {3.2, 0.0}, t, 0.02);
  EXPECT_EQ(x.delta, kMaxSteer);
  EXPECT_GE(x.s, 0.0);
  EXPECT_LT(x.s, t.total_length());
}

TEST(Dynamics, SingularProjectionFaults) {
  const auto& t = builtin_map(kTrainMap);  // kappa = 1/8
  EXPECT_THROW(step_dynamics({0.0, 7.7, 0.0, 0.0, 1.0}, {}, t, 0.02), SimulationFault);
  EXPECT_THROW(step_dynamics({0.0, 0.0, 0.0, 0.0, 1.0}, {}, t, 0.0), ValidationError);
  EXPECT_THROW(step_dynamics({0.0, 0.0, 0.0, 0.0, 1.0}, {}, t, 0.2), ValidationError);
}

TEST(Dynamics, DtHalvingDrift) {
  const TrackGeometry t = straight_loop();
  auto run = [&](double dt) {
    VehicleState x{1.0, 0.1, 0.05, 0.0, 2.0};
    const int n = static_cast<int>(std::lround(5.0 / dt));
    for (int i = 0; i < n; ++i) {
      x = step_dynamics(x, {0.02, 0.3}, t, dt);
    }
    return x;
  };
  const VehicleState a = run(0.02), b = run(0.01);
  EXPECT_LT(std::abs(a.s - b.s), 1e-3);
  EXPECT_LT(std::abs(a.n - b.n), 1e-3);
  EXPECT_LT(std::abs(a.v - b.v), 1e-3);
}

TEST(RunLap, FrozenCarTimesOut) {
  const auto& t = builtin_map(kTrainMap);
  ConstantController c;
  LapLimits limits;
  limits.max_time = 2.0;
  const LapTrace trace = run_lap(t, c, {0.0, 0.0, 0.0, 0.0, 0.0}, limits);
  EXPECT_EQ(trace.terminated_by, Termination::timeout);
  EXPECT_EQ(trace.samples.size(), 101u);  // 100 steps plus the terminal sample
  for (std::size_t i = 1; i < trace.samples.size(); ++i) {
    EXPECT_GT(trace.samples[i].t, trace.samples[i - 1].t);
  }
}

TEST(RunLap, FullSteerIntoWallCrashes) {
  const auto& t = builtin_map(kTrainMap);
  ConstantController c;
  c.u = {3.2, 0.0};
  const LapTrace trace = run_lap(t, c, {0.0, 1.0, 0.0, 0.0, 3.0});
  EXPECT_EQ(trace.terminated_by, Termination::crash);
  const auto& last = trace.samples.back();
  EXPECT_GT(std::abs(last.n_center), t.width_left_at(last.state.s));
}

TEST(RunLap, DefaultMpcCompletesCircleDeterministically) {
  const auto& t = builtin_map(kTrainMap);
  MpcController c1(t, default_params());
  MpcController c2(t, default_params());
  const LapTrace a = run_lap(t, c1, initial_state(t));
  const LapTrace b = run_lap(t, c2, initial_state(t));
  EXPECT_EQ(a.terminated_by, Termination::lap_complete);
  EXPECT_EQ(serialize_trace(a), serialize_trace(b));
  for (const auto& smp : a.samples) {
    EXPECT_TRUE(std::isfinite(smp.state.s) && std::isfinite(smp.state.n) && std::isfinite(smp.state.v));
    EXPECT_LE(std::abs(smp.state.delta), kMaxSteer);
    EXPECT_NEAR(smp.n, t.raceline_relative(smp.state.s, smp.n_center), 1e-12);
  }
}

TEST(Trace, SerializationRoundTrip) {
  const auto& t = builtin_map(kTrainMap);
  ConstantController c;
  c.u = {0.1, 0.5};
  LapLimits limits;
  limits.max_time = 1.0;
  const LapTrace a = run_lap(t, c, {0.0, 0.0, 0.0, 0.0, 1.0}, limits);
  const std::string text = serialize_trace(a);
  std::istringstream in(text);
  const LapTrace b = parse_trace(in);
  EXPECT_EQ(serialize_trace(b), text);
  EXPECT_EQ(b.terminated_by, a.terminated_by);
  EXPECT_EQ(trace_digest(a), trace_digest(b));
  EXPECT_NE(text.find("\"n_center\""), std::string::npos);
  EXPECT_NE(text.find("\"terminated_by\""), std::string::npos);
}

TEST(Trace, Fnv1aReferenceValues) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}
