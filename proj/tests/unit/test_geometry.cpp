#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "driverl/error.hpp"
#include "driverl/maps.hpp"
#include "driverl/spline.hpp"
#include "driverl/track.hpp"

using namespace driverl;

namespace {

std::string circle_csv(double radius, int points, double wl, double wr) {
  std::ostringstream out;
  out << "x_m,y_m,w_left_m,w_right_m\n";
  out.precision(17);
  for (int i = 0; i < points; ++i) {
    const double th = 2.0 * std::numbers::pi * i / points;
    out << radius * std::cos(th) << "," << radius * std::sin(th) << "," << wl << "," << wr << "\n";
  }
  return out.str();
}

// Stadium: two straights of length `straight` joined by half circles of radius r.
TrackGeometry oval(double straight, double r, double half_width) {
  std::vector<Vec2> pts;
  const int arc = 60;
  const int line = 40;
  for (int i = 0; i < line; ++i) pts.emplace_back(-straight / 2 + straight * i / line, -r);
  for (int i = 0; i < arc; ++i) {
    const double th = -std::numbers::pi / 2 + std::numbers::pi * i / arc;
    pts.emplace_back(straight / 2 + r * std::cos(th), r * std::sin(th));
  }
  for (int i = 0; i < line; ++i) pts.emplace_back(straight / 2 - straight * i / line, r);
  for (int i = 0; i < arc; ++i) {
    const double th = std::numbers::pi / 2 + std::numbers::pi * i / arc;
    pts.emplace_back(-straight / 2 + r * std::cos(th), r * std::sin(th));
  }
  std::vector<double> w(pts.size(), half_width);
  return make_track(pts, w, w);
}

double brute_force_distance(const ClosedPath& path, const Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < path.size(); ++i) {
    const Vec2 a = path.points()[i];
    const Vec2 b = path.points()[(i + 1) % path.size()];
    const Vec2 ab = b - a;
    const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    best = std::min(best, (a + t * ab - p).norm());
  }
  return best;
}

}  // namespace

TEST(Spline, ReproducesPeriodicFunction) {
  std::vector<double> knots, values;
  const int n = 64;
  for (int i = 0; i <= n; ++i) knots.push_back(2.0 * std::numbers::pi * i / n);
  for (int i = 0; i < n; ++i) values.push_back(std::sin(knots[i]));
  PeriodicSpline sp(knots, values);
  for (double t = -3.0; t < 10.0; t += 0.137) {
    EXPECT_NEAR(sp(t), std::sin(t), 1e-5);
    EXPECT_NEAR(sp.derivative(t), std::cos(t), 1e-3);
  }
}

TEST(Spline, CyclicTridiagonalMatchesDenseSolve) {
  const int n = 7;
  std::vector<double> lo(n, 1.0), di(n, 4.0), up(n, 1.0), rhs(n);
  for (int i = 0; i < n; ++i) rhs[i] = i * 0.5 - 1.0;
  const auto x = solve_cyclic_tridiagonal(lo, di, up, rhs);
  for (int i = 0; i < n; ++i) {
    const double r = lo[i] * x[(i + n - 1) % n] + di[i] * x[i] + up[i] * x[(i + 1) % n];
    EXPECT_NEAR(r, rhs[i], 1e-12);
  }
}

TEST(Track, CircleLengthAndCurvature) {
  std::istringstream in(circle_csv(10.0, 360, 1.0, 1.0));
  const TrackGeometry t = load_track(in);
  EXPECT_NEAR(t.total_length(), 2.0 * std::numbers::pi * 10.0, 0.01);
  for (double k : t.centerline.curvatures()) EXPECT_NEAR(k, 0.1, 0.001);
  EXPECT_NEAR(t.centerline.spacing(), 0.05, 1e-3);
  EXPECT_FALSE(t.raceline.has_value());
}

TEST(Track, ParseErrorsCarryLineNumbers) {
  std::string csv = circle_csv(10.0, 40, 1.0, 1.0);
  const auto pos = csv.find('\n', csv.find('\n', csv.find('\n') + 1) + 1);
  csv.insert(pos + 1, "1.0,abc,1,1\n");
  std::istringstream in(csv);
  try {
    load_track(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
  std::istringstream bad_header("x,y,wl,wr\n0,0,1,1\n");
  EXPECT_THROW(load_track(bad_header), ParseError);
}

TEST(Track, ZeroWidthIsRejected) {
  std::istringstream in(circle_csv(10.0, 40, 0.0, 1.0));
  EXPECT_THROW(load_track(in), ValidationError);
}

TEST(Track, TooFewPointsIsRejected) {
  std::istringstream in(circle_csv(10.0, 5, 1.0, 1.0));
  EXPECT_THROW(load_track(in), ValidationError);
}

TEST(Track, CsvRoundTrip) {
  const auto& t = builtin_map(kTrainMap);
  std::stringstream io;
  write_track_csv(t, io);
  const TrackGeometry back = load_track(io);
  EXPECT_NEAR(back.total_length(), t.total_length(), 1e-6);
  std::stringstream rl;
  write_raceline_csv(t, rl);
  const TrackGeometry with = load_raceline(back, rl);
  ASSERT_TRUE(with.raceline.has_value());
  for (double s = 0.0; s < t.total_length(); s += 1.7) {
    EXPECT_NEAR(with.reference_offset(s), t.reference_offset(s), 1e-3);
    EXPECT_NEAR(with.reference_speed(s), t.reference_speed(s), 1e-3);
  }
}

TEST(Frenet, PointOnCenterlineWithTangentHeading) {
  const auto& t = builtin_map(kTrainMap);
  for (double s : {0.0, 3.3, 17.0, 40.2}) {
    const Vec2 p = t.centerline.position(s);
    const FrenetPose f = frenet_project(t, p, t.centerline.heading(s), false);
    EXPECT_NEAR(f.s, s, 1e-6);
    EXPECT_NEAR(f.n, 0.0, 1e-9);
    EXPECT_NEAR(f.dphi, 0.0, 1e-9);
  }
}

TEST(Frenet, LeftOffsetIsPositiveOnStraight) {
  const TrackGeometry t = oval(20.0, 5.0, 1.0);
  // the first straight runs along +x at y = -5; left of travel is +y
  const FrenetPose f = frenet_project(t, Vec2(0.0, -5.0 + 0.3), 0.0, false);
  EXPECT_NEAR(f.n, 0.3, 1e-6);
}

TEST(Frenet, CircleRadialQueryMatchesBruteForce) {
  std::istringstream in(circle_csv(10.0, 360, 1.0, 1.0));
  const TrackGeometry t = load_track(in);
  const Vec2 q(9.8 * std::cos(0.7), 9.8 * std::sin(0.7));
  const FrenetPose f = frenet_project(t, q, 0.0, false);
  EXPECT_NEAR(std::abs(f.n), brute_force_distance(t.centerline, q), 1e-6);
  EXPECT_NEAR(f.n, 0.2, 1e-3);  // counter-clockwise: the centre lies to the left
}

TEST(Frenet, RandomRoundTrip) {
  std::mt19937_64 rng(3);
  for (const char* id : {kTrainMap, kEvalMap}) {
    const auto& t = builtin_map(id);
    std::uniform_real_distribution<double> us(0.0, t.total_length()), uu(-0.9, 0.9), uh(-1.0, 1.0);
    for (int i = 0; i < 300; ++i) {
      const double s = us(rng);
      const double n = uu(rng) * std::min(t.width_left_at(s), t.width_right_at(s));
      const FrenetPose pose{s, n, uh(rng)};
      const CartesianPose c = frenet_to_cartesian(t, pose, false);
      const FrenetPose back = frenet_project(t, c.position, c.heading, false);
      double ds = std::abs(back.s - s);
      ds = std::min(ds, t.total_length() - ds);
      EXPECT_LT(ds, 1e-3);
      EXPECT_LT(std::abs(back.n - n), 1e-3);
      EXPECT_LT(std::abs(wrap_angle(back.dphi - pose.dphi)), 1e-6);
    }
  }
}

TEST(Raceline, CircleOffsetIsUniformAndInscribed) {
  const auto& t = builtin_map(kTrainMap);
  ASSERT_TRUE(t.raceline.has_value());
  const auto& off = t.raceline->offset;
  const double w = t.width_left[0];
  // largest circle inside the track: hugging the outer (right) wall
  for (double o : off) EXPECT_NEAR(o, -(w - kRacelineMargin), 5e-3);  // iterative optimizer, mm level
  const double r_in = 8.0 + (w - kRacelineMargin);
  EXPECT_NEAR(rms(t.raceline->curvature), 1.0 / r_in, 1e-3);
  for (double v : t.raceline->speed) EXPECT_NEAR(v, std::min(5.0, std::sqrt(10.0 * r_in)), 1e-6);
}

TEST(Raceline, OvalCurvatureIsReducedAndInsideBounds) {
  const TrackGeometry t = oval(20.0, 5.0, 1.0);
  const TrackGeometry r = generate_raceline(t, 10.0, 5.0);
  ASSERT_TRUE(r.raceline.has_value());
  EXPECT_LT(rms(r.raceline->curvature), rms(t.centerline.curvatures()));
  for (std::size_t i = 0; i < r.raceline->offset.size(); ++i) {
    EXPECT_LE(r.raceline->offset[i], t.width_left[i] - kRacelineMargin + 1e-9);
    EXPECT_GE(r.raceline->offset[i], -t.width_right[i] + kRacelineMargin - 1e-9);
  }
  const TrackGeometry again = generate_raceline(t, 10.0, 5.0);
  EXPECT_EQ(again.raceline->offset, r.raceline->offset);
}

TEST(Raceline, SpeedReferenceFormula) {
  EXPECT_DOUBLE_EQ(speed_reference(0.1, 10.0, 5.0), 5.0);
  EXPECT_DOUBLE_EQ(speed_reference(1.0, 4.0, 5.0), 2.0);
  EXPECT_DOUBLE_EQ(speed_reference(0.0, 10.0, 5.0), 5.0);
}

TEST(Maps, BuiltinsAndAliases) {
  EXPECT_EQ(canonical_map_id("circle"), kTrainMap);
  EXPECT_EQ(canonical_map_id("grand_tour"), kEvalMap);
  EXPECT_EQ(canonical_map_id("nowhere"), "");
  const auto& tour = builtin_map(kEvalMap);
  ASSERT_TRUE(tour.raceline.has_value());
  EXPECT_LT(rms(tour.raceline->curvature), rms(tour.centerline.curvatures()));
  EXPECT_GT(tour.total_length(), builtin_map(kTrainMap).total_length());
}
