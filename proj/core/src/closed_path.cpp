#include "driverl/closed_path.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "driverl/spline.hpp"

namespace driverl {

double wrap_angle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, kTwoPi);
  if (a <= 0.0) a += kTwoPi;
  return a - std::numbers::pi;
}

double rms(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double acc = 0.0;
  for (double v : values) acc += v * v;
  return std::sqrt(acc / static_cast<double>(values.size()));
}

namespace {

// 5-point Gauss-Legendre on [0, 1].
constexpr std::array<double, 5> kGlNodes = {0.04691007703066800, 0.23076534494715845, 0.5,
                                            0.76923465505284155, 0.95308992296933200};
constexpr std::array<double, 5> kGlWeights = {0.11846344252809454, 0.23931433524968323,
                                              0.28444444444444444, 0.23931433524968323,
                                              0.11846344252809454};

struct SplineCurve {
  PeriodicSpline x, y;

  double speed(double t) const { return std::hypot(x.derivative(t), y.derivative(t)); }

  double arc(double t0, double t1) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < kGlNodes.size(); ++k) {
      acc += kGlWeights[k] * speed(t0 + (t1 - t0) * kGlNodes[k]);
    }
    return acc * (t1 - t0);
  }
};

}  // namespace

ClosedPath::ClosedPath(std::vector<Vec2> samples) : points_(std::move(samples)) {
  if (points_.size() < 3) throw std::invalid_argument("closed path needs >= 3 samples");
  compute_derived();
}

ClosedPath::Resampled ClosedPath::resample(std::span<const Vec2> points, double spacing) {
  const std::size_t n = points.size();
  if (n < 3) throw std::invalid_argument("closed path needs >= 3 points");
  if (!(spacing > 0.0)) throw std::invalid_argument("spacing must be positive");

  std::vector<double> knots(n + 1, 0.0);
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = points[i];
    const Vec2& b = points[(i + 1) % n];
    const double chord = (b - a).norm();
    if (!(chord > 0.0)) throw std::invalid_argument("duplicate consecutive points");
    knots[i + 1] = knots[i] + chord;
    xs[i] = a.x();
    ys[i] = a.y();
  }
  const SplineCurve curve{PeriodicSpline(knots, xs), PeriodicSpline(knots, ys)};

  std::vector<double> cum(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) cum[i + 1] = cum[i] + curve.arc(knots[i], knots[i + 1]);
  const double total = cum[n];
  const std::size_t count = std::max<std::size_t>(8, static_cast<std::size_t>(std::lround(total / spacing)));
  const double ds = total / static_cast<double>(count);

  Resampled out;
  out.points.reserve(count);
  out.source_index.reserve(count);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double target = ds * static_cast<double>(k);
    while (seg + 1 < n && cum[seg + 1] <= target) ++seg;
    const double t0 = knots[seg];
    const double t1 = knots[seg + 1];
    const double want = target - cum[seg];
    // Newton on the arc-length function inside the segment, bracketed.
    double lo = t0, hi = t1;
    double t = t0 + (t1 - t0) * want / std::max(cum[seg + 1] - cum[seg], 1e-300);
    for (int it = 0; it < 50; ++it) {
      const double f = curve.arc(t0, t) - want;
      if (std::abs(f) < 1e-12) break;
      if (f > 0.0) hi = t; else lo = t;
      double next = t - f / curve.speed(t);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      t = next;
    }
    out.points.emplace_back(curve.x(t), curve.y(t));
    out.source_index.push_back(static_cast<double>(seg) + (t - t0) / (t1 - t0));
  }
  return out;
}

ClosedPath ClosedPath::from_points(std::span<const Vec2> points, double spacing) {
  return ClosedPath(resample(points, spacing).points);
}

void ClosedPath::compute_derived() {
  const std::size_t n = points_.size();
  std::vector<double> chord_len(n), chord_ang(n);
  length_ = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 d = points_[(i + 1) % n] - points_[i];
    chord_len[i] = d.norm();
    chord_ang[i] = std::atan2(d.y(), d.x());
    length_ += chord_len[i];
  }
  heading_.resize(n);
  curvature_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t prev = (i + n - 1) % n;
    const double turn = wrap_angle(chord_ang[i] - chord_ang[prev]);
    heading_[i] = wrap_angle(chord_ang[prev] + 0.5 * turn);
    curvature_[i] = turn / (0.5 * (chord_len[i] + chord_len[prev]));
  }
}

double ClosedPath::wrap_s(double s) const {
  double w = std::fmod(s, length_);
  if (w < 0.0) w += length_;
  if (w >= length_) w = 0.0;
  return w;
}

std::size_t ClosedPath::locate(double s, double& frac) const {
  const double u = wrap_s(s) / spacing();
  std::size_t i = static_cast<std::size_t>(u);
  if (i >= points_.size()) i = points_.size() - 1;
  frac = std::clamp(u - static_cast<double>(i), 0.0, 1.0);
  return i;
}

Vec2 ClosedPath::position(double s) const {
  double f = 0.0;
  const std::size_t i = locate(s, f);
  const std::size_t j = (i + 1) % points_.size();
  return points_[i] + f * (points_[j] - points_[i]);
}

double ClosedPath::heading(double s) const {
  double f = 0.0;
  const std::size_t i = locate(s, f);
  const std::size_t j = (i + 1) % points_.size();
  return wrap_angle(heading_[i] + f * wrap_angle(heading_[j] - heading_[i]));
}

double ClosedPath::curvature(double s) const {
  double f = 0.0;
  const std::size_t i = locate(s, f);
  const std::size_t j = (i + 1) % points_.size();
  return curvature_[i] + f * (curvature_[j] - curvature_[i]);
}

Vec2 ClosedPath::normal(double s) const {
  const double h = heading(s);
  return {-std::sin(h), std::cos(h)};
}

Vec2 ClosedPath::to_cartesian(double s, double n) const {
  return position(s) + n * normal(s);
}

ClosedPath::Projection ClosedPath::project(const Vec2& p) const {
  const std::size_t n = points_.size();
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double d2 = (points_[i] - p).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }

  // On segment i the foot point satisfies (p - P(t)) . T(t) = 0 with P linear
  // and T the interpolated tangent; solve for t in [0, 1].
  auto residual = [&](std::size_t i, double t) {
    const std::size_t j = (i + 1) % n;
    const Vec2 base = points_[i] + t * (points_[j] - points_[i]);
    const double h = heading_[i] + t * wrap_angle(heading_[j] - heading_[i]);
    return (p - base).dot(Vec2(std::cos(h), std::sin(h)));
  };

  const double ds = spacing();
  Projection result{s_at(best), 0.0, heading_[best]};
  double result_abs_n = std::numeric_limits<double>::infinity();
  constexpr int kWindow = 4;
  for (int off = -kWindow; off < kWindow; ++off) {
    const std::size_t i = (best + n + static_cast<std::size_t>(off + static_cast<int>(n))) % n;
    double lo = 0.0, hi = 1.0;
    double flo = residual(i, lo), fhi = residual(i, hi);
    if (flo < 0.0 || fhi > 0.0) continue;  // no sign change -> foot not on this segment
    double t = 0.5;
    for (int it = 0; it < 60; ++it) {
      t = (flo == fhi) ? 0.5 * (lo + hi) : lo + flo * (hi - lo) / (flo - fhi);
      if (!(t > lo && t < hi)) t = 0.5 * (lo + hi);
      const double ft = residual(i, t);
      if (std::abs(ft) < 1e-13) break;
      if (ft > 0.0) {
        lo = t;
        flo = ft;
      } else {
        hi = t;
        fhi = ft;
      }
      if (hi - lo < 1e-14) break;
    }
    const double s = wrap_s((static_cast<double>(i) + t) * ds);
    const Vec2 foot = position(s);
    const Vec2 nor = normal(s);
    const double lateral = (p - foot).dot(nor);
    if (std::abs(lateral) < result_abs_n) {
      result_abs_n = std::abs(lateral);
      result = {s, lateral, heading(s)};
    }
  }
  if (!std::isfinite(result_abs_n)) {
    const Vec2 nor = normal(result.s);
    result.n = (p - points_[best]).dot(nor);
  }
  return result;
}

double ClosedPath::max_heading_step() const {
  double worst = 0.0;
  const std::size_t n = heading_.size();
  for (std::size_t i = 0; i < n; ++i) {
    worst = std::max(worst, std::abs(wrap_angle(heading_[(i + 1) % n] - heading_[i])));
  }
  return worst;
}

}  // namespace driverl
