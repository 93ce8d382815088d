#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

namespace driverl {

using Vec2 = Eigen::Vector2d;

/// Closed planar curve sampled at uniform arc-length spacing.
///
/// Positions between samples are linear in s; tangent angle and normal are
/// interpolated between the samples. Curvature comes from central
/// differences of the tangent angle. The forward map (s, n) -> point and the
/// projection are exact inverses of each other under this interpolation.
class ClosedPath {
 public:
  ClosedPath() = default;

  /// Builds from already uniform samples (no duplicated closing point).
  explicit ClosedPath(std::vector<Vec2> samples);

  /// Resamples an arbitrary closed polyline through a periodic cubic spline.
  static ClosedPath from_points(std::span<const Vec2> points, double spacing);

  struct Resampled {
    std::vector<Vec2> points;
    /// Fractional input index of each sample (2.5 = halfway from input
    /// point 2 to input point 3), for interpolating per-point attributes.
    std::vector<double> source_index;
  };

  /// Uniform arc-length resampling of a closed polyline via a periodic
  /// cubic spline in chord-length parameterization.
  static Resampled resample(std::span<const Vec2> points, double spacing);

  std::size_t size() const { return points_.size(); }
  double length() const { return length_; }
  double spacing() const { return length_ / static_cast<double>(points_.size()); }

  const std::vector<Vec2>& points() const { return points_; }
  const std::vector<double>& headings() const { return heading_; }
  const std::vector<double>& curvatures() const { return curvature_; }

  double s_at(std::size_t i) const { return spacing() * static_cast<double>(i); }
  double wrap_s(double s) const;

  Vec2 position(double s) const;
  double heading(double s) const;
  double curvature(double s) const;
  Vec2 normal(double s) const;  ///< unit normal pointing left of travel

  /// Point at arc length s and signed lateral offset n.
  Vec2 to_cartesian(double s, double n) const;

  struct Projection {
    double s;
    double n;
    double heading;  ///< reference tangent angle at s
  };

  /// Global nearest-sample search followed by a local exact inversion.
  Projection project(const Vec2& p) const;

  /// Index of the sample at or before s and the fraction towards the next.
  std::size_t locate(double s, double& frac) const;

  /// Maximum absolute heading change between neighbouring samples.
  double max_heading_step() const;

 private:
  void compute_derived();

  std::vector<Vec2> points_;
  std::vector<double> heading_;
  std::vector<double> curvature_;
  double length_ = 0.0;
};

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

/// Root mean square of a sequence (0 for an empty one).
double rms(std::span<const double> values);

}  // namespace driverl
