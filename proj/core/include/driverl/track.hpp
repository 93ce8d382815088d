#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "driverl/closed_path.hpp"

namespace driverl {

/// Resampling spacing of loaded tracks [m].
inline constexpr double kTrackSpacing = 0.05;
/// Clearance kept between the raceline and the walls [m].
inline constexpr double kRacelineMargin = 0.1;

/// Curvature-reduced reference line carried as a lateral offset profile over
/// the centerline samples.
struct Raceline {
  std::vector<double> offset;       ///< n of the raceline per centerline sample [m]
  std::vector<double> heading_ref;  ///< raceline heading relative to centerline [rad]
  std::vector<double> curvature;    ///< raceline curvature at each sample [1/m]
  std::vector<double> speed;        ///< speed reference per sample [m/s]
  ClosedPath path;                  ///< the raceline itself, resampled
  bool converged = true;
  int iterations = 0;
};

/// Closed track: centerline, wall clearances and an optional raceline.
struct TrackGeometry {
  ClosedPath centerline;
  std::vector<double> width_left;
  std::vector<double> width_right;
  std::optional<Raceline> raceline;

  double total_length() const { return centerline.length(); }
  double curvature(double s) const { return centerline.curvature(s); }
  double width_left_at(double s) const;
  double width_right_at(double s) const;

  /// Raceline offset / heading / speed at s; zeros (and +inf speed) without a raceline.
  double reference_offset(double s) const;
  double reference_heading(double s) const;
  double reference_speed(double s) const;

  /// Signed offset of a centerline-frame n relative to the raceline.
  double raceline_relative(double s, double n_center) const {
    return n_center - reference_offset(s);
  }

  /// True when a centerline-frame offset lies between the walls.
  bool on_track(double s, double n) const {
    return n <= width_left_at(s) && n >= -width_right_at(s);
  }
};

struct FrenetPose {
  double s = 0.0;
  double n = 0.0;
  double dphi = 0.0;
};

struct CartesianPose {
  Vec2 position = Vec2::Zero();
  double heading = 0.0;
};

/// Builds a validated track from an ordered closed loop of points.
/// Throws ValidationError on any invariant violation.
TrackGeometry make_track(std::span<const Vec2> points, std::span<const double> width_left,
                         std::span<const double> width_right, double spacing = kTrackSpacing);

/// Parses the `x_m,y_m,w_left_m,w_right_m` CSV format.
TrackGeometry load_track(std::istream& source);
TrackGeometry load_track_file(const std::string& path);

/// Attaches a raceline from the `x_m,y_m,v_ref_mps` CSV format.
TrackGeometry load_raceline(const TrackGeometry& track, std::istream& source);

void write_track_csv(const TrackGeometry& track, std::ostream& out);
void write_raceline_csv(const TrackGeometry& track, std::ostream& out);

FrenetPose frenet_project(const TrackGeometry& track, const Vec2& position, double heading,
                          bool use_raceline);
CartesianPose frenet_to_cartesian(const TrackGeometry& track, const FrenetPose& pose,
                                  bool use_raceline);

/// Returns a copy of `track` with a minimum-curvature style raceline and the
/// speed profile v_ref = min(v_cap, sqrt(alat_max / |kappa|)).
TrackGeometry generate_raceline(const TrackGeometry& track, double alat_max, double v_cap);

/// Assembles a raceline from per-sample offsets and speeds (derives the
/// heading reference, curvature and the resampled path).
Raceline make_raceline(const TrackGeometry& track, std::vector<double> offsets,
                       std::vector<double> speeds);

/// Curvature of the curve centerline + offset * normal at every centerline sample.
std::vector<double> offset_curve_curvature(const TrackGeometry& track,
                                           std::span<const double> offsets);

/// Speed reference for a curvature value.
double speed_reference(double curvature, double alat_max, double v_cap);

}  // namespace driverl
