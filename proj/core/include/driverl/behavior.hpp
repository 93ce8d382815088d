#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "driverl/lap.hpp"
#include "driverl/track.hpp"

namespace driverl {

/// The four metric kinds of the behaviour sets plus the extra driving
/// styles used to label the decision corpus.
enum class BehaviorKind { centerline, velocity, reversing, smooth, raceline, stopped, oscillating, wall };

std::string to_string(BehaviorKind kind);
BehaviorKind behavior_kind_from_string(const std::string& name);

struct BehaviorSpec {
  BehaviorKind kind = BehaviorKind::centerline;
  double v_ref = 0.0;  ///< velocity kind only [m/s]
  std::string prompt;

  /// "E_C", "E_V", "E_R", "E_S" for the metric kinds; empty otherwise.
  std::string metric_id() const;
};

enum class BehaviorSet { train, eval };

/// Canonical training set (4) and evaluation set (4 kinds x 5 phrasings,
/// index = kind * 5 + phrasing).
const std::vector<BehaviorSpec>& train_behaviors();
const std::vector<BehaviorSpec>& eval_behaviors();

/// Throws ValidationError for an out-of-range index.
BehaviorSpec sample_behavior(BehaviorSet set, int index, std::uint64_t seed = 0);

/// Fresh velocity training prompt with a seeded target speed in [1, 4.5] m/s.
BehaviorSpec random_velocity_behavior(std::uint64_t seed);

/// Both sets as a JSON document {"train": [...], "eval": [...]}.
std::string behavior_sets_json();

/// Per-sample quantities the behaviour rules read.
struct BehaviorSample {
  double t = 0.0;
  double s = 0.0;
  double v = 0.0;
  double n_center = 0.0;
  double n_raceline = 0.0;
  double a = 0.0;
  double a_lat = 0.0;
  double wall_left = 0.0;   ///< distance to the left wall [m]
  double wall_right = 0.0;  ///< distance to the right wall [m]
};

std::vector<BehaviorSample> behavior_samples(const LapTrace& trace, const TrackGeometry& track);

inline constexpr double kCenterlineThreshold = 0.2;  ///< [m]
inline constexpr double kVelocityThreshold = 0.3;    ///< [m/s]
inline constexpr double kSmoothThreshold = 1.0;      ///< [m/s^2]
inline constexpr double kRacelineThreshold = 0.2;    ///< [m]
inline constexpr double kSampleFraction = 0.9;
inline constexpr double kStoppedSpeed = 0.1;         ///< [m/s]
inline constexpr double kOscillationRms = 0.1;       ///< [m]
inline constexpr int kOscillationCrossings = 2;
inline constexpr double kWallDistance = 0.4;         ///< [m]

/// RMS of sqrt(a^2 + a_lat^2), or of a alone when include_lateral is false.
double smoothness_rms(std::span<const BehaviorSample> samples, bool include_lateral = true);

/// Behaviour metric over a trace (E_C, E_V, E_R, E_S; raceline -> RMSE of n,
/// stopped -> RMS of v). Throws ValidationError on an empty trace or a kind
/// without a metric.
double metric_rmse(const LapTrace& trace, const BehaviorSpec& behavior);
double metric_rmse(std::span<const BehaviorSample> samples, const BehaviorSpec& behavior);

struct AdherenceLabel {
  bool adheres = false;
  std::string rule_id;
  double evidence = 0.0;
};

AdherenceLabel label_adherence(std::span<const BehaviorSample> samples, const BehaviorSpec& behavior);
AdherenceLabel label_adherence(const LapTrace& trace, const TrackGeometry& track,
                               const BehaviorSpec& behavior);

}  // namespace driverl
