#include <algorithm>
#include <cmath>

#include "driverl/behavior.hpp"
#include "driverl/error.hpp"

namespace driverl {

namespace {

template <class F>
double rms_of(std::span<const BehaviorSample> samples, F f) {
  double acc = 0.0;
  for (const auto& smp : samples) {
    const double e = f(smp);
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(samples.size()));
}

template <class P>
double fraction(std::span<const BehaviorSample> samples, P pred) {
  const auto hits = std::count_if(samples.begin(), samples.end(), pred);
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

// Residual of n_center after removing a least-squares line over the sample index.
std::vector<double> detrended_offset(std::span<const BehaviorSample> samples) {
  const double m = static_cast<double>(samples.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double x = static_cast<double>(i);
    sx += x;
    sy += samples[i].n_center;
    sxx += x * x;
    sxy += x * samples[i].n_center;
  }
  const double den = m * sxx - sx * sx;
  const double slope = den != 0.0 ? (m * sxy - sx * sy) / den : 0.0;
  const double icpt = (sy - slope * sx) / m;
  std::vector<double> r(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    r[i] = samples[i].n_center - (icpt + slope * static_cast<double>(i));
  }
  return r;
}

int sign_changes(const std::vector<double>& r) {
  int changes = 0;
  int last = 0;
  for (double x : r) {
    const int sgn = x > 0.0 ? 1 : (x < 0.0 ? -1 : 0);
    if (sgn == 0) continue;
    if (last != 0 && sgn != last) ++changes;
    last = sgn;
  }
  return changes;
}

void require_samples(std::span<const BehaviorSample> samples) {
  if (samples.empty()) throw ValidationError("empty trace");
}

}  // namespace

std::vector<BehaviorSample> behavior_samples(const LapTrace& trace, const TrackGeometry& track) {
  std::vector<BehaviorSample> out;
  out.reserve(trace.samples.size());
  for (const auto& smp : trace.samples) {
    BehaviorSample b;
    b.t = smp.t;
    b.s = smp.state.s;
    b.v = smp.state.v;
    b.n_center = smp.n_center;
    b.n_raceline = smp.n;
    b.a = smp.input.a;
    b.a_lat = smp.a_lat;
    b.wall_left = track.width_left_at(smp.state.s) - smp.n_center;
    b.wall_right = track.width_right_at(smp.state.s) + smp.n_center;
    out.push_back(b);
  }
  return out;
}

double smoothness_rms(std::span<const BehaviorSample> samples, bool include_lateral) {
  require_samples(samples);
  if (!include_lateral) return rms_of(samples, [](const BehaviorSample& b) { return b.a; });
  return rms_of(samples, [](const BehaviorSample& b) { return std::hypot(b.a, b.a_lat); });
}

double metric_rmse(std::span<const BehaviorSample> samples, const BehaviorSpec& behavior) {
  require_samples(samples);
  switch (behavior.kind) {
    case BehaviorKind::centerline:
      return rms_of(samples, [](const BehaviorSample& b) { return b.n_center; });
    case BehaviorKind::velocity:
      return rms_of(samples, [&](const BehaviorSample& b) { return b.v - behavior.v_ref; });
    case BehaviorKind::reversing:
      return rms_of(samples, [](const BehaviorSample& b) { return b.v + 1.0; });
    case BehaviorKind::smooth:
      return smoothness_rms(samples, true);
    case BehaviorKind::raceline:
      return rms_of(samples, [](const BehaviorSample& b) { return b.n_raceline; });
    case BehaviorKind::stopped:
      return rms_of(samples, [](const BehaviorSample& b) { return b.v; });
    default:
      throw ValidationError("behaviour kind '" + to_string(behavior.kind) + "' has no metric");
  }
}

double metric_rmse(const LapTrace& trace, const BehaviorSpec& behavior) {
  if (trace.samples.empty()) throw ValidationError("empty trace");
  std::vector<BehaviorSample> samples;
  samples.reserve(trace.samples.size());
  for (const auto& smp : trace.samples) {
    BehaviorSample b;
    b.v = smp.state.v;
    b.n_center = smp.n_center;
    b.n_raceline = smp.n;
    b.a = smp.input.a;
    b.a_lat = smp.a_lat;
    samples.push_back(b);
  }
  return metric_rmse(samples, behavior);
}

AdherenceLabel label_adherence(std::span<const BehaviorSample> samples, const BehaviorSpec& behavior) {
  require_samples(samples);
  AdherenceLabel label;
  switch (behavior.kind) {
    case BehaviorKind::reversing:
      label.rule_id = "reversing:fraction_v_negative>=0.9";
      label.evidence = fraction(samples, [](const BehaviorSample& b) { return b.v < 0.0; });
      label.adheres = label.evidence >= kSampleFraction;
      break;
    case BehaviorKind::centerline:
      label.rule_id = "centerline:E_C<0.2";
      label.evidence = metric_rmse(samples, behavior);
      label.adheres = label.evidence < kCenterlineThreshold;
      break;
    case BehaviorKind::velocity:
      label.rule_id = "velocity:E_V<0.3";
      label.evidence = metric_rmse(samples, behavior);
      label.adheres = label.evidence < kVelocityThreshold;
      break;
    case BehaviorKind::smooth:
      label.rule_id = "smooth:E_S<1.0";
      label.evidence = metric_rmse(samples, behavior);
      label.adheres = label.evidence < kSmoothThreshold;
      break;
    case BehaviorKind::raceline:
      label.rule_id = "raceline:rmse_n<0.2";
      label.evidence = metric_rmse(samples, behavior);
      label.adheres = label.evidence < kRacelineThreshold;
      break;
    case BehaviorKind::stopped:
      label.rule_id = "stopped:fraction_abs_v<0.1>=0.9";
      label.evidence = fraction(samples, [](const BehaviorSample& b) { return std::abs(b.v) < kStoppedSpeed; });
      label.adheres = label.evidence >= kSampleFraction;
      break;
    case BehaviorKind::oscillating: {
      label.rule_id = "oscillating:detrended_rms>=0.1&crossings>=2";
      const auto r = detrended_offset(samples);
      double acc = 0.0;
      for (double x : r) acc += x * x;
      label.evidence = std::sqrt(acc / static_cast<double>(r.size()));
      label.adheres = label.evidence >= kOscillationRms && sign_changes(r) >= kOscillationCrossings;
      break;
    }
    case BehaviorKind::wall:
      label.rule_id = "wall:fraction_wall_distance<0.4>=0.9";
      label.evidence = fraction(samples, [](const BehaviorSample& b) {
        return std::min(b.wall_left, b.wall_right) < kWallDistance;
      });
      label.adheres = label.evidence >= kSampleFraction;
      break;
  }
  return label;
}

AdherenceLabel label_adherence(const LapTrace& trace, const TrackGeometry& track,
                               const BehaviorSpec& behavior) {
  const auto samples = behavior_samples(trace, track);
  return label_adherence(samples, behavior);
}

}  // namespace driverl
