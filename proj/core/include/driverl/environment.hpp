#pragma once

#include <cstddef>
#include <deque>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "driverl/behavior.hpp"
#include "driverl/lap.hpp"
#include "driverl/mpc.hpp"
#include "driverl/reward.hpp"

namespace driverl {

/// Result of scoring one mpc-family completion.
struct MpcScore {
  RewardBreakdown reward;
  double e_mpc = 0.0;
  std::optional<double> e_llm;  ///< absent on extraction failure
  std::string fault;            ///< crash / infeasibility reason, if any
};

struct EpisodeResult {
  double e_llm = 0.0;
  double e_mpc = 0.0;
  double r_drive = 0.0;
  Termination terminated_by = Termination::crash;
  double lap_time = 0.0;
  std::string trace_ref;
  std::string fault;
};

/// Tracks, cached laps and default-parameter baselines. Thread-safe.
class Environment {
 public:
  explicit Environment(std::size_t lap_cache_capacity = 128);

  /// Built-in map by id or alias, or a previously registered track.
  const TrackGeometry& track(const std::string& map_id);
  /// Canonical id for a built-in alias or a registered id; throws ValidationError otherwise.
  std::string resolve_map_id(const std::string& map_id);
  void register_track(const std::string& map_id, TrackGeometry track);

  /// Lap from the shared start state, cached by (map, params, reference).
  std::shared_ptr<const LapTrace> lap(const std::string& map_id, const MpcParams& params,
                                      const ReferenceProfile& reference = ReferenceProfile::raceline());

  /// E^MPC: the behaviour metric of the default-parameter lap.
  double baseline_metric(const std::string& map_id, const BehaviorSpec& behavior);

  /// Format, extraction, validation, lap and drive reward for one completion.
  MpcScore score_mpc_completion(std::string_view completion, const BehaviorSpec& behavior,
                                const std::string& map_id);

  /// Validated params (throws InvalidParameterError) straight to a scored lap.
  EpisodeResult run_episode(const ParamMap& raw_params, const BehaviorSpec& behavior,
                            const std::string& map_id);

  std::size_t laps_simulated() const;

 private:
  using LapFuture = std::shared_future<std::shared_ptr<const LapTrace>>;

  mutable std::mutex mutex_;
  std::map<std::string, std::unique_ptr<TrackGeometry>> custom_tracks_;
  std::map<std::string, LapFuture> cache_;
  std::deque<std::string> order_;
  std::size_t capacity_;
  std::size_t laps_simulated_ = 0;
};

}  // namespace driverl
