#include "driverl/environment.hpp"

#include <algorithm>

#include "driverl/error.hpp"
#include "driverl/maps.hpp"

namespace driverl {

Environment::Environment(std::size_t lap_cache_capacity) : capacity_(std::max<std::size_t>(1, lap_cache_capacity)) {}

std::string Environment::resolve_map_id(const std::string& map_id) {
  const std::string builtin = canonical_map_id(map_id);
  if (!builtin.empty()) return builtin;
  std::lock_guard lock(mutex_);
  if (custom_tracks_.count(map_id)) return map_id;
  throw ValidationError("unknown map '" + map_id + "'");
}

const TrackGeometry& Environment::track(const std::string& map_id) {
  const std::string builtin = canonical_map_id(map_id);
  if (!builtin.empty()) return builtin_map(builtin);
  std::lock_guard lock(mutex_);
  auto it = custom_tracks_.find(map_id);
  if (it == custom_tracks_.end()) throw ValidationError("unknown map '" + map_id + "'");
  return *it->second;
}

void Environment::register_track(const std::string& map_id, TrackGeometry track) {
  if (!canonical_map_id(map_id).empty()) throw ValidationError("map id '" + map_id + "' is reserved");
  std::lock_guard lock(mutex_);
  custom_tracks_[map_id] = std::make_unique<TrackGeometry>(std::move(track));
}

std::shared_ptr<const LapTrace> Environment::lap(const std::string& map_id, const MpcParams& params,
                                                 const ReferenceProfile& reference) {
  const std::string id = resolve_map_id(map_id);
  const TrackGeometry& tr = track(id);
  const std::string key = id + "|" + canonical_string(params) + "|" + reference.key();

  std::promise<std::shared_ptr<const LapTrace>> promise;
  LapFuture future;
  bool owner = false;
  {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) {
      future = it->second;
    } else {
      future = promise.get_future().share();
      cache_.emplace(key, future);
      order_.push_back(key);
      while (order_.size() > capacity_) {
        cache_.erase(order_.front());
        order_.pop_front();
      }
      ++laps_simulated_;
      owner = true;
    }
  }
  if (owner) {
    try {
      MpcController controller(tr, params, reference);
      promise.set_value(std::make_shared<const LapTrace>(run_lap(tr, controller, initial_state(tr))));
    } catch (...) {
      promise.set_exception(std::current_exception());
      std::lock_guard lock(mutex_);
      cache_.erase(key);
      std::erase(order_, key);
    }
  }
  return future.get();
}

double Environment::baseline_metric(const std::string& map_id, const BehaviorSpec& behavior) {
  return metric_rmse(*lap(map_id, default_params()), behavior);
}

std::size_t Environment::laps_simulated() const {
  std::lock_guard lock(mutex_);
  return laps_simulated_;
}

MpcScore Environment::score_mpc_completion(std::string_view completion, const BehaviorSpec& behavior,
                                           const std::string& map_id) {
  MpcScore out;
  out.reward.r_fmt = score_format(completion, TaskFamily::mpc);
  out.e_mpc = baseline_metric(map_id, behavior);
  const ExtractionResult extracted = extract_params(completion);
  std::optional<MpcParams> params;
  if (extracted.ok) {
    try {
      params = validate_params(extracted.params);
    } catch (const InvalidParameterError& e) {
      out.fault = e.what();
    }
  } else {
    out.fault = extracted.error;
  }
  if (!params) {
    out.reward.extraction_failure = true;
    out.reward.r_param = 0.0;
    out.reward.update_total();
    return out;
  }
  out.reward.r_param = kParamReward;
  const auto trace = lap(map_id, *params);
  out.e_llm = metric_rmse(*trace, behavior);
  if (trace->terminated_by == Termination::crash) {
    out.reward.r_drive = kDriveFloor;
    out.fault = trace->fault.empty() ? "crash" : trace->fault;
  } else {
    out.reward.r_drive = r_drive(out.e_mpc, *out.e_llm);
  }
  out.reward.update_total();
  return out;
}

EpisodeResult Environment::run_episode(const ParamMap& raw_params, const BehaviorSpec& behavior,
                                       const std::string& map_id) {
  const MpcParams params = validate_params(raw_params);
  EpisodeResult out;
  out.e_mpc = baseline_metric(map_id, behavior);
  const auto trace = lap(map_id, params);
  out.e_llm = metric_rmse(*trace, behavior);
  out.terminated_by = trace->terminated_by;
  out.lap_time = trace->lap_time;
  out.trace_ref = trace_digest(*trace);
  if (trace->terminated_by == Termination::crash) {
    out.r_drive = kDriveFloor;
    out.fault = trace->fault.empty() ? "crash" : trace->fault;
  } else {
    out.r_drive = r_drive(out.e_mpc, out.e_llm);
  }
  return out;
}

}  // namespace driverl
