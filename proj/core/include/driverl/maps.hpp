#pragma once

#include <string>
#include <vector>

#include "driverl/track.hpp"

namespace driverl {

inline constexpr const char* kTrainMap = "train_circle";
inline constexpr const char* kEvalMap = "eval_grand_tour";

/// Circle of the given radius, counter-clockwise, constant half-width.
TrackGeometry make_circle_track(double radius, double half_width, std::size_t points = 400);

/// Multi-corner closed loop used for evaluation.
TrackGeometry make_grand_tour_track();

/// Built-in map ids.
std::vector<std::string> builtin_map_ids();

/// Resolves aliases ("circle", "grand_tour") to a built-in id; empty when unknown.
std::string canonical_map_id(const std::string& name);

/// Built-in map with its raceline (alat_max 10, v_cap 5); built once, thread-safe.
const TrackGeometry& builtin_map(const std::string& id);

/// Built-in map by id/alias, or a track CSV path (raceline generated).
TrackGeometry resolve_map(const std::string& id_or_path);

}  // namespace driverl
