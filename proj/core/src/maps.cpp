#include "driverl/maps.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <mutex>
#include <numbers>

#include "driverl/error.hpp"

namespace driverl {

namespace {

constexpr double kDefaultAlatMax = 10.0;
constexpr double kDefaultVcap = 5.0;

}  // namespace

TrackGeometry make_circle_track(double radius, double half_width, std::size_t points) {
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < points; ++i) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(points);
    pts.emplace_back(radius * std::cos(th), radius * std::sin(th));
  }
  std::vector<double> w(points, half_width);
  return make_track(pts, w, w);
}

TrackGeometry make_grand_tour_track() {
  constexpr std::size_t kPoints = 720;
  constexpr double r0 = 12.0;
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < kPoints; ++i) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(kPoints);
    const double r = r0 * (1.0 + 0.22 * std::cos(2.0 * th) + 0.1 * std::sin(3.0 * th) +
                           0.04 * std::cos(5.0 * th));
    pts.emplace_back(r * std::cos(th), r * std::sin(th));
  }
  std::vector<double> w(kPoints, 1.1);
  return make_track(pts, w, w);
}

std::vector<std::string> builtin_map_ids() { return {kTrainMap, kEvalMap}; }

std::string canonical_map_id(const std::string& name) {
  if (name == kTrainMap || name == "circle") return kTrainMap;
  if (name == kEvalMap || name == "grand_tour") return kEvalMap;
  return {};
}

const TrackGeometry& builtin_map(const std::string& id) {
  static std::mutex mutex;
  static std::map<std::string, TrackGeometry> cache;
  const std::string key = canonical_map_id(id);
  if (key.empty()) throw ValidationError("unknown map '" + id + "'");
  std::lock_guard lock(mutex);
  auto it = cache.find(key);
  if (it == cache.end()) {
    TrackGeometry base = key == kTrainMap ? make_circle_track(8.0, 1.6) : make_grand_tour_track();
    it = cache.emplace(key, generate_raceline(base, kDefaultAlatMax, kDefaultVcap)).first;
  }
  return it->second;
}

TrackGeometry resolve_map(const std::string& id_or_path) {
  if (!canonical_map_id(id_or_path).empty()) return builtin_map(id_or_path);
  if (!std::filesystem::exists(id_or_path)) {
    throw ValidationError("unknown map '" + id_or_path + "' (not a built-in id or an existing file)");
  }
  return generate_raceline(load_track_file(id_or_path), kDefaultAlatMax, kDefaultVcap);
}

}  // namespace driverl
