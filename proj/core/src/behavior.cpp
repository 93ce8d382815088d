#include "driverl/behavior.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "driverl/error.hpp"
#include "json.hpp"

namespace driverl {

std::string to_string(BehaviorKind kind) {
  switch (kind) {
    case BehaviorKind::centerline:
      return "centerline";
    case BehaviorKind::velocity:
      return "velocity";
    case BehaviorKind::reversing:
      return "reversing";
    case BehaviorKind::smooth:
      return "smooth";
    case BehaviorKind::raceline:
      return "raceline";
    case BehaviorKind::stopped:
      return "stopped";
    case BehaviorKind::oscillating:
      return "oscillating";
    case BehaviorKind::wall:
      return "wall";
  }
  return "centerline";
}

BehaviorKind behavior_kind_from_string(const std::string& name) {
  for (auto k : {BehaviorKind::centerline, BehaviorKind::velocity, BehaviorKind::reversing,
                 BehaviorKind::smooth, BehaviorKind::raceline, BehaviorKind::stopped,
                 BehaviorKind::oscillating, BehaviorKind::wall}) {
    if (to_string(k) == name) return k;
  }
  throw ValidationError("unknown behaviour kind '" + name + "'");
}

std::string BehaviorSpec::metric_id() const {
  switch (kind) {
    case BehaviorKind::centerline:
      return "E_C";
    case BehaviorKind::velocity:
      return "E_V";
    case BehaviorKind::reversing:
      return "E_R";
    case BehaviorKind::smooth:
      return "E_S";
    default:
      return {};
  }
}

const std::vector<BehaviorSpec>& train_behaviors() {
  static const std::vector<BehaviorSpec> set = {
      {BehaviorKind::centerline, 0.0, "Drive on the centerline"},
      {BehaviorKind::velocity, 1.83, "Drive at 1.83 m/s as closely as possible"},
      {BehaviorKind::reversing, 0.0, "Reverse the car"},
      {BehaviorKind::smooth, 0.0, "Drive smoothly"},
  };
  return set;
}

const std::vector<BehaviorSpec>& eval_behaviors() {
  static const std::vector<BehaviorSpec> set = {
      {BehaviorKind::centerline, 0.0, "Stay directly on the middle of the track"},
      {BehaviorKind::centerline, 0.0, "Follow the track by staying aligned with the middle of the track"},
      {BehaviorKind::centerline, 0.0, "Drive away as far as possible from the walls"},
      {BehaviorKind::centerline, 0.0, "Ensure that the distance to the left and right wall remain the same"},
      {BehaviorKind::centerline, 0.0, "Drive on the centerline"},
      {BehaviorKind::velocity, 3.5, "Set the driving speed to 3.5 m/s"},
      {BehaviorKind::velocity, 2.2, "Target a driving speed of 2.2 meters per second"},
      {BehaviorKind::velocity, 1.25, "Move at a constant speed of 1.25 m/s"},
      {BehaviorKind::velocity, 2.9, "Travel at 2.9 meters per second"},
      {BehaviorKind::velocity, 4.5, "Adjsut the speed to exactly 4.5 m/s"},
      {BehaviorKind::reversing, 0.0, "Slowly back the vehicle up"},
      {BehaviorKind::reversing, 0.0, "Reverse the vehicle"},
      {BehaviorKind::reversing, 0.0, "Switch to reverse and drive backwards"},
      {BehaviorKind::reversing, 0.0, "Retreat by reversing the car"},
      {BehaviorKind::reversing, 0.0, "Drive the car backwards"},
      {BehaviorKind::smooth, 0.0, "Drive in a fluid and controlled manner"},
      {BehaviorKind::smooth, 0.0, "Maintain low jerk and high smoothness in driving behavior"},
      {BehaviorKind::smooth, 0.0, "Focus on smooth driving"},
      {BehaviorKind::smooth, 0.0, "Drive smoothly"},
      {BehaviorKind::smooth, 0.0, "Reduce lateral acceleration"},
  };
  return set;
}

BehaviorSpec sample_behavior(BehaviorSet set, int index, std::uint64_t) {
  const auto& list = set == BehaviorSet::train ? train_behaviors() : eval_behaviors();
  if (index < 0 || index >= static_cast<int>(list.size())) {
    throw ValidationError("behaviour index " + std::to_string(index) + " out of range [0, " +
                          std::to_string(list.size()) + ")");
  }
  return list[static_cast<std::size_t>(index)];
}

BehaviorSpec random_velocity_behavior(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(1.0, 4.5);
  const double v = std::round(dist(rng) * 100.0) / 100.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "Drive at %.2f m/s as closely as possible", v);
  return {BehaviorKind::velocity, v, buf};
}

std::string behavior_sets_json() {
  auto dump = [](const std::vector<BehaviorSpec>& set) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& b : set) {
      nlohmann::ordered_json j;
      j["kind"] = to_string(b.kind);
      j["prompt"] = b.prompt;
      j["v_ref"] = b.kind == BehaviorKind::velocity ? nlohmann::ordered_json(b.v_ref)
                                                    : nlohmann::ordered_json();
      j["metric_id"] = b.metric_id();
      arr.push_back(j);
    }
    return arr;
  };
  nlohmann::ordered_json doc;
  doc["train"] = dump(train_behaviors());
  doc["eval"] = dump(eval_behaviors());
  return doc.dump(2) + "\n";
}

}  // namespace driverl
