#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "driverl/behavior.hpp"
#include "driverl/dataset.hpp"
#include "driverl/environment.hpp"
#include "driverl/rag.hpp"
#include "driverl/reward.hpp"

namespace driverl {

using ServiceClock = std::chrono::steady_clock;

struct ServiceConfig {
  std::string mpc_map = "train_circle";
  std::string decision_map = "train_circle";
  int decision_per_style = 25;
  std::uint64_t dataset_seed = 7;
  std::size_t max_group = 64;
  std::size_t memories_k = 5;
  std::chrono::seconds task_ttl{3600};
  std::function<ServiceClock::time_point()> clock;  ///< defaults to steady_clock::now
};

struct TaskDescriptor {
  std::string task_id;
  TaskFamily family = TaskFamily::mpc;
  std::string prompt;
  BehaviorSpec behavior;         ///< mpc: target behaviour; decision: the question's behaviour
  std::optional<bool> label;     ///< decision only, never sent to the client
  std::string map_id;
  ServiceClock::time_point created_at;
};

/// Transport-agnostic reply: HTTP-like status and a JSON body.
struct ServiceReply {
  int status = 200;
  std::string body;
};

/// Behaviour from "train:i", "eval:i", a kind name or "velocity:<m/s>".
/// Throws ProtocolError("unknown_behavior").
BehaviorSpec parse_behavior_id(const std::string& id);

/// Task registry and scoring front end shared by the HTTP and socket bindings.
class RolloutService {
 public:
  explicit RolloutService(ServiceConfig config = {}, std::shared_ptr<Environment> env = nullptr);

  TaskDescriptor create_task(TaskFamily family, std::uint64_t seed);
  /// JSON score response; identical requests replay the stored bytes.
  std::string score(const std::string& task_id, const std::vector<std::string>& completions);
  EpisodeResult episode(const ParamMap& params, const std::string& behavior_id, const std::string& map_id);

  /// JSON-in / JSON-out entry points; never throw, errors become
  /// {"error": {"code", "message"}} with a 4xx/5xx status.
  ServiceReply handle_task(const std::string& body);
  ServiceReply handle_score(const std::string& body);
  ServiceReply handle_episode(const std::string& body);
  /// Line protocol: {"op": "task" | "score" | "episode", ...}.
  ServiceReply handle_line(const std::string& line);

  std::optional<TaskDescriptor> find_task(const std::string& task_id) const;
  std::size_t task_count() const;
  Environment& environment() { return *env_; }
  const ServiceConfig& config() const { return config_; }
  /// The decision corpus, generated on first use.
  const std::vector<DecisionInstance>& dataset();

 private:
  struct Entry {
    TaskDescriptor task;
    std::optional<std::vector<std::string>> scored_with;
    std::shared_future<std::string> response;
  };

  ServiceClock::time_point now() const;
  std::string compute_score(const TaskDescriptor& task, const std::vector<std::string>& completions);

  ServiceConfig config_;
  std::shared_ptr<Environment> env_;
  mutable std::mutex mutex_;
  std::map<std::string, Entry> tasks_;
  std::uint64_t next_id_ = 1;
  std::once_flag dataset_once_;
  std::vector<DecisionInstance> dataset_;
};

/// Error body {"error": {"code", "message"}}.
std::string error_body(const std::string& code, const std::string& message);

}  // namespace driverl
