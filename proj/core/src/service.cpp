#include "driverl/service.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>

#include "driverl/error.hpp"
#include "driverl/maps.hpp"
#include "driverl/prompts.hpp"
#include "json.hpp"

namespace driverl {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

int status_for(const std::string& code) {
  if (code == "unknown_task") return 404;
  if (code == "expired_task") return 410;
  if (code == "already_scored") return 409;
  if (code == "invalid_params") return 422;
  if (code == "internal") return 500;
  return 400;
}

ServiceReply error_reply(const std::string& code, const std::string& message) {
  return {status_for(code), error_body(code, message)};
}

template <class Fn>
ServiceReply guarded(Fn&& fn) {
  try {
    return {200, fn()};
  } catch (const ProtocolError& e) {
    return error_reply(e.code(), e.what());
  } catch (const InvalidParameterError& e) {
    return error_reply("invalid_params", e.what());
  } catch (const ValidationError& e) {
    return error_reply("bad_request", e.what());
  } catch (const json::exception& e) {
    return error_reply("bad_request", e.what());
  } catch (const std::exception& e) {
    return error_reply("internal", e.what());
  }
}

json parse_object(const std::string& body) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded()) throw ProtocolError("bad_request", "request is not valid JSON");
  if (!j.is_object()) throw ProtocolError("bad_request", "request must be a JSON object");
  return j;
}

const json& field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw ProtocolError("bad_request", std::string("missing field '") + name + "'");
  return *it;
}

std::string string_field(const json& j, const char* name) {
  const json& f = field(j, name);
  if (!f.is_string()) throw ProtocolError("bad_request", std::string("field '") + name + "' must be a string");
  return f.get<std::string>();
}

}  // namespace

std::string error_body(const std::string& code, const std::string& message) {
  ordered_json j;
  j["error"]["code"] = code;
  j["error"]["message"] = message;
  return j.dump();
}

BehaviorSpec parse_behavior_id(const std::string& id) {
  auto indexed = [&](const std::string& prefix, BehaviorSet set) -> std::optional<BehaviorSpec> {
    if (id.rfind(prefix, 0) != 0) return std::nullopt;
    const std::string rest = id.substr(prefix.size());
    int index = -1;
    if (rest.empty() || rest.find_first_not_of("0123456789") != std::string::npos || rest.size() > 4) {
      throw ProtocolError("unknown_behavior", "bad behaviour index in '" + id + "'");
    }
    index = std::stoi(rest);
    try {
      return sample_behavior(set, index);
    } catch (const ValidationError& e) {
      throw ProtocolError("unknown_behavior", e.what());
    }
  };
  if (auto b = indexed("train:", BehaviorSet::train)) return *b;
  if (auto b = indexed("eval:", BehaviorSet::eval)) return *b;
  if (id.rfind("velocity:", 0) == 0) {
    char* end = nullptr;
    const std::string rest = id.substr(9);
    const double v = std::strtod(rest.c_str(), &end);
    if (rest.empty() || *end != '\0' || !std::isfinite(v)) {
      throw ProtocolError("unknown_behavior", "bad target speed in '" + id + "'");
    }
    return {BehaviorKind::velocity, v, "Drive at " + rest + " m/s"};
  }
  for (const auto& b : train_behaviors()) {
    if (to_string(b.kind) == id) return b;
  }
  throw ProtocolError("unknown_behavior", "unknown behaviour '" + id + "'");
}

RolloutService::RolloutService(ServiceConfig config, std::shared_ptr<Environment> env)
    : config_(std::move(config)), env_(env ? std::move(env) : std::make_shared<Environment>()) {
  if (config_.max_group < 1) throw ValidationError("max_group must be >= 1");
  if (config_.memories_k < 1) throw ValidationError("memories_k must be >= 1");
  config_.mpc_map = env_->resolve_map_id(config_.mpc_map);
  config_.decision_map = env_->resolve_map_id(config_.decision_map);
}

ServiceClock::time_point RolloutService::now() const {
  return config_.clock ? config_.clock() : ServiceClock::now();
}

const std::vector<DecisionInstance>& RolloutService::dataset() {
  std::call_once(dataset_once_, [&] {
    dataset_ = generate_dataset(env_->track(config_.decision_map), default_styles(), config_.decision_per_style,
                                config_.dataset_seed);
  });
  return dataset_;
}

TaskDescriptor RolloutService::create_task(TaskFamily family, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  TaskDescriptor task;
  task.family = family;
  if (family == TaskFamily::mpc) {
    const auto& set = train_behaviors();
    task.behavior = set[rng() % set.size()];
    task.map_id = config_.mpc_map;
    const auto memories = default_mpc_memories().retrieve(task.behavior.prompt, config_.memories_k);
    task.prompt = render_mpc_prompt(task.behavior, memories);
  } else {
    const auto& data = dataset();
    const auto& inst = data[rng() % data.size()];
    const auto question = find_question(inst.prompt);
    if (!question) throw ProtocolError("internal", "dataset question not found");
    task.behavior = question->behavior;
    task.label = inst.label;
    task.map_id = config_.decision_map;
    const auto hints = default_decision_hints().retrieve(inst.prompt, config_.memories_k);
    task.prompt = render_decision_prompt(inst.prompt, inst.history, hints);
  }
  task.created_at = now();
  std::lock_guard lock(mutex_);
  char buf[32];
  std::snprintf(buf, sizeof buf, "task-%08llu", static_cast<unsigned long long>(next_id_++));
  task.task_id = buf;
  tasks_[task.task_id] = Entry{task, std::nullopt, {}};
  return task;
}

std::optional<TaskDescriptor> RolloutService::find_task(const std::string& task_id) const {
  std::lock_guard lock(mutex_);
  auto it = tasks_.find(task_id);
  if (it == tasks_.end()) return std::nullopt;
  return it->second.task;
}

std::size_t RolloutService::task_count() const {
  std::lock_guard lock(mutex_);
  return tasks_.size();
}

std::string RolloutService::compute_score(const TaskDescriptor& task, const std::vector<std::string>& completions) {
  ordered_json out;
  out["rewards"] = ordered_json::array();
  if (task.family == TaskFamily::decision) {
    for (const auto& c : completions) {
      out["rewards"].push_back(ordered_json::parse(to_json(score_decision(c, *task.label))));
    }
    return out.dump();
  }
  ordered_json e_llm = ordered_json::array();
  double e_mpc = 0.0;
  for (const auto& c : completions) {
    const MpcScore s = env_->score_mpc_completion(c, task.behavior, task.map_id);
    out["rewards"].push_back(ordered_json::parse(to_json(s.reward)));
    e_llm.push_back(s.e_llm ? ordered_json(*s.e_llm) : ordered_json());
    e_mpc = s.e_mpc;
  }
  out["e_mpc"] = e_mpc;
  out["e_llm_per_completion"] = std::move(e_llm);
  return out.dump();
}

std::string RolloutService::score(const std::string& task_id, const std::vector<std::string>& completions) {
  if (completions.empty()) throw ProtocolError("empty_group", "completion group is empty");
  if (completions.size() > config_.max_group) {
    throw ProtocolError("group_too_large", "group of " + std::to_string(completions.size()) +
                                               " exceeds the cap of " + std::to_string(config_.max_group));
  }
  std::promise<std::string> promise;
  std::shared_future<std::string> future;
  TaskDescriptor task;
  {
    std::lock_guard lock(mutex_);
    auto it = tasks_.find(task_id);
    if (it == tasks_.end()) throw ProtocolError("unknown_task", "unknown task_id '" + task_id + "'");
    Entry& e = it->second;
    if (e.scored_with) {
      if (*e.scored_with != completions) {
        throw ProtocolError("already_scored", "task '" + task_id + "' was scored with a different group");
      }
      future = e.response;
    } else {
      if (now() - e.task.created_at > config_.task_ttl) {
        throw ProtocolError("expired_task", "task '" + task_id + "' has expired");
      }
      e.scored_with = completions;
      e.response = promise.get_future().share();
      task = e.task;
    }
  }
  if (future.valid()) return future.get();
  try {
    std::string body = compute_score(task, completions);
    promise.set_value(body);
    return body;
  } catch (...) {
    promise.set_exception(std::current_exception());
    std::lock_guard lock(mutex_);
    auto& e = tasks_.at(task_id);
    e.scored_with.reset();
    e.response = {};
    throw;
  }
}

EpisodeResult RolloutService::episode(const ParamMap& params, const std::string& behavior_id,
                                      const std::string& map_id) {
  const BehaviorSpec behavior = parse_behavior_id(behavior_id);
  std::string id;
  try {
    id = env_->resolve_map_id(map_id);
  } catch (const ValidationError& e) {
    throw ProtocolError("unknown_map", e.what());
  }
  return env_->run_episode(params, behavior, id);
}

ServiceReply RolloutService::handle_task(const std::string& body) {
  return guarded([&] {
    const json req = parse_object(body);
    const TaskFamily family = task_family_from_string(string_field(req, "family"));
    std::uint64_t seed = 0;
    if (auto it = req.find("seed"); it != req.end()) {
      if (!it->is_number_integer()) throw ProtocolError("bad_request", "field 'seed' must be an integer");
      seed = it->is_number_unsigned() ? it->get<std::uint64_t>()
                                      : static_cast<std::uint64_t>(it->get<std::int64_t>());
    }
    const TaskDescriptor task = create_task(family, seed);
    ordered_json out;
    out["task_id"] = task.task_id;
    out["family"] = to_string(task.family);
    out["prompt"] = task.prompt;
    return out.dump();
  });
}

ServiceReply RolloutService::handle_score(const std::string& body) {
  return guarded([&] {
    const json req = parse_object(body);
    const std::string task_id = string_field(req, "task_id");
    const json& list = field(req, "completions");
    if (!list.is_array()) throw ProtocolError("bad_request", "field 'completions' must be an array");
    std::vector<std::string> completions;
    for (const auto& c : list) {
      if (!c.is_string()) throw ProtocolError("bad_request", "completions must be strings");
      completions.push_back(c.get<std::string>());
    }
    return score(task_id, completions);
  });
}

ServiceReply RolloutService::handle_episode(const std::string& body) {
  return guarded([&] {
    const json req = parse_object(body);
    const json& p = field(req, "params");
    if (!p.is_object()) throw ProtocolError("bad_request", "field 'params' must be an object");
    ParamMap params;
    for (const auto& [k, v] : p.items()) {
      if (!v.is_number()) throw InvalidParameterError("parameter '" + k + "' is not a number");
      params[k] = v.get<double>();
    }
    const EpisodeResult r = episode(params, string_field(req, "behavior_id"), string_field(req, "map_id"));
    ordered_json out;
    out["e_llm"] = r.e_llm;
    out["e_mpc"] = r.e_mpc;
    out["r_drive"] = r.r_drive;
    out["terminated_by"] = to_string(r.terminated_by);
    out["lap_time"] = r.lap_time;
    out["trace_ref"] = r.trace_ref;
    if (!r.fault.empty()) out["fault"] = r.fault;
    return out.dump();
  });
}

ServiceReply RolloutService::handle_line(const std::string& line) {
  json req = json::parse(line, nullptr, false);
  if (req.is_discarded() || !req.is_object()) return error_reply("bad_request", "request is not a JSON object");
  auto it = req.find("op");
  if (it == req.end() || !it->is_string()) return error_reply("bad_request", "missing field 'op'");
  const std::string op = it->get<std::string>();
  req.erase("op");
  if (op == "task") return handle_task(req.dump());
  if (op == "score") return handle_score(req.dump());
  if (op == "episode") return handle_episode(req.dump());
  return error_reply("unknown_op", "unknown op '" + op + "'");
}

}  // namespace driverl
