#include "driverl/dataset.hpp"

#include <cmath>
#include <future>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "driverl/error.hpp"
#include "driverl/prompts.hpp"
#include "driverl/reward.hpp"
#include "json.hpp"

namespace driverl {

namespace {

MpcParams with(std::initializer_list<std::pair<const char*, double>> overrides) {
  ParamMap raw;
  for (const auto& [k, v] : overrides) raw[k] = v;
  return validate_params(raw);
}

int steps(double seconds) { return static_cast<int>(std::lround(seconds / kSimDt)); }

struct WindowPlan {
  std::vector<int> starts;  ///< first sim step of every window
  int total_steps = 0;
};

WindowPlan plan_windows(int per_style, std::uint64_t seed, std::size_t style_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(style_index)};
  std::mt19937_64 rng(seq);
  std::uniform_int_distribution<int> gap(0, static_cast<int>(std::lround(kMaxWindowGap / kHistorySpacing)));
  WindowPlan plan;
  int at = steps(kWarmupTime);
  for (int w = 0; w < per_style; ++w) {
    at += steps(gap(rng) * kHistorySpacing);
    plan.starts.push_back(at);
    at += steps(kWindowSlot);
  }
  plan.total_steps = at;
  return plan;
}

std::vector<std::vector<BehaviorSample>> style_windows(const TrackGeometry& track, const DrivingStyle& style,
                                                       const WindowPlan& plan) {
  MpcController controller(track, style.params, style.reference);
  LapLimits limits;
  limits.stop_on_lap = false;
  limits.max_time = plan.total_steps * kSimDt;
  const LapTrace trace = run_lap(track, controller, initial_state(track), limits);
  if (trace.terminated_by == Termination::crash) {
    throw Error("style '" + style.id + "' crashed at t = " + std::to_string(trace.lap_time) +
                (trace.fault.empty() ? "" : " (" + trace.fault + ")"));
  }
  const auto samples = behavior_samples(trace, track);
  const int stride = steps(kHistorySpacing);
  std::vector<std::vector<BehaviorSample>> windows;
  for (int start : plan.starts) {
    const std::size_t last = static_cast<std::size_t>(start + stride * (kHistoryLength - 1));
    if (last >= samples.size()) {
      throw Error("style '" + style.id + "' produced too few samples for its windows");
    }
    std::vector<BehaviorSample> w;
    for (int i = 0; i < kHistoryLength; ++i) {
      w.push_back(round_for_table(samples[static_cast<std::size_t>(start + stride * i)]));
    }
    windows.push_back(std::move(w));
  }
  return windows;
}

nlohmann::ordered_json sample_json(const BehaviorSample& b) {
  nlohmann::ordered_json j;
  j["t"] = b.t;
  j["s"] = b.s;
  j["d"] = b.n_center;
  j["d_raceline"] = b.n_raceline;
  j["v"] = b.v;
  j["a"] = b.a;
  j["a_lat"] = b.a_lat;
  j["wall_left"] = b.wall_left;
  j["wall_right"] = b.wall_right;
  return j;
}

BehaviorSample sample_from_json(const nlohmann::json& j) {
  BehaviorSample b;
  b.t = j.at("t").get<double>();
  b.s = j.at("s").get<double>();
  b.n_center = j.at("d").get<double>();
  b.n_raceline = j.at("d_raceline").get<double>();
  b.v = j.at("v").get<double>();
  b.a = j.at("a").get<double>();
  b.a_lat = j.at("a_lat").get<double>();
  b.wall_left = j.at("wall_left").get<double>();
  b.wall_right = j.at("wall_right").get<double>();
  return b;
}

}  // namespace

const std::vector<DrivingStyle>& default_styles() {
  static const std::vector<DrivingStyle> styles = [] {
    std::vector<DrivingStyle> s;
    s.push_back({"raceline", with({{"track_safety_margin", 0.1}}), ReferenceProfile::raceline(),
                 BehaviorKind::raceline});
    s.push_back({"centerline", with({{"track_safety_margin", 1.45}}), ReferenceProfile::raceline(),
                 BehaviorKind::centerline});
    s.push_back({"velocity", with({{"v_min", 1.9}, {"v_max", 2.0}}), ReferenceProfile::raceline(),
                 BehaviorKind::velocity});
    s.push_back({"reversing", with({{"v_min", -2.0}, {"v_max", -1.0}}), ReferenceProfile::raceline(),
                 BehaviorKind::reversing});
    s.push_back({"smooth", with({{"v_max", 1.5}, {"qac", 5.0}, {"qddelta", 20.0}}), ReferenceProfile::raceline(),
                 BehaviorKind::smooth});
    s.push_back({"stopped", with({{"v_min", 0.0}, {"v_max", 0.05}}), ReferenceProfile::raceline(),
                 BehaviorKind::stopped});
    s.push_back({"oscillatory", with({{"qalpha", 0.0}, {"track_safety_margin", 0.1}, {"v_max", 3.0}}),
                 ReferenceProfile::sine(0.4, 5.0), BehaviorKind::oscillating});
    s.push_back({"wall", with({{"track_safety_margin", 0.1}}), ReferenceProfile::left_wall(0.25),
                 BehaviorKind::wall});
    return s;
  }();
  return styles;
}

const std::vector<DecisionQuestion>& decision_questions() {
  static const std::vector<DecisionQuestion> q = {
      {"Is the car driving on the racing line?", {BehaviorKind::raceline, 0.0, "Drive on the racing line"}},
      {"Is the car driving on the centerline?", {BehaviorKind::centerline, 0.0, "Drive on the centerline"}},
      {"Is the car driving at 2 m/s?", {BehaviorKind::velocity, 2.0, "Drive at 2 m/s"}},
      {"Is the car driving backwards?", {BehaviorKind::reversing, 0.0, "Reverse the car"}},
      {"Is the car driving smoothly?", {BehaviorKind::smooth, 0.0, "Drive smoothly"}},
      {"Is the car standing still?", {BehaviorKind::stopped, 0.0, "Stop the car"}},
      {"Is the car weaving from side to side?", {BehaviorKind::oscillating, 0.0, "Weave across the track"}},
      {"Is the car driving close to a wall?", {BehaviorKind::wall, 0.0, "Drive close to the wall"}},
  };
  return q;
}

std::optional<DecisionQuestion> find_question(const std::string& prompt) {
  for (const auto& q : decision_questions()) {
    if (q.text == prompt) return q;
  }
  return std::nullopt;
}

std::vector<DecisionInstance> generate_dataset(const TrackGeometry& track, std::span<const DrivingStyle> styles,
                                               int per_style, std::uint64_t seed,
                                               std::span<const DecisionQuestion> questions) {
  if (styles.empty()) throw ValidationError("generate_dataset: no driving styles");
  if (per_style < 1) throw ValidationError("generate_dataset: per_style must be >= 1");
  if (questions.empty()) throw ValidationError("generate_dataset: no questions");

  std::vector<std::future<std::vector<std::vector<BehaviorSample>>>> jobs;
  for (std::size_t i = 0; i < styles.size(); ++i) {
    jobs.push_back(std::async(std::launch::async, [&, i] {
      return style_windows(track, styles[i], plan_windows(per_style, seed, i));
    }));
  }

  std::vector<DecisionInstance> out;
  int history_id = 0;
  for (std::size_t i = 0; i < styles.size(); ++i) {
    for (const auto& window : jobs[i].get()) {
      for (std::size_t q = 0; q < questions.size(); ++q) {
        const auto label = label_adherence(window, questions[q].behavior);
        DecisionInstance inst;
        inst.history_id = history_id;
        inst.style_id = styles[i].id;
        inst.prompt = questions[q].text;
        inst.question_index = static_cast<int>(q);
        inst.history = window;
        inst.label = label.adheres;
        inst.rule_id = label.rule_id;
        out.push_back(std::move(inst));
      }
      ++history_id;
    }
  }
  return out;
}

void write_dataset(std::span<const DecisionInstance> instances, std::ostream& out) {
  nlohmann::ordered_json header;
  header["schema_version"] = kDatasetSchemaVersion;
  header["kind"] = "decision_dataset";
  header["history_length"] = kHistoryLength;
  header["history_spacing_s"] = kHistorySpacing;
  header["instances"] = instances.size();
  out << header.dump() << "\n";
  for (const auto& inst : instances) {
    nlohmann::ordered_json j;
    j["history_id"] = inst.history_id;
    j["style_id"] = inst.style_id;
    j["prompt"] = inst.prompt;
    j["question_index"] = inst.question_index;
    j["label"] = inst.label;
    j["rule_id"] = inst.rule_id;
    auto& h = j["history"] = nlohmann::ordered_json::array();
    for (const auto& b : inst.history) h.push_back(sample_json(b));
    out << j.dump() << "\n";
  }
}

std::string serialize_dataset(std::span<const DecisionInstance> instances) {
  std::ostringstream out;
  write_dataset(instances, out);
  return out.str();
}

std::vector<DecisionInstance> read_dataset(std::istream& in) {
  std::string line;
  int line_no = 1;
  if (!std::getline(in, line)) throw ParseError("dataset: missing header", 1);
  std::size_t expected = 0;
  try {
    const auto header = nlohmann::json::parse(line);
    if (header.at("schema_version").get<int>() != kDatasetSchemaVersion) {
      throw ParseError("dataset: unsupported schema_version", 1);
    }
    expected = header.at("instances").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("dataset header: ") + e.what(), 1);
  }
  std::vector<DecisionInstance> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      DecisionInstance inst;
      inst.history_id = j.at("history_id").get<int>();
      inst.style_id = j.at("style_id").get<std::string>();
      inst.prompt = j.at("prompt").get<std::string>();
      inst.question_index = j.at("question_index").get<int>();
      inst.label = j.at("label").get<bool>();
      inst.rule_id = j.at("rule_id").get<std::string>();
      for (const auto& b : j.at("history")) inst.history.push_back(sample_from_json(b));
      out.push_back(std::move(inst));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("dataset: ") + e.what(), line_no);
    }
  }
  if (out.size() != expected) {
    throw ParseError("dataset: header announces " + std::to_string(expected) + " instances, found " +
                         std::to_string(out.size()),
                     line_no);
  }
  return out;
}

double score_accuracy(std::span<const DecisionInstance> instances, const std::vector<std::optional<bool>>& answers) {
  if (instances.size() != answers.size()) {
    throw ValidationError("score_accuracy: " + std::to_string(instances.size()) + " instances but " +
                          std::to_string(answers.size()) + " answers");
  }
  std::vector<bool> labels;
  for (const auto& i : instances) labels.push_back(i.label);
  return driverl::score_accuracy(labels, answers);
}

}  // namespace driverl
