#include "driverl/policy.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <regex>

#include "driverl/dataset.hpp"
#include "driverl/error.hpp"
#include "driverl/prompts.hpp"
#include "driverl/reward.hpp"
#include "driverl/transport.hpp"
#include "json.hpp"

namespace driverl {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool has_any(const std::string& text, std::initializer_list<const char*> words) {
  return std::any_of(words.begin(), words.end(), [&](const char* w) { return text.find(w) != std::string::npos; });
}

class MockDefaultPolicy : public CompletionPolicy {
 public:
  std::string complete(const std::string&) override {
    return format_mpc_completion(default_params(), "The default parameters already drive well.");
  }
  std::string name() const override { return "mock-default"; }
};

class MockGarbagePolicy : public CompletionPolicy {
 public:
  std::string complete(const std::string&) override { return "I would rather not change anything today."; }
  std::string name() const override { return "mock-garbage"; }
};

class OracleMpcPolicy : public CompletionPolicy {
 public:
  explicit OracleMpcPolicy(const TrackGeometry& track) : track_(track) {}
  std::string complete(const std::string& prompt) override {
    const auto instruction = parse_mpc_instruction(prompt);
    if (!instruction) throw PolicyError("oracle: prompt carries no instruction");
    const BehaviorSpec b = infer_behavior(*instruction);
    return format_mpc_completion(oracle_params(b, track_), "Target behaviour: " + to_string(b.kind) + ".");
  }
  std::string name() const override { return "oracle"; }

 private:
  const TrackGeometry& track_;
};

class ConstantAnswerPolicy : public CompletionPolicy {
 public:
  explicit ConstantAnswerPolicy(bool yes) : yes_(yes) {}
  std::string complete(const std::string&) override {
    return format_decision_completion(yes_, "Answering the same for every history.");
  }
  std::string name() const override { return yes_ ? "mock-yes" : "mock-no"; }

 private:
  bool yes_;
};

class OracleDecisionPolicy : public CompletionPolicy {
 public:
  std::string complete(const std::string& prompt) override {
    const auto parsed = parse_decision_prompt(prompt);
    if (!parsed) throw PolicyError("oracle: cannot read the state history");
    const auto question = find_question(parsed->question);
    if (!question) throw PolicyError("oracle: unknown question '" + parsed->question + "'");
    const auto label = label_adherence(parsed->history, question->behavior);
    return format_decision_completion(label.adheres,
                                      label.rule_id + " evidence " + std::to_string(label.evidence));
  }
  std::string name() const override { return "oracle"; }
};

class HttpPolicy : public CompletionPolicy {
 public:
  explicit HttpPolicy(std::string url) : url_(std::move(url)) {
    const auto slash = url_.find('/', url_.find("://") + 3);
    base_ = slash == std::string::npos ? url_ : url_.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : url_.substr(slash);
  }
  std::string complete(const std::string& prompt) override {
    nlohmann::json req;
    req["prompt"] = prompt;
    const HttpResponse res = http_post(base_, path_, req.dump());
    if (res.status != 200) throw PolicyError("policy endpoint returned HTTP " + std::to_string(res.status));
    const auto j = nlohmann::json::parse(res.body, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("completion") || !j["completion"].is_string()) {
      throw PolicyError("policy endpoint reply lacks a string 'completion'");
    }
    return j["completion"].get<std::string>();
  }
  std::string name() const override { return url_; }

 private:
  std::string url_, base_, path_;
};

}  // namespace

std::string format_mpc_completion(const MpcParams& params, const std::string& reasoning) {
  std::string out = "<reasoning>" + reasoning + "</reasoning>\nnew_mpc_params = {\n";
  const ParamMap m = to_map(params);
  bool first = true;
  for (const auto& d : param_schema()) {
    if (!first) out += ",\n";
    first = false;
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, m.at(d.name));
    out += "    " + d.name + ": " + std::string(buf, r.ptr);
  }
  return out + "\n}";
}

std::string format_decision_completion(bool yes, const std::string& reasoning) {
  return "<reasoning>" + reasoning + "</reasoning>\n<answer>" + (yes ? "yes" : "no") + "</answer>";
}

BehaviorSpec infer_behavior(const std::string& instruction) {
  const std::string t = lower(instruction);
  if (has_any(t, {"revers", "backward", "back the", "back up", "retreat"})) {
    return {BehaviorKind::reversing, 0.0, instruction};
  }
  static const std::regex speed(R"(([0-9]+(?:\.[0-9]+)?)\s*(?:m/s|meters? per second))");
  std::smatch m;
  if (std::regex_search(t, m, speed)) return {BehaviorKind::velocity, std::stod(m[1].str()), instruction};
  if (has_any(t, {"smooth", "fluid", "jerk", "lateral acceleration", "comfort"})) {
    return {BehaviorKind::smooth, 0.0, instruction};
  }
  return {BehaviorKind::centerline, 0.0, instruction};
}

MpcParams oracle_params(const BehaviorSpec& behavior, const TrackGeometry& track) {
  MpcParams p = default_params();
  switch (behavior.kind) {
    case BehaviorKind::centerline: {
      double half = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < track.width_left.size(); ++i) {
        half = std::min({half, track.width_left[i], track.width_right[i]});
      }
      p.track_safety_margin = std::max(0.0, half - 0.1);
      break;
    }
    case BehaviorKind::velocity:
      p.v_max = behavior.v_ref;
      p.v_min = behavior.v_ref - 0.1;
      break;
    case BehaviorKind::reversing:
      p.v_min = -2.0;
      p.v_max = -1.0;
      break;
    case BehaviorKind::smooth:
      p.v_max = 2.0;
      p.qac = 5.0;
      p.qddelta = 20.0;
      break;
    default:
      break;
  }
  return p;
}

std::unique_ptr<CompletionPolicy> make_mpc_policy(const std::string& name, const TrackGeometry& track) {
  if (name == "mock-default") return std::make_unique<MockDefaultPolicy>();
  if (name == "mock-garbage") return std::make_unique<MockGarbagePolicy>();
  if (name == "oracle") return std::make_unique<OracleMpcPolicy>(track);
  if (name.rfind("http://", 0) == 0) return std::make_unique<HttpPolicy>(name);
  throw ValidationError("unknown control policy '" + name + "'");
}

std::unique_ptr<CompletionPolicy> make_decision_policy(const std::string& name) {
  if (name == "mock-yes") return std::make_unique<ConstantAnswerPolicy>(true);
  if (name == "mock-no") return std::make_unique<ConstantAnswerPolicy>(false);
  if (name == "oracle") return std::make_unique<OracleDecisionPolicy>();
  if (name.rfind("http://", 0) == 0) return std::make_unique<HttpPolicy>(name);
  throw ValidationError("unknown decision policy '" + name + "'");
}

}  // namespace driverl
