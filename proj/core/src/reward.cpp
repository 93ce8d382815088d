#include "driverl/reward.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "driverl/error.hpp"
#include "json.hpp"

namespace driverl {

namespace detail {
bool has_wellformed_assignment(std::string_view text, std::size_t from);
}

namespace {

constexpr std::string_view kReasonOpen = "<reasoning>";
constexpr std::string_view kReasonClose = "</reasoning>";
constexpr std::string_view kAnswerOpen = "<answer>";
constexpr std::string_view kAnswerClose = "</answer>";

std::size_t count(std::string_view text, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string_view::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

// End offset of the single well-nested reasoning block, npos otherwise.
std::size_t reasoning_block_end(std::string_view text) {
  if (count(text, kReasonOpen) != 1 || count(text, kReasonClose) != 1) return std::string_view::npos;
  const auto open = text.find(kReasonOpen);
  const auto close = text.find(kReasonClose);
  if (close < open + kReasonOpen.size()) return std::string_view::npos;
  return close + kReasonClose.size();
}

std::optional<bool> yes_no(std::string_view body) {
  std::string s;
  for (char c : body) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (s == "yes") return true;
  if (s == "no") return false;
  return std::nullopt;
}

}  // namespace

std::string to_string(TaskFamily family) { return family == TaskFamily::mpc ? "mpc" : "decision"; }

TaskFamily task_family_from_string(const std::string& name) {
  if (name == "mpc") return TaskFamily::mpc;
  if (name == "decision") return TaskFamily::decision;
  throw ProtocolError("unknown_family", "unknown task family '" + name + "'");
}

double r_drive(double e_mpc, double e_llm) {
  if (e_mpc == 0.0) return e_llm == 0.0 ? 0.0 : kDriveFloor;
  return std::max((e_mpc - e_llm) / e_mpc, kDriveFloor);
}

double score_format(std::string_view completion, TaskFamily family) {
  double score = 0.0;
  const std::size_t reason_end = reasoning_block_end(completion);
  const bool has_reasoning = reason_end != std::string_view::npos;
  if (has_reasoning) score += kFormatBlockReward;
  if (family == TaskFamily::decision) {
    if (count(completion, kAnswerOpen) == 1 && count(completion, kAnswerClose) == 1) {
      const auto open = completion.find(kAnswerOpen);
      const auto close = completion.find(kAnswerClose);
      if (close >= open + kAnswerOpen.size() &&
          yes_no(completion.substr(open + kAnswerOpen.size(), close - open - kAnswerOpen.size()))) {
        score += kFormatBlockReward;
      }
    }
  } else {
    if (detail::has_wellformed_assignment(completion, has_reasoning ? reason_end : 0)) {
      score += kFormatBlockReward;
    }
  }
  return score;
}

std::optional<bool> parse_answer(std::string_view completion) {
  const auto close = completion.rfind(kAnswerClose);
  if (close == std::string_view::npos) return std::nullopt;
  const auto open = completion.rfind(kAnswerOpen, close);
  if (open == std::string_view::npos) return std::nullopt;
  return yes_no(completion.substr(open + kAnswerOpen.size(), close - open - kAnswerOpen.size()));
}

void RewardBreakdown::update_total() {
  total = r_fmt + r_drive.value_or(0.0) + r_param.value_or(0.0) + r_accuracy.value_or(0.0);
}

std::string to_json(const RewardBreakdown& reward) {
  nlohmann::ordered_json j;
  if (reward.r_drive) j["r_drive"] = *reward.r_drive;
  j["r_fmt"] = reward.r_fmt;
  if (reward.r_param) j["r_param"] = *reward.r_param;
  if (reward.r_accuracy) j["r_accuracy"] = *reward.r_accuracy;
  j["total"] = reward.total;
  j["extraction_failure"] = reward.extraction_failure;
  return j.dump();
}

RewardBreakdown score_decision(std::string_view completion, bool adheres) {
  RewardBreakdown r;
  r.r_fmt = score_format(completion, TaskFamily::decision);
  const auto answer = parse_answer(completion);
  r.extraction_failure = !answer.has_value();
  r.r_accuracy = answer && *answer == adheres ? 1.0 : 0.0;
  r.update_total();
  return r;
}

double score_accuracy(const std::vector<bool>& labels, const std::vector<std::optional<bool>>& answers) {
  if (labels.size() != answers.size()) {
    throw ValidationError("labels and answers differ in length");
  }
  if (labels.empty()) throw ValidationError("no instances to score");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (answers[i] && *answers[i] == labels[i]) ++correct;
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(labels.size());
}

}  // namespace driverl
