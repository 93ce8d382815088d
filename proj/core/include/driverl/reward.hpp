#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "driverl/mpc_params.hpp"

namespace driverl {

enum class TaskFamily { decision, mpc };

std::string to_string(TaskFamily family);
/// Throws ProtocolError("unknown_family") for anything else.
TaskFamily task_family_from_string(const std::string& name);

inline constexpr double kDriveFloor = -4.0;
inline constexpr double kFormatBlockReward = 0.25;
inline constexpr double kParamReward = 0.25;

/// max((e_mpc - e_llm) / e_mpc, -4); for e_mpc = 0: 0 when e_llm = 0, else -4.
double r_drive(double e_mpc, double e_llm);

/// 0.25 for exactly one well-nested reasoning block plus 0.25 for a
/// well-formed answer block of the family.
double score_format(std::string_view completion, TaskFamily family);

struct ExtractionResult {
  bool ok = false;
  ParamMap params;
  std::string error;
};

/// Parses the last `new_mpc_params = {...}` assignment. Never throws.
ExtractionResult extract_params(std::string_view completion);

/// Content of the last <answer>...</answer> block if it is yes or no.
std::optional<bool> parse_answer(std::string_view completion);

struct RewardBreakdown {
  std::optional<double> r_drive;
  double r_fmt = 0.0;
  std::optional<double> r_param;
  std::optional<double> r_accuracy;
  double total = 0.0;
  bool extraction_failure = false;

  /// Recomputes total from the present components.
  void update_total();
};

/// JSON object with only the present components, in canonical order.
std::string to_json(const RewardBreakdown& reward);

RewardBreakdown score_decision(std::string_view completion, bool adheres);

/// 100 * correct / total; unparseable answers count as wrong.
double score_accuracy(const std::vector<bool>& labels, const std::vector<std::optional<bool>>& answers);

}  // namespace driverl
