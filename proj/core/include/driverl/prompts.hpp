#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "driverl/behavior.hpp"
#include "driverl/rag.hpp"

namespace driverl {

inline constexpr const char* kReturnFormat =
    "Return format:\nnew_mpc_params = {\n    param1: new_value1,\n    param2: new_value2,\n    ...\n}";

/// Plain-text summary of the optimization problem and its tunable parameters.
std::string mpc_formulation_text();

/// Instruction, formulation, retrieved memories and the return format.
std::string render_mpc_prompt(const BehaviorSpec& behavior, std::span<const MemoryEntry> memories);

/// Column names of the state history table, in order.
const std::vector<std::string>& history_columns();

/// Question, state history table, retrieved hints and the answer format.
std::string render_decision_prompt(std::string_view question, std::span<const BehaviorSample> history,
                                   std::span<const MemoryEntry> hints);

/// Question and state history recovered from a rendered decision prompt.
struct ParsedDecisionPrompt {
  std::string question;
  std::vector<BehaviorSample> history;
};

std::optional<ParsedDecisionPrompt> parse_decision_prompt(std::string_view prompt);

/// The behaviour instruction quoted in a rendered mpc prompt.
std::optional<std::string> parse_mpc_instruction(std::string_view prompt);

/// Rounds every history field to the table precision (4 decimals).
BehaviorSample round_for_table(const BehaviorSample& sample);

}  // namespace driverl
