#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "driverl/behavior.hpp"
#include "driverl/mpc.hpp"

namespace driverl {

inline constexpr int kDatasetSchemaVersion = 1;
inline constexpr int kHistoryLength = 20;
inline constexpr double kHistorySpacing = 0.1;  ///< [s]
inline constexpr double kWarmupTime = 3.0;      ///< [s]
inline constexpr double kWindowSlot = 2.0;      ///< [s]
inline constexpr double kMaxWindowGap = 0.5;    ///< [s]

/// Controller configuration used to drive the car in one recognisable way.
struct DrivingStyle {
  std::string id;
  MpcParams params;
  ReferenceProfile reference;
  BehaviorKind target = BehaviorKind::raceline;
};

const std::vector<DrivingStyle>& default_styles();

/// Yes/no question about one behaviour.
struct DecisionQuestion {
  std::string text;
  BehaviorSpec behavior;
};

const std::vector<DecisionQuestion>& decision_questions();

struct DecisionInstance {
  int history_id = 0;
  std::string style_id;
  std::string prompt;  ///< question text, verbatim
  int question_index = 0;
  std::vector<BehaviorSample> history;
  bool label = false;
  std::string rule_id;
};

/// 8 styles x per_style windows x every question. Throws ValidationError on
/// bad arguments and Error naming the style when its lap crashes early.
std::vector<DecisionInstance> generate_dataset(const TrackGeometry& track, std::span<const DrivingStyle> styles,
                                               int per_style, std::uint64_t seed,
                                               std::span<const DecisionQuestion> questions = decision_questions());

/// Question that produced an instance (looked up by prompt text).
std::optional<DecisionQuestion> find_question(const std::string& prompt);

/// Header line with the schema version, then one instance per line.
void write_dataset(std::span<const DecisionInstance> instances, std::ostream& out);
std::string serialize_dataset(std::span<const DecisionInstance> instances);
/// Throws ParseError on a bad schema version or malformed line.
std::vector<DecisionInstance> read_dataset(std::istream& in);

/// Accuracy of answers against the stored labels; throws ValidationError on
/// a length mismatch.
double score_accuracy(std::span<const DecisionInstance> instances, const std::vector<std::optional<bool>>& answers);

}  // namespace driverl
