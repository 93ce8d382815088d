#include "driverl/prompts.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "driverl/mpc_params.hpp"

namespace driverl {

namespace {

constexpr std::string_view kInstructionPrefix =
    "Adapt the tuneable parameters of the MPC so that the car achieves the following: \"";
constexpr std::string_view kQuestionPrefix = "Question: \"";
constexpr std::string_view kHistoryHeader = "State history (20 samples, 0.1 s apart):";

std::string fmt_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  std::string s = buf;
  if (s == "-0.0000") s = "0.0000";
  return s;
}

double round4(double v) {
  const double r = std::round(v * 1e4) / 1e4;
  return r == 0.0 ? 0.0 : r;
}

}  // namespace

std::string mpc_formulation_text() {
  std::ostringstream out;
  out << "minimize over the horizon sum_i qn*n_i^2 + qv*(v_i - v_ref)^2 + qalpha*dphi_i^2 + "
         "qac*a_i^2 + qddelta*ddelta_i^2, where n is the lateral offset to the racing line, dphi "
         "the heading error to the racing line, a the longitudinal acceleration and ddelta the "
         "steering rate; subject to v_min <= v_i <= v_max, a_min <= a_i <= a_max, the car staying "
         "inside the track boundaries shrunk by track_safety_margin on both sides, and "
         "|v_i^2 * tan(delta_i) / L| <= alat_max. v_ref follows the racing line speed profile "
         "clipped to [v_min, v_max]. Tunable parameters with their defaults: ";
  bool first = true;
  for (const auto& d : param_schema()) {
    if (!d.tunable) continue;
    if (!first) out << ", ";
    first = false;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", d.default_value);
    out << d.name << " = " << buf;
    if (d.unit != "-") out << " " << d.unit;
  }
  return out.str();
}

std::string render_mpc_prompt(const BehaviorSpec& behavior, std::span<const MemoryEntry> memories) {
  std::ostringstream out;
  out << kInstructionPrefix << behavior.prompt << "\".\n";
  out << "This is the MPC formulation: " << mpc_formulation_text() << ".\n";
  out << "Here are some memories that might help you:\n";
  for (const auto& m : memories) out << m.render() << "\n\n";
  out << kReturnFormat;
  return out.str();
}

const std::vector<std::string>& history_columns() {
  static const std::vector<std::string> cols = {"t[s]",    "s[m]",       "d[m]",     "d_raceline[m]",
                                                "v[m/s]",  "a[m/s^2]",   "a_lat[m/s^2]",
                                                "wall_left[m]", "wall_right[m]"};
  return cols;
}

BehaviorSample round_for_table(const BehaviorSample& b) {
  BehaviorSample r;
  r.t = round4(b.t);
  r.s = round4(b.s);
  r.n_center = round4(b.n_center);
  r.n_raceline = round4(b.n_raceline);
  r.v = round4(b.v);
  r.a = round4(b.a);
  r.a_lat = round4(b.a_lat);
  r.wall_left = round4(b.wall_left);
  r.wall_right = round4(b.wall_right);
  return r;
}

std::string render_decision_prompt(std::string_view question, std::span<const BehaviorSample> history,
                                   std::span<const MemoryEntry> hints) {
  std::ostringstream out;
  out << "You observe an autonomous racing car. Decide whether the car adheres to the behaviour "
         "asked about in the question, using its recent state history. d is the lateral offset to "
         "the centerline (positive to the left), d_raceline the offset to the racing line, v the "
         "s-speed, a the longitudinal and a_lat the lateral acceleration.\n";
  out << kQuestionPrefix << question << "\"\n";
  out << kHistoryHeader << "\n";
  const auto& cols = history_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? " | " : "") << cols[i];
  out << "\n";
  for (const auto& b : history) {
    const double vals[] = {b.t, b.s, b.n_center, b.n_raceline, b.v, b.a, b.a_lat, b.wall_left, b.wall_right};
    for (std::size_t i = 0; i < std::size(vals); ++i) out << (i ? " | " : "") << fmt_value(vals[i]);
    out << "\n";
  }
  out << "Hints:\n";
  for (const auto& h : hints) out << h.render() << "\n\n";
  out << "Answer format:\n<reasoning>your reasoning</reasoning>\n<answer>yes</answer> or "
         "<answer>no</answer>";
  return out.str();
}

std::optional<ParsedDecisionPrompt> parse_decision_prompt(std::string_view prompt) {
  ParsedDecisionPrompt parsed;
  const auto q = prompt.find(kQuestionPrefix);
  if (q == std::string_view::npos) return std::nullopt;
  const auto q_start = q + kQuestionPrefix.size();
  const auto q_end = prompt.find("\"\n", q_start);
  if (q_end == std::string_view::npos) return std::nullopt;
  parsed.question = std::string(prompt.substr(q_start, q_end - q_start));

  const auto h = prompt.find(kHistoryHeader, q_end);
  if (h == std::string_view::npos) return std::nullopt;
  std::istringstream in{std::string(prompt.substr(h + kHistoryHeader.size()))};
  std::string line;
  std::getline(in, line);  // rest of the header line
  std::getline(in, line);  // column names
  while (std::getline(in, line)) {
    if (line.rfind("Hints:", 0) == 0) break;
    std::vector<double> vals;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, '|')) {
      try {
        vals.push_back(std::stod(cell));
      } catch (...) {
        return std::nullopt;
      }
    }
    if (vals.size() != history_columns().size()) return std::nullopt;
    BehaviorSample b;
    b.t = vals[0];
    b.s = vals[1];
    b.n_center = vals[2];
    b.n_raceline = vals[3];
    b.v = vals[4];
    b.a = vals[5];
    b.a_lat = vals[6];
    b.wall_left = vals[7];
    b.wall_right = vals[8];
    parsed.history.push_back(b);
  }
  if (parsed.history.empty()) return std::nullopt;
  return parsed;
}

std::optional<std::string> parse_mpc_instruction(std::string_view prompt) {
  const auto p = prompt.find(kInstructionPrefix);
  if (p == std::string_view::npos) return std::nullopt;
  const auto start = p + kInstructionPrefix.size();
  const auto end = prompt.find("\".", start);
  if (end == std::string_view::npos) return std::nullopt;
  return std::string(prompt.substr(start, end - start));
}

}  // namespace driverl
