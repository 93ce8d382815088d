#include "driverl/eval.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "driverl/error.hpp"
#include "driverl/prompts.hpp"
#include "driverl/rag.hpp"
#include "json.hpp"

namespace driverl {

using nlohmann::ordered_json;

namespace {

const char* kMetricOrder[] = {"E_C", "E_V", "E_R", "E_S"};

ordered_json opt(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(); }

std::string cell(const MetricSummary& m) {
  if (!m.e_policy) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f (%+.1f%%)%s", *m.e_policy, m.improvement.value_or(0.0),
                m.excludes_failures ? " \xE2\x80\xA0" : "");
  return buf;
}

}  // namespace

double aggregate_improvement(std::span<const double> per_metric) {
  if (per_metric.size() != 4) {
    throw ValidationError("aggregate_improvement needs 4 values, got " + std::to_string(per_metric.size()));
  }
  double sum = 0.0;
  for (double v : per_metric) sum += v;
  return sum / 4.0;
}

double improvement_percent(double e_default, double e_policy) {
  if (e_default == 0.0) return e_policy == 0.0 ? 0.0 : -100.0;
  return 100.0 * (e_default - e_policy) / e_default;
}

ControlEvalReport run_control_eval(Environment& env, CompletionPolicy& policy, const std::string& map_id, int runs) {
  if (runs < 1 || runs > 5) throw ValidationError("runs must be in [1, 5]");
  ControlEvalReport report;
  report.policy = policy.name();
  report.map_id = env.resolve_map_id(map_id);
  report.runs_per_behavior = runs;

  const auto& set = eval_behaviors();
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (static_cast<int>(i % 5) >= runs) continue;
    const BehaviorSpec& b = set[i];
    const auto memories = default_mpc_memories().retrieve(b.prompt, 5);
    const std::string completion = policy.complete(render_mpc_prompt(b, memories));
    const MpcScore s = env.score_mpc_completion(completion, b, report.map_id);
    PromptOutcome o;
    o.behavior_index = static_cast<int>(i);
    o.metric_id = b.metric_id();
    o.prompt = b.prompt;
    o.extraction_failure = s.reward.extraction_failure;
    o.e_llm = s.e_llm;
    o.e_mpc = s.e_mpc;
    o.total_reward = s.reward.total;
    o.r_drive = s.reward.r_drive;
    o.fault = s.fault;
    if (o.extraction_failure) ++report.extraction_failures;
    report.outcomes.push_back(std::move(o));
  }

  std::vector<double> improvements;
  for (const char* id : kMetricOrder) {
    MetricSummary m;
    m.metric_id = id;
    double sum_pol = 0.0, sum_def = 0.0, sum_def_all = 0.0;
    int ok = 0;
    for (const auto& o : report.outcomes) {
      if (o.metric_id != id) continue;
      ++m.runs;
      sum_def_all += o.e_mpc;
      if (!o.e_llm) {
        ++m.failures;
        continue;
      }
      ++ok;
      sum_pol += *o.e_llm;
      sum_def += o.e_mpc;
    }
    m.excludes_failures = m.failures > 0;
    if (ok > 0) {
      m.e_policy = sum_pol / ok;
      m.e_default = sum_def / ok;
      m.improvement = improvement_percent(m.e_default, *m.e_policy);
      improvements.push_back(*m.improvement);
    } else {
      m.e_default = m.runs > 0 ? sum_def_all / m.runs : 0.0;
    }
    report.per_metric.push_back(m);
  }
  if (improvements.size() == 4) report.improvement_overall = aggregate_improvement(improvements);
  return report;
}

std::string to_json(const ControlEvalReport& r) {
  ordered_json j;
  j["policy"] = r.policy;
  j["map_id"] = r.map_id;
  j["runs_per_behavior"] = r.runs_per_behavior;
  auto& pm = j["per_metric"] = ordered_json::object();
  for (const auto& m : r.per_metric) {
    ordered_json e;
    e["e_policy"] = opt(m.e_policy);
    e["e_default"] = m.e_default;
    e["improvement"] = opt(m.improvement);
    e["runs"] = m.runs;
    e["failures"] = m.failures;
    e["excludes_failures"] = m.excludes_failures;
    pm[m.metric_id] = e;
  }
  j["extraction_failures"] = r.extraction_failures;
  j["improvement_overall"] = opt(r.improvement_overall);
  j["improvement_overall_excludes_failures"] = r.extraction_failures > 0;
  auto& out = j["outcomes"] = ordered_json::array();
  for (const auto& o : r.outcomes) {
    ordered_json e;
    e["behavior_index"] = o.behavior_index;
    e["metric_id"] = o.metric_id;
    e["prompt"] = o.prompt;
    e["extraction_failure"] = o.extraction_failure;
    e["e_llm"] = opt(o.e_llm);
    e["e_mpc"] = o.e_mpc;
    e["r_drive"] = opt(o.r_drive);
    e["total_reward"] = o.total_reward;
    if (!o.fault.empty()) e["fault"] = o.fault;
    out.push_back(e);
  }
  return j.dump(2) + "\n";
}

std::string to_table(const ControlEvalReport& r) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"Policy", "E_C", "E_V", "E_R", "E_S", "Ext. Fail", "Improve%"});
  std::vector<std::string> def = {"default MPC"};
  for (const auto& m : r.per_metric) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", m.e_default);
    def.push_back(buf);
  }
  def.push_back("-");
  def.push_back("-");
  rows.push_back(def);
  std::vector<std::string> pol = {r.policy};
  for (const auto& m : r.per_metric) pol.push_back(cell(m));
  pol.push_back(std::to_string(r.extraction_failures));
  if (r.improvement_overall) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%%s", *r.improvement_overall, r.extraction_failures ? " \xE2\x80\xA0" : "");
    pol.push_back(buf);
  } else {
    pol.push_back("n/a");
  }
  rows.push_back(pol);

  std::vector<std::size_t> width(rows[0].size(), 0);
  auto display_len = [](const std::string& s) {
    std::size_t n = 0;
    for (unsigned char c : s) n += (c & 0xC0) != 0x80;
    return n;
  };
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], display_len(row[c]));
  }
  std::ostringstream out;
  out << "map: " << r.map_id << ", runs per behaviour: " << r.runs_per_behavior << "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << (c ? " | " : "") << row[c] << std::string(width[c] - display_len(row[c]), ' ');
    }
    out << "\n";
  }
  if (r.extraction_failures) out << "\xE2\x80\xA0 averaged without the failed runs\n";
  return out.str();
}

DecisionEvalReport run_decision_eval(std::span<const DecisionInstance> instances, CompletionPolicy& policy,
                                     std::size_t hints_k) {
  if (instances.empty()) throw ValidationError("decision eval: empty corpus");
  DecisionEvalReport r;
  r.policy = policy.name();
  r.total = instances.size();
  std::map<std::string, std::vector<std::optional<bool>>> hint_cache;
  std::map<std::string, std::pair<std::size_t, std::size_t>> per_q;
  std::vector<std::string> q_order;
  std::size_t positives = 0;
  for (const auto& inst : instances) {
    const auto hints = default_decision_hints().retrieve(inst.prompt, hints_k);
    const std::string completion = policy.complete(render_decision_prompt(inst.prompt, inst.history, hints));
    const auto answer = parse_answer(completion);
    r.answers.push_back(answer);
    if (!answer) ++r.unparseable;
    const bool hit = answer && *answer == inst.label;
    if (hit) ++r.correct;
    if (inst.label) ++positives;
    if (!per_q.count(inst.prompt)) q_order.push_back(inst.prompt);
    auto& [n, c] = per_q[inst.prompt];
    ++n;
    c += hit;
  }
  r.accuracy = score_accuracy(instances, r.answers);
  r.positive_rate = 100.0 * static_cast<double>(positives) / static_cast<double>(r.total);
  for (const auto& q : q_order) {
    const auto [n, c] = per_q[q];
    r.per_question.emplace_back(q, 100.0 * static_cast<double>(c) / static_cast<double>(n));
  }
  return r;
}

std::string to_json(const DecisionEvalReport& r) {
  ordered_json j;
  j["policy"] = r.policy;
  j["total"] = r.total;
  j["correct"] = r.correct;
  j["unparseable"] = r.unparseable;
  j["accuracy"] = r.accuracy;
  j["positive_rate"] = r.positive_rate;
  auto& pq = j["per_question"] = ordered_json::array();
  for (const auto& [q, acc] : r.per_question) pq.push_back({{"prompt", q}, {"accuracy", acc}});
  return j.dump(2) + "\n";
}

std::string to_table(const DecisionEvalReport& r) {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "policy %s: accuracy %.2f%% (%zu/%zu), unparseable %zu, positive rate %.2f%%\n",
                r.policy.c_str(), r.accuracy, r.correct, r.total, r.unparseable, r.positive_rate);
  out << buf;
  for (const auto& [q, acc] : r.per_question) {
    std::snprintf(buf, sizeof buf, "  %-45s %6.2f%%\n", q.c_str(), acc);
    out << buf;
  }
  return out.str();
}

}  // namespace driverl
