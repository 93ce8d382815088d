#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "driverl/dataset.hpp"
#include "driverl/environment.hpp"
#include "driverl/policy.hpp"

namespace driverl {

/// Mean of exactly four per-metric improvements [%]. Throws ValidationError
/// on any other arity.
double aggregate_improvement(std::span<const double> per_metric);

/// 100 * (e_default - e_policy) / e_default, signed.
double improvement_percent(double e_default, double e_policy);

struct PromptOutcome {
  int behavior_index = 0;
  std::string metric_id;
  std::string prompt;
  bool extraction_failure = false;
  std::optional<double> e_llm;
  double e_mpc = 0.0;
  double total_reward = 0.0;
  std::optional<double> r_drive;
  std::string fault;
};

struct MetricSummary {
  std::string metric_id;
  std::optional<double> e_policy;  ///< absent when every run failed
  double e_default = 0.0;
  std::optional<double> improvement;
  int runs = 0;
  int failures = 0;
  bool excludes_failures = false;  ///< averaged without the failed runs
};

struct ControlEvalReport {
  std::string policy;
  std::string map_id;
  int runs_per_behavior = 0;
  std::vector<MetricSummary> per_metric;  ///< E_C, E_V, E_R, E_S
  int extraction_failures = 0;
  std::optional<double> improvement_overall;
  std::vector<PromptOutcome> outcomes;
};

/// Renders every evaluation prompt (first `runs` phrasings per kind), asks the
/// policy and scores the completion on `map_id`. PolicyError propagates.
ControlEvalReport run_control_eval(Environment& env, CompletionPolicy& policy, const std::string& map_id,
                                   int runs = 5);

std::string to_json(const ControlEvalReport& report);
/// Aligned table with columns Policy, E_C, E_V, E_R, E_S, Ext. Fail, Improve%.
std::string to_table(const ControlEvalReport& report);

struct DecisionEvalReport {
  std::string policy;
  std::size_t total = 0;
  std::size_t correct = 0;
  std::size_t unparseable = 0;
  double accuracy = 0.0;
  double positive_rate = 0.0;  ///< share of label 1 in the corpus [%]
  std::vector<std::pair<std::string, double>> per_question;  ///< accuracy per prompt
  std::vector<std::optional<bool>> answers;
};

DecisionEvalReport run_decision_eval(std::span<const DecisionInstance> instances, CompletionPolicy& policy,
                                     std::size_t hints_k = 5);

std::string to_json(const DecisionEvalReport& report);
std::string to_table(const DecisionEvalReport& report);

}  // namespace driverl
