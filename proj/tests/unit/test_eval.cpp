#include <gtest/gtest.h>

#include <array>

#include "driverl/error.hpp"
#include "driverl/eval.hpp"
#include "driverl/maps.hpp"
#include "json.hpp"

using namespace driverl;

TEST(Aggregate, Fixtures) {
  const std::array<double, 4> a = {5.0, 93.2, 97.8, 38.0};
  const std::array<double, 4> b = {39.9, 90.2, 91.2, 31.8};
  EXPECT_NEAR(aggregate_improvement(a), 58.5, 0.1);
  EXPECT_NEAR(aggregate_improvement(b), 63.3, 0.1);
  const std::array<double, 3> three = {1, 2, 3};
  EXPECT_THROW(aggregate_improvement(three), ValidationError);
}

TEST(Aggregate, ImprovementPercent) {
  EXPECT_EQ(improvement_percent(2.0, 1.0), 50.0);
  EXPECT_EQ(improvement_percent(2.0, 3.0), -50.0);
  EXPECT_EQ(improvement_percent(0.0, 0.0), 0.0);
}

TEST(ControlEval, DefaultPolicyImprovesNothing) {
  Environment env;
  auto policy = make_mpc_policy("mock-default", builtin_map(kTrainMap));
  const auto r = run_control_eval(env, *policy, kTrainMap, 2);
  EXPECT_EQ(r.outcomes.size(), 8u);
  EXPECT_EQ(r.extraction_failures, 0);
  ASSERT_TRUE(r.improvement_overall.has_value());
  EXPECT_EQ(*r.improvement_overall, 0.0);
  for (const auto& m : r.per_metric) EXPECT_EQ(*m.e_policy, m.e_default);
  const auto table = to_table(r);
  EXPECT_NE(table.find("Policy"), std::string::npos);
  EXPECT_NE(table.find("default MPC"), std::string::npos);
  EXPECT_NE(table.find("0.0%"), std::string::npos);
  const auto j = nlohmann::json::parse(to_json(r));
  EXPECT_EQ(j["per_metric"]["E_R"]["runs"], 2);
}

TEST(ControlEval, GarbageFailsEveryPrompt) {
  Environment env;
  auto policy = make_mpc_policy("mock-garbage", builtin_map(kTrainMap));
  const auto r = run_control_eval(env, *policy, kTrainMap, 5);
  EXPECT_EQ(r.extraction_failures, 20);
  EXPECT_FALSE(r.improvement_overall.has_value());
  EXPECT_NE(to_table(r).find("n/a"), std::string::npos);
  EXPECT_THROW(run_control_eval(env, *policy, kTrainMap, 0), ValidationError);
  EXPECT_THROW(run_control_eval(env, *policy, kTrainMap, 6), ValidationError);
}

TEST(ControlEval, OracleImprovesEveryMetric) {
  Environment env;
  auto policy = make_mpc_policy("oracle", builtin_map(kTrainMap));
  const auto r = run_control_eval(env, *policy, kTrainMap, 1);
  ASSERT_TRUE(r.improvement_overall.has_value());
  for (const auto& m : r.per_metric) EXPECT_GT(*m.improvement, 0.0) << m.metric_id;
}

TEST(ControlEval, UnknownPolicyAndMap) {
  EXPECT_THROW(make_mpc_policy("psychic", builtin_map(kTrainMap)), ValidationError);
  EXPECT_THROW(make_decision_policy("psychic"), ValidationError);
  Environment env;
  auto policy = make_mpc_policy("mock-default", builtin_map(kTrainMap));
  EXPECT_THROW(run_control_eval(env, *policy, "moon", 1), ValidationError);
}

TEST(DecisionEval, BaselinesOnSmallCorpus) {
  const auto data = generate_dataset(builtin_map(kTrainMap), default_styles(), 1, 11);
  std::size_t positives = 0;
  for (const auto& i : data) positives += i.label;
  const double base = 100.0 * static_cast<double>(positives) / static_cast<double>(data.size());

  auto yes = make_decision_policy("mock-yes");
  const auto ry = run_decision_eval(data, *yes);
  EXPECT_NEAR(ry.accuracy, base, 1e-9);
  EXPECT_NEAR(ry.positive_rate, base, 1e-9);
  auto no = make_decision_policy("mock-no");
  EXPECT_NEAR(run_decision_eval(data, *no).accuracy, 100.0 - base, 1e-9);
  auto oracle = make_decision_policy("oracle");
  const auto ro = run_decision_eval(data, *oracle);
  EXPECT_EQ(ro.accuracy, 100.0);
  EXPECT_EQ(ro.per_question.size(), 8u);
  EXPECT_EQ(ro.unparseable, 0u);
  EXPECT_NE(to_table(ro).find("100.00%"), std::string::npos);
  EXPECT_THROW(run_decision_eval(std::span<const DecisionInstance>{}, *oracle), ValidationError);
}
