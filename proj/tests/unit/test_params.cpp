#include <gtest/gtest.h>

#include "driverl/error.hpp"
#include "driverl/mpc_params.hpp"
#include "json.hpp"

using namespace driverl;

TEST(Params, DefaultsAreExact) {
  const MpcParams p = default_params();
  EXPECT_EQ(p.qv, 10.0);
  EXPECT_EQ(p.qn, 20.0);
  EXPECT_EQ(p.qalpha, 7.0);
  EXPECT_EQ(p.qac, 0.01);
  EXPECT_EQ(p.qddelta, 0.1);
  EXPECT_EQ(p.alat_max, 10.0);
  EXPECT_EQ(p.a_min, -5.0);
  EXPECT_EQ(p.a_max, 5.0);
  EXPECT_EQ(p.v_min, 1.0);
  EXPECT_EQ(p.v_max, 5.0);
  EXPECT_EQ(p.track_safety_margin, 0.45);
}

TEST(Params, ValidateIsIdempotentOnDefaults) {
  EXPECT_EQ(validate_params(to_map(default_params())), default_params());
  EXPECT_EQ(validate_params({}), default_params());
}

TEST(Params, ReversingConfigurationMerges) {
  const MpcParams p = validate_params({{"v_max", -1.0}, {"v_min", -2.0}});
  EXPECT_EQ(p.v_max, -1.0);
  EXPECT_EQ(p.v_min, -2.0);
  EXPECT_EQ(p.qn, 20.0);
}

TEST(Params, RuleViolationsNameTheRule) {
  auto message = [](const ParamMap& m) {
    try {
      validate_params(m);
    } catch (const InvalidParameterError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message({{"v_min", 3.0}, {"v_max", 2.0}}).find("v_max > v_min"), std::string::npos);
  EXPECT_NE(message({{"a_min", 1.0}, {"a_max", 1.0}}).find("a_max > a_min"), std::string::npos);
  EXPECT_NE(message({{"alat_max", 0.0}}).find("alat_max"), std::string::npos);
  EXPECT_NE(message({{"qv", -1.0}}).find("qv"), std::string::npos);
  EXPECT_NE(message({{"track_safety_margin", -0.1}}).find("track_safety_margin"), std::string::npos);
  EXPECT_NE(message({{"foo", 1.0}}).find("'foo'"), std::string::npos);
  EXPECT_NE(message({{"qn", std::nan("")}}).find("not finite"), std::string::npos);
}

TEST(Params, SchemaMatchesDefaults) {
  const auto& schema = param_schema();
  ASSERT_EQ(schema.size(), 11u);
  const ParamMap defaults = to_map(default_params());
  for (const auto& d : schema) EXPECT_EQ(defaults.at(d.name), d.default_value) << d.name;
  EXPECT_EQ(schema.front().name, "qv");
  EXPECT_EQ(schema.back().name, "track_safety_margin");
  const auto j = nlohmann::json::parse(param_schema_json());
  ASSERT_EQ(j.size(), 11u);
  for (const auto& e : j) {
    for (const char* key : {"name", "unit", "default", "min", "max", "tunable"}) EXPECT_TRUE(e.contains(key)) << key;
  }
}

TEST(Params, CanonicalRenderings) {
  EXPECT_EQ(params_to_dict_string(default_params()),
            "{'qv': 10, 'qn': 20, 'qalpha': 7, 'qac': 0.01, 'qddelta': 0.1, 'alat_max': 10, 'a_min': -5, "
            "'a_max': 5, 'v_min': 1, 'v_max': 5, 'track_safety_margin': 0.45}");
  MpcParams p;
  EXPECT_EQ(canonical_string(p), canonical_string(default_params()));
  p.qv = 10.000000000000002;
  EXPECT_NE(canonical_string(p), canonical_string(default_params()));
}
