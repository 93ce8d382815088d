#pragma once

#include <map>
#include <string>
#include <vector>

namespace driverl {

/// Tunable MPC cost weights and bounds (the action space of the policy).
struct MpcParams {
  double qv = 10.0;
  double qn = 20.0;
  double qalpha = 7.0;
  double qac = 0.01;
  double qddelta = 0.1;
  double alat_max = 10.0;
  double a_min = -5.0;
  double a_max = 5.0;
  double v_min = 1.0;
  double v_max = 5.0;
  double track_safety_margin = 0.45;

  bool operator==(const MpcParams&) const = default;
};

using ParamMap = std::map<std::string, double>;

MpcParams default_params();

/// Merges `raw` over `base` and checks every rule. Throws
/// InvalidParameterError naming the unknown key or the violated rule.
MpcParams validate_params(const ParamMap& raw, const MpcParams& base = default_params());

ParamMap to_map(const MpcParams& params);

struct ParamDescriptor {
  std::string name;
  std::string unit;
  std::string description;
  double default_value;
  double min;  ///< -inf when unbounded
  double max;  ///< +inf when unbounded
  bool tunable;
};

/// Schema in canonical order.
const std::vector<ParamDescriptor>& param_schema();

/// The schema as a JSON array (unbounded limits as null).
std::string param_schema_json();

/// Deterministic "name=value;..." rendering used as a cache key.
std::string canonical_string(const MpcParams& params);

/// Python-dict style rendering, e.g. {'qv': 10, 'qn': 20, ...}.
std::string params_to_dict_string(const MpcParams& params);

}  // namespace driverl
