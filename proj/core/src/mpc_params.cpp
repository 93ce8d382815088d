#include "driverl/mpc_params.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "driverl/error.hpp"
#include "json.hpp"

namespace driverl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Field {
  const char* name;
  double MpcParams::*member;
};

constexpr Field kFields[] = {
    {"qv", &MpcParams::qv},
    {"qn", &MpcParams::qn},
    {"qalpha", &MpcParams::qalpha},
    {"qac", &MpcParams::qac},
    {"qddelta", &MpcParams::qddelta},
    {"alat_max", &MpcParams::alat_max},
    {"a_min", &MpcParams::a_min},
    {"a_max", &MpcParams::a_max},
    {"v_min", &MpcParams::v_min},
    {"v_max", &MpcParams::v_max},
    {"track_safety_margin", &MpcParams::track_safety_margin},
};

std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

MpcParams default_params() { return MpcParams{}; }

MpcParams validate_params(const ParamMap& raw, const MpcParams& base) {
  MpcParams p = base;
  for (const auto& [key, value] : raw) {
    const Field* field = nullptr;
    for (const auto& f : kFields) {
      if (key == f.name) field = &f;
    }
    if (!field) throw InvalidParameterError("unknown parameter '" + key + "'");
    if (!std::isfinite(value)) throw InvalidParameterError("parameter '" + key + "' is not finite");
    p.*(field->member) = value;
  }
  for (const char* w : {"qv", "qn", "qalpha", "qac", "qddelta"}) {
    for (const auto& f : kFields) {
      if (std::string(f.name) == w && p.*(f.member) < 0.0) {
        throw InvalidParameterError(std::string("rule violated: ") + w + " >= 0");
      }
    }
  }
  if (!(p.v_max > p.v_min)) throw InvalidParameterError("rule violated: v_max > v_min");
  if (!(p.a_max > p.a_min)) throw InvalidParameterError("rule violated: a_max > a_min");
  if (!(p.alat_max > 0.0)) throw InvalidParameterError("rule violated: alat_max > 0");
  if (!(p.track_safety_margin >= 0.0)) {
    throw InvalidParameterError("rule violated: track_safety_margin >= 0");
  }
  return p;
}

ParamMap to_map(const MpcParams& params) {
  ParamMap m;
  for (const auto& f : kFields) m[f.name] = params.*(f.member);
  return m;
}

const std::vector<ParamDescriptor>& param_schema() {
  static const std::vector<ParamDescriptor> schema = [] {
    const MpcParams d;
    return std::vector<ParamDescriptor>{
        {"qv", "-", "weight on (v - v_ref)^2", d.qv, 0.0, kInf, true},
        {"qn", "-", "weight on the lateral offset n^2 to the racing line", d.qn, 0.0, kInf, true},
        {"qalpha", "-", "weight on the heading error to the racing line", d.qalpha, 0.0, kInf, true},
        {"qac", "-", "weight on the longitudinal acceleration input", d.qac, 0.0, kInf, true},
        {"qddelta", "-", "weight on the steering rate input", d.qddelta, 0.0, kInf, true},
        {"alat_max", "m/s^2", "bound on the lateral acceleration", d.alat_max, 0.0, kInf, true},
        {"a_min", "m/s^2", "lower bound on the longitudinal acceleration", d.a_min, -kInf, kInf, true},
        {"a_max", "m/s^2", "upper bound on the longitudinal acceleration", d.a_max, -kInf, kInf, true},
        {"v_min", "m/s", "lower bound on the velocity", d.v_min, -kInf, kInf, true},
        {"v_max", "m/s", "upper bound on the velocity", d.v_max, -kInf, kInf, true},
        {"track_safety_margin", "m", "inflation of the track boundaries", d.track_safety_margin, 0.0,
         kInf, true},
    };
  }();
  return schema;
}

std::string param_schema_json() {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& d : param_schema()) {
    nlohmann::ordered_json j;
    j["name"] = d.name;
    j["unit"] = d.unit;
    j["description"] = d.description;
    j["default"] = d.default_value;
    j["min"] = std::isfinite(d.min) ? nlohmann::ordered_json(d.min) : nlohmann::ordered_json();
    j["max"] = std::isfinite(d.max) ? nlohmann::ordered_json(d.max) : nlohmann::ordered_json();
    j["tunable"] = d.tunable;
    arr.push_back(j);
  }
  return arr.dump();
}

std::string canonical_string(const MpcParams& params) {
  std::string out;
  for (const auto& f : kFields) {
    if (!out.empty()) out += ';';
    out += f.name;
    out += '=';
    out += format_number(params.*(f.member));
  }
  return out;
}

std::string params_to_dict_string(const MpcParams& params) {
  std::string out = "{";
  for (const auto& f : kFields) {
    if (out.size() > 1) out += ", ";
    out += "'" + std::string(f.name) + "': " + format_number(params.*(f.member));
  }
  return out + "}";
}

}  // namespace driverl
