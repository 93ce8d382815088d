#include "driverl/lap.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include "json.hpp"
#include <ostream>
#include <sstream>

#include "driverl/error.hpp"

namespace driverl {

std::string to_string(Termination t) {
  switch (t) {
    case Termination::lap_complete:
      return "lap_complete";
    case Termination::timeout:
      return "timeout";
    case Termination::crash:
      return "crash";
  }
  return "crash";
}

Termination termination_from_string(const std::string& s) {
  if (s == "lap_complete") return Termination::lap_complete;
  if (s == "timeout") return Termination::timeout;
  if (s == "crash") return Termination::crash;
  throw ParseError("unknown termination '" + s + "'");
}

namespace {

TraceSample make_sample(const TrackGeometry& track, double t, const VehicleState& x,
                        const ControlInput& u) {
  TraceSample smp;
  smp.t = t;
  smp.state = x;
  smp.input = u;
  smp.n_center = x.n;
  smp.n = track.raceline_relative(x.s, x.n);
  smp.a_lat = lateral_acceleration(x);
  return smp;
}

}  // namespace

LapTrace run_lap(const TrackGeometry& track, Controller& controller, const VehicleState& initial,
                 const LapLimits& limits) {
  if (!(limits.dt > 0.0 && limits.dt <= 0.1)) throw ValidationError("dt must lie in (0, 0.1]");
  if (!(limits.max_time > 0.0)) throw ValidationError("max_time must be positive");
  const double L = track.total_length();
  LapTrace trace;
  VehicleState x = initial;
  x.s = track.centerline.wrap_s(x.s);
  double progress = 0.0;
  const auto steps_max = static_cast<long long>(std::llround(limits.max_time / limits.dt));

  for (long long k = 0;; ++k) {
    const double t = static_cast<double>(k) * limits.dt;
    auto finish = [&](Termination why) {
      trace.samples.push_back(make_sample(track, t, x, {}));
      trace.terminated_by = why;
      trace.lap_time = t;
    };
    if (!track.on_track(x.s, x.n)) {
      finish(Termination::crash);
      break;
    }
    if (limits.stop_on_lap && std::abs(progress) >= L) {
      finish(Termination::lap_complete);
      break;
    }
    if (k >= steps_max) {
      finish(Termination::timeout);
      break;
    }
    ControlInput u;
    try {
      u = controller.control(x, t);
    } catch (const SolverFault& e) {
      trace.fault = e.what();
      finish(Termination::crash);
      break;
    }
    trace.samples.push_back(make_sample(track, t, x, u));
    VehicleState next;
    try {
      next = step_dynamics(x, u, track, limits.dt);
    } catch (const SimulationFault& e) {
      trace.fault = e.what();
      trace.terminated_by = Termination::crash;
      trace.lap_time = t;
      break;
    }
    double ds = next.s - x.s;
    if (ds > 0.5 * L) ds -= L;
    if (ds < -0.5 * L) ds += L;
    progress += ds;
    x = next;
  }
  return trace;
}

void write_trace(const LapTrace& trace, std::ostream& out) {
  for (const auto& smp : trace.samples) {
    nlohmann::ordered_json j;
    j["t"] = smp.t;
    j["s"] = smp.state.s;
    j["n"] = smp.n;
    j["dphi"] = smp.state.dphi;
    j["delta"] = smp.state.delta;
    j["v"] = smp.state.v;
    j["ddelta"] = smp.input.ddelta;
    j["a"] = smp.input.a;
    j["n_center"] = smp.n_center;
    j["a_lat"] = smp.a_lat;
    out << j.dump() << '\n';
  }
  nlohmann::ordered_json trailer;
  trailer["terminated_by"] = to_string(trace.terminated_by);
  trailer["lap_time"] = trace.lap_time;
  out << trailer.dump() << '\n';
}

std::string serialize_trace(const LapTrace& trace) {
  std::ostringstream out;
  write_trace(trace, out);
  return out.str();
}

LapTrace parse_trace(std::istream& in) {
  LapTrace trace;
  std::string line;
  std::size_t line_no = 0;
  bool trailer = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (trailer) throw ParseError("content after trailer", line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      if (j.contains("terminated_by")) {
        trace.terminated_by = termination_from_string(j.at("terminated_by").get<std::string>());
        trace.lap_time = j.at("lap_time").get<double>();
        trailer = true;
        continue;
      }
      TraceSample smp;
      smp.t = j.at("t").get<double>();
      smp.state.s = j.at("s").get<double>();
      smp.n = j.at("n").get<double>();
      smp.state.dphi = j.at("dphi").get<double>();
      smp.state.delta = j.at("delta").get<double>();
      smp.state.v = j.at("v").get<double>();
      smp.input.ddelta = j.at("ddelta").get<double>();
      smp.input.a = j.at("a").get<double>();
      smp.n_center = j.at("n_center").get<double>();
      smp.state.n = smp.n_center;
      smp.a_lat = j.at("a_lat").get<double>();
      trace.samples.push_back(smp);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(e.what(), line_no);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  if (!trailer) throw ParseError("missing trailer line");
  return trace;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string trace_digest(const LapTrace& trace) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(serialize_trace(trace))));
  return buf;
}

}  // namespace driverl
