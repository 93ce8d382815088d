#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "driverl/track.hpp"
#include "driverl/vehicle.hpp"

namespace driverl {

struct TraceSample {
  double t = 0.0;
  VehicleState state;  ///< state.n is the centerline offset
  ControlInput input;
  double n = 0.0;         ///< offset relative to the raceline (= n_center without one)
  double n_center = 0.0;  ///< offset relative to the centerline
  double a_lat = 0.0;
};

enum class Termination { lap_complete, timeout, crash };

std::string to_string(Termination t);
Termination termination_from_string(const std::string& s);

struct LapTrace {
  std::vector<TraceSample> samples;
  Termination terminated_by = Termination::timeout;
  double lap_time = 0.0;
  std::string fault;  ///< reason for a crash caused by a fault (not serialized)
};

/// Control policy queried once per simulation step.
class Controller {
 public:
  virtual ~Controller() = default;
  /// May throw SolverFault; the lap then ends as a crash.
  virtual ControlInput control(const VehicleState& state, double t) = 0;
};

struct LapLimits {
  double dt = kSimDt;
  double max_time = kMaxLapTime;
  bool stop_on_lap = true;  ///< false: keep driving until max_time
};

/// Simulates until one lap of progress, a crash or the time limit.
LapTrace run_lap(const TrackGeometry& track, Controller& controller, const VehicleState& initial,
                 const LapLimits& limits = {});

/// Line-delimited JSON: one object per sample, then a trailer line.
std::string serialize_trace(const LapTrace& trace);
void write_trace(const LapTrace& trace, std::ostream& out);
LapTrace parse_trace(std::istream& in);

std::uint64_t fnv1a64(std::string_view bytes);

/// "fnv1a64:<16 hex digits>" of the canonical serialization.
std::string trace_digest(const LapTrace& trace);

}  // namespace driverl
