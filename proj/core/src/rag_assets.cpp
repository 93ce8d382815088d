#include "driverl/rag.hpp"

namespace driverl {

namespace {

constexpr std::string_view kMpcMemories = R"TXT(# Memory Entry 0:
Scenario:
To force going forwards v_min should be positive. If you want it to be able to reverse, then set v_min to negative.
MPC Action:
mpc_params = {
    'v_min': positive, if you want to go forwards, else negative to reverse
}

# Memory Entry 1:
Scenario:
Always have v_max be higher than v_min.
MPC Action:
mpc_params = {
    'v_max': higher than v_min
}

# Memory Entry 2:
Scenario:
To drive far away from the walls, the boundary inflation should be increased. That way it will drive closer to the centerline. This is the most important to stay away from the walls.
MPC Action:
mpc_params = {
    'track_safety_margin': high
}

# Memory Entry 3:
Scenario:
To reverse the car slowly on the racing line, the v_min must be negative!
MP Action:
mpc_params = {
    'v_min': negative,
}

# Memory Entry 4:
Scenario:
To drive at a specific constant speed, set v_max to the target speed and v_min slightly below it, so the speed cannot leave the target range.
MPC Action:
mpc_params = {
    'v_max': target speed,
    'v_min': slightly lower than the target speed
}

# Memory Entry 5:
Scenario:
To drive smoothly, penalize the acceleration and the steering rate more strongly and lower the maximum speed.
MPC Action:
mpc_params = {
    'qac': high,
    'qddelta': high,
    'v_max': low
}

# Memory Entry 6:
Scenario:
To reduce the lateral acceleration in corners, lower alat_max and v_max.
MPC Action:
mpc_params = {
    'alat_max': low,
    'v_max': low
}

# Memory Entry 7:
Scenario:
qn weights the lateral deviation from the racing line. A higher qn follows the racing line more tightly, a lower qn lets the car drift away from it.
MPC Action:
mpc_params = {
    'qn': higher to follow the racing line closely
}

# Memory Entry 8:
Scenario:
qalpha weights the heading error towards the racing line. Setting qalpha to 0 makes the car oscillate around the racing line; keep it around 7 for calm tracking.
MPC Action:
mpc_params = {
    'qalpha': 7
}

# Memory Entry 9:
Scenario:
To drive normally again, reset every parameter to its default value.
MPC Action:
mpc_params = {
    'qv': 10, 'qn': 20, 'qalpha': 7, 'qac': 0.01, 'qddelta': 0.1, 'alat_max': 10, 'a_min': -5, 'a_max': 5, 'v_min': 1, 'v_max': 5, 'track_safety_margin': 0.45
}

# Memory Entry 10:
Scenario:
a_min and a_max bound the longitudinal acceleration. Narrowing them makes braking and accelerating gentler; a_max must stay higher than a_min.
MPC Action:
mpc_params = {
    'a_min': closer to 0,
    'a_max': closer to 0
}
)TXT";

constexpr std::string_view kDecisionHints = R"TXT(# Hint 1:
If the d-speed is above than 0.5m/s is high.

# Hint 2:
Unless specified differently by the human, the car is usually driving at speeds between 5 and 7m/s.

# Hint 3:
If the distance to a wall is smaller than 0.4m, the car is close to that wall. Staying close to the wall means maintaining a consistent distance below 0.4m.

# Hint 4:
If the s-speed is close to 0m/s, then the car is stopped.

# Hint 5:
The car is reversing if the s-speed is negative or if the s-coordinate is reducing over multiple samples.

# Hint 6:
The d-coordinate is the lateral distance to the centerline, positive to the left. If the d-coordinate stays within 0.2m of 0, the car is driving on the centerline.

# Hint 7:
The car is on the racing line if its lateral distance to the racing line stays within 0.2m of 0.

# Hint 8:
The car drives at a requested speed if the s-speed stays within 0.3m/s of that speed.

# Hint 9:
Smooth driving means low longitudinal and lateral accelerations. The combined acceleration should stay below 1m/s^2.

# Hint 10:
The car is oscillating if the d-coordinate swings from one side to the other repeatedly with an amplitude above 0.1m.

# Hint 11:
The car is stopped if the s-speed stays below 0.1m/s in magnitude for almost all samples.
)TXT";

}  // namespace

std::string_view mpc_memories_text() { return kMpcMemories; }
std::string_view decision_hints_text() { return kDecisionHints; }

}  // namespace driverl
