#pragma once

#include <limits>

#include "portnav/config.hpp"

namespace portnav {

// Simulated physical truth of one vessel. Angles in degrees, bearings
// clockwise from north, speeds in m/s.
struct VesselState {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;     // [0, 360)
  double speed = 0.0;       // surge, >= 0
  double yaw_rate = 0.0;    // deg/s
  double rudder = 0.0;      // deg, |rudder| <= rudder_limit
  double rudder_rate = 0.0; // deg/s
};

struct HullParams {
  double mass = 1.0e5;          // kg
  double drag_coeff = 0.8;      // c_d
  double ref_area = 5.0;        // m^2
  double fluid_density = 1000.0;
  double turn_rate = 1.0 / 35.0;  // (deg/s) of yaw per degree of rudder
  double max_thrust = 50000.0;    // N; sized so terminal speed is 5 m/s
  double rudder_limit = 35.0;     // deg
  double rudder_slew = 5.0;       // deg/s; infinity disables rudder dynamics

  double hull_length = 30.0;
  double hull_beam = 6.0;

  static HullParams from_config(const Config& cfg);
};

struct ControlInput {
  double thrust = 0.0;       // N, clamped to [0, max_thrust]
  double heading = 0.0;      // rudder command, deg, clamped to +-rudder_limit
};

// One explicit-Euler step: position and heading advance with the current
// velocities, then surge and yaw respond to thrust/drag and the rudder.
// The rudder slews toward the command at rudder_slew, which is what makes
// control effects lag the command.
VesselState step(const VesselState& state, const ControlInput& u, const HullParams& hull,
                 double dt);

// Magnitude of the quadratic drag force at the given surge speed.
double drag_force(const HullParams& hull, double speed);

// Kinematic arc propagation at fixed speed / yaw rate (used by DWA rollouts).
VesselState advance_pose(const VesselState& state, double speed, double yaw_rate_deg, double dt);

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double integral_limit = std::numeric_limits<double>::infinity();

  static PidGains from_config(const Config& cfg, const std::string& section, PidGains defaults);
};

// Two independent loops: heading error (wrapped to [-180, 180]) -> rudder
// command, speed error -> thrust with a drag-compensation feedforward.
class PidController {
 public:
  PidController() = default;
  PidController(PidGains heading, PidGains speed) : heading_(heading), speed_(speed) {}

  ControlInput step(double desired_heading_deg, double desired_speed, const VesselState& state,
                    const HullParams& hull, double dt);
  void reset();

  static PidGains default_heading_gains();
  static PidGains default_speed_gains();

 private:
  struct LoopState {
    double integral = 0.0;
    double prev_error = 0.0;
    bool has_prev = false;
  };
  PidGains heading_ = default_heading_gains();
  PidGains speed_ = default_speed_gains();
  LoopState heading_state_;
  LoopState speed_state_;
};

}  // namespace portnav
