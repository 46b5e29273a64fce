#pragma once

#include "portnav/config.hpp"
#include "portnav/dynamics.hpp"
#include "portnav/global_planner.hpp"
#include "portnav/sensors.hpp"

namespace portnav {

struct DwaConfig {
  double max_speed = 5.0;
  double accel = 0.3;            // reachable speed change per window, m/s^2
  double yaw_accel = 0.5;        // reachable yaw-rate change, deg/s^2
  double window_time = 10.0;     // seconds of actuation the window assumes
  double horizon = 30.0;         // rollout length, s
  double sim_dt = 1.0;
  int speed_samples = 7;
  int yaw_samples = 11;
  double w_heading = 0.5;
  double w_clearance = 0.3;
  double w_velocity = 0.2;
  double brake_decel = 0.15;     // nominal stopping deceleration, m/s^2
  double clearance_cap = 200.0;  // clearance saturation in the score
  double safety_margin = 5.0;    // hull allowance subtracted from clearances
  double lookahead = 150.0;      // path point the heading term steers at
  double command_horizon = 8.0;  // seconds of yaw integrated into the setpoint
  double dead_slow = 1.0;        // emergency speed

  static DwaConfig from_config(const Config& cfg);
};

struct DwaDecision {
  double desired_heading = 0.0;  // deg
  double desired_speed = 0.0;    // m/s
  double chosen_speed = 0.0;
  double chosen_yaw_rate = 0.0;  // deg/s
  double min_clearance = 0.0;
  double stopping_distance = 0.0;
  double score = 0.0;
  bool emergency = false;
};

// Classic dynamic-window search over (speed, yaw-rate) pairs: roll each
// candidate arc forward, drop the ones whose minimum scan clearance is below
// the stopping distance, score the rest by heading/clearance/velocity.
// When everything is inadmissible: dead slow toward the clearest bearing.
DwaDecision dwa_plan(const VesselState& state, const RangeScan& scan, const GlobalPath& path,
                     const DwaConfig& cfg, const HullParams& hull);

}  // namespace portnav
