#include "portnav/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "portnav/geometry.hpp"

namespace portnav {

HullParams HullParams::from_config(const Config& cfg) {
  HullParams h;
  const std::string s = "dynamics";
  h.mass = cfg.get_double(s, "mass", h.mass);
  h.drag_coeff = cfg.get_double(s, "drag_coeff", h.drag_coeff);
  h.ref_area = cfg.get_double(s, "ref_area", h.ref_area);
  h.fluid_density = cfg.get_double(s, "fluid_density", h.fluid_density);
  h.turn_rate = cfg.get_double(s, "turn_rate", h.turn_rate);
  h.max_thrust = cfg.get_double(s, "max_thrust", h.max_thrust);
  h.rudder_limit = cfg.get_double(s, "rudder_limit", h.rudder_limit);
  h.rudder_slew = cfg.get_double(s, "rudder_slew", h.rudder_slew);
  h.hull_length = cfg.get_double(s, "hull_length", h.hull_length);
  h.hull_beam = cfg.get_double(s, "hull_beam", h.hull_beam);
  return h;
}

double drag_force(const HullParams& hull, double speed) {
  return 0.5 * hull.fluid_density * speed * speed * hull.drag_coeff * hull.ref_area;
}

VesselState step(const VesselState& state, const ControlInput& u, const HullParams& hull,
                 double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("dt must be positive");
  }
  const double thrust = std::clamp(u.thrust, 0.0, hull.max_thrust);
  const double rudder_cmd = std::clamp(u.heading, -hull.rudder_limit, hull.rudder_limit);

  VesselState next = state;

  // Pose advances with the state at t.
  const double hr = deg_to_rad(state.heading);
  next.x = state.x + std::sin(hr) * state.speed * dt;
  next.y = state.y + std::cos(hr) * state.speed * dt;
  next.heading = wrap_deg_360(state.heading + state.yaw_rate * dt);

  // Surge response: thrust against quadratic drag.
  const double accel = (thrust - drag_force(hull, state.speed)) / hull.mass;
  next.speed = std::max(0.0, state.speed + accel * dt);

  // Rudder slews toward the command; yaw rate follows the rudder.
  double delta = state.rudder;
  if (std::isinf(hull.rudder_slew)) {
    delta = rudder_cmd;
  } else {
    const double max_move = hull.rudder_slew * dt;
    delta += std::clamp(rudder_cmd - delta, -max_move, max_move);
  }
  delta = std::clamp(delta, -hull.rudder_limit, hull.rudder_limit);
  next.rudder_rate = (delta - state.rudder) / dt;
  next.rudder = delta;
  next.yaw_rate = delta * hull.turn_rate;

  return next;
}

VesselState advance_pose(const VesselState& state, double speed, double yaw_rate_deg, double dt) {
  VesselState next = state;
  const double hr = deg_to_rad(state.heading);
  next.x = state.x + std::sin(hr) * speed * dt;
  next.y = state.y + std::cos(hr) * speed * dt;
  next.heading = wrap_deg_360(state.heading + yaw_rate_deg * dt);
  next.speed = speed;
  next.yaw_rate = yaw_rate_deg;
  return next;
}

PidGains PidGains::from_config(const Config& cfg, const std::string& section, PidGains d) {
  PidGains g;
  g.kp = cfg.get_double(section, "kp", d.kp);
  g.ki = cfg.get_double(section, "ki", d.ki);
  g.kd = cfg.get_double(section, "kd", d.kd);
  g.integral_limit = cfg.get_double(section, "integral_limit", d.integral_limit);
  return g;
}

PidGains PidController::default_heading_gains() { return PidGains{2.0, 0.0, 4.0, 20.0}; }

PidGains PidController::default_speed_gains() { return PidGains{30000.0, 2000.0, 0.0, 10.0}; }

ControlInput PidController::step(double desired_heading_deg, double desired_speed,
                                 const VesselState& state, const HullParams& hull, double dt) {
  ControlInput out;

  const double he = wrap_deg_180(desired_heading_deg - state.heading);
  heading_state_.integral =
      std::clamp(heading_state_.integral + he * dt, -heading_.integral_limit,
                 heading_.integral_limit);
  const double he_d = heading_state_.has_prev ? (he - heading_state_.prev_error) / dt : 0.0;
  heading_state_.prev_error = he;
  heading_state_.has_prev = true;
  out.heading = std::clamp(heading_.kp * he + heading_.ki * heading_state_.integral +
                               heading_.kd * he_d,
                           -hull.rudder_limit, hull.rudder_limit);

  const double se = desired_speed - state.speed;
  speed_state_.integral = std::clamp(speed_state_.integral + se * dt, -speed_.integral_limit,
                                     speed_.integral_limit);
  const double se_d = speed_state_.has_prev ? (se - speed_state_.prev_error) / dt : 0.0;
  speed_state_.prev_error = se;
  speed_state_.has_prev = true;
  const double feedforward = drag_force(hull, desired_speed);
  out.thrust = std::clamp(feedforward + speed_.kp * se + speed_.ki * speed_state_.integral +
                              speed_.kd * se_d,
                          0.0, hull.max_thrust);
  return out;
}

void PidController::reset() {
  heading_state_ = LoopState{};
  speed_state_ = LoopState{};
}

}  // namespace portnav
