#include "portnav/baseline_dwa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace portnav {

DwaConfig DwaConfig::from_config(const Config& cfg) {
  DwaConfig d;
  const std::string s = "dwa";
  d.max_speed = cfg.get_double(s, "max_speed", d.max_speed);
  d.accel = cfg.get_double(s, "accel", d.accel);
  d.yaw_accel = cfg.get_double(s, "yaw_accel", d.yaw_accel);
  d.window_time = cfg.get_double(s, "window_time", d.window_time);
  d.horizon = cfg.get_double(s, "horizon", d.horizon);
  d.sim_dt = cfg.get_double(s, "sim_dt", d.sim_dt);
  d.speed_samples = static_cast<int>(cfg.get_int(s, "speed_samples", d.speed_samples));
  d.yaw_samples = static_cast<int>(cfg.get_int(s, "yaw_samples", d.yaw_samples));
  d.w_heading = cfg.get_double(s, "w_heading", d.w_heading);
  d.w_clearance = cfg.get_double(s, "w_clearance", d.w_clearance);
  d.w_velocity = cfg.get_double(s, "w_velocity", d.w_velocity);
  d.brake_decel = cfg.get_double(s, "brake_decel", d.brake_decel);
  d.clearance_cap = cfg.get_double(s, "clearance_cap", d.clearance_cap);
  d.safety_margin = cfg.get_double(s, "safety_margin", d.safety_margin);
  d.lookahead = cfg.get_double(s, "lookahead", d.lookahead);
  d.command_horizon = cfg.get_double(s, "command_horizon", d.command_horizon);
  d.dead_slow = cfg.get_double(s, "dead_slow", d.dead_slow);
  return d;
}

namespace {

// Scan hits as world-frame points; misses carry no obstacle information.
std::vector<Point2> scan_points(const VesselState& state, const RangeScan& scan) {
  std::vector<Point2> pts;
  pts.reserve(scan.ranges.size());
  for (std::size_t i = 0; i < scan.ranges.size(); ++i) {
    const double r = scan.ranges[i];
    if (r >= scan.max_range - 1e-9) {
      continue;
    }
    const Vec2 dir = bearing_to_dir(scan.ray_bearing(static_cast<int>(i), state.heading));
    pts.push_back({state.x + dir.x * r, state.y + dir.y * r});
  }
  return pts;
}

struct Rollout {
  double min_clearance = std::numeric_limits<double>::infinity();
  VesselState end;
};

Rollout roll(const VesselState& state, double speed, double yaw_rate,
             const std::vector<Point2>& obstacles, const DwaConfig& cfg) {
  Rollout r;
  VesselState s = state;
  const int steps = std::max(1, static_cast<int>(std::round(cfg.horizon / cfg.sim_dt)));
  for (int i = 0; i < steps; ++i) {
    s = advance_pose(s, speed, yaw_rate, cfg.sim_dt);
    for (const Point2& o : obstacles) {
      r.min_clearance =
          std::min(r.min_clearance, distance({s.x, s.y}, o) - cfg.safety_margin);
    }
  }
  r.min_clearance = std::max(0.0, r.min_clearance);
  r.end = s;
  return r;
}

}  // namespace

DwaDecision dwa_plan(const VesselState& state, const RangeScan& scan, const GlobalPath& path,
                     const DwaConfig& cfg, const HullParams& hull) {
  const std::vector<Point2> obstacles = scan_points(state, scan);
  const double yaw_max = hull.rudder_limit * hull.turn_rate;

  const double s_lo = std::max(0.0, state.speed - cfg.accel * cfg.window_time);
  const double s_hi = std::min(cfg.max_speed, state.speed + cfg.accel * cfg.window_time);
  const double w_lo = std::max(-yaw_max, state.yaw_rate - cfg.yaw_accel * cfg.window_time);
  const double w_hi = std::min(yaw_max, state.yaw_rate + cfg.yaw_accel * cfg.window_time);

  const auto cp = path.closest_point({state.x, state.y});
  const Point2 target = path.point_at(cp.arclength + cfg.lookahead);

  const double weight_sum = cfg.w_heading + cfg.w_clearance + cfg.w_velocity;

  DwaDecision best;
  best.score = -std::numeric_limits<double>::infinity();
  bool any_admissible = false;

  for (int si = 0; si < cfg.speed_samples; ++si) {
    const double s = cfg.speed_samples > 1
                         ? s_lo + (s_hi - s_lo) * si / static_cast<double>(cfg.speed_samples - 1)
                         : s_hi;
    for (int wi = 0; wi < cfg.yaw_samples; ++wi) {
      const double w = cfg.yaw_samples > 1
                           ? w_lo + (w_hi - w_lo) * wi / static_cast<double>(cfg.yaw_samples - 1)
                           : 0.5 * (w_lo + w_hi);
      const Rollout r = roll(state, s, w, obstacles, cfg);
      const double stop_dist = s * s / (2.0 * cfg.brake_decel);
      if (!obstacles.empty() && r.min_clearance < stop_dist) {
        continue;  // inadmissible: could not stop before the nearest obstacle
      }
      any_admissible = true;

      const double bearing_err =
          std::abs(wrap_deg_180(dir_to_bearing(target - Point2{r.end.x, r.end.y}) - r.end.heading));
      const double h_score = 1.0 - bearing_err / 180.0;
      const double c_score = std::min(r.min_clearance, cfg.clearance_cap) / cfg.clearance_cap;
      const double v_score = s / cfg.max_speed;
      const double score =
          (cfg.w_heading * h_score + cfg.w_clearance * c_score + cfg.w_velocity * v_score) /
          weight_sum;
      if (score > best.score) {
        best.score = score;
        best.chosen_speed = s;
        best.chosen_yaw_rate = w;
        best.min_clearance = r.min_clearance;
        best.stopping_distance = stop_dist;
        best.desired_speed = s;
        best.desired_heading = wrap_deg_360(state.heading + w * cfg.command_horizon);
      }
    }
  }

  if (!any_admissible) {
    // Emergency: dead slow toward the clearest ray.
    std::size_t best_ray = 0;
    for (std::size_t i = 1; i < scan.ranges.size(); ++i) {
      if (scan.ranges[i] > scan.ranges[best_ray]) {
        best_ray = i;
      }
    }
    DwaDecision d;
    d.emergency = true;
    d.desired_speed = cfg.dead_slow;
    d.chosen_speed = cfg.dead_slow;
    d.desired_heading = scan.ray_bearing(static_cast<int>(best_ray), state.heading);
    d.stopping_distance = cfg.dead_slow * cfg.dead_slow / (2.0 * cfg.brake_decel);
    return d;
  }
  return best;
}

}  // namespace portnav
