#include "portnav/env.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "portnav/rng.hpp"

namespace portnav {
namespace {

constexpr double kGoalReward = 1000.0;
constexpr double kCollisionCost = -1000.0;
constexpr std::uint64_t kTrafficPlanStream = 0x100;
constexpr std::uint64_t kTrafficSpeedStream = 0x200;
constexpr std::uint64_t kOsPlanStream = 0x300;
constexpr std::uint64_t kRetryStream = 0xEE00;

const double kSpeedChoices[3] = {1.0, 2.5, 5.0};

void digest_mix(std::uint64_t& h, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  h ^= bits;
  h *= 1099511628211ull;
}

}  // namespace

Action Action::from_flat(int a) {
  if (a < 0 || a >= kCount) {
    throw std::invalid_argument("flat action out of range");
  }
  return Action{a / kSpeedCount, a % kSpeedCount};
}

double Action::delta_heading() const {
  return -30.0 + 7.5 * static_cast<double>(heading_idx);
}

double Action::speed() const { return kSpeedChoices[speed_idx]; }

const char* terminal_kind_name(TerminalKind k) {
  switch (k) {
    case TerminalKind::none: return "none";
    case TerminalKind::collision: return "collision";
    case TerminalKind::goal: return "goal";
    case TerminalKind::timeout: return "timeout";
  }
  return "none";
}

TerminalKind terminal_kind_from_name(const std::string& name) {
  if (name == "collision") return TerminalKind::collision;
  if (name == "goal") return TerminalKind::goal;
  if (name == "timeout") return TerminalKind::timeout;
  if (name == "none") return TerminalKind::none;
  throw std::invalid_argument("unknown terminal kind: " + name);
}

EnvConfig EnvConfig::from_config(const Config& cfg) {
  EnvConfig e;
  e.worldgen = WorldgenConfig::from_config(cfg);
  e.hull = HullParams::from_config(cfg);
  e.heading_gains = PidGains::from_config(cfg, "pid_heading", e.heading_gains);
  e.speed_gains = PidGains::from_config(cfg, "pid_speed", e.speed_gains);
  e.scan = ScanConfig::from_config(cfg);
  e.rrt = RrtConfig::from_config(cfg);
  const std::string s = "env";
  e.rrt_budget = static_cast<int>(cfg.get_int(s, "rrt_budget", e.rrt_budget));
  e.traffic_rrt_budget =
      static_cast<int>(cfg.get_int(s, "traffic_rrt_budget", e.traffic_rrt_budget));
  e.dt = cfg.get_double(s, "dt", e.dt);
  e.timeout_steps = static_cast<int>(cfg.get_int(s, "timeout_steps", e.timeout_steps));
  e.world_epoch = static_cast<int>(cfg.get_int(s, "world_epoch", e.world_epoch));
  e.reset_task_retries =
      static_cast<int>(cfg.get_int(s, "reset_task_retries", e.reset_task_retries));
  e.hull_collision = cfg.get_bool(s, "hull_collision", e.hull_collision);
  e.traffic_capture_radius =
      cfg.get_double(s, "traffic_capture_radius", e.traffic_capture_radius);
  e.traffic_hull_length = cfg.get_double(s, "traffic_hull_length", e.traffic_hull_length);
  e.traffic_hull_beam = cfg.get_double(s, "traffic_hull_beam", e.traffic_hull_beam);
  e.lookahead = cfg.get_double(s, "lookahead", e.lookahead);
  e.path_points = static_cast<int>(cfg.get_int(s, "path_points", e.path_points));
  e.path_point_spacing = cfg.get_double(s, "path_point_spacing", e.path_point_spacing);
  e.dist_scale = cfg.get_double(s, "dist_scale", e.dist_scale);
  e.angle_scale = cfg.get_double(s, "angle_scale", e.angle_scale);
  e.speed_scale = cfg.get_double(s, "speed_scale", e.speed_scale);
  e.frame_stack = static_cast<int>(cfg.get_int(s, "frame_stack", e.frame_stack));
  return e;
}

void traffic_step(std::vector<TrafficVessel>& traffic, const HullParams& hull,
                  double capture_radius, double dt) {
  for (TrafficVessel& v : traffic) {
    const auto& wps = v.path.waypoints();
    const Point2 pos{v.state.x, v.state.y};
    while (!v.finished && distance(pos, wps[v.waypoint]) <= capture_radius) {
      if (v.waypoint + 1 >= wps.size()) {
        v.finished = true;
      } else {
        ++v.waypoint;
      }
    }
    double desired_heading = v.state.heading;
    double desired_speed = 0.0;
    if (!v.finished) {
      desired_heading = dir_to_bearing(wps[v.waypoint] - pos);
      desired_speed = v.task_speed;
    }
    const ControlInput u = v.pid.step(desired_heading, desired_speed, v.state, hull, dt);
    v.state = step(v.state, u, hull, dt);
  }
}

Environment::Environment(EnvConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.frame_stack < 1 || cfg_.path_points < 1) {
    throw std::invalid_argument("invalid env config");
  }
}

Observation Environment::reset(std::uint64_t seed) {
  if (reset_count_ % std::max(1, cfg_.world_epoch) == 0) {
    geometry_seed_ = seed;
  }
  const Observation obs = reset_from_seeds(geometry_seed_, seed);
  ++reset_count_;
  return obs;
}

Observation Environment::reset_from_seeds(std::uint64_t geometry_seed, std::uint64_t task_seed) {
  geometry_seed_ = geometry_seed;
  task_seed_ = task_seed;
  WorldSpec world = sample_world(cfg_.worldgen, geometry_seed);
  if (task_seed != geometry_seed) {
    world = sample_tasks(world, cfg_.worldgen, task_seed);
  }
  for (int attempt = 0;; ++attempt) {
    try {
      setup_world(world);
      break;
    } catch (const NoPathFound&) {
      if (attempt >= cfg_.reset_task_retries) {
        throw ResetFailed("no feasible task found after retries");
      }
      world = sample_tasks(world, cfg_.worldgen,
                           Rng::derive(task_seed, kRetryStream + static_cast<std::uint64_t>(attempt)));
    }
  }
  return stacked_observation();
}

void Environment::setup_world(WorldSpec world) {
  // Plan before committing any state so a NoPathFound leaves *this intact.
  GlobalPath os_path = plan_rrt_star(world, world.os_start, world.os_goal, cfg_.rrt_budget,
                                     Rng::derive(world.rng_seed, kOsPlanStream), cfg_.rrt);
  std::vector<TrafficVessel> traffic;
  Rng speed_rng(Rng::derive(world.rng_seed, kTrafficSpeedStream));
  for (std::size_t i = 0; i < world.traffic_tasks.size(); ++i) {
    const TrafficTask& task = world.traffic_tasks[i];
    GlobalPath path =
        plan_rrt_star(world, task.start, task.goal, cfg_.traffic_rrt_budget,
                      Rng::derive(world.rng_seed, kTrafficPlanStream + i), cfg_.rrt);
    TrafficVessel v{VesselState{}, std::move(path), task.goal,
                    PidController(cfg_.heading_gains, cfg_.speed_gains)};
    v.state.x = task.start.x;
    v.state.y = task.start.y;
    const auto& wps = v.path.waypoints();
    v.state.heading = dir_to_bearing(wps[1] - wps[0]);
    v.state.speed = 0.0;
    v.waypoint = 1;  // waypoint 0 is the start itself
    v.task_speed = kSpeedChoices[speed_rng.uniform_int(3)];
    traffic.push_back(std::move(v));
  }

  world_ = std::move(world);
  os_path_.emplace(std::move(os_path));
  traffic_ = std::move(traffic);
  os_ = VesselState{};
  os_.x = world_.os_start.x;
  os_.y = world_.os_start.y;
  os_.heading = world_.os_heading;
  os_pid_ = PidController(cfg_.heading_gains, cfg_.speed_gains);
  u_prev_ = ControlInput{};
  steps_ = 0;
  terminated_ = false;
  has_world_ = true;

  refresh_signals();
  frames_.clear();
  const std::vector<double> f = current_frame();
  for (int i = 0; i < cfg_.frame_stack; ++i) {
    frames_.push_back(f);
  }
}

Polygon Environment::os_hull() const {
  return Polygon::oriented_box({os_.x, os_.y}, cfg_.hull.hull_length, cfg_.hull.hull_beam,
                               os_.heading);
}

std::vector<Polygon> Environment::traffic_hulls() const {
  std::vector<Polygon> hulls;
  hulls.reserve(traffic_.size());
  for (const TrafficVessel& v : traffic_) {
    hulls.push_back(Polygon::oriented_box({v.state.x, v.state.y}, cfg_.traffic_hull_length,
                                          cfg_.traffic_hull_beam, v.state.heading));
  }
  return hulls;
}

bool Environment::check_collision(std::span<const Polygon> hulls) const {
  const Point2 pos{os_.x, os_.y};
  if (!cfg_.hull_collision) {
    if (!in_free_space(world_, pos)) {
      return true;
    }
    for (const Polygon& h : hulls) {
      if (h.contains(pos)) {
        return true;
      }
    }
    return false;
  }

  const Polygon hull = os_hull();
  const auto& hv = hull.vertices();
  // Leaving the waterway counts as hitting the bank.
  for (const Point2& c : hv) {
    if (!world_.waterway.contains(c)) {
      return true;
    }
  }
  for (const Polygon& dock : world_.docks) {
    if (polygons_overlap(hull, dock)) {
      return true;
    }
  }
  for (const Disc& buoy : world_.buoys) {
    if (disc_polygon_overlap(buoy, hull)) {
      return true;
    }
  }
  for (const Polygon& other : hulls) {
    if (polygons_overlap(hull, other)) {
      return true;
    }
  }
  return false;
}

void Environment::refresh_signals() {
  los_ = los_errors(*os_path_, os_, cfg_.lookahead);
  goal_distance_ = distance({os_.x, os_.y}, world_.os_goal.center);
  const std::vector<Polygon> hulls = traffic_hulls();
  scan_ = scan(os_, world_, hulls, cfg_.scan, nullptr);
}

std::vector<double> Environment::current_frame() const {
  std::vector<double> f;
  f.reserve(static_cast<std::size_t>(cfg_.frame_dim()));
  for (double r : scan_.ranges) {
    f.push_back(r / cfg_.scan.max_range);
  }
  f.push_back(os_.rudder / cfg_.angle_scale);
  f.push_back(os_.rudder_rate / cfg_.angle_scale);
  f.push_back(goal_distance_ / cfg_.dist_scale);
  f.push_back(os_.speed / cfg_.speed_scale);
  f.push_back(wrap_deg_180(os_.heading) / cfg_.angle_scale);
  f.push_back(los_.e_x / cfg_.dist_scale);
  f.push_back(los_.e_y / cfg_.dist_scale);
  f.push_back(los_.e_psi / cfg_.angle_scale);
  const std::vector<Point2> z =
      nearest_path_points(*os_path_, os_, cfg_.path_points, cfg_.path_point_spacing);
  for (const Point2& p : z) {
    f.push_back(p.x / cfg_.dist_scale);
    f.push_back(p.y / cfg_.dist_scale);
  }
  f.push_back(u_prev_.thrust / cfg_.hull.max_thrust);
  f.push_back(u_prev_.heading / cfg_.angle_scale);
  return f;
}

Observation Environment::stacked_observation() const {
  Observation o;
  o.frame_dim = cfg_.frame_dim();
  o.data.reserve(static_cast<std::size_t>(cfg_.obs_dim()));
  for (const auto& f : frames_) {
    o.data.insert(o.data.end(), f.begin(), f.end());
  }
  return o;
}

StepResult Environment::step(Action a) {
  if (!has_world_) {
    throw std::logic_error("step before reset");
  }
  if (terminated_) {
    throw StepAfterTerminal("step called on a terminated episode");
  }
  if (a.heading_idx < 0 || a.heading_idx >= Action::kHeadingCount || a.speed_idx < 0 ||
      a.speed_idx >= Action::kSpeedCount) {
    throw std::invalid_argument("action index out of range");
  }

  const double desired_heading = wrap_deg_360(os_.heading + a.delta_heading());
  const double desired_speed = a.speed();
  const ControlInput u = os_pid_.step(desired_heading, desired_speed, os_, cfg_.hull, cfg_.dt);
  os_ = portnav::step(os_, u, cfg_.hull, cfg_.dt);
  u_prev_ = u;

  traffic_step(traffic_, cfg_.hull, cfg_.traffic_capture_radius, cfg_.dt);

  ++steps_;
  const std::vector<Polygon> hulls = traffic_hulls();
  const bool collided = check_collision(hulls);
  const bool at_goal = world_.os_goal.contains({os_.x, os_.y});
  const bool timed_out = steps_ >= cfg_.timeout_steps;

  refresh_signals();
  frames_.pop_back();
  frames_.push_front(current_frame());

  StepResult out;
  out.los = los_;
  out.reward = -(std::abs(los_.e_x) + std::abs(los_.e_y) + std::abs(los_.e_psi)) +
               (at_goal ? kGoalReward : 0.0) + (collided ? kCollisionCost : 0.0);
  if (collided) {
    out.kind = TerminalKind::collision;
  } else if (at_goal) {
    out.kind = TerminalKind::goal;
  } else if (timed_out) {
    out.kind = TerminalKind::timeout;
  }
  out.terminated = out.kind != TerminalKind::none;
  terminated_ = out.terminated;
  out.observation = stacked_observation();
  return out;
}

std::uint64_t Environment::state_digest() const {
  std::uint64_t h = 1469598103934665603ull;
  digest_mix(h, os_.x);
  digest_mix(h, os_.y);
  digest_mix(h, os_.heading);
  digest_mix(h, os_.speed);
  digest_mix(h, os_.yaw_rate);
  digest_mix(h, os_.rudder);
  digest_mix(h, u_prev_.thrust);
  digest_mix(h, u_prev_.heading);
  for (const TrafficVessel& v : traffic_) {
    digest_mix(h, v.state.x);
    digest_mix(h, v.state.y);
    digest_mix(h, v.state.heading);
    digest_mix(h, v.state.speed);
  }
  for (double r : scan_.ranges) {
    digest_mix(h, r);
  }
  digest_mix(h, los_.e_x);
  digest_mix(h, los_.e_y);
  digest_mix(h, los_.e_psi);
  return h;
}

}  // namespace portnav
