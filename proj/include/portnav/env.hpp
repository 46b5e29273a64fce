#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <vector>

#include "portnav/dynamics.hpp"
#include "portnav/global_planner.hpp"
#include "portnav/sensors.hpp"
#include "portnav/worldgen.hpp"

namespace portnav {

struct StepAfterTerminal : std::logic_error {
  using std::logic_error::logic_error;
};

struct ResetFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Discrete action: 9 evenly spaced heading changes in [-30, 30] deg crossed
// with 3 speed setpoints {dead slow, half, full} = {1, 2.5, 5} m/s.
struct Action {
  int heading_idx = 0;
  int speed_idx = 0;

  static constexpr int kHeadingCount = 9;
  static constexpr int kSpeedCount = 3;
  static constexpr int kCount = kHeadingCount * kSpeedCount;

  int flat() const { return heading_idx * kSpeedCount + speed_idx; }
  static Action from_flat(int a);
  double delta_heading() const;  // deg
  double speed() const;          // m/s
};

enum class TerminalKind { none, collision, goal, timeout };

const char* terminal_kind_name(TerminalKind k);
TerminalKind terminal_kind_from_name(const std::string& name);

// Stacked observation, frames newest-first; frame 0 is the current step.
struct Observation {
  std::vector<double> data;
  int frame_dim = 0;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool terminated = false;
  TerminalKind kind = TerminalKind::none;
  LosError los;  // the error vector the reward was computed from
};

struct EnvConfig {
  WorldgenConfig worldgen;
  HullParams hull;
  PidGains heading_gains = PidController::default_heading_gains();
  PidGains speed_gains = PidController::default_speed_gains();
  ScanConfig scan;
  RrtConfig rrt;
  int rrt_budget = 3000;
  int traffic_rrt_budget = 1200;
  double dt = 1.0;
  int timeout_steps = 1000;
  int world_epoch = 10;        // resets per geometry regeneration
  int reset_task_retries = 10;
  bool hull_collision = true;  // false tests the pose point only
  double traffic_capture_radius = 15.0;
  double traffic_hull_length = 30.0;
  double traffic_hull_beam = 6.0;
  double lookahead = 100.0;
  int path_points = 10;
  double path_point_spacing = 50.0;
  double dist_scale = 1000.0;
  double angle_scale = 180.0;
  double speed_scale = 5.0;
  int frame_stack = 4;

  int frame_dim() const { return scan.num_rays + 5 + 3 + 2 * path_points + 2; }
  int obs_dim() const { return frame_stack * frame_dim(); }

  static EnvConfig from_config(const Config& cfg);
};

struct TrafficVessel {
  VesselState state;
  GlobalPath path;
  GoalRegion goal;
  PidController pid;
  std::size_t waypoint = 0;
  double task_speed = 2.5;
  bool finished = false;
};

// Waypoint following for the scripted traffic: steer at the next waypoint,
// advance within the capture radius, hold position when done. Traffic never
// reacts to the OS.
void traffic_step(std::vector<TrafficVessel>& traffic, const HullParams& hull,
                  double capture_radius, double dt);

class Environment {
 public:
  explicit Environment(EnvConfig cfg);

  // Epoch schedule: resets 0, 10, 20, ... regenerate geometry from the seed,
  // the others resample tasks inside the held geometry.
  Observation reset(std::uint64_t seed);

  // Deterministic reconstruction used by the replay audit.
  Observation reset_from_seeds(std::uint64_t geometry_seed, std::uint64_t task_seed);

  StepResult step(Action a);

  bool terminated() const { return terminated_; }
  int steps() const { return steps_; }
  int reset_count() const { return reset_count_; }
  int obs_dim() const { return cfg_.obs_dim(); }

  const EnvConfig& config() const { return cfg_; }
  const WorldSpec& world() const { return world_; }
  const GlobalPath& os_path() const { return *os_path_; }
  const VesselState& os_state() const { return os_; }
  const RangeScan& last_scan() const { return scan_; }
  const LosError& last_los() const { return los_; }
  double goal_distance() const { return goal_distance_; }
  const std::vector<TrafficVessel>& traffic() const { return traffic_; }
  std::uint64_t geometry_seed() const { return geometry_seed_; }
  std::uint64_t task_seed() const { return task_seed_; }

  Polygon os_hull() const;
  std::vector<Polygon> traffic_hulls() const;

  // 64-bit digest of the full simulation state, for the determinism audit.
  std::uint64_t state_digest() const;

 private:
  void setup_world(WorldSpec world);
  void refresh_signals();
  Observation stacked_observation() const;
  std::vector<double> current_frame() const;
  bool check_collision(std::span<const Polygon> hulls) const;

  EnvConfig cfg_;
  WorldSpec world_;
  std::optional<GlobalPath> os_path_;
  VesselState os_;
  PidController os_pid_;
  ControlInput u_prev_;
  std::vector<TrafficVessel> traffic_;
  RangeScan scan_;
  LosError los_;
  double goal_distance_ = 0.0;
  std::deque<std::vector<double>> frames_;
  int steps_ = 0;
  int reset_count_ = 0;
  bool terminated_ = false;
  bool has_world_ = false;
  std::uint64_t geometry_seed_ = 0;
  std::uint64_t task_seed_ = 0;
};

}  // namespace portnav
