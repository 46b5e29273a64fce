#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "portnav/config.hpp"
#include "portnav/geometry.hpp"

namespace portnav {

struct WorldgenError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GoalRegion {
  Point2 center;
  double radius = 25.0;
  bool contains(Point2 p) const { return distance(p, center) <= radius; }
};

struct TrafficTask {
  Point2 start;
  GoalRegion goal;
};

// Per-world uniform sampling ranges for the randomized port layout.
struct RandomizationRanges {
  double dock_length_min = 300.0, dock_length_max = 900.0;
  double center_offset_min = -600.0, center_offset_max = 600.0;
  double waterway_width_min = 300.0, waterway_width_max = 900.0;
  int n_traffic = 6;

  void validate() const;
};

// Layout parameters that the source material leaves open; all declared
// defaults, all overridable from the [worldgen] config section.
struct WorldgenConfig {
  RandomizationRanges ranges;
  double world_length = 3000.0;
  double dock_depth_min = 40.0, dock_depth_max = 80.0;
  double dock_depth_width_cap = 0.25;  // depth <= cap * waterway width
  double dock_gap_min = 150.0, dock_gap_max = 450.0;
  double dock_end_margin = 200.0;
  int buoys_min = 0, buoys_max = 4;
  double buoy_radius_min = 2.0, buoy_radius_max = 5.0;
  double buoy_start_clearance = 50.0;
  double buoy_wall_clearance = 30.0;
  double goal_radius = 25.0;
  double start_clearance = 30.0;
  double start_end_band = 150.0;       // how deep into each channel end starts/goals live
  double traffic_min_leg = 200.0;      // minimum start-goal separation for traffic
  double traffic_os_clearance = 100.0; // traffic spawns at least this far from the OS
  int max_attempts = 100;              // rejection-sampling cap

  static WorldgenConfig from_config(const Config& cfg);
};

// One sampled port scenario: static geometry plus the navigation tasks.
// Immutable after creation; safe to share across workers.
struct WorldSpec {
  Polygon waterway;            // navigable band; leaving it is a collision
  std::vector<Polygon> docks;  // quay structures protruding into the band
  std::vector<Disc> buoys;
  Point2 os_start;
  double os_heading = 0.0;
  GoalRegion os_goal;
  std::vector<TrafficTask> traffic_tasks;
  std::uint64_t rng_seed = 0;

  // The sampled randomization draws, kept for auditability.
  double dock_length = 0.0;
  double center_offset = 0.0;
  double waterway_width = 0.0;

  nlohmann::json to_json() const;
  static WorldSpec from_json(const nlohmann::json& j);

  // FNV-1a over the serialized form; used to verify paired evaluations.
  std::uint64_t hash() const;
};

WorldSpec sample_world(const WorldgenConfig& cfg, std::uint64_t seed);

// Rerolls starts, goals and traffic tasks inside the fixed geometry.
WorldSpec sample_tasks(const WorldSpec& world, const WorldgenConfig& cfg, std::uint64_t seed);

// Minimum distance from p to any obstacle boundary (docks, buoys, waterway
// walls); 0 when p is inside an obstacle or outside the waterway.
double point_clearance(const WorldSpec& world, Point2 p);

// Clearance of segment ab against all static obstacles.
double world_segment_clearance(const WorldSpec& world, Point2 a, Point2 b);

bool in_free_space(const WorldSpec& world, Point2 p);

}  // namespace portnav
