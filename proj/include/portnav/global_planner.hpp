#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "portnav/dynamics.hpp"
#include "portnav/geometry.hpp"
#include "portnav/worldgen.hpp"

namespace portnav {

struct NoPathFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Piecewise-linear global path with precomputed cumulative arclength.
class GlobalPath {
 public:
  explicit GlobalPath(std::vector<Point2> waypoints);

  const std::vector<Point2>& waypoints() const { return waypoints_; }
  const std::vector<double>& cumulative_arclength() const { return cumulative_; }
  double length() const { return cumulative_.back(); }

  // Point at clamped arclength s.
  Point2 point_at(double s) const;
  // Unit tangent of the segment containing clamped arclength s.
  Vec2 tangent_at(double s) const;

  struct ClosestPoint {
    Point2 point;
    double arclength;
    std::size_t segment;
  };
  ClosestPoint closest_point(Point2 p) const;

 private:
  std::vector<Point2> waypoints_;
  std::vector<double> cumulative_;
};

struct LosError {
  double e_x = 0.0;    // along-track deviation to the closest path point, m
  double e_y = 0.0;    // cross-track deviation (positive to starboard of the path), m
  double e_psi = 0.0;  // heading error toward the lookahead point, deg, [-180, 180)
};

struct RrtConfig {
  double steer_step = 50.0;
  double goal_bias = 0.05;
  double safety_margin = 15.0;
  double gamma = 0.0;  // near-radius scale; 0 derives it from the sampling area
  static RrtConfig from_config(const Config& cfg);
};

// RRT* over the world's static obstacles. Deterministic in seed; cost is
// non-increasing in budget for a fixed seed because the iteration stream is
// budget-independent and the best shortcut-smoothed candidate is kept.
GlobalPath plan_rrt_star(const WorldSpec& world, Point2 start, const GoalRegion& goal,
                         int budget, std::uint64_t seed, const RrtConfig& cfg = {});

LosError los_errors(const GlobalPath& path, const VesselState& state, double lookahead);

// k points along the path from the closest point at fixed arclength spacing,
// in the vessel's body frame (x starboard, y forward). A path shorter than
// k*spacing repeats the final waypoint.
std::vector<Point2> nearest_path_points(const GlobalPath& path, const VesselState& state, int k,
                                        double spacing);

}  // namespace portnav
