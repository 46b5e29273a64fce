#pragma once

#include <span>
#include <vector>

#include "portnav/config.hpp"
#include "portnav/dynamics.hpp"
#include "portnav/geometry.hpp"
#include "portnav/worldgen.hpp"

namespace portnav {
class Rng;

struct ScanConfig {
  int num_rays = 32;
  double fov_deg = 360.0;
  double max_range = 500.0;
  double noise_sigma = 0.0;  // optional Gaussian range noise, off by default

  static ScanConfig from_config(const Config& cfg);
};

struct RangeScan {
  std::vector<double> ranges;  // body-fixed, ranges[0] dead ahead
  double fov_deg = 360.0;
  double max_range = 500.0;

  // Absolute bearing of ray i for a vessel heading `heading_deg`.
  double ray_bearing(int i, double heading_deg) const;
};

// Ray tracing from the vessel center against docks, the waterway boundary,
// buoy discs and traffic hull rectangles. Rays are body-fixed: ray 0 points
// dead ahead, the rest sweep clockwise across the field of view.
RangeScan scan(const VesselState& os, const WorldSpec& world,
               std::span<const Polygon> traffic_hulls, const ScanConfig& cfg, Rng* noise = nullptr);

}  // namespace portnav
