#include "portnav/sensors.hpp"

#include <algorithm>
#include <stdexcept>

#include "portnav/rng.hpp"

namespace portnav {

ScanConfig ScanConfig::from_config(const Config& cfg) {
  ScanConfig s;
  s.num_rays = static_cast<int>(cfg.get_int("sensors", "num_rays", s.num_rays));
  s.fov_deg = cfg.get_double("sensors", "fov_deg", s.fov_deg);
  s.max_range = cfg.get_double("sensors", "max_range", s.max_range);
  s.noise_sigma = cfg.get_double("sensors", "noise_sigma", s.noise_sigma);
  return s;
}

double RangeScan::ray_bearing(int i, double heading_deg) const {
  const int n = static_cast<int>(ranges.size());
  double offset;
  if (fov_deg >= 360.0) {
    offset = 360.0 * static_cast<double>(i) / static_cast<double>(n);
  } else {
    offset = n > 1 ? -0.5 * fov_deg + fov_deg * static_cast<double>(i) / static_cast<double>(n - 1)
                   : 0.0;
  }
  return wrap_deg_360(heading_deg + offset);
}

RangeScan scan(const VesselState& os, const WorldSpec& world,
               std::span<const Polygon> traffic_hulls, const ScanConfig& cfg, Rng* noise) {
  if (cfg.num_rays < 1 || !(cfg.max_range > 0.0)) {
    throw std::invalid_argument("invalid scan config");
  }
  RangeScan out;
  out.fov_deg = cfg.fov_deg;
  out.max_range = cfg.max_range;
  out.ranges.resize(static_cast<std::size_t>(cfg.num_rays));

  const Point2 origin{os.x, os.y};
  const std::span<const Polygon> waterway(&world.waterway, 1);
  const std::span<const Polygon> docks(world.docks);

  for (int i = 0; i < cfg.num_rays; ++i) {
    const Ray ray(origin, out.ray_bearing(i, os.heading));
    double r = ray_cast(ray, waterway, cfg.max_range);
    r = ray_cast(ray, docks, r);
    r = ray_cast(ray, traffic_hulls, r);
    for (const Disc& buoy : world.buoys) {
      r = ray_cast_disc(ray, buoy, r);
    }
    if (noise != nullptr && cfg.noise_sigma > 0.0) {
      r += cfg.noise_sigma * noise->normal();
    }
    out.ranges[static_cast<std::size_t>(i)] = std::clamp(r, 0.01, cfg.max_range);
  }
  return out;
}

}  // namespace portnav
