#include "portnav/worldgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "portnav/rng.hpp"

namespace portnav {
namespace {

constexpr std::uint64_t kTaskStream = 0x7a5c;

std::uint64_t fnv1a64_u(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Free horizontal interval of the waterway at height y, after removing dock
// protrusions whose y-extent covers y.
struct Interval {
  double lo, hi;
};

Interval free_interval_at(const WorldSpec& w, double y) {
  Interval iv{w.waterway.bbox_min_x(), w.waterway.bbox_max_x()};
  for (const Polygon& dock : w.docks) {
    if (y >= dock.bbox_min_y() && y <= dock.bbox_max_y()) {
      const double mid = 0.5 * (iv.lo + iv.hi);
      if (dock.bbox_min_x() <= mid && dock.bbox_max_x() >= iv.lo) {
        iv.lo = std::max(iv.lo, dock.bbox_max_x());  // west-side dock
      }
      if (dock.bbox_max_x() >= mid && dock.bbox_min_x() <= iv.hi) {
        iv.hi = std::min(iv.hi, dock.bbox_min_x());  // east-side dock
      }
    }
  }
  return iv;
}

Point2 sample_free_point(const WorldSpec& w, const WorldgenConfig& cfg, Rng& rng, double y_lo,
                         double y_hi, double clearance) {
  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    const double y = rng.uniform(y_lo, y_hi);
    const Interval iv = free_interval_at(w, y);
    if (iv.hi - iv.lo < 2.0 * clearance) {
      continue;
    }
    const Point2 p{rng.uniform(iv.lo + clearance, iv.hi - clearance), y};
    if (point_clearance(w, p) >= clearance) {
      return p;
    }
  }
  throw WorldgenError("could not place a point in free space");
}

void place_tasks(WorldSpec& w, const WorldgenConfig& cfg, Rng& rng) {
  const double length = w.waterway.bbox_max_y() - w.waterway.bbox_min_y();
  const double y0 = w.waterway.bbox_min_y();
  const double band = std::min(cfg.start_end_band, 0.25 * length);

  w.os_start = sample_free_point(w, cfg, rng, y0 + 0.2 * band, y0 + band, cfg.start_clearance);
  w.os_heading = wrap_deg_360(rng.uniform(-15.0, 15.0));  // roughly along the channel
  const Point2 goal_center = sample_free_point(w, cfg, rng, y0 + length - band,
                                               y0 + length - 0.2 * band, cfg.start_clearance);
  w.os_goal = GoalRegion{goal_center, cfg.goal_radius};

  for (const Disc& buoy : w.buoys) {
    if (distance(buoy.center, w.os_start) < cfg.buoy_start_clearance + buoy.radius) {
      throw WorldgenError("start too close to a buoy");
    }
  }

  w.traffic_tasks.clear();
  for (int i = 0; i < cfg.ranges.n_traffic; ++i) {
    for (int attempt = 0;; ++attempt) {
      if (attempt >= cfg.max_attempts) {
        throw WorldgenError("could not place traffic task");
      }
      const Point2 s =
          sample_free_point(w, cfg, rng, y0 + 0.05 * length, y0 + 0.95 * length,
                            cfg.start_clearance);
      const Point2 g =
          sample_free_point(w, cfg, rng, y0 + 0.05 * length, y0 + 0.95 * length,
                            cfg.start_clearance);
      if (distance(s, g) < cfg.traffic_min_leg) {
        continue;
      }
      if (distance(s, w.os_start) < cfg.traffic_os_clearance) {
        continue;
      }
      w.traffic_tasks.push_back(TrafficTask{s, GoalRegion{g, cfg.goal_radius}});
      break;
    }
  }
}

WorldSpec build_geometry(const WorldgenConfig& cfg, Rng& rng, std::uint64_t seed) {
  const RandomizationRanges& rr = cfg.ranges;
  const double dock_len = rng.uniform(rr.dock_length_min, rr.dock_length_max);
  const double offset = rng.uniform(rr.center_offset_min, rr.center_offset_max);
  const double width = rng.uniform(rr.waterway_width_min, rr.waterway_width_max);
  const double length = cfg.world_length;

  WorldSpec w{
      Polygon::axis_aligned_box(offset - 0.5 * width, 0.0, offset + 0.5 * width, length),
      {},
      {},
      {},
      0.0,
      GoalRegion{},
      {},
      seed,
      dock_len,
      offset,
      width,
  };

  // Quay structures protrude from alternating walls along the backbone. The
  // protrusion depth is capped so a wide passage always remains.
  const double depth_cap = cfg.dock_depth_width_cap * width;
  bool west = rng.uniform() < 0.5;
  double cursor = rng.uniform(cfg.dock_gap_min, cfg.dock_gap_max) + cfg.dock_end_margin;
  while (cursor + dock_len <= length - cfg.dock_end_margin) {
    const double depth =
        std::min(rng.uniform(cfg.dock_depth_min, cfg.dock_depth_max), depth_cap);
    const double x_wall = west ? offset - 0.5 * width : offset + 0.5 * width;
    const double x_in = west ? x_wall + depth : x_wall - depth;
    w.docks.push_back(Polygon::axis_aligned_box(std::min(x_wall, x_in), cursor,
                                                std::max(x_wall, x_in), cursor + dock_len));
    cursor += dock_len + rng.uniform(cfg.dock_gap_min, cfg.dock_gap_max);
    west = !west;
  }

  const int n_buoys = cfg.buoys_min + static_cast<int>(rng.uniform_int(
                          static_cast<std::uint64_t>(cfg.buoys_max - cfg.buoys_min + 1)));
  for (int i = 0; i < n_buoys; ++i) {
    const double radius = rng.uniform(cfg.buoy_radius_min, cfg.buoy_radius_max);
    for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
      const Point2 c{rng.uniform(w.waterway.bbox_min_x(), w.waterway.bbox_max_x()),
                     rng.uniform(cfg.dock_end_margin, length - cfg.dock_end_margin)};
      if (point_clearance(w, c) >= cfg.buoy_wall_clearance + radius) {
        w.buoys.push_back(Disc{c, radius});
        break;
      }
    }
  }
  return w;
}

void validate_world(const WorldSpec& w, const WorldgenConfig& cfg) {
  if (!in_free_space(w, w.os_start)) {
    throw WorldgenError("os_start not in free space");
  }
  if (!in_free_space(w, w.os_goal.center)) {
    throw WorldgenError("os_goal not in free space");
  }
  for (const TrafficTask& t : w.traffic_tasks) {
    if (!in_free_space(w, t.start) || !in_free_space(w, t.goal.center)) {
      throw WorldgenError("traffic task not in free space");
    }
  }
  for (std::size_t i = 0; i < w.docks.size(); ++i) {
    for (std::size_t j = i + 1; j < w.docks.size(); ++j) {
      if (polygons_overlap(w.docks[i], w.docks[j])) {
        throw WorldgenError("docks overlap");
      }
    }
  }
  for (const Disc& b : w.buoys) {
    if (distance(b.center, w.os_start) < cfg.buoy_start_clearance) {
      throw WorldgenError("buoy too close to start");
    }
  }
}

nlohmann::json polygon_to_json(const Polygon& p) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Point2& v : p.vertices()) {
    arr.push_back({v.x, v.y});
  }
  return arr;
}

Polygon polygon_from_json(const nlohmann::json& j) {
  std::vector<Point2> vs;
  for (const auto& v : j) {
    vs.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
  }
  return Polygon(std::move(vs));
}

}  // namespace

void RandomizationRanges::validate() const {
  if (!(dock_length_min < dock_length_max) || !(center_offset_min < center_offset_max) ||
      !(waterway_width_min < waterway_width_max)) {
    throw WorldgenError("randomization ranges must have min < max");
  }
  if (n_traffic < 0) {
    throw WorldgenError("n_traffic must be >= 0");
  }
}

WorldgenConfig WorldgenConfig::from_config(const Config& cfg) {
  WorldgenConfig w;
  const std::string s = "worldgen";
  w.ranges.dock_length_min = cfg.get_double(s, "dock_length_min", w.ranges.dock_length_min);
  w.ranges.dock_length_max = cfg.get_double(s, "dock_length_max", w.ranges.dock_length_max);
  w.ranges.center_offset_min = cfg.get_double(s, "center_offset_min", w.ranges.center_offset_min);
  w.ranges.center_offset_max = cfg.get_double(s, "center_offset_max", w.ranges.center_offset_max);
  w.ranges.waterway_width_min =
      cfg.get_double(s, "waterway_width_min", w.ranges.waterway_width_min);
  w.ranges.waterway_width_max =
      cfg.get_double(s, "waterway_width_max", w.ranges.waterway_width_max);
  w.ranges.n_traffic = static_cast<int>(cfg.get_int(s, "n_traffic", w.ranges.n_traffic));
  w.world_length = cfg.get_double(s, "world_length", w.world_length);
  w.dock_depth_min = cfg.get_double(s, "dock_depth_min", w.dock_depth_min);
  w.dock_depth_max = cfg.get_double(s, "dock_depth_max", w.dock_depth_max);
  w.dock_depth_width_cap = cfg.get_double(s, "dock_depth_width_cap", w.dock_depth_width_cap);
  w.dock_gap_min = cfg.get_double(s, "dock_gap_min", w.dock_gap_min);
  w.dock_gap_max = cfg.get_double(s, "dock_gap_max", w.dock_gap_max);
  w.dock_end_margin = cfg.get_double(s, "dock_end_margin", w.dock_end_margin);
  w.buoys_min = static_cast<int>(cfg.get_int(s, "buoys_min", w.buoys_min));
  w.buoys_max = static_cast<int>(cfg.get_int(s, "buoys_max", w.buoys_max));
  w.buoy_radius_min = cfg.get_double(s, "buoy_radius_min", w.buoy_radius_min);
  w.buoy_radius_max = cfg.get_double(s, "buoy_radius_max", w.buoy_radius_max);
  w.buoy_start_clearance = cfg.get_double(s, "buoy_start_clearance", w.buoy_start_clearance);
  w.buoy_wall_clearance = cfg.get_double(s, "buoy_wall_clearance", w.buoy_wall_clearance);
  w.goal_radius = cfg.get_double(s, "goal_radius", w.goal_radius);
  w.start_clearance = cfg.get_double(s, "start_clearance", w.start_clearance);
  w.start_end_band = cfg.get_double(s, "start_end_band", w.start_end_band);
  w.traffic_min_leg = cfg.get_double(s, "traffic_min_leg", w.traffic_min_leg);
  w.traffic_os_clearance = cfg.get_double(s, "traffic_os_clearance", w.traffic_os_clearance);
  w.max_attempts = static_cast<int>(cfg.get_int(s, "max_attempts", w.max_attempts));
  return w;
}

WorldSpec sample_world(const WorldgenConfig& cfg, std::uint64_t seed) {
  cfg.ranges.validate();
  WorldgenError last{"world sampling failed"};
  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(attempt)));
    try {
      WorldSpec w = build_geometry(cfg, rng, seed);
      place_tasks(w, cfg, rng);
      validate_world(w, cfg);
      return w;
    } catch (const WorldgenError& e) {
      last = e;
    }
  }
  throw WorldgenError(std::string("sample_world: ranges appear infeasible: ") + last.what());
}

WorldSpec sample_tasks(const WorldSpec& world, const WorldgenConfig& cfg, std::uint64_t seed) {
  WorldgenError last{"task sampling failed"};
  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    Rng rng(Rng::derive(Rng::derive(seed, kTaskStream), static_cast<std::uint64_t>(attempt)));
    try {
      WorldSpec w = world;
      w.rng_seed = seed;
      place_tasks(w, cfg, rng);
      validate_world(w, cfg);
      return w;
    } catch (const WorldgenError& e) {
      last = e;
    }
  }
  throw WorldgenError(std::string("sample_tasks: world appears infeasible: ") + last.what());
}

double point_clearance(const WorldSpec& world, Point2 p) {
  if (!world.waterway.contains(p)) {
    return 0.0;
  }
  double best = std::numeric_limits<double>::infinity();
  const auto& wv = world.waterway.vertices();
  for (std::size_t i = 0; i < wv.size(); ++i) {
    best = std::min(best, point_segment_distance(p, wv[i], wv[(i + 1) % wv.size()]));
  }
  for (const Polygon& dock : world.docks) {
    if (dock.contains(p)) {
      return 0.0;
    }
    const auto& v = dock.vertices();
    for (std::size_t i = 0; i < v.size(); ++i) {
      best = std::min(best, point_segment_distance(p, v[i], v[(i + 1) % v.size()]));
    }
  }
  for (const Disc& b : world.buoys) {
    const double d = distance(p, b.center) - b.radius;
    if (d <= 0.0) {
      return 0.0;
    }
    best = std::min(best, d);
  }
  return best;
}

double world_segment_clearance(const WorldSpec& world, Point2 a, Point2 b) {
  double best = std::numeric_limits<double>::infinity();
  if (!world.waterway.contains(a) || !world.waterway.contains(b)) {
    return 0.0;
  }
  const auto& wv = world.waterway.vertices();
  for (std::size_t i = 0; i < wv.size(); ++i) {
    best = std::min(best, segment_segment_distance(a, b, wv[i], wv[(i + 1) % wv.size()]));
  }
  std::span<const Polygon> docks(world.docks);
  best = std::min(best, segment_clearance(a, b, docks));
  for (const Disc& buoy : world.buoys) {
    best = std::min(best, segment_disc_clearance(a, b, buoy));
  }
  return best;
}

bool in_free_space(const WorldSpec& world, Point2 p) {
  if (!world.waterway.contains(p)) {
    return false;
  }
  for (const Polygon& dock : world.docks) {
    if (dock.contains(p)) {
      return false;
    }
  }
  for (const Disc& b : world.buoys) {
    if (distance(p, b.center) <= b.radius) {
      return false;
    }
  }
  return true;
}

nlohmann::json WorldSpec::to_json() const {
  nlohmann::json j;
  j["version"] = 1;
  j["rng_seed"] = rng_seed;
  j["dock_length"] = dock_length;
  j["center_offset"] = center_offset;
  j["waterway_width"] = waterway_width;
  j["waterway"] = polygon_to_json(waterway);
  nlohmann::json docks_j = nlohmann::json::array();
  for (const Polygon& d : docks) {
    docks_j.push_back(polygon_to_json(d));
  }
  j["docks"] = std::move(docks_j);
  nlohmann::json buoys_j = nlohmann::json::array();
  for (const Disc& b : buoys) {
    buoys_j.push_back({{"x", b.center.x}, {"y", b.center.y}, {"radius", b.radius}});
  }
  j["buoys"] = std::move(buoys_j);
  j["os_start"] = {{"x", os_start.x}, {"y", os_start.y}, {"heading", os_heading}};
  j["os_goal"] = {{"x", os_goal.center.x}, {"y", os_goal.center.y}, {"radius", os_goal.radius}};
  nlohmann::json tasks = nlohmann::json::array();
  for (const TrafficTask& t : traffic_tasks) {
    tasks.push_back({{"start", {{"x", t.start.x}, {"y", t.start.y}}},
                     {"goal",
                      {{"x", t.goal.center.x}, {"y", t.goal.center.y}, {"radius", t.goal.radius}}}});
  }
  j["traffic_tasks"] = std::move(tasks);
  return j;
}

WorldSpec WorldSpec::from_json(const nlohmann::json& j) {
  if (j.at("version").get<int>() != 1) {
    throw WorldgenError("unsupported world version");
  }
  WorldSpec w{polygon_from_json(j.at("waterway")),
              {},
              {},
              {},
              0.0,
              GoalRegion{},
              {},
              j.at("rng_seed").get<std::uint64_t>(),
              j.at("dock_length").get<double>(),
              j.at("center_offset").get<double>(),
              j.at("waterway_width").get<double>()};
  for (const auto& d : j.at("docks")) {
    w.docks.push_back(polygon_from_json(d));
  }
  for (const auto& b : j.at("buoys")) {
    w.buoys.push_back(Disc{{b.at("x").get<double>(), b.at("y").get<double>()},
                           b.at("radius").get<double>()});
  }
  w.os_start = {j.at("os_start").at("x").get<double>(), j.at("os_start").at("y").get<double>()};
  w.os_heading = j.at("os_start").at("heading").get<double>();
  w.os_goal = GoalRegion{{j.at("os_goal").at("x").get<double>(), j.at("os_goal").at("y").get<double>()},
                         j.at("os_goal").at("radius").get<double>()};
  for (const auto& t : j.at("traffic_tasks")) {
    w.traffic_tasks.push_back(
        TrafficTask{{t.at("start").at("x").get<double>(), t.at("start").at("y").get<double>()},
                    GoalRegion{{t.at("goal").at("x").get<double>(), t.at("goal").at("y").get<double>()},
                               t.at("goal").at("radius").get<double>()}});
  }
  return w;
}

std::uint64_t WorldSpec::hash() const { return fnv1a64_u(to_json().dump()); }

}  // namespace portnav
