#include "portnav/global_planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "portnav/rng.hpp"

namespace portnav {

GlobalPath::GlobalPath(std::vector<Point2> waypoints) {
  for (const Point2& p : waypoints) {
    if (waypoints_.empty() || distance(waypoints_.back(), p) > 1e-9) {
      waypoints_.push_back(p);
    }
  }
  if (waypoints_.size() < 2) {
    throw std::invalid_argument("path needs at least 2 distinct waypoints");
  }
  cumulative_.resize(waypoints_.size());
  cumulative_[0] = 0.0;
  for (std::size_t i = 1; i < waypoints_.size(); ++i) {
    cumulative_[i] = cumulative_[i - 1] + distance(waypoints_[i - 1], waypoints_[i]);
  }
}

Point2 GlobalPath::point_at(double s) const {
  if (s <= 0.0) {
    return waypoints_.front();
  }
  if (s >= length()) {
    return waypoints_.back();
  }
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());
  const double seg_len = cumulative_[i] - cumulative_[i - 1];
  const double t = (s - cumulative_[i - 1]) / seg_len;
  return waypoints_[i - 1] + (t * (waypoints_[i] - waypoints_[i - 1]));
}

Vec2 GlobalPath::tangent_at(double s) const {
  std::size_t i = 1;
  if (s >= length()) {
    i = waypoints_.size() - 1;
  } else if (s > 0.0) {
    i = static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), s) -
                                 cumulative_.begin());
  }
  const Vec2 d = waypoints_[i] - waypoints_[i - 1];
  const double n = norm(d);
  return {d.x / n, d.y / n};
}

GlobalPath::ClosestPoint GlobalPath::closest_point(Point2 p) const {
  ClosestPoint best{waypoints_.front(), 0.0, 0};
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < waypoints_.size(); ++i) {
    const Point2& a = waypoints_[i];
    const Point2& b = waypoints_[i + 1];
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    const Point2 q = a + (t * ab);
    const double d = distance(p, q);
    if (d < best_dist) {
      best_dist = d;
      best = ClosestPoint{q, cumulative_[i] + t * std::sqrt(len2), i};
    }
  }
  return best;
}

RrtConfig RrtConfig::from_config(const Config& cfg) {
  RrtConfig r;
  const std::string s = "planner";
  r.steer_step = cfg.get_double(s, "steer_step", r.steer_step);
  r.goal_bias = cfg.get_double(s, "goal_bias", r.goal_bias);
  r.safety_margin = cfg.get_double(s, "safety_margin", r.safety_margin);
  r.gamma = cfg.get_double(s, "gamma", r.gamma);
  return r;
}

namespace {

struct Tree {
  std::vector<Point2> pts;
  std::vector<int> parent;
  std::vector<double> cost;  // cost-to-come, kept consistent on rewire
};

double path_cost(const std::vector<Point2>& pts) {
  double c = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    c += distance(pts[i - 1], pts[i]);
  }
  return c;
}

// Greedy shortcutting: repeatedly connect each vertex to the furthest
// visible successor. Deterministic.
std::vector<Point2> shortcut(const WorldSpec& world, std::vector<Point2> pts, double margin) {
  bool improved = true;
  while (improved && pts.size() > 2) {
    improved = false;
    std::vector<Point2> out;
    out.push_back(pts.front());
    std::size_t i = 0;
    while (i + 1 < pts.size()) {
      std::size_t j = pts.size() - 1;
      for (; j > i + 1; --j) {
        if (world_segment_clearance(world, pts[i], pts[j]) >= margin) {
          break;
        }
      }
      if (j > i + 1) {
        improved = true;
      }
      out.push_back(pts[j]);
      i = j;
    }
    pts = std::move(out);
  }
  return pts;
}

std::vector<Point2> extract(const Tree& tree, int node) {
  std::vector<Point2> rev;
  for (int n = node; n >= 0; n = tree.parent[static_cast<std::size_t>(n)]) {
    rev.push_back(tree.pts[static_cast<std::size_t>(n)]);
  }
  std::reverse(rev.begin(), rev.end());
  return rev;
}

}  // namespace

GlobalPath plan_rrt_star(const WorldSpec& world, Point2 start, const GoalRegion& goal, int budget,
                         std::uint64_t seed, const RrtConfig& cfg) {
  if (budget <= 0) {
    throw std::invalid_argument("budget must be positive");
  }
  if (!in_free_space(world, start)) {
    throw NoPathFound("start is not in free space");
  }
  if (distance(start, goal.center) <= goal.radius) {
    Point2 end = goal.center;
    if (distance(start, end) < 1e-9) {
      end.y += 1.0;
    }
    return GlobalPath({start, end});
  }

  const double min_x = world.waterway.bbox_min_x();
  const double max_x = world.waterway.bbox_max_x();
  const double min_y = world.waterway.bbox_min_y();
  const double max_y = world.waterway.bbox_max_y();
  const double area = (max_x - min_x) * (max_y - min_y);
  const double gamma = cfg.gamma > 0.0 ? cfg.gamma : 2.5 * std::sqrt(area / kPi);

  const auto edge_ok = [&](Point2 a, Point2 b) {
    return world_segment_clearance(world, a, b) >= cfg.safety_margin;
  };

  Rng rng(seed);
  Tree tree;
  tree.pts.push_back(start);
  tree.parent.push_back(-1);
  tree.cost.push_back(0.0);

  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<Point2> best_path;
  std::vector<int> goal_nodes;
  double best_goal_cost = std::numeric_limits<double>::infinity();

  const auto consider_goal_improvement = [&]() {
    double raw = std::numeric_limits<double>::infinity();
    int raw_node = -1;
    for (int g : goal_nodes) {
      const double c = tree.cost[static_cast<std::size_t>(g)];
      if (c < raw) {
        raw = c;
        raw_node = g;
      }
    }
    if (raw_node < 0 || raw >= best_goal_cost - 1e-12) {
      return;
    }
    best_goal_cost = raw;
    std::vector<Point2> smoothed = shortcut(world, extract(tree, raw_node), cfg.safety_margin);
    const double c = path_cost(smoothed);
    if (c < best_cost) {
      best_cost = c;
      best_path = std::move(smoothed);
    }
  };

  for (int iter = 0; iter < budget; ++iter) {
    // Goal-biased uniform sampling over the waterway bounding box.
    Point2 sample;
    if (rng.uniform() < cfg.goal_bias) {
      sample = goal.center;
    } else {
      sample = {rng.uniform(min_x, max_x), rng.uniform(min_y, max_y)};
    }

    // Nearest node, steer toward the sample.
    int nearest = 0;
    double nearest_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tree.pts.size(); ++i) {
      const double d = distance(tree.pts[i], sample);
      if (d < nearest_d) {
        nearest_d = d;
        nearest = static_cast<int>(i);
      }
    }
    Point2 q = sample;
    if (nearest_d > cfg.steer_step) {
      const Vec2 dir = sample - tree.pts[static_cast<std::size_t>(nearest)];
      q = tree.pts[static_cast<std::size_t>(nearest)] + ((cfg.steer_step / nearest_d) * dir);
    }
    if (point_clearance(world, q) < cfg.safety_margin) {
      continue;
    }

    // Near set with the shrinking radius; parent = cheapest valid connection.
    const double n = static_cast<double>(tree.pts.size());
    const double radius = std::clamp(gamma * std::sqrt(std::log(n + 1.0) / (n + 1.0)),
                                     cfg.steer_step, 4.0 * cfg.steer_step);
    int parent = -1;
    double q_cost = std::numeric_limits<double>::infinity();
    std::vector<int> near;
    for (std::size_t i = 0; i < tree.pts.size(); ++i) {
      const double d = distance(tree.pts[i], q);
      if (d <= radius || static_cast<int>(i) == nearest) {
        near.push_back(static_cast<int>(i));
        const double c = tree.cost[i] + d;
        if (c < q_cost && d <= radius + 1e-9 && edge_ok(tree.pts[i], q)) {
          q_cost = c;
          parent = static_cast<int>(i);
        }
      }
    }
    if (parent < 0) {
      continue;
    }
    tree.pts.push_back(q);
    tree.parent.push_back(parent);
    tree.cost.push_back(q_cost);
    const int q_idx = static_cast<int>(tree.pts.size()) - 1;

    // Rewire the near set through q where that is cheaper.
    for (int i : near) {
      const std::size_t ui = static_cast<std::size_t>(i);
      const double d = distance(tree.pts[ui], q);
      const double via_q = q_cost + d;
      if (via_q + 1e-12 < tree.cost[ui] && edge_ok(q, tree.pts[ui])) {
        tree.parent[ui] = q_idx;
        const double delta = via_q - tree.cost[ui];
        // Propagate the improvement through the subtree.
        std::vector<int> stack{i};
        tree.cost[ui] = via_q;
        while (!stack.empty()) {
          const int u = stack.back();
          stack.pop_back();
          for (std::size_t v = 0; v < tree.pts.size(); ++v) {
            if (tree.parent[v] == u && static_cast<int>(v) != u) {
              tree.cost[v] += delta;
              stack.push_back(static_cast<int>(v));
            }
          }
        }
      }
    }

    if (distance(q, goal.center) <= goal.radius) {
      goal_nodes.push_back(q_idx);
    }
    consider_goal_improvement();
  }

  if (best_path.empty()) {
    throw NoPathFound("RRT* budget exhausted without reaching the goal region");
  }
  return GlobalPath(std::move(best_path));
}

LosError los_errors(const GlobalPath& path, const VesselState& state, double lookahead) {
  if (!(lookahead > 0.0)) {
    throw std::invalid_argument("lookahead must be positive");
  }
  const Point2 pos{state.x, state.y};
  const GlobalPath::ClosestPoint cp = path.closest_point(pos);
  const Vec2 tangent = path.tangent_at(cp.arclength);
  const Vec2 normal{tangent.y, -tangent.x};  // starboard of the path direction
  const Vec2 dev = cp.point - pos;

  LosError e;
  e.e_x = dot(dev, tangent);
  e.e_y = dot(dev, normal);

  const Point2 ahead = path.point_at(cp.arclength + lookahead);
  Vec2 to_ahead = ahead - pos;
  if (norm(to_ahead) < 1e-9) {
    to_ahead = tangent;
  }
  e.e_psi = wrap_deg_180(dir_to_bearing(to_ahead) - state.heading);
  return e;
}

std::vector<Point2> nearest_path_points(const GlobalPath& path, const VesselState& state, int k,
                                        double spacing) {
  if (k < 1) {
    throw std::invalid_argument("k must be >= 1");
  }
  const Point2 pos{state.x, state.y};
  const GlobalPath::ClosestPoint cp = path.closest_point(pos);
  const Vec2 fwd = bearing_to_dir(state.heading);
  const Vec2 stb{fwd.y, -fwd.x};
  std::vector<Point2> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const Point2 p = path.point_at(cp.arclength + spacing * static_cast<double>(i));
    const Vec2 rel = p - pos;
    out.push_back({dot(rel, stb), dot(rel, fwd)});
  }
  return out;
}

}  // namespace portnav
