#include "portnav/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace portnav {
namespace {

constexpr double kEps = 1e-12;

bool on_segment(Point2 p, Point2 a, Point2 b) {
  const Vec2 ab = b - a;
  const Vec2 ap = p - a;
  if (std::abs(cross(ab, ap)) > kEps * std::max(1.0, norm(ab))) {
    return false;
  }
  const double t = dot(ap, ab);
  return t >= -kEps && t <= dot(ab, ab) + kEps;
}

}  // namespace

double wrap_deg_360(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) {
    r += 360.0;
  }
  return r == 360.0 ? 0.0 : r;
}

double wrap_deg_180(double deg) {
  double r = std::fmod(deg + 180.0, 360.0);
  if (r < 0.0) {
    r += 360.0;
  }
  return r - 180.0;
}

double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 v) { return std::hypot(v.x, v.y); }
double distance(Point2 a, Point2 b) { return norm(a - b); }

Vec2 bearing_to_dir(double bearing_deg) {
  const double r = deg_to_rad(bearing_deg);
  return {std::sin(r), std::cos(r)};
}

double dir_to_bearing(Vec2 v) { return wrap_deg_360(rad_to_deg(std::atan2(v.x, v.y))); }

Polygon::Polygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) {
    throw std::invalid_argument("polygon needs at least 3 vertices");
  }
  for (const Point2& p : vertices_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw std::invalid_argument("polygon vertex is not finite");
    }
  }
  double area2 = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = vertices_[i];
    const Point2& b = vertices_[(i + 1) % n];
    area2 += a.x * b.y - b.x * a.y;
  }
  if (std::abs(area2) < 1e-9) {
    throw std::invalid_argument("polygon is degenerate (near-zero area)");
  }
  if (area2 < 0.0) {
    std::reverse(vertices_.begin(), vertices_.end());  // normalize to CCW
  }
  // Simplicity: no two non-adjacent edges may intersect.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) {
        continue;
      }
      if (segments_intersect(vertices_[i], vertices_[(i + 1) % n], vertices_[j],
                             vertices_[(j + 1) % n])) {
        throw std::invalid_argument("polygon is self-intersecting");
      }
    }
  }
  min_x_ = min_y_ = std::numeric_limits<double>::infinity();
  max_x_ = max_y_ = -std::numeric_limits<double>::infinity();
  for (const Point2& p : vertices_) {
    min_x_ = std::min(min_x_, p.x);
    min_y_ = std::min(min_y_, p.y);
    max_x_ = std::max(max_x_, p.x);
    max_y_ = std::max(max_y_, p.y);
  }
}

Polygon Polygon::axis_aligned_box(double x_min, double y_min, double x_max, double y_max) {
  return Polygon({{x_min, y_min}, {x_max, y_min}, {x_max, y_max}, {x_min, y_max}});
}

Polygon Polygon::oriented_box(Point2 center, double length, double beam, double heading_deg) {
  const Vec2 fwd = bearing_to_dir(heading_deg);
  const Vec2 stb{fwd.y, -fwd.x};
  const double hl = 0.5 * length;
  const double hb = 0.5 * beam;
  return Polygon({center + (hl * fwd) + (hb * stb), center + (hl * fwd) + (-hb * stb),
                  center + (-hl * fwd) + (-hb * stb), center + (-hl * fwd) + (hb * stb)});
}

bool Polygon::contains(Point2 p) const {
  if (p.x < min_x_ - kEps || p.x > max_x_ + kEps || p.y < min_y_ - kEps || p.y > max_y_ + kEps) {
    return false;
  }
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (on_segment(p, vertices_[i], vertices_[(i + 1) % n])) {
      return true;
    }
  }
  // Crossing number with the half-open edge rule.
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2& a = vertices_[i];
    const Point2& b = vertices_[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_at = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < x_at) {
        inside = !inside;
      }
    }
  }
  return inside;
}

double Polygon::signed_area() const {
  double area2 = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = vertices_[i];
    const Point2& b = vertices_[(i + 1) % n];
    area2 += a.x * b.y - b.x * a.y;
  }
  return 0.5 * area2;
}

Point2 Polygon::centroid() const {
  double cx = 0.0, cy = 0.0, area2 = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = vertices_[i];
    const Point2& b = vertices_[(i + 1) % n];
    const double w = a.x * b.y - b.x * a.y;
    area2 += w;
    cx += (a.x + b.x) * w;
    cy += (a.y + b.y) * w;
  }
  return {cx / (3.0 * area2), cy / (3.0 * area2)};
}

double ray_cast(const Ray& ray, std::span<const Polygon> obstacles, double max_range) {
  if (!(max_range > 0.0)) {
    throw std::invalid_argument("max_range must be positive");
  }
  const Vec2 d = bearing_to_dir(ray.bearing_deg);
  const Point2 o = ray.origin;
  double best = max_range;
  for (const Polygon& poly : obstacles) {
    // Conservative box prefilter: skip polygons whose box cannot be reached.
    const double r = best;
    if (poly.bbox_max_x() < o.x - r || poly.bbox_min_x() > o.x + r || poly.bbox_max_y() < o.y - r ||
        poly.bbox_min_y() > o.y + r) {
      continue;
    }
    const auto& v = poly.vertices();
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2& a = v[i];
      const Point2& b = v[(i + 1) % n];
      const Vec2 e = b - a;
      const double denom = cross(d, e);
      const Vec2 ao = a - o;
      if (std::abs(denom) < kEps) {
        // Parallel. Collinear overlap: nearest in-range endpoint wins.
        if (std::abs(cross(ao, d)) < kEps) {
          for (const Point2& q : {a, b}) {
            const double t = dot(q - o, d);
            if (t >= 0.0 && t < best) {
              best = t;
            }
          }
        }
        continue;
      }
      const double t = cross(ao, e) / denom;
      const double u = cross(ao, d) / denom;
      if (t >= 0.0 && u >= -kEps && u <= 1.0 + kEps && t < best) {
        best = t;
      }
    }
  }
  return best;
}

double ray_cast_disc(const Ray& ray, const Disc& disc, double max_range) {
  const Vec2 d = bearing_to_dir(ray.bearing_deg);
  const Vec2 oc = disc.center - ray.origin;
  const double proj = dot(oc, d);
  const double perp2 = dot(oc, oc) - proj * proj;
  const double r2 = disc.radius * disc.radius;
  if (perp2 > r2) {
    return max_range;
  }
  const double h = std::sqrt(r2 - perp2);
  double t = proj - h;
  if (t < 0.0) {
    t = proj + h;  // origin inside the disc
  }
  return (t >= 0.0 && t < max_range) ? t : max_range;
}

bool point_in_any(Point2 p, std::span<const Polygon> obstacles) {
  for (const Polygon& poly : obstacles) {
    if (poly.contains(p)) {
      return true;
    }
  }
  return false;
}

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 < kEps) {
    return distance(p, a);
  }
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + (t * ab));
}

bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  return (std::abs(d1) < kEps && on_segment(c, a, b)) ||
         (std::abs(d2) < kEps && on_segment(d, a, b)) ||
         (std::abs(d3) < kEps && on_segment(a, c, d)) ||
         (std::abs(d4) < kEps && on_segment(b, c, d));
}

double segment_segment_distance(Point2 a, Point2 b, Point2 c, Point2 d) {
  if (segments_intersect(a, b, c, d)) {
    return 0.0;
  }
  return std::min(std::min(point_segment_distance(a, c, d), point_segment_distance(b, c, d)),
                  std::min(point_segment_distance(c, a, b), point_segment_distance(d, a, b)));
}

double segment_clearance(Point2 a, Point2 b, std::span<const Polygon> obstacles) {
  if (a.x == b.x && a.y == b.y) {
    throw std::invalid_argument("segment endpoints must differ");
  }
  double best = std::numeric_limits<double>::infinity();
  for (const Polygon& poly : obstacles) {
    if (poly.contains(a) || poly.contains(b)) {
      return 0.0;
    }
    const auto& v = poly.vertices();
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
      best = std::min(best, segment_segment_distance(a, b, v[i], v[(i + 1) % n]));
      if (best == 0.0) {
        return 0.0;
      }
    }
  }
  return best;
}

double segment_disc_clearance(Point2 a, Point2 b, const Disc& disc) {
  return std::max(0.0, point_segment_distance(disc.center, a, b) - disc.radius);
}

bool polygons_overlap(const Polygon& a, const Polygon& b) {
  if (a.bbox_min_x() > b.bbox_max_x() || b.bbox_min_x() > a.bbox_max_x() ||
      a.bbox_min_y() > b.bbox_max_y() || b.bbox_min_y() > a.bbox_max_y()) {
    return false;
  }
  const auto& va = a.vertices();
  const auto& vb = b.vertices();
  for (std::size_t i = 0; i < va.size(); ++i) {
    for (std::size_t j = 0; j < vb.size(); ++j) {
      if (segments_intersect(va[i], va[(i + 1) % va.size()], vb[j], vb[(j + 1) % vb.size()])) {
        return true;
      }
    }
  }
  return a.contains(vb[0]) || b.contains(va[0]);
}

bool disc_polygon_overlap(const Disc& d, const Polygon& p) {
  if (p.contains(d.center)) {
    return true;
  }
  const auto& v = p.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (point_segment_distance(d.center, v[i], v[(i + 1) % v.size()]) <= d.radius) {
      return true;
    }
  }
  return false;
}

}  // namespace portnav
