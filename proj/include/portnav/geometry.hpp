#pragma once

#include <span>
#include <vector>

namespace portnav {

constexpr double kPi = 3.141592653589793238462643383279502884;

inline double deg_to_rad(double d) { return d * (kPi / 180.0); }
inline double rad_to_deg(double r) { return r * (180.0 / kPi); }

// Wrap an angle in degrees to [0, 360).
double wrap_deg_360(double deg);
// Wrap an angle in degrees to [-180, 180).
double wrap_deg_180(double deg);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 p, Vec2 v) { return {p.x + v.x, p.y + v.y}; }
inline Vec2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
double dot(Vec2 a, Vec2 b);
double cross(Vec2 a, Vec2 b);
double norm(Vec2 v);
double distance(Point2 a, Point2 b);

// Unit vector of a compass bearing: degrees clockwise from +y (north).
Vec2 bearing_to_dir(double bearing_deg);
// Compass bearing of a direction vector, in [0, 360).
double dir_to_bearing(Vec2 v);

// Simple polygon, counter-clockwise, implicitly closed. Construction
// validates the invariants; operations may then assume them.
class Polygon {
 public:
  explicit Polygon(std::vector<Point2> vertices);

  static Polygon axis_aligned_box(double x_min, double y_min, double x_max, double y_max);
  // Oriented rectangle: center, full length along `heading_deg` (compass),
  // full beam across it.
  static Polygon oriented_box(Point2 center, double length, double beam, double heading_deg);

  const std::vector<Point2>& vertices() const { return vertices_; }
  // Boundary counts as inside.
  bool contains(Point2 p) const;
  double signed_area() const;
  Point2 centroid() const;

  double bbox_min_x() const { return min_x_; }
  double bbox_min_y() const { return min_y_; }
  double bbox_max_x() const { return max_x_; }
  double bbox_max_y() const { return max_y_; }

 private:
  std::vector<Point2> vertices_;
  double min_x_, min_y_, max_x_, max_y_;
};

struct Ray {
  Ray(Point2 o, double bearing) : origin(o), bearing_deg(wrap_deg_360(bearing)) {}
  Point2 origin;
  double bearing_deg;
};

struct Disc {
  Point2 center;
  double radius = 0.0;
};

// Distance to the nearest polygon-edge intersection along the ray, or
// max_range when nothing is hit within range.
double ray_cast(const Ray& ray, std::span<const Polygon> obstacles, double max_range);

// Same contract against a disc obstacle.
double ray_cast_disc(const Ray& ray, const Disc& disc, double max_range);

bool point_in_any(Point2 p, std::span<const Polygon> obstacles);

// Minimum distance from segment ab to any obstacle; 0 if intersecting.
double segment_clearance(Point2 a, Point2 b, std::span<const Polygon> obstacles);

double point_segment_distance(Point2 p, Point2 a, Point2 b);
double segment_segment_distance(Point2 a, Point2 b, Point2 c, Point2 d);
bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d);
double segment_disc_clearance(Point2 a, Point2 b, const Disc& disc);

// True when the polygons share any point (boundary contact counts).
bool polygons_overlap(const Polygon& a, const Polygon& b);
// True when the disc and polygon share any point.
bool disc_polygon_overlap(const Disc& d, const Polygon& p);

}  // namespace portnav
