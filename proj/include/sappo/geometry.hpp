#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace sappo {

constexpr double kPi = std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into (-pi, pi].
double wrap_angle(double rad);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend Vec2 operator*(Vec2 v, double s) { return {s * v.x, s * v.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec2 xy() const { return {x, y}; }

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
  friend bool operator==(Vec3, Vec3) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 unit_from_angle(double rad) { return {std::cos(rad), std::sin(rad)}; }
inline double heading_of(Vec2 v) { return std::atan2(v.y, v.x); }

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 v) { return std::sqrt(dot(v, v)); }
inline double distance(Vec3 a, Vec3 b) { return norm(a - b); }

/// Planar position plus heading (radians, counter-clockwise from +x).
struct Pose2 {
  Vec2 position;
  double heading = 0.0;
};

struct Segment2 {
  Vec2 a;
  Vec2 b;

  double length() const { return distance(a, b); }
};

/// True when the open segments cross at a single interior point of both.
/// Touching at an endpoint or collinear overlap does not count.
bool segments_cross(const Segment2& s, const Segment2& t);

/// Simple polygon room, vertices counter-clockwise. Throws on invalid input.
class Room {
 public:
  Room() = default;
  explicit Room(std::vector<Vec2> vertices);

  static Room rectangle(double width, double length);

  std::span<const Vec2> vertices() const { return vertices_; }
  const std::vector<Segment2>& walls() const { return walls_; }
  double area() const;
  bool contains(Vec2 p) const;
  /// True when the straight segment between two points crosses a wall.
  bool blocks(Vec2 from, Vec2 to) const;
  /// Axis-aligned bounding box as (min, max).
  std::pair<Vec2, Vec2> bounds() const;
  bool empty() const { return vertices_.empty(); }

 private:
  std::vector<Vec2> vertices_;
  std::vector<Segment2> walls_;
};

/// Planar emission/reception cone.
struct Cone2 {
  Vec2 apex;
  double axis_angle = 0.0;
  double aperture = deg_to_rad(30.0);
  double range = 9.0;
};

// Coverage formulas. Angles in radians, lengths in meters.
double footprint_diameter(double height, double beta);
double disc_area(double diameter);
double sector_area(double radius, double arc);
/// Area of the intersection of two circles of equal radius at center distance d.
double lens_area(double radius, double center_distance);
/// Area of the isosceles triangle that approximates a horizontal cone of
/// aperture beta projected to a distance h.
double cone_triangle_area(double h, double beta);

Vec2 mirror_across_wall(Vec2 p, const Segment2& wall);
bool in_cone(const Cone2& cone, Vec2 p);

}  // namespace sappo
