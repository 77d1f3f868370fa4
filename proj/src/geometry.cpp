#include "sappo/geometry.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "sappo/error.hpp"

namespace sappo {

namespace {

// Orientation of c relative to the directed line a->b.
double orient(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

void check_finite(Vec2 p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
    throw Error(ErrorCode::invalid_room, "room vertex is not finite");
  }
}

}  // namespace

double wrap_angle(double rad) {
  double r = std::remainder(rad, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

bool segments_cross(const Segment2& s, const Segment2& t) {
  // Scale-aware tolerance so that endpoint contact is never reported as a crossing.
  const double scale = std::max({s.length(), t.length(), 1.0});
  const double eps = 1e-12 * scale * scale;
  const double d1 = orient(s.a, s.b, t.a);
  const double d2 = orient(s.a, s.b, t.b);
  const double d3 = orient(t.a, t.b, s.a);
  const double d4 = orient(t.a, t.b, s.b);
  return ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) &&
         ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps));
}

Room::Room(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) {
    throw Error(ErrorCode::invalid_room, "room needs at least 3 vertices");
  }
  for (const auto& v : vertices_) check_finite(v);
  const std::size_t n = vertices_.size();
  walls_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Segment2 w{vertices_[i], vertices_[(i + 1) % n]};
    if (w.length() == 0.0) {
      throw Error(ErrorCode::invalid_room, "room has a zero-length wall at vertex " + std::to_string(i));
    }
    walls_.push_back(w);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the closing wall
      if (segments_cross(walls_[i], walls_[j])) {
        throw Error(ErrorCode::invalid_room, "room walls " + std::to_string(i) + " and " +
                                                 std::to_string(j) + " intersect");
      }
    }
  }
  if (area() <= 0.0) {
    throw Error(ErrorCode::invalid_room, "room vertices must be counter-clockwise with nonzero area");
  }
}

Room Room::rectangle(double width, double length) {
  return Room({{0.0, 0.0}, {width, 0.0}, {width, length}, {0.0, length}});
}

double Room::area() const {
  double twice = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    twice += cross(vertices_[i], vertices_[(i + 1) % n]);
  }
  return 0.5 * twice;
}

bool Room::contains(Vec2 p) const {
  // Crossing-number test; boundary points count as inside.
  bool inside = false;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = vertices_[j];
    const Vec2 b = vertices_[i];
    const Vec2 ab = b - a;
    const double len = norm(ab);
    if (std::abs(cross(ab, p - a)) <= 1e-12 * std::max(len, 1.0) &&
        dot(p - a, p - b) <= 1e-12) {
      return true;
    }
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_at = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_at) inside = !inside;
    }
  }
  return inside;
}

bool Room::blocks(Vec2 from, Vec2 to) const {
  const Segment2 path{from, to};
  return std::any_of(walls_.begin(), walls_.end(),
                     [&](const Segment2& w) { return segments_cross(path, w); });
}

std::pair<Vec2, Vec2> Room::bounds() const {
  Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Vec2 hi{-lo.x, -lo.y};
  for (const auto& v : vertices_) {
    lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
    hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
  }
  return {lo, hi};
}

double footprint_diameter(double height, double beta) {
  if (!(beta > 0.0 && beta < kPi)) {
    throw Error(ErrorCode::domain, "cone aperture must lie in (0, pi)");
  }
  if (height < 0.0) throw Error(ErrorCode::domain, "height must be non-negative");
  return 2.0 * height * std::tan(beta / 2.0);
}

double disc_area(double diameter) {
  if (diameter < 0.0) throw Error(ErrorCode::domain, "diameter must be non-negative");
  const double r = diameter / 2.0;
  return kPi * r * r;
}

double sector_area(double radius, double arc) {
  if (radius < 0.0) throw Error(ErrorCode::domain, "radius must be non-negative");
  if (!(arc >= 0.0 && arc <= 2.0 * kPi)) throw Error(ErrorCode::domain, "arc must lie in [0, 2pi]");
  return radius * radius * arc / 2.0;
}

double lens_area(double radius, double center_distance) {
  if (!(radius > 0.0)) throw Error(ErrorCode::domain, "radius must be positive");
  if (center_distance < 0.0) throw Error(ErrorCode::domain, "center distance must be non-negative");
  const double d = center_distance;
  if (d >= 2.0 * radius) return 0.0;
  const double r2 = radius * radius;
  return 2.0 * r2 * std::acos(d / (2.0 * radius)) - 0.5 * d * std::sqrt(4.0 * r2 - d * d);
}

double cone_triangle_area(double h, double beta) {
  const double base = footprint_diameter(h, beta);
  return 0.5 * base * h;
}

Vec2 mirror_across_wall(Vec2 p, const Segment2& wall) {
  const Vec2 dir = wall.b - wall.a;
  const double len2 = dot(dir, dir);
  if (len2 == 0.0) throw Error(ErrorCode::degenerate_wall, "wall has zero length");
  const double t = dot(p - wall.a, dir) / len2;
  const Vec2 foot = wall.a + t * dir;
  return 2.0 * foot - p;
}

bool in_cone(const Cone2& cone, Vec2 p) {
  const Vec2 rel = p - cone.apex;
  const double dist = norm(rel);
  if (dist > cone.range) return false;
  if (dist == 0.0) return true;
  const double off = std::abs(wrap_angle(heading_of(rel) - cone.axis_angle));
  return off <= cone.aperture / 2.0 + 1e-12;
}

}  // namespace sappo
