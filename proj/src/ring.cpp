#include "sappo/ring.hpp"

#include <limits>

#include "sappo/error.hpp"

namespace sappo {

namespace {

void check_polygon(double side_length, int n_sides) {
  if (n_sides < 3) throw Error(ErrorCode::domain, "polygon needs at least 3 sides");
  if (!(side_length > 0.0)) throw Error(ErrorCode::domain, "side length must be positive");
}

// One active side facing the pose heading; a zero apothem degenerates to a
// point transducer at the ring center.
BuiltRing single_site_ring(double apothem_m, int n_sides, Pose2 pose, double aperture,
                           double range) {
  if (apothem_m < 0.0) throw Error(ErrorCode::domain, "apothem must be non-negative");
  if (apothem_m > 0.0) {
    PolygonRing spec;
    spec.n_sides = n_sides;
    spec.side_length = side_from_apothem(apothem_m, n_sides);
    spec.active_sides = 1;
    spec.pose = pose;
    spec.aperture = aperture;
    spec.range = range;
    return build_ring(spec);
  }
  BuiltRing ring;
  ring.center = pose.position;
  ring.aperture = aperture;
  ring.range = range;
  ring.sites.push_back({0, pose.position, pose.heading, 0.0});
  return ring;
}

}  // namespace

double BuiltRing::mean_apothem() const {
  if (sites.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : sites) sum += s.effective_apothem;
  return sum / static_cast<double>(sites.size());
}

double circumradius_from_side(double side_length, int n_sides) {
  check_polygon(side_length, n_sides);
  return side_length / (2.0 * std::sin(kPi / n_sides));
}

double apothem(double side_length, int n_sides) {
  const double r = circumradius_from_side(side_length, n_sides);
  const double half = side_length / 2.0;
  return std::sqrt(r * r - half * half);
}

double side_from_apothem(double apothem_m, int n_sides) {
  if (n_sides < 3) throw Error(ErrorCode::domain, "polygon needs at least 3 sides");
  if (!(apothem_m > 0.0)) throw Error(ErrorCode::domain, "apothem must be positive");
  return 2.0 * apothem_m * std::tan(kPi / n_sides);
}

BuiltRing build_ring(const PolygonRing& spec) {
  check_polygon(spec.side_length, spec.n_sides);
  if (spec.split_gap < 0.0) throw Error(ErrorCode::domain, "split gap must be non-negative");
  if (spec.active_sides < 0 || spec.active_sides > spec.n_sides) {
    throw Error(ErrorCode::domain, "active side count out of range");
  }

  const double a = apothem(spec.side_length, spec.n_sides);
  const double pitch = 2.0 * kPi / spec.n_sides;
  const bool full = spec.active_sides == 0 || spec.active_sides == spec.n_sides;
  const int count = full ? spec.n_sides : spec.active_sides;
  const Vec2 axis = unit_from_angle(spec.pose.heading);

  BuiltRing ring;
  ring.center = spec.pose.position;
  ring.aperture = spec.aperture;
  ring.range = spec.range;
  ring.sites.reserve(count);
  for (int k = 0; k < count; ++k) {
    // Full rings put side 0 on the heading; partial blocks are centered on it.
    const double rel = full ? k * pitch : (k - (count - 1) / 2.0) * pitch;
    const double normal = wrap_angle(spec.pose.heading + rel);
    Vec2 local = a * unit_from_angle(normal);
    if (spec.split_gap > 0.0) {
      // Front half moves +gap/2 along the heading, back half -gap/2. Sides
      // cut by the dividing line go to the half their normal leans toward.
      const double c = std::cos(rel);
      const bool front = c > 1e-9 || (c >= -1e-9 && std::sin(rel) > 0.0);
      local = local + (front ? 0.5 : -0.5) * spec.split_gap * axis;
    }
    TransducerSite site;
    site.index = k;
    site.position = spec.pose.position + local;
    site.outward_normal = normal;
    site.effective_apothem = norm(local);
    ring.sites.push_back(site);
  }
  return ring;
}

bool mutually_visible(const TransducerSite& a, double aperture_a, const TransducerSite& b,
                      double aperture_b, double range) {
  const Vec2 ab = b.position - a.position;
  const double dist = norm(ab);
  if (dist > range || dist == 0.0) return false;
  constexpr double kSlack = 1e-9;
  const double off_a = std::abs(wrap_angle(heading_of(ab) - a.outward_normal));
  const double off_b = std::abs(wrap_angle(heading_of(a.position - b.position) - b.outward_normal));
  return off_a <= aperture_a / 2.0 + kSlack && off_b <= aperture_b / 2.0 + kSlack;
}

MeasuredDistance measured_distance(const BuiltRing& a, const BuiltRing& b) {
  const double range = std::min(a.range, b.range);
  MeasuredDistance best;
  best.raw = std::numeric_limits<double>::infinity();
  for (const auto& sa : a.sites) {
    for (const auto& sb : b.sites) {
      if (!mutually_visible(sa, a.aperture, sb, b.aperture, range)) continue;
      const double d = distance(sa.position, sb.position);
      if (d < best.raw) {
        best.raw = d;
        best.site_a = sa;
        best.site_b = sb;
      }
    }
  }
  if (!std::isfinite(best.raw)) {
    throw Error(ErrorCode::no_visible_pair, "no mutually visible transducer pair");
  }
  best.corrected = best.raw + best.site_a.effective_apothem + best.site_b.effective_apothem;
  return best;
}

MeasuredDistance facing_pair_measurement(const ErrorCurveConfig& cfg, double deviation,
                                         double center_distance) {
  const double total = cfg.apothem_a + cfg.apothem_b;
  const double s = std::sin(deviation);
  const double c = std::cos(deviation);
  const double under = center_distance * center_distance - total * total * s * s;
  if (!(under > 0.0)) throw Error(ErrorCode::domain, "center distance too short for the rings");
  // Transducer A at the origin, transducer B at (gap, 0) on the x axis.
  const double gap = std::sqrt(under) - total * c;
  if (!(gap > 0.0)) throw Error(ErrorCode::domain, "rings overlap at this distance");

  const BuiltRing ring_a = single_site_ring(cfg.apothem_a, cfg.sides_a,
                                            {-cfg.apothem_a * unit_from_angle(deviation), deviation},
                                            cfg.aperture, cfg.range);
  const BuiltRing ring_b = single_site_ring(
      cfg.apothem_b, cfg.sides_b,
      {Vec2{gap, 0.0} + cfg.apothem_b * unit_from_angle(deviation), kPi + deviation}, cfg.aperture,
      cfg.range);
  return measured_distance(ring_a, ring_b);
}

std::vector<CurvePoint> error_curve(CurveKind kind, double fixed, double from, double to,
                                    int steps, const ErrorCurveConfig& cfg) {
  if (steps < 1) throw Error(ErrorCode::domain, "sweep needs at least one step");
  if (kind == CurveKind::angle) {
    const double limit = cfg.aperture / 2.0 + 1e-12;
    if (std::abs(from) > limit || std::abs(to) > limit) {
      throw Error(ErrorCode::domain, "orientation sweep exceeds the transducer half-aperture");
    }
  } else if (!(from > 0.0 && to > 0.0)) {
    throw Error(ErrorCode::domain, "distance sweep must be positive");
  }

  std::vector<CurvePoint> rows;
  rows.reserve(steps + 1);
  for (int i = 0; i <= steps; ++i) {
    const double x = from + (to - from) * i / steps;
    const double deviation = kind == CurveKind::angle ? x : fixed;
    const double center = kind == CurveKind::angle ? fixed : x;
    const MeasuredDistance m = facing_pair_measurement(cfg, deviation, center);
    rows.push_back({x, m.corrected - center});
  }
  return rows;
}

}  // namespace sappo
