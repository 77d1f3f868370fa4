#include "sappo/solver.hpp"

#include <algorithm>
#include <array>
#include <limits>

#include "sappo/error.hpp"

namespace sappo {

const char* to_string(ChosenBy c) {
  switch (c) {
    case ChosenBy::unique: return "unique";
    case ChosenBy::room_bounds: return "room_bounds";
    case ChosenBy::proximity: return "proximity";
    case ChosenBy::none: return "none";
  }
  return "none";
}

const char* to_string(FixStatus s) {
  switch (s) {
    case FixStatus::ok: return "ok";
    case FixStatus::ambiguous: return "ambiguous";
    case FixStatus::no_fix: return "no_fix";
  }
  return "no_fix";
}

std::vector<Vec3> trilaterate3_canonical(double r1, double r2, double r3, double d, double i,
                                         double j) {
  if (!(d > 0.0)) throw Error(ErrorCode::degenerate_geometry, "second beacon must lie at d > 0");
  if (std::abs(j) < 1e-9) {
    throw Error(ErrorCode::degenerate_geometry, "beacons are collinear");
  }
  const double x = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
  const double y = (r1 * r1 - r3 * r3 + i * i + j * j) / (2.0 * j) - (i / j) * x;
  const double radicand = r1 * r1 - x * x - y * y;
  if (radicand < -kRadicandTolerance) return {};
  if (radicand <= 0.0) return {{x, y, 0.0}};
  const double z = std::sqrt(radicand);
  return {{x, y, z}, {x, y, -z}};
}

std::vector<Vec3> trilaterate3(std::span<const RangeObservation, 3> obs) {
  const Vec3 p1 = obs[0].beacon_position;
  const Vec3 p2 = obs[1].beacon_position;
  const Vec3 p3 = obs[2].beacon_position;
  const double d = distance(p1, p2);
  if (!(d > 0.0)) throw Error(ErrorCode::degenerate_geometry, "coincident beacons");
  const Vec3 ex = (1.0 / d) * (p2 - p1);
  const double i = dot(ex, p3 - p1);
  const Vec3 perp = (p3 - p1) - i * ex;
  const double j = norm(perp);
  if (j < 1e-9) throw Error(ErrorCode::degenerate_geometry, "beacons are collinear");
  const Vec3 ey = (1.0 / j) * perp;
  const Vec3 ez = cross(ex, ey);

  std::vector<Vec3> out;
  for (const Vec3& c :
       trilaterate3_canonical(obs[0].distance, obs[1].distance, obs[2].distance, d, i, j)) {
    out.push_back(p1 + c.x * ex + c.y * ey + c.z * ez);
  }
  return out;
}

double height_correct(double slant, double beacon_height, double emitter_height) {
  const double dh = beacon_height - emitter_height;
  const double radicand = slant * slant - dh * dh;
  if (slant < 0.0 || radicand < -1e-12) {
    throw Error(ErrorCode::inconsistent_measurement,
                "slant range is shorter than the height offset");
  }
  return std::sqrt(std::max(radicand, 0.0));
}

std::vector<Vec2> bilaterate2(Vec2 c1, double r1, Vec2 c2, double r2) {
  // Work relative to c1: the radical line is A x + B y = C with
  // A = 2(x2-x1), B = 2(y2-y1), C = r1^2 - r2^2 + |c2-c1|^2.
  const Vec2 u = c2 - c1;
  const double a = 2.0 * u.x;
  const double b = 2.0 * u.y;
  const double n2 = a * a + b * b;
  if (n2 == 0.0) throw Error(ErrorCode::degenerate_geometry, "concentric beacons");
  const double c = r1 * r1 - r2 * r2 + dot(u, u);

  // Closest point of the radical line to c1, then back into circle 1.
  const Vec2 foot{a * c / n2, b * c / n2};
  const double half_chord2 = r1 * r1 - dot(foot, foot);
  if (half_chord2 < -kRadicandTolerance) return {};
  if (half_chord2 <= 0.0) return {c1 + foot};
  const double h = std::sqrt(half_chord2);
  const double len = std::sqrt(n2);
  const Vec2 along{-b / len, a / len};
  return {c1 + foot + h * along, c1 + foot - h * along};
}

FixResult disambiguate(std::span<const Vec3> candidates, const Room* room,
                       std::optional<Vec3> previous) {
  FixResult result;
  result.candidates.assign(candidates.begin(), candidates.end());
  if (candidates.empty()) return result;

  std::vector<Vec3> survivors;
  for (const auto& c : candidates) {
    if (room == nullptr || room->contains(c.xy())) survivors.push_back(c);
  }
  if (survivors.empty()) return result;

  if (survivors.size() == 1) {
    result.status = FixStatus::ok;
    result.position = survivors.front();
    result.chosen_by = candidates.size() == 1 ? ChosenBy::unique : ChosenBy::room_bounds;
    return result;
  }
  if (!previous) {
    result.status = FixStatus::ambiguous;
    result.candidates = survivors;
    return result;
  }
  const auto nearest = std::min_element(survivors.begin(), survivors.end(), [&](Vec3 p, Vec3 q) {
    return distance(p, *previous) < distance(q, *previous);
  });
  result.status = FixStatus::ok;
  result.position = *nearest;
  result.chosen_by = ChosenBy::proximity;
  return result;
}

namespace {

double planar_residual(Vec2 p, std::span<const Vec2> centers, std::span<const double> radii) {
  double sum = 0.0;
  for (std::size_t k = 0; k < centers.size(); ++k) {
    const double e = distance(p, centers[k]) - radii[k];
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(centers.size()));
}

double spatial_residual(Vec3 p, std::span<const RangeObservation> obs) {
  double sum = 0.0;
  for (const auto& o : obs) {
    const double e = distance(p, o.beacon_position) - o.distance;
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(obs.size()));
}

FixResult solve_planar(std::span<const RangeObservation> obs, double emitter_height,
                       const Room* room, std::optional<Vec3> previous) {
  std::vector<Vec2> centers;
  std::vector<double> radii;
  for (const auto& o : obs) {
    centers.push_back(o.beacon_position.xy());
    radii.push_back(height_correct(o.distance, o.beacon_position.z, emitter_height));
  }
  // Widest baseline gives the best-conditioned intersection.
  std::size_t bi = 0, bj = 1;
  double widest = -1.0;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    for (std::size_t j = i + 1; j < centers.size(); ++j) {
      const double d = distance(centers[i], centers[j]);
      if (d > widest) {
        widest = d;
        bi = i;
        bj = j;
      }
    }
  }
  std::vector<Vec3> candidates;
  for (Vec2 p : bilaterate2(centers[bi], radii[bi], centers[bj], radii[bj])) {
    candidates.push_back({p.x, p.y, emitter_height});
  }
  FixResult fix = disambiguate(candidates, room, previous);
  fix.n_beacons = static_cast<int>(obs.size());
  if (fix.ok()) fix.residual = planar_residual(fix.position.xy(), centers, radii);
  return fix;
}

FixResult solve_spatial(std::span<const RangeObservation> obs, double emitter_height,
                        const Room* room, std::optional<Vec3> previous) {
  // Largest beacon triangle.
  std::array<std::size_t, 3> best{0, 1, 2};
  double best_area = -1.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    for (std::size_t j = i + 1; j < obs.size(); ++j) {
      for (std::size_t k = j + 1; k < obs.size(); ++k) {
        const Vec3 a = obs[j].beacon_position - obs[i].beacon_position;
        const Vec3 b = obs[k].beacon_position - obs[i].beacon_position;
        const double area = norm(cross(a, b));
        if (area > best_area) {
          best_area = area;
          best = {i, j, k};
        }
      }
    }
  }
  const std::array<RangeObservation, 3> triple{obs[best[0]], obs[best[1]], obs[best[2]]};
  const std::vector<Vec3> candidates = trilaterate3(std::span<const RangeObservation, 3>(triple));

  FixResult fix;
  if (previous) {
    fix = disambiguate(candidates, room, previous);
  } else {
    // The emitter height is known, which settles the mirror pair.
    fix = disambiguate(candidates, room, std::nullopt);
    if (fix.status == FixStatus::ambiguous) {
      const auto nearest =
          std::min_element(fix.candidates.begin(), fix.candidates.end(), [&](Vec3 p, Vec3 q) {
            return std::abs(p.z - emitter_height) < std::abs(q.z - emitter_height);
          });
      fix.position = *nearest;
      fix.status = FixStatus::ok;
      fix.chosen_by = ChosenBy::proximity;
    }
  }
  fix.n_beacons = static_cast<int>(obs.size());
  if (fix.ok()) fix.residual = spatial_residual(fix.position, obs);
  return fix;
}

}  // namespace

FixResult solve_fix(std::span<const RangeObservation> obs, double emitter_height, SolveMode mode,
                    const Room* room, std::optional<Vec3> previous) {
  if (obs.size() < 2) {
    FixResult none;
    none.n_beacons = static_cast<int>(obs.size());
    return none;
  }
  if (mode == SolveMode::spatial && obs.size() >= 3) {
    return solve_spatial(obs, emitter_height, room, previous);
  }
  return solve_planar(obs, emitter_height, room, previous);
}

}  // namespace sappo
