#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sappo/geometry.hpp"

namespace sappo {

/// Radicands in [-kRadicandTolerance, 0] (m^2) are treated as tangency.
constexpr double kRadicandTolerance = 1e-9;

struct RangeObservation {
  int beacon_id = 0;
  Vec3 beacon_position;
  double distance = 0.0;  // center-to-center, meters
};

enum class ChosenBy { unique, room_bounds, proximity, none };
enum class FixStatus { ok, ambiguous, no_fix };

const char* to_string(ChosenBy c);
const char* to_string(FixStatus s);

struct FixResult {
  FixStatus status = FixStatus::no_fix;
  Vec3 position;
  std::vector<Vec3> candidates;
  ChosenBy chosen_by = ChosenBy::none;
  double residual = 0.0;
  int n_beacons = 0;

  bool ok() const { return status == FixStatus::ok; }
};

/// Sphere intersection in the canonical frame: beacons at (0,0,0), (d,0,0),
/// (i,j,0). Returns 0, 1 or 2 points (the pair mirrored in z).
std::vector<Vec3> trilaterate3_canonical(double r1, double r2, double r3, double d, double i,
                                         double j);

/// Sphere intersection for three arbitrary beacon positions.
std::vector<Vec3> trilaterate3(std::span<const RangeObservation, 3> obs);

/// In-plane distance from a slant range and the two mounting heights.
double height_correct(double slant, double beacon_height, double emitter_height);

/// Two-circle intersection by radical-line elimination.
std::vector<Vec2> bilaterate2(Vec2 c1, double r1, Vec2 c2, double r2);

/// Chooses one candidate: drop those outside the room, then prefer the one
/// closest to the previous fix.
FixResult disambiguate(std::span<const Vec3> candidates, const Room* room,
                       std::optional<Vec3> previous);

enum class SolveMode { planar, spatial };

/// Full fix from accepted center-to-center ranges. Planar mode height-corrects
/// each range to the emitter plane; spatial mode needs three ranges and falls
/// back to planar otherwise.
FixResult solve_fix(std::span<const RangeObservation> obs, double emitter_height, SolveMode mode,
                    const Room* room, std::optional<Vec3> previous);

}  // namespace sappo
