#pragma once

#include <vector>

#include "sappo/geometry.hpp"

namespace sappo {

/// Regular polygon carrying one transducer at the midpoint of each active
/// side, facing outward. Robots carry a full (optionally split) ring; beacons
/// carry a contiguous block of sides.
struct PolygonRing {
  int n_sides = 12;
  double side_length = 0.0;
  /// Gap separating the front and back halves of a split ring (0 for beacons).
  double split_gap = 0.0;
  Pose2 pose;
  /// Number of contiguous active sides centered on the heading; 0 means all.
  int active_sides = 0;
  double aperture = deg_to_rad(30.0);
  double range = 9.0;
};

struct TransducerSite {
  int index = 0;
  Vec2 position;
  double outward_normal = 0.0;
  double effective_apothem = 0.0;
};

struct BuiltRing {
  Vec2 center;
  std::vector<TransducerSite> sites;
  double aperture = deg_to_rad(30.0);
  double range = 9.0;

  double mean_apothem() const;
};

double circumradius_from_side(double side_length, int n_sides);
double apothem(double side_length, int n_sides);
/// Inverse of apothem(): side length of an n-gon with the given apothem.
double side_from_apothem(double apothem_m, int n_sides);

BuiltRing build_ring(const PolygonRing& spec);

struct MeasuredDistance {
  double raw = 0.0;        // transducer-to-transducer distance
  double corrected = 0.0;  // raw plus both effective apothems
  TransducerSite site_a;
  TransducerSite site_b;
};

/// True when each transducer lies inside the other's cone and within range.
bool mutually_visible(const TransducerSite& a, double aperture_a, const TransducerSite& b,
                      double aperture_b, double range);

/// Shortest mutually visible transducer path between two rings, with the
/// apothem correction applied. Throws ErrorCode::no_visible_pair.
MeasuredDistance measured_distance(const BuiltRing& a, const BuiltRing& b);

enum class CurveKind { angle, distance };

struct ErrorCurveConfig {
  double apothem_a = 0.03;  // beacon side
  double apothem_b = 0.03;  // robot side
  int sides_a = 16;
  int sides_b = 12;
  double aperture = deg_to_rad(30.0);
  double range = 9.0;
};

struct CurvePoint {
  double sweep = 0.0;  // radians for angle curves, meters for distance curves
  double error = 0.0;  // corrected - true center distance, meters
};

/// Places a facing transducer pair whose apothems both deviate by `deviation`
/// from the line joining the transducers, with the ring centers `center_distance`
/// apart, and returns the measured distance for that pose.
MeasuredDistance facing_pair_measurement(const ErrorCurveConfig& cfg, double deviation,
                                         double center_distance);

/// Orientation sweep at fixed center distance, or distance sweep at fixed
/// deviation. `fixed` is meters for angle curves and radians for distance curves.
std::vector<CurvePoint> error_curve(CurveKind kind, double fixed, double from, double to,
                                    int steps, const ErrorCurveConfig& cfg = {});

}  // namespace sappo
