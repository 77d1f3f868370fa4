#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sappo/channel.hpp"
#include "sappo/filters.hpp"
#include "sappo/geometry.hpp"
#include "sappo/ring.hpp"
#include "sappo/solver.hpp"

namespace sappo {

constexpr int kSchemaVersion = 1;

/// Ultrasonic transducer class (range and cone) shared by beacons and robot.
struct TransducerSpec {
  double range_m = 9.0;
  double aperture_deg = 30.0;
  double carrier_hz = 40000.0;

  friend bool operator==(const TransducerSpec&, const TransducerSpec&) = default;
};

struct BeaconConfig {
  int id = 0;
  Vec2 position;
  double orientation_deg = 0.0;
  int n_transducers = 4;
  double arc_deg = 90.0;
  double apothem_m = 0.03;
  bool low_power = false;
  double height_m = 1.70;
  std::string transducer = "hc_sr04";

  /// Polygon whose `n_transducers` contiguous sides span `arc_deg`.
  PolygonRing ring(const TransducerSpec& spec) const;
  friend bool operator==(const BeaconConfig&, const BeaconConfig&) = default;
};

struct Waypoint {
  double t = 0.0;
  Vec2 position;
  double heading_deg = 0.0;

  friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

struct RobotConfig {
  int id = 1;
  int n_sides = 12;
  double side_m = 0.016077;  // 3 cm apothem on a 12-gon
  double gap_m = 0.0;
  double height_m = 1.45;
  std::string transducer = "hc_sr04";
  std::vector<Waypoint> path;
  double speed_bound = 0.5;  // m/s, used by the echo gate

  /// Interpolated pose at time t; holds the end points outside the path.
  Pose2 pose_at(double t) const;
  PolygonRing ring(const TransducerSpec& spec, Pose2 pose) const;
  friend bool operator==(const RobotConfig&, const RobotConfig&) = default;
};

enum class Pacing { attenuation_wait, ack_gated };

const char* to_string(Pacing p);

struct PacingConfig {
  Pacing kind = Pacing::attenuation_wait;
  double min_guard_s = 0.030;
  /// After a cycle with a rejected echo, wait out the attenuation guard once.
  bool ghost_backoff = true;

  friend bool operator==(const PacingConfig&, const PacingConfig&) = default;
};

struct Scenario {
  int schema_version = kSchemaVersion;
  std::string name = "default";
  std::vector<Vec2> room;
  AirModel air;
  std::map<std::string, TransducerSpec> transducers;
  std::vector<BeaconConfig> beacons;
  RobotConfig robot;
  NoiseModel noise;
  RfModel rf;
  PacingConfig pacing;
  FilterConfig filter;
  SolveMode solver = SolveMode::planar;
  int max_order = 1;
  std::uint64_t seed = 1;

  Room make_room() const { return Room(room); }
  const TransducerSpec& transducer(const std::string& name) const;
  /// Longest range of any transducer class in use.
  double max_range() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// 4.5 m x 11.5 m room, two corner beacons on the south wall facing into the
/// room, 12-side robot ring.
Scenario default_scenario();

/// Throws Error(ErrorCode::schema) naming the offending field.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
std::string serialize_scenario(const Scenario& s);
void save_scenario(const Scenario& s, const std::string& path);
/// Semantic checks (ids unique, heights positive, beacons inside the room...).
void validate_scenario(const Scenario& s);

}  // namespace sappo
