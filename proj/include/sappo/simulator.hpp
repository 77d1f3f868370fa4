#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sappo/protocol.hpp"
#include "sappo/scenario.hpp"
#include "sappo/solver.hpp"

namespace sappo {

struct TraceEvent {
  double time = 0.0;
  std::string entity;
  std::string event;
  std::string detail;
};

struct RangeRecord {
  int cycle_id = 0;
  int beacon_id = 0;
  double time = 0.0;
  double raw_m = 0.0;       // center-to-center, before filtering
  double filtered_m = 0.0;
  double true_m = 0.0;      // true 3D center-to-center distance
};

struct FixRecord {
  int cycle_id = 0;
  double time = 0.0;
  Vec2 truth;
  FixResult fix;      // from filtered ranges
  double error = 0.0;  // planar, meters; NaN without a fix
  FixResult raw_fix;  // from unfiltered ranges
  double raw_error = 0.0;
};

struct SimSummary {
  int cycles = 0;
  double duration_s = 0.0;
  double cycle_rate_hz = 0.0;
  int fixes = 0;
  int raw_fixes = 0;
  double median_error_m = 0.0;
  double p95_error_m = 0.0;
  double raw_median_error_m = 0.0;
  double raw_p95_error_m = 0.0;
  double mm_threshold_m = 0.02;
  double within_mm = 0.0;      // fraction of cycles with a filtered fix under the threshold
  double raw_within_mm = 0.0;
  int direct_measurements = 0;
  int direct_accepted = 0;
  int echo_measurements = 0;   // reflected or left over from an earlier burst
  int echo_rejected = 0;
  int ghost_rejections = 0;    // all rejected measurements
  std::map<int, double> energy_mah;
};

struct SimOptions {
  int n_cycles = 1000;
  /// Overrides the scenario path with a fixed pose.
  std::optional<Pose2> fixed_pose;
  double mm_threshold_m = 0.02;
};

struct SimResult {
  std::vector<TraceEvent> trace;
  std::vector<MeasurementCycle> cycles;
  std::vector<RangeRecord> ranges;
  std::vector<FixRecord> fixes;
  SimSummary summary;
};

/// Center-to-center 3D distance from a measured ToF: undo the nominal sync
/// latency, project to the emitter plane, add both apothems, lift back to 3D.
double center_distance_from_tof(double tof, const Scenario& s, const BeaconConfig& beacon,
                                double robot_apothem);

/// Accepted records of a cycle as solver observations (unfiltered).
std::vector<RangeObservation> ranges_from_cycle(const MeasurementCycle& cycle, const Scenario& s);

FixResult fix_pipeline(const MeasurementCycle& cycle, const Scenario& s,
                       std::optional<Vec3> previous = std::nullopt);

/// One isolated measurement cycle with the robot at `pose`.
MeasurementCycle run_cycle(const Scenario& s, Pose2 pose, Pacing pacing);

/// Full discrete-event run. Throws Error(ErrorCode::simulation) on failure.
SimResult simulate(const Scenario& s, const SimOptions& opt = {});

}  // namespace sappo
