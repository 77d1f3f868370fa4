#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sappo/channel.hpp"
#include "sappo/geometry.hpp"
#include "sappo/scenario.hpp"

namespace sappo {

// ---- power and energy -------------------------------------------------------

enum class PowerMode { power_down_ext_crystal, idle_16mhz, adc_nr, power_save, standby, listening };

const char* to_string(PowerMode m);

/// Supply currents in mA. `listening` is the microcontroller idle current plus
/// the receiver current of the radio.
struct PowerProfile {
  double power_down_ext_crystal = 0.03;
  double idle_16mhz = 12.0;
  double adc_nr = 10.9;
  double power_save = 2.9;
  double standby = 1.3;
  double radio_rx = 13.5;
  double battery_capacity_mah = 2500.0;

  double current(PowerMode m) const;
  void validate() const;
};

/// Accumulates charge per mode. Energy is reported in mAh.
class EnergyMeter {
 public:
  explicit EnergyMeter(PowerProfile profile = {}) : profile_(profile) {}

  void spend(PowerMode mode, double seconds);

  double energy_mah() const { return energy_mah_; }
  double seconds_in(PowerMode mode) const;
  double total_seconds() const;
  const PowerProfile& profile() const { return profile_; }

 private:
  PowerProfile profile_;
  std::map<PowerMode, double> seconds_;
  double energy_mah_ = 0.0;
};

struct DutySegment {
  double current_ma = 0.0;
  double seconds = 0.0;
};

/// Hours of operation at a constant current. Throws on a non-positive current.
double battery_life(double capacity_mah, double current_ma);
/// Hours of operation repeating the duty trace: capacity / time-weighted current.
double battery_life(double capacity_mah, std::span<const DutySegment> duty);

// ---- beacon and mobile state -------------------------------------------------

enum class BeaconMode { sleeping, listening_window, armed, timing, reporting };

const char* to_string(BeaconMode m);

struct Detection {
  double tof = 0.0;  // measured against the beacon's own timer start
  int transducer_index = 0;
};

struct BeaconState {
  int beacon_id = 0;
  BeaconMode mode = BeaconMode::armed;
  double timer_start = 0.0;
  std::optional<Detection> detected;
  PowerMode power_mode = PowerMode::listening;
  double energy_used_mah = 0.0;
};

/// Which emission produced the detected arrival.
enum class ArrivalSource { direct, reflected, ghost };

const char* to_string(ArrivalSource s);

struct BeaconRecord {
  int beacon_id = 0;
  double emission_time = 0.0;  // shared by every record of a cycle
  double sync_time = 0.0;      // emission + this beacon's decode latency
  double tof = 0.0;            // measured, seconds
  int transducer_index = 0;
  ArrivalSource source = ArrivalSource::direct;
  double detect_time = 0.0;
  double report_time = 0.0;
  bool accepted = true;
};

struct MeasurementCycle {
  int cycle_id = 0;
  int robot_id = 1;
  Pacing pacing = Pacing::ack_gated;
  double emission_time = 0.0;
  Pose2 pose;  // true robot pose at emission
  std::vector<int> expected;  // beacons that received the sync
  std::vector<BeaconRecord> records;

  bool all_reported() const;
  /// Latest report time, or nullopt when nothing was reported.
  std::optional<double> last_report_time() const;
};

struct MobileState {
  int robot_id = 1;
  int cycle_id = 0;
  std::vector<int> pending_reports;
  Pacing pacing = Pacing::ack_gated;
};

// ---- pacing -----------------------------------------------------------------

/// Time for a burst to fade past the longest range, raised to the minimum guard.
double attenuation_guard(double max_range, double sound_speed, double min_guard_s = 0.030);

struct PacingParams {
  PacingConfig config;
  double guard_s = 0.030;     // attenuation_guard() for the scenario
  double overhead_s = 1e-3;   // robot turnaround after the last report
  bool backoff = false;       // the cycle had a rejected echo
};

/// Delay from this cycle's emission to the next one. Attenuation-wait always
/// waits the guard. Ack-gated re-triggers after the last report plus overhead,
/// never later than the guard, and falls back to the guard if a report is
/// missing or a back-off is requested.
double next_cycle_delay(const PacingParams& p, const MeasurementCycle& cycle);

// ---- echo rejection ---------------------------------------------------------

enum class GhostReason { none, first, variance, variance_and_angle, relock };

const char* to_string(GhostReason r);

struct GhostVerdict {
  int beacon_id = 0;
  bool accepted = true;
  GhostReason reason = GhostReason::none;
  double change = 0.0;     // |distance - last accepted|, meters
  double threshold = 0.0;  // meters
};

struct GhostConfig {
  double speed_bound = 0.5;       // m/s
  double sigma_d = 0.008575;      // per-range noise, meters
  double outlier_margin = 0.05;   // largest outlier extra path, meters
  int sectors = 16;               // beacon ring sides, for the angle test
  /// After this many consecutive rejections the next measurement is accepted
  /// as a new reference, so a stale reference cannot lock a beacon out.
  int relock_after = 3;
};

/// Per-beacon consistency gate. A measurement is rejected when its distance
/// moved more than speed_bound*elapsed + 3*sigma_d + outlier_margin since the
/// last accepted one. A jump of two or more sectors in the detecting
/// transducer only sharpens the reason; it never rejects on its own.
/// relock_after consecutive rejections force the next measurement through.
class GhostFilter {
 public:
  explicit GhostFilter(GhostConfig cfg) : cfg_(cfg) {}

  GhostVerdict check(int beacon_id, double time, double distance, int transducer_index);
  void forget(int beacon_id) { last_.erase(beacon_id); }

 private:
  struct Last {
    double time;
    double distance;
    int transducer_index;
    int rejections = 0;
  };
  GhostConfig cfg_;
  std::map<int, Last> last_;
};

/// Runs the gate over a history of cycles (oldest first) and returns the
/// verdicts for the newest cycle. `sound_speed` converts ToF to distance.
std::vector<GhostVerdict> ghost_filter(std::span<const MeasurementCycle> history,
                                       const GhostConfig& cfg, double sound_speed);

// ---- low-power beacons ------------------------------------------------------

struct LowPowerConfig {
  double quantum_s = 5.0;
  double listen_s = 0.100;
  double idle_timeout_s = 60.0;
  double phase_s = 0.0;  // offset of the first quantum
};

enum class RequestKind { wake, measure, release };

struct WakeRequest {
  double time = 0.0;
  double duration = 0.0;  // a wake broadcast repeats for this long
  int beacon_id = 0;
  RequestKind kind = RequestKind::wake;
};

struct SessionEvent {
  double time = 0.0;
  std::string event;
};

struct LowPowerTrace {
  std::vector<SessionEvent> events;
  EnergyMeter energy;
  std::vector<std::pair<double, double>> awake;  // [wake, sleep) intervals
};

/// Beacon sleeps in power-down for quantum - listen, then listens; a wake
/// request naming its id during a listen window wakes it. It returns to sleep
/// on a release or when idle_timeout passes without a measurement request.
LowPowerTrace lowpower_session(int beacon_id, std::span<const WakeRequest> requests,
                               double duration, const LowPowerConfig& cfg = {},
                               const PowerProfile& profile = {});

}  // namespace sappo
