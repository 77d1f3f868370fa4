#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "sappo/geometry.hpp"
#include "sappo/ring.hpp"

namespace sappo {

/// Linear sound-speed model c = 331.4 + 0.606*T, valid for -40..60 C.
double sound_speed(double temperature_c);

struct AirModel {
  double temperature_c = 20.0;
  double humidity_pct = 50.0;  // carried in the scenario; the linear model ignores it

  double sound_speed() const { return sappo::sound_speed(temperature_c); }
  friend bool operator==(const AirModel&, const AirModel&) = default;
};

struct NoiseModel {
  double tof_sigma_s = 25e-6;
  double outlier_rate = 0.10;
  double outlier_min_cm = 1.0;
  double outlier_max_cm = 5.0;

  void validate() const;
  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

enum class SyncKind { simple_ook, packet_radio };

struct RfModel {
  SyncKind sync_kind = SyncKind::simple_ook;
  double ook_latency_s = 5e-6;
  double packet_latency_min_s = 50e-6;
  double packet_latency_max_s = 500e-6;
  double report_latency_s = 0.4e-3;  // per report on the packet radio
  double overhead_s = 1.0e-3;        // robot-side turnaround before the next burst

  /// Expected sync decode latency, which beacons calibrate out.
  double nominal_sync_latency() const;
  void validate() const;
  friend bool operator==(const RfModel&, const RfModel&) = default;
};

/// Reproducible random stream keyed by (seed, stream ids).
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

  double normal(double sigma);
  double uniform(double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

enum class PathKind { direct, reflected };

inline const char* to_string(PathKind k) { return k == PathKind::direct ? "direct" : "reflected"; }

struct Arrival {
  int beacon_id = 0;
  int transducer_index = 0;
  int emitter_index = 0;
  double tof = 0.0;  // noise-free, seconds
  PathKind path = PathKind::direct;
  int wall_index = -1;
  double path_length = 0.0;
};

/// Receiving beacon: its built ring and mounting height.
struct Receiver {
  int beacon_id = 0;
  BuiltRing ring;
  double height = 1.70;
};

/// All direct and (for max_order = 1) first-order wall-reflected paths from
/// any emitter transducer to any receiver transducer that respect both cones,
/// the range limit and wall blocking. Path lengths are 3D.
std::vector<Arrival> propagate(const BuiltRing& emitter, double emitter_height,
                               std::span<const Receiver> receivers, const Room& room,
                               const AirModel& air, int max_order);

/// Earliest arrival for each beacon, ordered by beacon id.
std::vector<Arrival> earliest_per_beacon(std::span<const Arrival> arrivals);

/// Gaussian jitter plus, with probability outlier_rate, a positive extra delay.
/// Consumes exactly three draws so streams stay aligned across configurations.
double apply_noise(const Arrival& arrival, const NoiseModel& noise, double sound_speed,
                   RandomStream& stream);

double sample_sync_latency(const RfModel& rf, RandomStream& stream);

}  // namespace sappo
