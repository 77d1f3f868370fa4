#include "sappo/channel.hpp"

#include <algorithm>
#include <map>

#include "sappo/error.hpp"

namespace sappo {

double sound_speed(double temperature_c) {
  if (!(temperature_c >= -40.0 && temperature_c <= 60.0)) {
    throw Error(ErrorCode::temperature_out_of_range,
                "temperature must lie in [-40, 60] C for the sound-speed model");
  }
  return 331.4 + 0.606 * temperature_c;
}

void NoiseModel::validate() const {
  if (!(tof_sigma_s >= 0.0)) throw Error(ErrorCode::domain, "tof_sigma_s must be >= 0");
  if (!(outlier_rate >= 0.0 && outlier_rate <= 1.0)) {
    throw Error(ErrorCode::domain, "outlier_rate must lie in [0, 1]");
  }
  if (!(outlier_min_cm >= 0.0 && outlier_max_cm >= outlier_min_cm)) {
    throw Error(ErrorCode::domain, "outlier range must satisfy 0 <= min <= max");
  }
}

double RfModel::nominal_sync_latency() const {
  return sync_kind == SyncKind::simple_ook ? ook_latency_s
                                           : 0.5 * (packet_latency_min_s + packet_latency_max_s);
}

void RfModel::validate() const {
  if (!(ook_latency_s >= 0.0 && packet_latency_min_s >= 0.0 &&
        packet_latency_max_s >= packet_latency_min_s && report_latency_s >= 0.0 &&
        overhead_s >= 0.0)) {
    throw Error(ErrorCode::domain, "rf latencies must be non-negative and ordered");
  }
}

RandomStream::RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::vector<std::uint32_t> words;
  words.push_back(static_cast<std::uint32_t>(seed));
  words.push_back(static_cast<std::uint32_t>(seed >> 32));
  for (auto k : keys) {
    words.push_back(static_cast<std::uint32_t>(k));
    words.push_back(static_cast<std::uint32_t>(k >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  engine_.seed(seq);
}

double RandomStream::normal(double sigma) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return sigma * dist(engine_);
}

double RandomStream::uniform(double lo, double hi) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  return lo + (hi - lo) * dist(engine_);
}

namespace {

bool sees(const TransducerSite& site, double aperture, Vec2 target) {
  const Vec2 rel = target - site.position;
  if (norm(rel) == 0.0) return false;
  const double off = std::abs(wrap_angle(heading_of(rel) - site.outward_normal));
  return off <= aperture / 2.0 + 1e-9;
}

double slant(double planar, double dh) { return std::sqrt(planar * planar + dh * dh); }

}  // namespace

std::vector<Arrival> propagate(const BuiltRing& emitter, double emitter_height,
                               std::span<const Receiver> receivers, const Room& room,
                               const AirModel& air, int max_order) {
  if (max_order < 0 || max_order > 1) throw Error(ErrorCode::domain, "max_order must be 0 or 1");
  const double c = air.sound_speed();
  const bool has_room = !room.empty();
  std::vector<Arrival> out;

  for (const auto& rx : receivers) {
    const double range = std::min(emitter.range, rx.ring.range);
    const double dh = rx.height - emitter_height;
    for (const auto& rs : rx.ring.sites) {
      for (const auto& es : emitter.sites) {
        const Vec2 e = es.position;
        const Vec2 r = rs.position;

        const double direct = slant(distance(e, r), dh);
        if (direct <= range && sees(es, emitter.aperture, r) && sees(rs, rx.ring.aperture, e) &&
            !(has_room && room.blocks(e, r))) {
          out.push_back({rx.beacon_id, rs.index, es.index, direct / c, PathKind::direct, -1, direct});
        }
        if (max_order == 0 || !has_room) continue;

        const auto& walls = room.walls();
        for (std::size_t w = 0; w < walls.size(); ++w) {
          const Segment2& wall = walls[w];
          const Vec2 dir = wall.b - wall.a;
          const double se = cross(dir, e - wall.a);
          const double sr = cross(dir, r - wall.a);
          if (se * sr <= 0.0) continue;  // both ends must sit on the same side
          const Vec2 image = mirror_across_wall(e, wall);
          // Reflection point: where the receiver-to-image segment meets the wall line.
          const double si = cross(dir, image - wall.a);
          const double t = sr / (sr - si);
          const Vec2 hit = r + t * (image - r);
          const double along = dot(hit - wall.a, dir) / dot(dir, dir);
          if (!(along > 0.0 && along < 1.0)) continue;
          if (distance(hit, e) < 1e-6 || distance(hit, r) < 1e-6) continue;
          if (!sees(es, emitter.aperture, hit) || !sees(rs, rx.ring.aperture, hit)) continue;
          if (room.blocks(e, hit) || room.blocks(hit, r)) continue;
          const double length = slant(distance(image, r), dh);
          if (length > range) continue;
          out.push_back({rx.beacon_id, rs.index, es.index, length / c, PathKind::reflected,
                         static_cast<int>(w), length});
        }
      }
    }
  }
  return out;
}

std::vector<Arrival> earliest_per_beacon(std::span<const Arrival> arrivals) {
  std::map<int, Arrival> best;
  for (const auto& a : arrivals) {
    auto it = best.find(a.beacon_id);
    if (it == best.end() || a.tof < it->second.tof) best[a.beacon_id] = a;
  }
  std::vector<Arrival> out;
  out.reserve(best.size());
  for (auto& [id, a] : best) out.push_back(a);
  return out;
}

double apply_noise(const Arrival& arrival, const NoiseModel& noise, double sound_speed,
                   RandomStream& stream) {
  const double jitter = stream.normal(1.0);
  const double draw = stream.uniform(0.0, 1.0);
  const double extra = 0.01 * stream.uniform(noise.outlier_min_cm, noise.outlier_max_cm);
  double tof = arrival.tof + noise.tof_sigma_s * jitter;
  if (draw < noise.outlier_rate) tof += extra / sound_speed;
  return tof;
}

double sample_sync_latency(const RfModel& rf, RandomStream& stream) {
  const double u = stream.uniform(0.0, 1.0);
  if (rf.sync_kind == SyncKind::simple_ook) return rf.ook_latency_s;
  return rf.packet_latency_min_s + (rf.packet_latency_max_s - rf.packet_latency_min_s) * u;
}

}  // namespace sappo
