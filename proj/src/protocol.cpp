#include "sappo/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "sappo/error.hpp"

namespace sappo {

const char* to_string(PowerMode m) {
  switch (m) {
    case PowerMode::power_down_ext_crystal: return "power_down_ext_crystal";
    case PowerMode::idle_16mhz: return "idle_16mhz";
    case PowerMode::adc_nr: return "adc_nr";
    case PowerMode::power_save: return "power_save";
    case PowerMode::standby: return "standby";
    case PowerMode::listening: return "listening";
  }
  return "?";
}

double PowerProfile::current(PowerMode m) const {
  switch (m) {
    case PowerMode::power_down_ext_crystal: return power_down_ext_crystal;
    case PowerMode::idle_16mhz: return idle_16mhz;
    case PowerMode::adc_nr: return adc_nr;
    case PowerMode::power_save: return power_save;
    case PowerMode::standby: return standby;
    case PowerMode::listening: return idle_16mhz + radio_rx;
  }
  return 0.0;
}

void PowerProfile::validate() const {
  for (double c : {power_down_ext_crystal, idle_16mhz, adc_nr, power_save, standby, radio_rx}) {
    if (!(c > 0.0)) throw Error(ErrorCode::domain, "mode currents must be positive");
  }
  if (!(battery_capacity_mah > 0.0)) throw Error(ErrorCode::domain, "battery capacity must be positive");
}

void EnergyMeter::spend(PowerMode mode, double seconds) {
  if (!(seconds >= 0.0)) throw Error(ErrorCode::domain, "duration must be non-negative");
  seconds_[mode] += seconds;
  energy_mah_ += profile_.current(mode) * seconds / 3600.0;
}

double EnergyMeter::seconds_in(PowerMode mode) const {
  auto it = seconds_.find(mode);
  return it == seconds_.end() ? 0.0 : it->second;
}

double EnergyMeter::total_seconds() const {
  double s = 0.0;
  for (const auto& [m, t] : seconds_) s += t;
  return s;
}

double battery_life(double capacity_mah, double current_ma) {
  if (!(capacity_mah > 0.0)) throw Error(ErrorCode::domain, "capacity must be positive");
  if (!(current_ma > 0.0)) throw Error(ErrorCode::domain, "current must be positive");
  return capacity_mah / current_ma;
}

double battery_life(double capacity_mah, std::span<const DutySegment> duty) {
  double charge = 0.0;
  double time = 0.0;
  for (const auto& d : duty) {
    if (!(d.seconds >= 0.0 && d.current_ma >= 0.0)) {
      throw Error(ErrorCode::domain, "duty segments need non-negative current and duration");
    }
    charge += d.current_ma * d.seconds;
    time += d.seconds;
  }
  if (!(time > 0.0)) throw Error(ErrorCode::domain, "duty trace has zero duration");
  return battery_life(capacity_mah, charge / time);
}

const char* to_string(BeaconMode m) {
  switch (m) {
    case BeaconMode::sleeping: return "sleeping";
    case BeaconMode::listening_window: return "listening_window";
    case BeaconMode::armed: return "armed";
    case BeaconMode::timing: return "timing";
    case BeaconMode::reporting: return "reporting";
  }
  return "?";
}

const char* to_string(ArrivalSource s) {
  switch (s) {
    case ArrivalSource::direct: return "direct";
    case ArrivalSource::reflected: return "reflected";
    case ArrivalSource::ghost: return "ghost";
  }
  return "?";
}

bool MeasurementCycle::all_reported() const {
  for (int id : expected) {
    const bool found = std::any_of(records.begin(), records.end(),
                                   [id](const BeaconRecord& r) { return r.beacon_id == id; });
    if (!found) return false;
  }
  return true;
}

std::optional<double> MeasurementCycle::last_report_time() const {
  std::optional<double> t;
  for (const auto& r : records) t = std::max(t.value_or(r.report_time), r.report_time);
  return t;
}

double attenuation_guard(double max_range, double sound_speed, double min_guard_s) {
  if (!(max_range >= 0.0 && sound_speed > 0.0)) {
    throw Error(ErrorCode::domain, "guard needs a non-negative range and positive sound speed");
  }
  return std::max(max_range / sound_speed, min_guard_s);
}

double next_cycle_delay(const PacingParams& p, const MeasurementCycle& cycle) {
  if (p.config.kind == Pacing::attenuation_wait) return p.guard_s;
  if (p.backoff && p.config.ghost_backoff) return p.guard_s;
  const auto last = cycle.last_report_time();
  if (!last || !cycle.all_reported() || cycle.expected.empty()) return p.guard_s;
  return std::min(p.guard_s, *last - cycle.emission_time + p.overhead_s);
}

const char* to_string(GhostReason r) {
  switch (r) {
    case GhostReason::none: return "none";
    case GhostReason::first: return "first";
    case GhostReason::variance: return "variance";
    case GhostReason::variance_and_angle: return "variance_and_angle";
    case GhostReason::relock: return "relock";
  }
  return "?";
}

GhostVerdict GhostFilter::check(int beacon_id, double time, double distance, int transducer_index) {
  GhostVerdict v;
  v.beacon_id = beacon_id;
  auto it = last_.find(beacon_id);
  if (it == last_.end()) {
    v.reason = GhostReason::first;
    last_[beacon_id] = {time, distance, transducer_index, 0};
    return v;
  }
  Last& prev = it->second;
  const double elapsed = std::max(0.0, time - prev.time);
  v.change = std::abs(distance - prev.distance);
  v.threshold = cfg_.speed_bound * elapsed + 3.0 * cfg_.sigma_d + cfg_.outlier_margin;
  if (v.change > v.threshold) {
    if (cfg_.relock_after > 0 && prev.rejections >= cfg_.relock_after) {
      v.reason = GhostReason::relock;
      prev = {time, distance, transducer_index, 0};
      return v;
    }
    ++prev.rejections;
    v.accepted = false;
    int jump = std::abs(transducer_index - prev.transducer_index) % cfg_.sectors;
    jump = std::min(jump, cfg_.sectors - jump);
    v.reason = jump >= 2 ? GhostReason::variance_and_angle : GhostReason::variance;
    return v;
  }
  prev = {time, distance, transducer_index, 0};
  return v;
}

std::vector<GhostVerdict> ghost_filter(std::span<const MeasurementCycle> history,
                                       const GhostConfig& cfg, double sound_speed) {
  GhostFilter gate(cfg);
  std::vector<GhostVerdict> out;
  for (const auto& cycle : history) {
    out.clear();
    for (const auto& r : cycle.records) {
      out.push_back(gate.check(r.beacon_id, cycle.emission_time, r.tof * sound_speed,
                               r.transducer_index));
    }
  }
  return out;
}

LowPowerTrace lowpower_session(int beacon_id, std::span<const WakeRequest> requests,
                               double duration, const LowPowerConfig& cfg,
                               const PowerProfile& profile) {
  if (!(cfg.quantum_s > 0.0 && cfg.listen_s > 0.0 && cfg.listen_s <= cfg.quantum_s &&
        cfg.idle_timeout_s > 0.0)) {
    throw Error(ErrorCode::domain, "low-power timing must satisfy 0 < listen <= quantum");
  }
  profile.validate();

  std::vector<WakeRequest> mine;
  for (const auto& r : requests) {
    if (r.beacon_id == beacon_id) mine.push_back(r);
  }
  std::stable_sort(mine.begin(), mine.end(),
                   [](const WakeRequest& a, const WakeRequest& b) { return a.time < b.time; });

  LowPowerTrace trace{{}, EnergyMeter(profile), {}};
  auto log = [&](double t, std::string e) { trace.events.push_back({t, std::move(e)}); };

  double t = 0.0;
  bool awake = false;
  double last_activity = 0.0;
  log(0.0, "sleep");

  while (t < duration) {
    if (!awake) {
      // Next listen window on the global quantum grid that ends after t.
      const double sleep_len = cfg.quantum_s - cfg.listen_s;
      double k = std::floor((t - cfg.phase_s - sleep_len) / cfg.quantum_s);
      double ws = cfg.phase_s + k * cfg.quantum_s + sleep_len;
      while (ws + cfg.listen_s <= t) ws += cfg.quantum_s;
      const double we = ws + cfg.listen_s;
      const double from = std::max(ws, t);
      if (from >= duration) {
        trace.energy.spend(PowerMode::power_down_ext_crystal, duration - t);
        t = duration;
        break;
      }
      trace.energy.spend(PowerMode::power_down_ext_crystal, from - t);
      log(from, "listen");

      std::optional<double> wake_at;
      for (const auto& r : mine) {
        if (r.kind != RequestKind::wake) continue;
        const double r_end = r.time + r.duration;
        if (r.time < we && r_end >= from) {
          const double at = std::max(from, r.time);
          if (!wake_at || at < *wake_at) wake_at = at;
        }
      }
      const double end = std::min(wake_at.value_or(we), duration);
      trace.energy.spend(PowerMode::listening, end - from);
      t = end;
      if (wake_at && *wake_at < duration) {
        awake = true;
        last_activity = t;
        log(t, "wake");
        trace.awake.emplace_back(t, duration);
      }
      continue;
    }

    // Awake: the earliest of the next release, or the idle timeout.
    double sleep_at = last_activity + cfg.idle_timeout_s;
    std::string why = "timeout";
    for (const auto& r : mine) {
      if (r.time <= t) continue;
      if (r.time > sleep_at) break;
      if (r.kind == RequestKind::measure) {
        last_activity = r.time;
        sleep_at = last_activity + cfg.idle_timeout_s;
      } else if (r.kind == RequestKind::release) {
        sleep_at = r.time;
        why = "release";
        break;
      }
    }
    const double end = std::min(sleep_at, duration);
    trace.energy.spend(PowerMode::listening, end - t);
    t = end;
    if (sleep_at < duration) {
      awake = false;
      trace.awake.back().second = t;
      log(t, why);
      log(t, "sleep");
    }
  }
  return trace;
}

}  // namespace sappo
