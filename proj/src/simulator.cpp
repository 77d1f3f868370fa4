#include "sappo/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "sappo/channel.hpp"
#include "sappo/error.hpp"
#include "sappo/event_queue.hpp"
#include "sappo/filters.hpp"
#include "sappo/ring.hpp"

namespace sappo {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double robot_apothem(const Scenario& s) {
  RobotConfig r = s.robot;
  return build_ring(r.ring(s.transducer(r.transducer), {})).mean_apothem();
}

const BeaconConfig& beacon_by_id(const Scenario& s, int id) {
  for (const auto& b : s.beacons) {
    if (b.id == id) return b;
  }
  throw Error(ErrorCode::simulation, "record names unknown beacon " + std::to_string(id));
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// Side count of the beacon polygons, for the echo gate's angle test.
int sector_count(const Scenario& s) {
  if (s.beacons.empty()) return 16;
  const auto& b = s.beacons.front();
  return static_cast<int>(std::lround(b.n_transducers * 360.0 / b.arc_deg));
}

enum class Ev { sync, arrival, timeout, report, guard };

struct Payload {
  Ev kind;
  int cycle;
  int beacon;
  Arrival arrival;
};

class Engine {
 public:
  Engine(const Scenario& s, const SimOptions& opt)
      : s_(s),
        opt_(opt),
        room_(s.make_room()),
        c_(s.air.sound_speed()),
        guard_(attenuation_guard(s.max_range(), c_, s.pacing.min_guard_s)),
        robot_apothem_(robot_apothem(s)),
        gate_(GhostConfig{s.robot.speed_bound, c_ * s.noise.tof_sigma_s,
                          s.noise.outlier_max_cm / 100.0, sector_count(s)}) {
    for (const auto& b : s.beacons) {
      const auto& spec = s.transducer(b.transducer);
      Receiver rx{b.id, build_ring(b.ring(spec)), b.height_m};
      receivers_.push_back(rx);
      states_[b.id].beacon_id = b.id;
      filters_.emplace(b.id, DistanceFilter(s.filter));
      wake_time_[b.id] = 0.0;
      if (b.low_power) {
        LowPowerConfig lp;
        lp.phase_s = RandomStream(s.seed, {0, static_cast<std::uint64_t>(b.id), 3})
                         .uniform(0.0, lp.quantum_s);
        lowpower_cfg_[b.id] = lp;
        // The robot opens the session with a 5 s wake broadcast.
        const WakeRequest wake{0.0, lp.quantum_s, b.id, RequestKind::wake};
        const auto session = lowpower_session(b.id, std::span(&wake, 1), 2.0 * lp.quantum_s, lp);
        wake_time_[b.id] = session.awake.empty() ? std::numeric_limits<double>::infinity()
                                                 : session.awake.front().first;
        states_[b.id].mode = BeaconMode::sleeping;
        states_[b.id].power_mode = PowerMode::power_down_ext_crystal;
      }
    }
  }

  SimResult run() {
    for (int k = 0; k < opt_.n_cycles; ++k) step(k);
    finish();
    return std::move(out_);
  }

 private:
  void log(double t, std::string entity, std::string event, std::string detail = {}) {
    out_.trace.push_back({t, std::move(entity), std::move(event), std::move(detail)});
  }

  static std::string beacon_name(int id) { return "beacon" + std::to_string(id); }

  void step(int k) {
    const double T = next_emit_;
    // Everything strictly before the emission settles first, under the
    // previous cycle's beacon state.
    drain(T);

    MeasurementCycle cycle;
    cycle.cycle_id = k;
    cycle.robot_id = s_.robot.id;
    cycle.pacing = s_.pacing.kind;
    cycle.emission_time = T;
    cycle.pose = opt_.fixed_pose ? *opt_.fixed_pose : s_.robot.pose_at(T);
    emission_times_.push_back(T);

    std::vector<Receiver> awake;
    for (const auto& rx : receivers_) {
      BeaconState& st = states_[rx.beacon_id];
      if (wake_time_[rx.beacon_id] <= T) {
        if (st.mode == BeaconMode::sleeping) {
          st.mode = BeaconMode::armed;
          st.power_mode = PowerMode::listening;
          log(wake_time_[rx.beacon_id], beacon_name(rx.beacon_id), "wake");
        }
        awake.push_back(rx);
        cycle.expected.push_back(rx.beacon_id);
      }
    }
    current_ = k;
    cycle_ = std::move(cycle);
    done_ = false;

    const auto& spec = s_.transducer(s_.robot.transducer);
    const BuiltRing emitter = build_ring(s_.robot.ring(spec, cycle_.pose));
    log(T, "robot" + std::to_string(s_.robot.id), "emit",
        "cycle=" + std::to_string(k) + " x=" + fmt("%.6f", cycle_.pose.position.x) +
            " y=" + fmt("%.6f", cycle_.pose.position.y));

    const auto arrivals = propagate(emitter, s_.robot.height_m, awake, room_, s_.air, s_.max_order);
    for (const auto& a : arrivals) queue_.push(T + a.tof, {Ev::arrival, k, a.beacon_id, a});
    for (const auto& rx : awake) {
      RandomStream rs(s_.seed, {static_cast<std::uint64_t>(k) + 1,
                                static_cast<std::uint64_t>(rx.beacon_id), 2});
      const double latency = sample_sync_latency(s_.rf, rs);
      queue_.push(T + latency, {Ev::sync, k, rx.beacon_id, {}});
    }
    queue_.push(T + guard_, {Ev::guard, k, 0, {}});

    while (!done_) {
      if (queue_.empty()) throw Error(ErrorCode::simulation, "event queue ran dry mid-cycle");
      auto e = queue_.pop();
      handle(e.time, e.payload);
    }
  }

  void drain(double until) {
    while (!queue_.empty() && queue_.top().time < until) {
      auto e = queue_.pop();
      handle(e.time, e.payload);
    }
  }

  void handle(double t, const Payload& p) {
    switch (p.kind) {
      case Ev::sync: {
        BeaconState& st = states_[p.beacon];
        st.mode = BeaconMode::timing;
        st.timer_start = t;
        st.detected.reset();
        sync_cycle_[p.beacon] = p.cycle;
        queue_.push(t + guard_, {Ev::timeout, p.cycle, p.beacon, {}});
        break;
      }
      case Ev::arrival: {
        BeaconState& st = states_[p.beacon];
        if (st.mode != BeaconMode::timing || st.detected) break;
        const int k = sync_cycle_[p.beacon];
        RandomStream rs(s_.seed, {static_cast<std::uint64_t>(k) + 1,
                                  static_cast<std::uint64_t>(p.beacon), 1});
        const double noisy = apply_noise(p.arrival, s_.noise, c_, rs);
        const double tof = (t - st.timer_start) + (noisy - p.arrival.tof);
        st.detected = Detection{tof, p.arrival.transducer_index};
        st.mode = BeaconMode::reporting;

        BeaconRecord r;
        r.beacon_id = p.beacon;
        r.emission_time = emission_times_[static_cast<std::size_t>(k)];
        r.sync_time = st.timer_start;
        r.tof = tof;
        r.transducer_index = p.arrival.transducer_index;
        r.source = p.cycle != k ? ArrivalSource::ghost
                   : p.arrival.path == PathKind::direct ? ArrivalSource::direct
                                                        : ArrivalSource::reflected;
        r.detect_time = t;
        r.report_time = std::max(t, medium_free_) + s_.rf.report_latency_s;
        medium_free_ = r.report_time;
        pending_[{k, p.beacon}] = r;
        queue_.push(r.report_time, {Ev::report, k, p.beacon, {}});
        log(t, beacon_name(p.beacon), "detect",
            "cycle=" + std::to_string(k) + " tof=" + fmt("%.9f", tof) +
                " transducer=" + std::to_string(r.transducer_index) + " source=" + to_string(r.source));
        break;
      }
      case Ev::timeout: {
        BeaconState& st = states_[p.beacon];
        if (sync_cycle_[p.beacon] == p.cycle && st.mode == BeaconMode::timing) {
          st.mode = BeaconMode::armed;
          log(t, beacon_name(p.beacon), "timeout", "cycle=" + std::to_string(p.cycle));
        }
        break;
      }
      case Ev::report: {
        auto it = pending_.find({p.cycle, p.beacon});
        if (it == pending_.end()) break;
        BeaconRecord r = it->second;
        pending_.erase(it);
        BeaconState& st = states_[p.beacon];
        if (st.mode == BeaconMode::reporting && sync_cycle_[p.beacon] == p.cycle) {
          st.mode = BeaconMode::armed;
        }
        if (p.cycle != current_ || done_) break;
        cycle_.records.push_back(r);
        log(t, beacon_name(p.beacon), "report", "cycle=" + std::to_string(p.cycle));
        if (s_.pacing.kind == Pacing::ack_gated && cycle_.all_reported()) complete(t);
        break;
      }
      case Ev::guard: {
        if (p.cycle == current_ && !done_) complete(t);
        break;
      }
    }
  }

  void complete(double t) {
    done_ = true;
    MeasurementCycle& cyc = cycle_;
    std::sort(cyc.records.begin(), cyc.records.end(),
              [](const BeaconRecord& a, const BeaconRecord& b) { return a.beacon_id < b.beacon_id; });

    bool rejected_any = false;
    const double nominal = s_.rf.nominal_sync_latency();
    std::vector<RangeObservation> raw_obs;
    std::vector<RangeObservation> filtered_obs;
    const Vec2 truth = cyc.pose.position;

    for (auto& r : cyc.records) {
      const double slant = (r.tof + nominal) * c_;
      const GhostVerdict v = gate_.check(r.beacon_id, cyc.emission_time, slant, r.transducer_index);
      r.accepted = v.accepted;
      auto& sum = out_.summary;
      if (r.source == ArrivalSource::direct) {
        ++sum.direct_measurements;
        if (v.accepted) ++sum.direct_accepted;
      } else {
        ++sum.echo_measurements;
        if (!v.accepted) ++sum.echo_rejected;
      }
      if (!v.accepted) {
        ++sum.ghost_rejections;
        rejected_any = true;
        reacquire_[r.beacon_id] = true;
        log(t, beacon_name(r.beacon_id), "reject",
            "cycle=" + std::to_string(cyc.cycle_id) + " reason=" + to_string(v.reason) +
                " change=" + fmt("%.6f", v.change));
        continue;
      }

      const BeaconConfig& b = beacon_by_id(s_, r.beacon_id);
      DistanceFilter& f = filters_.at(r.beacon_id);
      if (reacquire_[r.beacon_id] && f.kind() == FilterKind::kalman) f.reset();
      reacquire_[r.beacon_id] = false;

      const double raw = center_distance_from_tof(r.tof, s_, b, robot_apothem_);
      const double filtered = f.step(raw);
      const Vec3 bp{b.position.x, b.position.y, b.height_m};
      raw_obs.push_back({b.id, bp, raw});
      filtered_obs.push_back({b.id, bp, filtered});
      const Vec3 center{truth.x, truth.y, s_.robot.height_m};
      out_.ranges.push_back({cyc.cycle_id, b.id, cyc.emission_time, raw, filtered, distance(bp, center)});
    }

    FixRecord fr;
    fr.cycle_id = cyc.cycle_id;
    fr.time = cyc.emission_time;
    fr.truth = truth;
    fr.fix = solve_fix(filtered_obs, s_.robot.height_m, s_.solver, &room_, previous_);
    fr.raw_fix = solve_fix(raw_obs, s_.robot.height_m, s_.solver, &room_, raw_previous_);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    fr.error = fr.fix.ok() ? distance(fr.fix.position.xy(), truth) : nan;
    fr.raw_error = fr.raw_fix.ok() ? distance(fr.raw_fix.position.xy(), truth) : nan;
    if (fr.fix.ok()) previous_ = fr.fix.position;
    if (fr.raw_fix.ok()) raw_previous_ = fr.raw_fix.position;
    if (fr.fix.ok()) {
      log(t, "robot" + std::to_string(s_.robot.id), "fix",
          "cycle=" + std::to_string(cyc.cycle_id) + " error=" + fmt("%.6f", fr.error));
    } else {
      log(t, "robot" + std::to_string(s_.robot.id), "no_fix",
          "cycle=" + std::to_string(cyc.cycle_id) + " status=" + to_string(fr.fix.status) +
              " ranges=" + std::to_string(filtered_obs.size()));
    }
    out_.fixes.push_back(fr);

    PacingParams pp{s_.pacing, guard_, s_.rf.overhead_s, rejected_any};
    next_emit_ = cyc.emission_time + next_cycle_delay(pp, cyc);
    out_.cycles.push_back(cyc);
  }

  void finish() {
    SimSummary& sum = out_.summary;
    sum.cycles = opt_.n_cycles;
    sum.duration_s = next_emit_;
    sum.cycle_rate_hz = sum.duration_s > 0.0 ? sum.cycles / sum.duration_s : 0.0;
    sum.mm_threshold_m = opt_.mm_threshold_m;

    std::vector<double> err;
    std::vector<double> raw_err;
    int within = 0;
    int raw_within = 0;
    for (const auto& f : out_.fixes) {
      if (f.fix.ok()) {
        err.push_back(f.error);
        if (f.error < opt_.mm_threshold_m) ++within;
      }
      if (f.raw_fix.ok()) {
        raw_err.push_back(f.raw_error);
        if (f.raw_error < opt_.mm_threshold_m) ++raw_within;
      }
    }
    sum.fixes = static_cast<int>(err.size());
    sum.raw_fixes = static_cast<int>(raw_err.size());
    sum.median_error_m = quantile(err, 0.5);
    sum.p95_error_m = quantile(err, 0.95);
    sum.raw_median_error_m = quantile(raw_err, 0.5);
    sum.raw_p95_error_m = quantile(raw_err, 0.95);
    const double n = std::max(1, sum.cycles);
    sum.within_mm = within / n;
    sum.raw_within_mm = raw_within / n;

    // Awake beacons listen throughout; low-power ones follow their session.
    PowerProfile profile;
    for (const auto& b : s_.beacons) {
      if (!b.low_power) {
        EnergyMeter m(profile);
        m.spend(PowerMode::listening, sum.duration_s);
        sum.energy_mah[b.id] = m.energy_mah();
        continue;
      }
      std::vector<WakeRequest> req{{0.0, lowpower_cfg_[b.id].quantum_s, b.id, RequestKind::wake}};
      for (double te : emission_times_) req.push_back({te, 0.0, b.id, RequestKind::measure});
      const auto session = lowpower_session(b.id, req, sum.duration_s, lowpower_cfg_[b.id], profile);
      sum.energy_mah[b.id] = session.energy.energy_mah();
    }
  }

  const Scenario& s_;
  SimOptions opt_;
  Room room_;
  double c_;
  double guard_;
  double robot_apothem_;
  GhostFilter gate_;

  std::vector<Receiver> receivers_;
  std::map<int, BeaconState> states_;
  std::map<int, int> sync_cycle_;
  std::map<int, DistanceFilter> filters_;
  std::map<int, bool> reacquire_;
  std::map<int, double> wake_time_;
  std::map<int, LowPowerConfig> lowpower_cfg_;
  std::map<std::pair<int, int>, BeaconRecord> pending_;
  EventQueue<Payload> queue_;

  MeasurementCycle cycle_;
  int current_ = -1;
  bool done_ = true;
  double next_emit_ = 0.0;
  double medium_free_ = 0.0;
  std::vector<double> emission_times_;
  std::optional<Vec3> previous_;
  std::optional<Vec3> raw_previous_;
  SimResult out_;
};

}  // namespace

double center_distance_from_tof(double tof, const Scenario& s, const BeaconConfig& beacon,
                                double robot_apothem_m) {
  const double c = s.air.sound_speed();
  const double slant = (tof + s.rf.nominal_sync_latency()) * c;
  const double dh = beacon.height_m - s.robot.height_m;
  // Noise can push a range under the height difference; that reads as "directly below".
  const double planar = std::abs(slant) > std::abs(dh)
                            ? height_correct(std::abs(slant), beacon.height_m, s.robot.height_m)
                            : 0.0;
  const double center = planar + beacon.apothem_m + robot_apothem_m;
  return std::hypot(center, dh);
}

std::vector<RangeObservation> ranges_from_cycle(const MeasurementCycle& cycle, const Scenario& s) {
  const double ra = robot_apothem(s);
  std::vector<RangeObservation> out;
  for (const auto& r : cycle.records) {
    if (!r.accepted) continue;
    const BeaconConfig& b = beacon_by_id(s, r.beacon_id);
    out.push_back({b.id, {b.position.x, b.position.y, b.height_m},
                   center_distance_from_tof(r.tof, s, b, ra)});
  }
  return out;
}

FixResult fix_pipeline(const MeasurementCycle& cycle, const Scenario& s,
                       std::optional<Vec3> previous) {
  const Room room = s.make_room();
  const auto obs = ranges_from_cycle(cycle, s);
  return solve_fix(obs, s.robot.height_m, s.solver, &room, previous);
}

MeasurementCycle run_cycle(const Scenario& s, Pose2 pose, Pacing pacing) {
  Scenario copy = s;
  copy.pacing.kind = pacing;
  SimOptions opt;
  opt.n_cycles = 1;
  opt.fixed_pose = pose;
  auto result = simulate(copy, opt);
  return result.cycles.front();
}

SimResult simulate(const Scenario& s, const SimOptions& opt) {
  if (opt.n_cycles < 0) throw Error(ErrorCode::simulation, "cycle count must be non-negative");
  if (s.beacons.empty()) throw Error(ErrorCode::simulation, "scenario has no beacons to range against");
  try {
    Engine engine(s, opt);
    return engine.run();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::simulation || e.code() == ErrorCode::schema) throw;
    throw Error(ErrorCode::simulation, e.what());
  }
}

}  // namespace sappo
