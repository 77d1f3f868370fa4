#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "sappo/error.hpp"
#include "sappo/protocol.hpp"

using namespace sappo;

TEST_CASE("battery life at constant current") {
  CHECK(battery_life(2000.0, 0.03) == doctest::Approx(66666.7).epsilon(1e-5));
  CHECK(battery_life(2000.0, 0.03) / (24.0 * 365.0) == doctest::Approx(7.61).epsilon(1e-3));
  CHECK(battery_life(2000.0, 12.0) == doctest::Approx(166.7).epsilon(1e-3));
  CHECK_THROWS_AS(battery_life(2000.0, 0.0), Error);
  CHECK_THROWS_AS(battery_life(0.0, 1.0), Error);
}

TEST_CASE("duty-cycled battery life") {
  const PowerProfile p;
  // One 5 s quantum: 4.9 s power-down, 100 ms listening.
  const std::vector<DutySegment> duty{{p.power_down_ext_crystal, 4.9},
                                      {p.current(PowerMode::listening), 0.1}};
  const double mean = (0.03 * 4.9 + 25.5 * 0.1) / 5.0;
  const double hours = battery_life(2500.0, duty);
  CHECK(hours == doctest::Approx(2500.0 / mean));
  CHECK(hours / 24.0 > 120.0);  // well over four months
  CHECK_THROWS_AS(battery_life(2500.0, std::vector<DutySegment>{}), Error);
}

TEST_CASE("energy meter conserves charge") {
  EnergyMeter m;
  m.spend(PowerMode::idle_16mhz, 3600.0);
  m.spend(PowerMode::power_down_ext_crystal, 7200.0);
  CHECK(m.energy_mah() == doctest::Approx(12.0 + 0.06));
  CHECK(m.total_seconds() == doctest::Approx(10800.0));
  CHECK(m.seconds_in(PowerMode::idle_16mhz) == 3600.0);
  CHECK(m.seconds_in(PowerMode::standby) == 0.0);
  CHECK_THROWS_AS(m.spend(PowerMode::standby, -1.0), Error);
}

TEST_CASE("attenuation guard") {
  CHECK(attenuation_guard(9.0, 343.0) == doctest::Approx(0.030));
  CHECK(attenuation_guard(9.0, 343.0, 0.0) == doctest::Approx(9.0 / 343.0));
  CHECK(attenuation_guard(14.0, 343.0) == doctest::Approx(14.0 / 343.0));
  CHECK_THROWS_AS(attenuation_guard(9.0, 0.0), Error);
}

namespace {

MeasurementCycle cycle_with_reports(std::vector<double> report_offsets) {
  MeasurementCycle c;
  c.emission_time = 1.0;
  int id = 1;
  for (double off : report_offsets) {
    c.expected.push_back(id);
    BeaconRecord r;
    r.beacon_id = id++;
    r.report_time = c.emission_time + off;
    c.records.push_back(r);
  }
  return c;
}

}  // namespace

TEST_CASE("cycle pacing") {
  PacingParams p;
  p.guard_s = attenuation_guard(9.0, 343.0);
  p.overhead_s = 1e-3;

  // Ranges up to 3 m: reports within 3/343 s plus two report slots.
  const auto near = cycle_with_reports({3.0 / 343.0 + 0.4e-3, 3.0 / 343.0 + 0.8e-3});
  p.config.kind = Pacing::ack_gated;
  const double ack = next_cycle_delay(p, near);
  p.config.kind = Pacing::attenuation_wait;
  const double wait = next_cycle_delay(p, near);
  CHECK(wait == doctest::Approx(0.030));
  CHECK(ack <= wait);
  CHECK(ack == doctest::Approx(3.0 / 343.0 + 0.8e-3 + 1e-3));
  CHECK(1.0 / ack > 1.0 / wait);

  // A straggler at 9 m keeps the ack-gated delay near the guard.
  p.config.kind = Pacing::ack_gated;
  const auto far = cycle_with_reports({1e-2, 9.0 / 343.0 + 0.4e-3});
  CHECK(next_cycle_delay(p, far) >= 9.0 / 343.0);

  // A missing report or a back-off falls back to the guard.
  auto missing = near;
  missing.expected.push_back(9);
  CHECK(next_cycle_delay(p, missing) == doctest::Approx(0.030));
  p.backoff = true;
  CHECK(next_cycle_delay(p, near) == doctest::Approx(0.030));
  p.config.ghost_backoff = false;
  CHECK(next_cycle_delay(p, near) == doctest::Approx(ack));
}

TEST_CASE("measurement cycle bookkeeping") {
  MeasurementCycle c = cycle_with_reports({0.01, 0.02});
  CHECK(c.all_reported());
  CHECK(*c.last_report_time() == doctest::Approx(1.02));
  c.expected.push_back(7);
  CHECK_FALSE(c.all_reported());
  CHECK_FALSE(MeasurementCycle{}.last_report_time().has_value());
}

TEST_CASE("echo gate") {
  GhostFilter gate(GhostConfig{});
  const double margin = 3.0 * 0.008575 + 0.05;

  auto v = gate.check(1, 0.0, 3.00, 4);
  CHECK(v.accepted);
  CHECK(v.reason == GhostReason::first);

  // Plausible motion: 0.5 m/s for 50 ms is 2.5 cm.
  v = gate.check(1, 0.05, 3.025, 4);
  CHECK(v.accepted);
  CHECK(v.threshold == doctest::Approx(0.025 + margin));

  // A 40 cm jump is an echo.
  v = gate.check(1, 0.10, 3.425, 4);
  CHECK_FALSE(v.accepted);
  CHECK(v.reason == GhostReason::variance);
  CHECK(v.change == doctest::Approx(0.40));

  // The same jump from a sector two steps away names both tests.
  v = gate.check(1, 0.15, 3.45, 6);
  CHECK_FALSE(v.accepted);
  CHECK(v.reason == GhostReason::variance_and_angle);

  // A sector jump alone does not reject.
  v = gate.check(1, 0.20, 3.03, 9);
  CHECK(v.accepted);

  // Other beacons have their own history.
  CHECK(gate.check(2, 0.20, 8.0, 0).reason == GhostReason::first);
}

TEST_CASE("echo gate re-locks after repeated rejections") {
  GhostFilter gate(GhostConfig{});
  gate.check(1, 0.0, 2.0, 0);
  for (int k = 1; k <= 3; ++k) CHECK_FALSE(gate.check(1, 0.03 * k, 3.0, 0).accepted);
  const auto v = gate.check(1, 0.12, 3.0, 0);
  CHECK(v.accepted);
  CHECK(v.reason == GhostReason::relock);
  CHECK(gate.check(1, 0.15, 3.0, 0).accepted);
  gate.forget(1);
  CHECK(gate.check(1, 0.18, 5.0, 0).reason == GhostReason::first);
}

TEST_CASE("gate over a cycle history") {
  const double c = 343.0;
  std::vector<MeasurementCycle> history(3);
  for (int k = 0; k < 3; ++k) {
    history[k].emission_time = 0.03 * k;
    BeaconRecord r;
    r.beacon_id = 1;
    r.tof = (k == 2 ? 3.6 : 3.0) / c;
    history[k].records.push_back(r);
  }
  const auto verdicts = ghost_filter(history, GhostConfig{}, c);
  REQUIRE(verdicts.size() == 1);
  CHECK_FALSE(verdicts[0].accepted);
}

TEST_CASE("low-power beacon wakes within one quantum") {
  for (double t : {0.0, 1.3, 4.95, 7.2}) {
    const std::vector<WakeRequest> req{{t, 5.0, 3, RequestKind::wake}};
    const auto trace = lowpower_session(3, req, 100.0);
    REQUIRE_FALSE(trace.awake.empty());
    const double woke = trace.awake.front().first;
    CHECK(woke >= t);
    CHECK(woke - t <= 5.0);
    // Idle timeout sends it back to sleep 60 s later.
    CHECK(trace.awake.front().second == doctest::Approx(woke + 60.0));
  }
}

TEST_CASE("low-power beacon ignores other ids and obeys release") {
  const std::vector<WakeRequest> req{{1.0, 5.0, 4, RequestKind::wake},
                                     {2.0, 5.0, 3, RequestKind::wake},
                                     {10.0, 0.0, 3, RequestKind::measure},
                                     {20.0, 0.0, 3, RequestKind::release}};
  const auto other = lowpower_session(7, req, 100.0);
  CHECK(other.awake.empty());
  const auto mine = lowpower_session(3, req, 100.0);
  REQUIRE(mine.awake.size() == 1);
  CHECK(mine.awake[0].second == doctest::Approx(20.0));
  const auto rel = std::find_if(mine.events.begin(), mine.events.end(),
                                [](const SessionEvent& e) { return e.event == "release"; });
  REQUIRE(rel != mine.events.end());
  CHECK(rel->time == doctest::Approx(20.0));
  CHECK((rel + 1)->event == "sleep");
  CHECK(mine.energy.total_seconds() == doctest::Approx(100.0));

  // Sleeping most of the time costs far less than always listening.
  EnergyMeter always;
  always.spend(PowerMode::listening, 100.0);
  CHECK(other.energy.energy_mah() < 0.05 * always.energy_mah());
}

TEST_CASE("measure requests extend the idle timeout") {
  const std::vector<WakeRequest> req{{0.0, 5.0, 3, RequestKind::wake},
                                     {50.0, 0.0, 3, RequestKind::measure}};
  const auto trace = lowpower_session(3, req, 200.0);
  REQUIRE_FALSE(trace.awake.empty());
  CHECK(trace.awake[0].second == doctest::Approx(110.0));
}
