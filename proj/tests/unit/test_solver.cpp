#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "sappo/error.hpp"
#include "sappo/solver.hpp"

using namespace sappo;

TEST_CASE("canonical trilateration") {
  // Beacons at (0,0,0), (10,0,0), (5,10,0); target (5,5,3).
  const double r1 = std::sqrt(25.0 + 25.0 + 9.0);
  const double r2 = r1;
  const double r3 = std::sqrt(0.0 + 25.0 + 9.0);
  const auto p = trilaterate3_canonical(r1, r2, r3, 10.0, 5.0, 10.0);
  REQUIRE(p.size() == 2);
  CHECK(p[0].x == doctest::Approx(5.0));
  CHECK(p[0].y == doctest::Approx(5.0));
  CHECK(std::abs(p[0].z) == doctest::Approx(3.0));
  CHECK(p[1].z == doctest::Approx(-p[0].z));
}

TEST_CASE("equal radii put x at d/2") {
  const auto p = trilaterate3_canonical(7.0, 7.0, 8.0, 6.0, 2.0, 5.0);
  REQUIRE_FALSE(p.empty());
  CHECK(p[0].x == doctest::Approx(3.0));
}

TEST_CASE("tiny negative radicand is a tangency") {
  // Target in the beacon plane: radicand 0, nudged slightly negative.
  const double r1 = std::hypot(3.0, 4.0);
  const double r2 = std::hypot(3.0 - 10.0, 4.0);
  const double r3 = std::hypot(3.0 - 5.0, 4.0 - 10.0);
  auto p = trilaterate3_canonical(r1 - 1e-11, r2, r3, 10.0, 5.0, 10.0);
  REQUIRE(p.size() == 1);
  CHECK(p[0].z == 0.0);
  CHECK(p[0].x == doctest::Approx(3.0));
  CHECK(trilaterate3_canonical(1.0, 1.0, 1.0, 10.0, 5.0, 10.0).empty());
}

TEST_CASE("degenerate beacon layouts") {
  CHECK_THROWS_AS(trilaterate3_canonical(1, 1, 1, 0.0, 1.0, 1.0), Error);
  CHECK_THROWS_AS(trilaterate3_canonical(1, 1, 1, 2.0, 1.0, 0.0), Error);
  const std::array<RangeObservation, 3> line{{{1, {0, 0, 0}, 1.0}, {2, {1, 0, 0}, 1.0},
                                              {3, {2, 0, 0}, 1.0}}};
  try {
    trilaterate3(std::span<const RangeObservation, 3>(line));
    FAIL("expected degenerate_geometry");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::degenerate_geometry);
  }
}

TEST_CASE("arbitrary-frame trilateration round trip") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  int checked = 0;
  for (int k = 0; k < 10000; ++k) {
    const Vec3 b1{u(rng), u(rng), u(rng)}, b2{u(rng), u(rng), u(rng)}, b3{u(rng), u(rng), u(rng)};
    const Vec3 t{u(rng), u(rng), u(rng)};
    const Vec3 n = cross(b2 - b1, b3 - b1);
    // Skip nearly collinear triangles and targets nearly in the beacon plane.
    if (norm(n) < 1.0) continue;
    if (std::abs(dot(t - b1, (1.0 / norm(n)) * n)) < 0.05) continue;
    const std::array<RangeObservation, 3> obs{{{1, b1, distance(t, b1)}, {2, b2, distance(t, b2)},
                                               {3, b3, distance(t, b3)}}};
    const auto p = trilaterate3(std::span<const RangeObservation, 3>(obs));
    REQUIRE(p.size() == 2);
    const double err = std::min(distance(p[0], t), distance(p[1], t));
    CHECK(err < 1e-6);
    ++checked;
  }
  CHECK(checked > 5000);
}

TEST_CASE("height correction") {
  CHECK(height_correct(1.0, 1.70, 1.45) == doctest::Approx(0.968246).epsilon(1e-6));
  CHECK(height_correct(2.0, 1.0, 1.0) == doctest::Approx(2.0));
  CHECK(height_correct(0.25, 1.70, 1.45) == doctest::Approx(0.0));
  try {
    height_correct(0.2, 1.70, 1.45);
    FAIL("expected inconsistent_measurement");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::inconsistent_measurement);
  }
}

TEST_CASE("two-circle intersection") {
  const auto p = bilaterate2({0, 0}, 5.0, {8, 0}, 5.0);
  REQUIRE(p.size() == 2);
  for (const auto& q : p) {
    CHECK(q.x == doctest::Approx(4.0));
    CHECK(std::abs(q.y) == doctest::Approx(3.0));
  }
  // Offset and rotated: oracle check of both circle equations.
  const Vec2 c1{1.5, -2.0}, c2{-0.5, 3.0};
  for (const auto& q : bilaterate2(c1, 4.0, c2, 3.5)) {
    CHECK(distance(q, c1) == doctest::Approx(4.0));
    CHECK(distance(q, c2) == doctest::Approx(3.5));
  }
  CHECK(bilaterate2({0, 0}, 1.0, {2, 0}, 1.0).size() == 1);
  CHECK(bilaterate2({0, 0}, 1.0, {5, 0}, 1.0).empty());
  CHECK_THROWS_AS(bilaterate2({1, 1}, 1.0, {1, 1}, 2.0), Error);
}

TEST_CASE("disambiguation") {
  const Room room = Room::rectangle(4.0, 4.0);
  const std::vector<Vec3> pair{{2, 1, 0}, {2, -1, 0}};
  auto fix = disambiguate(pair, &room, std::nullopt);
  CHECK(fix.ok());
  CHECK(fix.chosen_by == ChosenBy::room_bounds);
  CHECK(fix.position.y == doctest::Approx(1.0));

  const std::vector<Vec3> both_in{{2, 1, 0}, {2, 3, 0}};
  fix = disambiguate(both_in, &room, std::nullopt);
  CHECK(fix.status == FixStatus::ambiguous);
  CHECK(fix.candidates.size() == 2);
  fix = disambiguate(both_in, &room, Vec3{2, 2.8, 0});
  CHECK(fix.chosen_by == ChosenBy::proximity);
  CHECK(fix.position.y == doctest::Approx(3.0));

  const std::vector<Vec3> outside{{-1, 1, 0}, {5, 1, 0}};
  CHECK(disambiguate(outside, &room, std::nullopt).status == FixStatus::no_fix);
  const std::vector<Vec3> one{{1, 1, 0}};
  CHECK(disambiguate(one, nullptr, std::nullopt).chosen_by == ChosenBy::unique);
}

TEST_CASE("planar fix from wall beacons") {
  const Room room = Room::rectangle(4.5, 11.5);
  const Vec3 truth{2.0, 3.0, 0.20};
  const Vec3 b1{0.05, 0.05, 1.70}, b2{4.45, 0.05, 1.70};
  const std::vector<RangeObservation> obs{{1, b1, distance(truth, b1)}, {2, b2, distance(truth, b2)}};
  const auto fix = solve_fix(obs, 0.20, SolveMode::planar, &room, std::nullopt);
  REQUIRE(fix.ok());
  CHECK(fix.chosen_by == ChosenBy::room_bounds);
  CHECK(fix.n_beacons == 2);
  CHECK(fix.position.x == doctest::Approx(2.0));
  CHECK(fix.position.y == doctest::Approx(3.0));
  CHECK(fix.residual < 1e-9);

  const std::vector<RangeObservation> single{obs[0]};
  CHECK(solve_fix(single, 0.20, SolveMode::planar, &room, std::nullopt).status == FixStatus::no_fix);
}

TEST_CASE("spatial fix recovers the height") {
  const Room room = Room::rectangle(6.0, 6.0);
  const Vec3 truth{2.0, 3.0, 0.40};
  const std::vector<Vec3> b{{0.1, 0.1, 2.5}, {5.9, 0.1, 2.0}, {3.0, 5.9, 2.8}};
  std::vector<RangeObservation> obs;
  for (int k = 0; k < 3; ++k) obs.push_back({k + 1, b[k], distance(truth, b[k])});
  const auto fix = solve_fix(obs, 0.40, SolveMode::spatial, &room, std::nullopt);
  REQUIRE(fix.ok());
  CHECK(distance(fix.position, truth) < 1e-9);
}
