#include <doctest.h>

#include <cmath>
#include <vector>

#include "sappo/coverage.hpp"
#include "sappo/error.hpp"

using namespace sappo;

TEST_CASE("grid area of a single full-circle beacon") {
  const Room room = Room::rectangle(10.0, 10.0);
  const std::vector<CoverageBeacon> b{{{5.0, 5.0}, 0.0, 2.0 * kPi, 2.0}};
  const auto grid = coverage_map(room, b, 1, 0.02);
  CHECK(covered_area(grid) == doctest::Approx(4.0 * kPi).epsilon(0.01));
}

TEST_CASE("grid lens agrees with the closed form") {
  const Room room({{-15.0, -15.0}, {25.0, -15.0}, {25.0, 15.0}, {-15.0, 15.0}});
  const std::vector<CoverageBeacon> b{{{0.0, 0.0}, 0.0, 2.0 * kPi, 9.0},
                                      {{9.0, 0.0}, 0.0, 2.0 * kPi, 9.0}};
  const auto grid = coverage_map(room, b, 2, 0.05);
  CHECK(covered_area(grid) == doctest::Approx(lens_area(9.0, 9.0)).epsilon(0.01));
}

TEST_CASE("grid half lens for wall-mounted half-plane beacons") {
  const Room room({{-15.0, 0.0}, {25.0, 0.0}, {25.0, 15.0}, {-15.0, 15.0}});
  const std::vector<CoverageBeacon> b{{{0.0, 0.0}, kPi / 2.0, kPi, 9.0},
                                      {{9.0, 0.0}, kPi / 2.0, kPi, 9.0}};
  const auto grid = coverage_map(room, b, 2, 0.05);
  CHECK(covered_area(grid) == doctest::Approx(49.74).epsilon(0.01));
}

TEST_CASE("quarter sector from a corner") {
  const Room room = Room::rectangle(20.0, 20.0);
  const std::vector<CoverageBeacon> b{{{0.0, 0.0}, kPi / 4.0, kPi / 2.0, 9.0}};
  const auto grid = coverage_map(room, b, 1, 0.05);
  CHECK(covered_area(grid) == doctest::Approx(sector_area(9.0, kPi / 2.0)).epsilon(0.01));
}

TEST_CASE("no beacons covers nothing") {
  const Room room = Room::rectangle(4.5, 11.5);
  const auto grid = coverage_map(room, std::vector<CoverageBeacon>{}, 2, 0.1);
  CHECK(covered_area(grid) == 0.0);
  // Requiring zero beacons covers the whole floor.
  const auto all = coverage_map(room, std::vector<CoverageBeacon>{}, 0, 0.1);
  CHECK(covered_area(all) == doctest::Approx(room.area()).epsilon(1e-9));
}

TEST_CASE("walls shadow part of a concave room") {
  const Room room({{0, 0}, {4, 0}, {4, 2}, {2, 2}, {2, 4}, {0, 4}});
  const CoverageBeacon b{{3.9, 0.1}, kPi, 2.0 * kPi, 20.0};
  CHECK(beacon_reaches(room, b, {1.0, 1.0}));
  CHECK_FALSE(beacon_reaches(room, b, {0.5, 3.8}));
  const std::vector<CoverageBeacon> bs{b};
  const auto grid = coverage_map(room, bs, 1, 0.05);
  CHECK(covered_area(grid) < room.area() - 0.1);
}

TEST_CASE("PGM output") {
  const Room room = Room::rectangle(1.0, 0.5);
  const std::vector<CoverageBeacon> b{{{0.0, 0.0}, 0.0, 2.0 * kPi, 0.3}};
  const auto grid = coverage_map(room, b, 1, 0.1);
  CHECK(grid.cols() == 10);
  CHECK(grid.rows() == 5);
  const std::string pgm = grid.to_pgm();
  const std::string header = "P5\n10 5\n255\n";
  REQUIRE(pgm.size() == header.size() + 50);
  CHECK(pgm.substr(0, header.size()) == header);
  // Bottom-left cell (last image row, first column) is covered by one beacon.
  CHECK(static_cast<unsigned char>(pgm[header.size() + 40]) == 129);
  // Top-right cell is not.
  CHECK(static_cast<unsigned char>(pgm[header.size() + 9]) == 0);
}

TEST_CASE("coverage argument checks") {
  const Room room = Room::rectangle(1.0, 1.0);
  const std::vector<CoverageBeacon> b;
  CHECK_THROWS_AS(coverage_map(room, b, 1, 0.0), Error);
  CHECK_THROWS_AS(coverage_map(room, b, -1, 0.1), Error);
  CHECK_THROWS_AS(coverage_map(Room{}, b, 1, 0.1), Error);
}
