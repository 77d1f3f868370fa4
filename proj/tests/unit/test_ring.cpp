#include <doctest.h>

#include <cmath>

#include "sappo/error.hpp"
#include "sappo/ring.hpp"

using namespace sappo;

namespace {

// Gap between facing transducers found by bisection on the center distance,
// without the closed form used by the library.
double gap_by_bisection(double a_total, double deviation, double center_distance) {
  const Vec2 u = unit_from_angle(deviation);
  auto centers = [&](double gap) { return norm(Vec2{gap, 0.0} + a_total * u) - center_distance; };
  double lo = 0.0, hi = center_distance;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (centers(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("regular polygon radii") {
  CHECK(circumradius_from_side(1.0, 6) == doctest::Approx(1.0));
  CHECK(apothem(1.0, 6) == doctest::Approx(std::sqrt(3.0) / 2.0));
  CHECK(apothem(2.0, 4) == doctest::Approx(1.0));
  for (int n : {3, 5, 12, 16}) {
    const double side = side_from_apothem(0.03, n);
    CHECK(apothem(side, n) == doctest::Approx(0.03).epsilon(1e-12));
  }
  CHECK_THROWS_AS(apothem(1.0, 2), Error);
  CHECK_THROWS_AS(apothem(0.0, 6), Error);
}

TEST_CASE("full ring sites sit on the apothem and face outward") {
  PolygonRing spec;
  spec.n_sides = 12;
  spec.side_length = side_from_apothem(0.03, 12);
  spec.pose = {{1.0, 2.0}, deg_to_rad(90.0)};
  const BuiltRing ring = build_ring(spec);
  REQUIRE(ring.sites.size() == 12);
  CHECK(ring.sites[0].outward_normal == doctest::Approx(deg_to_rad(90.0)));
  for (const auto& s : ring.sites) {
    CHECK(distance(s.position, ring.center) == doctest::Approx(0.03));
    const Vec2 dir = s.position - ring.center;
    CHECK(heading_of(dir) == doctest::Approx(s.outward_normal));
  }
  CHECK(ring.mean_apothem() == doctest::Approx(0.03));
}

TEST_CASE("partial block is centered on the heading") {
  PolygonRing spec;
  spec.n_sides = 16;
  spec.side_length = side_from_apothem(0.03, 16);
  spec.active_sides = 4;
  spec.pose = {{0.0, 0.0}, deg_to_rad(45.0)};
  const BuiltRing ring = build_ring(spec);
  REQUIRE(ring.sites.size() == 4);
  double mean = 0.0;
  for (const auto& s : ring.sites) mean += s.outward_normal;
  CHECK(mean / 4.0 == doctest::Approx(deg_to_rad(45.0)));
  CHECK(ring.sites[1].outward_normal - ring.sites[0].outward_normal ==
        doctest::Approx(deg_to_rad(22.5)));
}

TEST_CASE("split ring shifts the two halves apart") {
  PolygonRing spec;
  spec.n_sides = 12;
  spec.side_length = side_from_apothem(0.03, 12);
  spec.split_gap = 0.02;
  spec.pose = {{0.0, 0.0}, 0.0};
  const BuiltRing ring = build_ring(spec);
  // Side 0 faces forward, side 6 faces backward; both move 1 cm outward.
  CHECK(ring.sites[0].position.x == doctest::Approx(0.04));
  CHECK(ring.sites[6].position.x == doctest::Approx(-0.04));
  CHECK(ring.sites[0].effective_apothem == doctest::Approx(0.04));
  // Side 3 faces +y and sits on the dividing line; it joins the front half.
  CHECK(ring.sites[3].position.x == doctest::Approx(0.01));
  CHECK(ring.sites[3].effective_apothem == doctest::Approx(std::hypot(0.03, 0.01)));
}

TEST_CASE("aligned rings measure the exact center distance") {
  PolygonRing a;
  a.n_sides = 12;
  a.side_length = side_from_apothem(0.03, 12);
  a.pose = {{0.0, 0.0}, 0.0};
  PolygonRing b = a;
  b.pose = {{3.0, 0.0}, kPi};
  const MeasuredDistance m = measured_distance(build_ring(a), build_ring(b));
  CHECK(m.raw == doctest::Approx(2.94));
  CHECK(m.corrected == doctest::Approx(3.0));
}

TEST_CASE("rings facing away have no visible pair") {
  PolygonRing a;
  a.n_sides = 16;
  a.side_length = side_from_apothem(0.03, 16);
  a.active_sides = 1;
  a.pose = {{0.0, 0.0}, kPi};
  PolygonRing b = a;
  b.pose = {{3.0, 0.0}, 0.0};
  try {
    measured_distance(build_ring(a), build_ring(b));
    FAIL("expected no_visible_pair");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::no_visible_pair);
  }
}

TEST_CASE("orientation error curve") {
  const auto rows = error_curve(CurveKind::angle, 4.0, 0.0, deg_to_rad(15.0), 15);
  REQUIRE(rows.size() == 16);
  CHECK(rows.front().error == doctest::Approx(0.0).epsilon(1e-12));
  for (size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].error >= rows[i - 1].error);
  CHECK(rows.back().error * 1000.0 == doctest::Approx(2.014).epsilon(1e-3));
  CHECK(rows.back().error < 0.0025);

  // Oracle: corrected = gap + both apothems, gap found numerically.
  for (const auto& r : rows) {
    const double gap = gap_by_bisection(0.06, r.sweep, 4.0);
    CHECK(r.error == doctest::Approx(gap + 0.06 - 4.0).epsilon(1e-9));
  }
  CHECK_THROWS_AS(error_curve(CurveKind::angle, 4.0, 0.0, deg_to_rad(20.0), 5), Error);
}

TEST_CASE("distance error curve is almost flat") {
  const auto rows = error_curve(CurveKind::distance, deg_to_rad(15.0), 1.5, 9.0, 30);
  double lo = 1.0, hi = -1.0;
  for (const auto& r : rows) {
    lo = std::min(lo, r.error);
    hi = std::max(hi, r.error);
    const double gap = gap_by_bisection(0.06, deg_to_rad(15.0), r.sweep);
    CHECK(r.error == doctest::Approx(gap + 0.06 - r.sweep).epsilon(1e-9));
  }
  CHECK(hi - lo <= 0.0005);
  CHECK_THROWS_AS(error_curve(CurveKind::distance, 0.1, 0.0, 2.0, 5), Error);
}
