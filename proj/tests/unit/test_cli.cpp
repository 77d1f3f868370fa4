#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sappo/commands.hpp"
#include "sappo/error.hpp"

using namespace sappo;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sappo_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("coverage command writes maps and a table") {
  const fs::path dir = scratch("coverage");
  const auto rows = cmd_coverage(default_scenario(), 0.1, dir.string());
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].covered_m2 >= rows[1].covered_m2);
  CHECK(rows[1].covered_m2 >= rows[2].covered_m2);
  for (int k = 1; k <= 3; ++k) {
    CHECK(fs::exists(dir / ("coverage_min" + std::to_string(k) + ".pgm")));
  }
  const std::string csv = slurp(dir / "coverage.csv");
  CHECK(csv.rfind("min_beacons,covered_m2,room_m2,cell_size_m\n", 0) == 0);
}

TEST_CASE("coverage with no beacons is zero") {
  Scenario s = default_scenario();
  s.beacons.clear();
  const auto rows = cmd_coverage(s, 0.1, scratch("empty").string());
  for (const auto& r : rows) CHECK(r.covered_m2 == 0.0);
}

TEST_CASE("simulate command output is reproducible") {
  const fs::path a = scratch("sim_a"), b = scratch("sim_b");
  cmd_simulate(default_scenario(), 100, a.string());
  cmd_simulate(default_scenario(), 100, b.string());
  for (const char* f : {"trace.csv", "cycles.csv", "ranges.csv", "fixes.csv", "summary.csv"}) {
    INFO(f);
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK(slurp(a / "fixes.csv").rfind("cycle_id,x,y,z,residual_m,n_beacons,chosen_by,status", 0) == 0);
  CHECK(slurp(a / "cycles.csv").rfind("cycle_id,beacon_id,tof_s,transducer_index,accepted,path_kind", 0) == 0);
}

TEST_CASE("curves command") {
  const fs::path dir = scratch("curves");
  CurveRequest req;
  req.type = CurveType::error_angle;
  req.svg = true;
  const std::string csv = cmd_curves(req, dir.string());
  CHECK(fs::exists(dir / "error_angle.csv"));
  CHECK(fs::exists(dir / "error_angle.svg"));
  CHECK(slurp(dir / "error_angle.svg").find("<svg") != std::string::npos);
  // Last row is the 15 degree point.
  const auto last = csv.substr(csv.rfind('\n', csv.size() - 2) + 1);
  const double err_mm = std::stod(last.substr(last.find(',') + 1));
  CHECK(err_mm == doctest::Approx(2.014).epsilon(1e-3));

  req.type = CurveType::filter_response;
  const std::string fr = cmd_curves(req, dir.string());
  CHECK(fr.rfind("k,input,moving_average,ema_0.1,ema_0.2,ema_0.5,kalman", 0) == 0);
  // One sample after the step, a smaller alpha has covered less of it.
  std::istringstream rows(fr);
  std::string line;
  std::vector<double> after;
  while (std::getline(rows, line)) {
    if (line.rfind("11,", 0) != 0) continue;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) after.push_back(std::stod(cell));
  }
  REQUIRE(after.size() == 7);
  CHECK(after[3] < after[4]);
  CHECK(after[4] < after[5]);
  CHECK(after[5] < after[1]);
  CHECK(curve_type_from_string("error_distance") == CurveType::error_distance);
  CHECK_THROWS_AS(curve_type_from_string("bogus"), Error);
}

TEST_CASE("validate names the bad field") {
  const fs::path dir = scratch("validate");
  const fs::path p = dir / "bad.json";
  std::ofstream(p) << R"({"schema_version": 1, "room": [[0,0],[1,0],[1,1]], "transducers": {},
    "beacons": [], "robot": {"ring": {"n_sides": "twelve"}, "path": []}})";
  try {
    cmd_validate(p.string());
    FAIL("expected a schema error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::schema);
    CHECK(std::string(e.what()).find("robot.ring.n_sides") != std::string::npos);
  }
}
