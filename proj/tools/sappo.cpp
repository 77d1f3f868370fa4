// Command-line front end: coverage maps, simulation runs, curves, validation.
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sappo/commands.hpp"
#include "sappo/error.hpp"
#include "sappo/scenario.hpp"

namespace {

constexpr int kExitSchema = 2;
constexpr int kExitSimulation = 3;

sappo::Scenario load_or_default(const std::string& path, std::optional<std::uint64_t> seed) {
  sappo::Scenario s = path.empty() ? sappo::default_scenario() : sappo::load_scenario(path);
  if (seed) s.seed = *seed;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ultrasonic beacon positioning simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  double cell_size = 0.05;
  int cycles = 1000;

  auto* coverage = app.add_subcommand("coverage", "Coverage maps and covered area for 1, 2 and 3 beacons");
  coverage->add_option("scenario", scenario_path, "Scenario JSON (default scenario if omitted)");
  coverage->add_option("--out", out, "Output directory");
  coverage->add_option("--cell-size", cell_size, "Grid cell size in meters")->check(CLI::PositiveNumber);
  coverage->add_option("--seed", seed, "Override the scenario seed");

  auto* simulate = app.add_subcommand("simulate", "Run measurement cycles and write CSV traces");
  simulate->add_option("scenario", scenario_path, "Scenario JSON (default scenario if omitted)");
  simulate->add_option("--out", out, "Output directory");
  simulate->add_option("--cycles", cycles, "Number of measurement cycles")->check(CLI::NonNegativeNumber);
  simulate->add_option("--seed", seed, "Override the scenario seed");

  sappo::CurveRequest curve;
  std::string curve_kind = "error_angle";
  double fixed = 0.0, from = 0.0, to = 0.0;
  auto* curves = app.add_subcommand("curves", "Ring error and filter response curves");
  curves->add_option("kind", curve_kind, "error_angle | error_distance | filter_response")
      ->check(CLI::IsMember({"error_angle", "error_distance", "filter_response"}));
  auto* fixed_opt = curves->add_option("--fixed", fixed,
                                       "Center distance (m) for error_angle, deviation (deg) for error_distance");
  auto* from_opt = curves->add_option("--from", from, "Sweep start (deg or m)");
  auto* to_opt = curves->add_option("--to", to, "Sweep end (deg or m)");
  curves->add_option("--steps", curve.steps, "Number of sweep points");
  curves->add_flag("--svg", curve.svg, "Also write an SVG chart");
  curves->add_option("--out", out, "Output directory");
  curves->add_option("--seed", seed, "Accepted for symmetry; curves are deterministic");

  auto* validate = app.add_subcommand("validate", "Check a scenario file against the schema");
  validate->add_option("scenario", scenario_path, "Scenario JSON")->required();

  auto* init = app.add_subcommand("init", "Write the default scenario as JSON");
  std::string init_path = "scenario.json";
  init->add_option("path", init_path, "Destination file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*coverage) {
      const auto s = load_or_default(scenario_path, seed);
      for (const auto& row : sappo::cmd_coverage(s, cell_size, out)) {
        std::printf("min_beacons=%d covered_m2=%.4f\n", row.min_beacons, row.covered_m2);
      }
    } else if (*simulate) {
      const auto s = load_or_default(scenario_path, seed);
      const auto sum = sappo::cmd_simulate(s, cycles, out);
      std::printf("cycles=%d rate_hz=%.3f median_error_mm=%.3f p95_error_mm=%.3f rejections=%d\n",
                  sum.cycles, sum.cycle_rate_hz, sum.median_error_m * 1000.0, sum.p95_error_m * 1000.0,
                  sum.ghost_rejections);
    } else if (*curves) {
      curve.type = sappo::curve_type_from_string(curve_kind);
      if (fixed_opt->count() > 0) curve.fixed = fixed;
      if (from_opt->count() > 0) curve.from = from;
      if (to_opt->count() > 0) curve.to = to;
      std::cout << sappo::cmd_curves(curve, out);
    } else if (*validate) {
      const auto s = sappo::cmd_validate(scenario_path);
      std::printf("ok: '%s', %zu beacons, %zu waypoints\n", s.name.c_str(), s.beacons.size(),
                  s.robot.path.size());
    } else if (*init) {
      sappo::save_scenario(sappo::default_scenario(), init_path);
    }
  } catch (const sappo::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code() == sappo::ErrorCode::schema ? kExitSchema : kExitSimulation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSimulation;
  }
  return 0;
}
