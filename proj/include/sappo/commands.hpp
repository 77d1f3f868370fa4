#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sappo/coverage.hpp"
#include "sappo/scenario.hpp"
#include "sappo/simulator.hpp"

namespace sappo {

/// Horizontal sectors of the scenario's beacons for the coverage estimator.
std::vector<CoverageBeacon> coverage_beacons(const Scenario& s);

struct CoverageRow {
  int min_beacons = 0;
  double covered_m2 = 0.0;
};

/// Writes coverage_min{1,2,3}.pgm and coverage.csv into `out_dir`.
std::vector<CoverageRow> cmd_coverage(const Scenario& s, double cell_size, const std::string& out_dir);

/// Writes trace.csv, cycles.csv, ranges.csv, fixes.csv and summary.csv.
SimSummary cmd_simulate(const Scenario& s, int n_cycles, const std::string& out_dir);

enum class CurveType { error_angle, error_distance, filter_response };

CurveType curve_type_from_string(const std::string& s);

struct CurveRequest {
  CurveType type = CurveType::error_angle;
  /// Center distance (m) for error_angle, deviation (deg) for error_distance.
  std::optional<double> fixed;
  std::optional<double> from;
  std::optional<double> to;
  int steps = 31;
  bool svg = false;
  ErrorCurveConfig ring;
};

/// Writes <kind>.csv (and <kind>.svg when requested); returns the CSV text.
std::string cmd_curves(const CurveRequest& req, const std::string& out_dir);

/// Loads and validates; throws Error(ErrorCode::schema) with the field path.
Scenario cmd_validate(const std::string& path);

std::string trace_csv(const SimResult& r);
std::string cycles_csv(const SimResult& r);
std::string ranges_csv(const SimResult& r);
std::string fixes_csv(const SimResult& r);
std::string summary_csv(const SimSummary& s);

/// Minimal line chart; one polyline per series.
std::string svg_chart(const std::string& title, const std::string& x_label,
                      const std::vector<double>& x,
                      const std::vector<std::pair<std::string, std::vector<double>>>& series);

}  // namespace sappo
