#include "sappo/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sappo/error.hpp"
#include "sappo/filters.hpp"

namespace sappo {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::simulation, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::simulation, "write failed for '" + path.string() + "'");
}

fs::path prepare(const std::string& out_dir) {
  fs::path dir(out_dir.empty() ? "." : out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::simulation, "cannot create '" + dir.string() + "': " + ec.message());
  return dir;
}

// Quotes a CSV field when needed.
std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

}  // namespace

std::vector<CoverageBeacon> coverage_beacons(const Scenario& s) {
  std::vector<CoverageBeacon> out;
  for (const auto& b : s.beacons) {
    out.push_back({b.position, deg_to_rad(b.orientation_deg), deg_to_rad(b.arc_deg),
                   s.transducer(b.transducer).range_m});
  }
  return out;
}

std::vector<CoverageRow> cmd_coverage(const Scenario& s, double cell_size, const std::string& out_dir) {
  if (!(cell_size > 0.0)) throw Error(ErrorCode::simulation, "cell size must be positive");
  const Room room = s.make_room();
  const auto beacons = coverage_beacons(s);
  const fs::path dir = prepare(out_dir);

  std::vector<CoverageRow> rows;
  std::ostringstream csv;
  csv << "min_beacons,covered_m2,room_m2,cell_size_m\n";
  for (int k = 1; k <= 3; ++k) {
    const CoverageGrid grid = coverage_map(room, beacons, k, cell_size);
    const double area = covered_area(grid);
    rows.push_back({k, area});
    csv << k << ',' << num(area) << ',' << num(room.area()) << ',' << num(cell_size) << '\n';
    write_file(dir / ("coverage_min" + std::to_string(k) + ".pgm"), grid.to_pgm());
  }
  write_file(dir / "coverage.csv", csv.str());
  return rows;
}

std::string trace_csv(const SimResult& r) {
  std::ostringstream o;
  o << "time_s,entity,event,detail\n";
  for (const auto& e : r.trace) {
    o << num(e.time) << ',' << field(e.entity) << ',' << field(e.event) << ',' << field(e.detail) << '\n';
  }
  return o.str();
}

std::string cycles_csv(const SimResult& r) {
  std::ostringstream o;
  o << "cycle_id,beacon_id,tof_s,transducer_index,accepted,path_kind\n";
  for (const auto& c : r.cycles) {
    for (const auto& b : c.records) {
      o << c.cycle_id << ',' << b.beacon_id << ',' << num(b.tof) << ',' << b.transducer_index << ','
        << (b.accepted ? 1 : 0) << ',' << to_string(b.source) << '\n';
    }
  }
  return o.str();
}

std::string ranges_csv(const SimResult& r) {
  std::ostringstream o;
  o << "cycle_id,beacon_id,time_s,raw_m,filtered_m,true_m\n";
  for (const auto& g : r.ranges) {
    o << g.cycle_id << ',' << g.beacon_id << ',' << num(g.time) << ',' << num(g.raw_m) << ','
      << num(g.filtered_m) << ',' << num(g.true_m) << '\n';
  }
  return o.str();
}

std::string fixes_csv(const SimResult& r) {
  std::ostringstream o;
  o << "cycle_id,x,y,z,residual_m,n_beacons,chosen_by,status,true_x,true_y,error_m,raw_x,raw_y,raw_error_m\n";
  const double nan = std::nan("");
  for (const auto& f : r.fixes) {
    const bool ok = f.fix.ok();
    const bool raw_ok = f.raw_fix.ok();
    o << f.cycle_id << ',' << num(ok ? f.fix.position.x : nan) << ','
      << num(ok ? f.fix.position.y : nan) << ',' << num(ok ? f.fix.position.z : nan) << ','
      << num(f.fix.residual) << ',' << f.fix.n_beacons << ',' << to_string(f.fix.chosen_by) << ','
      << to_string(f.fix.status) << ',' << num(f.truth.x) << ',' << num(f.truth.y) << ','
      << num(f.error) << ',' << num(raw_ok ? f.raw_fix.position.x : nan) << ','
      << num(raw_ok ? f.raw_fix.position.y : nan) << ',' << num(f.raw_error) << '\n';
  }
  return o.str();
}

std::string summary_csv(const SimSummary& s) {
  std::ostringstream o;
  o << "key,value\n";
  o << "cycles," << s.cycles << '\n';
  o << "duration_s," << num(s.duration_s) << '\n';
  o << "cycle_rate_hz," << num(s.cycle_rate_hz) << '\n';
  o << "fixes," << s.fixes << '\n';
  o << "raw_fixes," << s.raw_fixes << '\n';
  o << "median_error_m," << num(s.median_error_m) << '\n';
  o << "p95_error_m," << num(s.p95_error_m) << '\n';
  o << "raw_median_error_m," << num(s.raw_median_error_m) << '\n';
  o << "raw_p95_error_m," << num(s.raw_p95_error_m) << '\n';
  o << "mm_threshold_m," << num(s.mm_threshold_m) << '\n';
  o << "within_mm_fraction," << num(s.within_mm) << '\n';
  o << "raw_within_mm_fraction," << num(s.raw_within_mm) << '\n';
  o << "direct_measurements," << s.direct_measurements << '\n';
  o << "direct_accepted," << s.direct_accepted << '\n';
  o << "echo_measurements," << s.echo_measurements << '\n';
  o << "echo_rejected," << s.echo_rejected << '\n';
  o << "ghost_rejections," << s.ghost_rejections << '\n';
  for (const auto& [id, e] : s.energy_mah) o << "energy_mah_beacon" << id << ',' << num(e) << '\n';
  return o.str();
}

SimSummary cmd_simulate(const Scenario& s, int n_cycles, const std::string& out_dir) {
  SimOptions opt;
  opt.n_cycles = n_cycles;
  const SimResult r = simulate(s, opt);
  const fs::path dir = prepare(out_dir);
  write_file(dir / "trace.csv", trace_csv(r));
  write_file(dir / "cycles.csv", cycles_csv(r));
  write_file(dir / "ranges.csv", ranges_csv(r));
  write_file(dir / "fixes.csv", fixes_csv(r));
  write_file(dir / "summary.csv", summary_csv(r.summary));
  return r.summary;
}

CurveType curve_type_from_string(const std::string& s) {
  if (s == "error_angle") return CurveType::error_angle;
  if (s == "error_distance") return CurveType::error_distance;
  if (s == "filter_response") return CurveType::filter_response;
  throw Error(ErrorCode::schema, "unknown curve kind '" + s + "'");
}

std::string svg_chart(const std::string& title, const std::string& x_label,
                      const std::vector<double>& x,
                      const std::vector<std::pair<std::string, std::vector<double>>>& series) {
  constexpr double W = 640, H = 400, L = 60, R = 20, T = 40, B = 50;
  double x0 = x.empty() ? 0.0 : *std::min_element(x.begin(), x.end());
  double x1 = x.empty() ? 1.0 : *std::max_element(x.begin(), x.end());
  double y0 = 0.0;
  double y1 = 0.0;
  bool first = true;
  for (const auto& [name, ys] : series) {
    for (double y : ys) {
      if (!std::isfinite(y)) continue;
      y0 = first ? y : std::min(y0, y);
      y1 = first ? y : std::max(y1, y);
      first = false;
    }
  }
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) y1 = y0 + 1.0;
  auto px = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (v - y0) / (y1 - y0) * (H - T - B); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title << "</text>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
    << x_label << "</text>\n";
  o << "<text x=\"" << L << "\" y=\"" << H - B + 16 << "\" font-size=\"10\">" << num(x0) << "</text>\n";
  o << "<text x=\"" << W - R << "\" y=\"" << H - B + 16 << "\" text-anchor=\"end\" font-size=\"10\">"
    << num(x1) << "</text>\n";
  o << "<text x=\"" << L - 4 << "\" y=\"" << H - B << "\" text-anchor=\"end\" font-size=\"10\">" << num(y0)
    << "</text>\n";
  o << "<text x=\"" << L - 4 << "\" y=\"" << T + 4 << "\" text-anchor=\"end\" font-size=\"10\">" << num(y1)
    << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& [name, ys] = series[s];
    const char* color = colors[s % 6];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (std::size_t i = 0; i < x.size() && i < ys.size(); ++i) {
      if (!std::isfinite(ys[i])) continue;
      o << num(px(x[i])) << ',' << num(py(ys[i])) << ' ';
    }
    o << "\"/>\n";
    o << "<text x=\"" << W - R - 4 << "\" y=\"" << T + 14 * (s + 1) << "\" text-anchor=\"end\" font-size=\"11\" fill=\""
      << color << "\">" << name << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string cmd_curves(const CurveRequest& req, const std::string& out_dir) {
  if (req.steps < 2) throw Error(ErrorCode::simulation, "curves need at least 2 steps");
  std::ostringstream csv;
  std::string name;
  std::vector<double> xs;
  std::vector<std::pair<std::string, std::vector<double>>> series;
  std::string title;
  std::string x_label;

  switch (req.type) {
    case CurveType::error_angle: {
      name = "error_angle";
      const double d = req.fixed.value_or(4.0);
      const double from = req.from.value_or(0.0);
      const double to = req.to.value_or(15.0);
      const auto pts = error_curve(CurveKind::angle, d, deg_to_rad(from), deg_to_rad(to), req.steps, req.ring);
      csv << "deviation_deg,error_mm\n";
      series.push_back({"error_mm", {}});
      for (const auto& p : pts) {
        csv << num(rad_to_deg(p.sweep)) << ',' << num(p.error * 1000.0) << '\n';
        xs.push_back(rad_to_deg(p.sweep));
        series[0].second.push_back(p.error * 1000.0);
      }
      title = "Ring error vs deviation at d = " + num(d) + " m";
      x_label = "deviation (deg)";
      break;
    }
    case CurveType::error_distance: {
      name = "error_distance";
      const double w = req.fixed.value_or(15.0);
      const double from = req.from.value_or(0.5);
      const double to = req.to.value_or(9.0);
      const auto pts = error_curve(CurveKind::distance, deg_to_rad(w), from, to, req.steps, req.ring);
      csv << "distance_m,error_mm\n";
      series.push_back({"error_mm", {}});
      for (const auto& p : pts) {
        csv << num(p.sweep) << ',' << num(p.error * 1000.0) << '\n';
        xs.push_back(p.sweep);
        series[0].second.push_back(p.error * 1000.0);
      }
      title = "Ring error vs distance at w = " + num(w) + " deg";
      x_label = "center distance (m)";
      break;
    }
    case CurveType::filter_response: {
      name = "filter_response";
      // Unit step at sample 10 through each filter at its documented defaults
      // and a few EMA weights.
      const int n = std::max(req.steps, 20);
      FilterConfig base;
      MovingAverage ma(base.window);
      Ema e1(0.1), e2(base.alpha), e5(0.5);
      Kalman kf(base.kalman_r, base.kalman_q, base.kalman_p0);
      csv << "k,input,moving_average,ema_0.1,ema_0.2,ema_0.5,kalman\n";
      const char* labels[] = {"input", "moving_average", "ema_0.1", "ema_0.2", "ema_0.5", "kalman"};
      for (const char* l : labels) series.push_back({l, {}});
      for (int k = 0; k < n; ++k) {
        const double u = k < 10 ? 0.0 : 1.0;
        const double v[] = {u, ma.step(u), e1.step(u), e2.step(u), e5.step(u), kf.step(u)};
        csv << k;
        for (std::size_t i = 0; i < 6; ++i) {
          csv << ',' << num(v[i]);
          series[i].second.push_back(v[i]);
        }
        csv << '\n';
        xs.push_back(k);
      }
      title = "Filter step response";
      x_label = "sample";
      break;
    }
  }

  const fs::path dir = prepare(out_dir);
  write_file(dir / (name + ".csv"), csv.str());
  if (req.svg) write_file(dir / (name + ".svg"), svg_chart(title, x_label, xs, series));
  return csv.str();
}

Scenario cmd_validate(const std::string& path) { return load_scenario(path); }

}  // namespace sappo
