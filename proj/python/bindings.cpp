#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sappo/commands.hpp"
#include "sappo/error.hpp"
#include "sappo/filters.hpp"
#include "sappo/protocol.hpp"
#include "sappo/simulator.hpp"
#include "sappo/solver.hpp"

namespace py = pybind11;
using namespace sappo;

namespace {

py::tuple xy(Vec2 v) { return py::make_tuple(v.x, v.y); }
py::tuple xyz(Vec3 v) { return py::make_tuple(v.x, v.y, v.z); }

py::dict summary_dict(const SimSummary& s) {
  py::dict d;
  d["cycles"] = s.cycles;
  d["duration_s"] = s.duration_s;
  d["cycle_rate_hz"] = s.cycle_rate_hz;
  d["fixes"] = s.fixes;
  d["raw_fixes"] = s.raw_fixes;
  d["median_error_m"] = s.median_error_m;
  d["p95_error_m"] = s.p95_error_m;
  d["raw_median_error_m"] = s.raw_median_error_m;
  d["raw_p95_error_m"] = s.raw_p95_error_m;
  d["within_mm"] = s.within_mm;
  d["raw_within_mm"] = s.raw_within_mm;
  d["direct_measurements"] = s.direct_measurements;
  d["direct_accepted"] = s.direct_accepted;
  d["echo_measurements"] = s.echo_measurements;
  d["echo_rejected"] = s.echo_rejected;
  d["ghost_rejections"] = s.ghost_rejections;
  d["energy_mah"] = s.energy_mah;
  return d;
}

}  // namespace

PYBIND11_MODULE(_sappo, m) {
  m.doc() = "Ultrasonic beacon positioning: geometry, solver, filters and simulator";

  py::register_exception<Error>(m, "SappoError", PyExc_ValueError);

  // geometry and coverage
  m.def("footprint_diameter", [](double h, double beta_deg) {
    return footprint_diameter(h, deg_to_rad(beta_deg));
  }, py::arg("height"), py::arg("aperture_deg"));
  m.def("disc_area", &disc_area, py::arg("diameter"));
  m.def("sector_area", [](double r, double arc_deg) { return sector_area(r, deg_to_rad(arc_deg)); },
        py::arg("radius"), py::arg("arc_deg"));
  m.def("lens_area", &lens_area, py::arg("radius"), py::arg("center_distance"));
  m.def("cone_triangle_area", [](double h, double beta_deg) {
    return cone_triangle_area(h, deg_to_rad(beta_deg));
  }, py::arg("h"), py::arg("aperture_deg"));

  // channel and solver
  m.def("sound_speed", &sound_speed, py::arg("temperature_c"));
  m.def("height_correct", &height_correct, py::arg("slant"), py::arg("beacon_height"),
        py::arg("emitter_height"));
  m.def("bilaterate2", [](std::pair<double, double> c1, double r1, std::pair<double, double> c2,
                          double r2) {
    py::list out;
    for (Vec2 p : bilaterate2({c1.first, c1.second}, r1, {c2.first, c2.second}, r2)) out.append(xy(p));
    return out;
  }, py::arg("c1"), py::arg("r1"), py::arg("c2"), py::arg("r2"));
  m.def("trilaterate3_canonical", [](double r1, double r2, double r3, double d, double i, double j) {
    py::list out;
    for (Vec3 p : trilaterate3_canonical(r1, r2, r3, d, i, j)) out.append(xyz(p));
    return out;
  }, py::arg("r1"), py::arg("r2"), py::arg("r3"), py::arg("d"), py::arg("i"), py::arg("j"));

  m.def("error_curve", [](const std::string& kind, double fixed, double from, double to, int steps) {
    const bool angle = kind == "angle";
    if (!angle && kind != "distance") throw Error(ErrorCode::domain, "kind must be angle or distance");
    py::list out;
    const auto rows = angle ? error_curve(CurveKind::angle, fixed, deg_to_rad(from), deg_to_rad(to), steps)
                            : error_curve(CurveKind::distance, deg_to_rad(fixed), from, to, steps);
    for (const auto& r : rows) out.append(py::make_tuple(angle ? rad_to_deg(r.sweep) : r.sweep, r.error));
    return out;
  }, py::arg("kind"), py::arg("fixed"), py::arg("start"), py::arg("stop"), py::arg("steps") = 30,
     "Angle sweeps take degrees and a center distance in meters; distance sweeps take meters and "
     "a deviation in degrees. Returns (sweep, error_m) pairs.");

  // filters
  py::class_<MovingAverage>(m, "MovingAverage")
      .def(py::init<int>(), py::arg("window"))
      .def("step", &MovingAverage::step)
      .def("reset", &MovingAverage::reset);
  py::class_<Ema>(m, "Ema")
      .def(py::init<double>(), py::arg("alpha"))
      .def("step", &Ema::step)
      .def("reset", &Ema::reset);
  py::class_<Kalman>(m, "Kalman")
      .def(py::init<double, double, double, std::optional<double>>(), py::arg("r"), py::arg("q"),
           py::arg("p0"), py::arg("initial") = std::nullopt)
      .def("step", &Kalman::step)
      .def("reset", &Kalman::reset)
      .def_property_readonly("estimate", &Kalman::estimate)
      .def_property_readonly("covariance", &Kalman::covariance)
      .def_property_readonly("gain", &Kalman::last_gain);

  // power
  m.def("battery_life_hours", py::overload_cast<double, double>(&battery_life),
        py::arg("capacity_mah"), py::arg("current_ma"));

  // scenarios and commands; scenarios cross the boundary as JSON text
  m.def("default_scenario", [] { return serialize_scenario(default_scenario()); });
  m.def("validate_scenario", [](const std::string& text) {
    return serialize_scenario(parse_scenario(text));
  }, py::arg("text"), "Parses and validates; returns the normalized JSON text.");
  m.def("simulate", [](const std::string& text, int cycles, std::optional<std::uint64_t> seed) {
    Scenario s = parse_scenario(text);
    if (seed) s.seed = *seed;
    SimOptions opt;
    opt.n_cycles = cycles;
    SimResult r;
    {
      py::gil_scoped_release release;
      r = simulate(s, opt);
    }
    py::list fixes;
    for (const auto& f : r.fixes) {
      fixes.append(py::make_tuple(f.cycle_id, f.time, xy(f.truth),
                                  f.fix.ok() ? py::object(xy(f.fix.position.xy())) : py::none(),
                                  f.error));
    }
    py::dict out;
    out["summary"] = summary_dict(r.summary);
    out["fixes"] = fixes;
    return out;
  }, py::arg("scenario"), py::arg("cycles") = 1000, py::arg("seed") = std::nullopt);
  m.def("coverage", [](const std::string& text, double cell_size, const std::string& out_dir) {
    py::dict out;
    for (const auto& row : cmd_coverage(parse_scenario(text), cell_size, out_dir)) {
      out[py::int_(row.min_beacons)] = row.covered_m2;
    }
    return out;
  }, py::arg("scenario"), py::arg("cell_size") = 0.05, py::arg("out_dir"));
  m.def("write_simulation", [](const std::string& text, int cycles, const std::string& out_dir) {
    return summary_dict(cmd_simulate(parse_scenario(text), cycles, out_dir));
  }, py::arg("scenario"), py::arg("cycles"), py::arg("out_dir"));
}
