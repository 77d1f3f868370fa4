#include "sappo/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sappo/error.hpp"

namespace sappo {

using nlohmann::json;

const char* to_string(Pacing p) {
  return p == Pacing::ack_gated ? "ack_gated" : "attenuation_wait";
}

PolygonRing BeaconConfig::ring(const TransducerSpec& spec) const {
  const int n = static_cast<int>(std::lround(n_transducers * 360.0 / arc_deg));
  PolygonRing r;
  r.n_sides = n;
  r.side_length = side_from_apothem(apothem_m, n);
  r.pose = {position, deg_to_rad(orientation_deg)};
  r.active_sides = n_transducers >= n ? 0 : n_transducers;
  r.aperture = deg_to_rad(spec.aperture_deg);
  r.range = spec.range_m;
  return r;
}

Pose2 RobotConfig::pose_at(double t) const {
  if (path.empty()) return {};
  if (t <= path.front().t) return {path.front().position, deg_to_rad(path.front().heading_deg)};
  if (t >= path.back().t) return {path.back().position, deg_to_rad(path.back().heading_deg)};
  auto hi = std::upper_bound(path.begin(), path.end(), t,
                             [](double v, const Waypoint& w) { return v < w.t; });
  auto lo = hi - 1;
  const double span = hi->t - lo->t;
  const double u = span > 0.0 ? (t - lo->t) / span : 1.0;
  const Vec2 p = lo->position + u * (hi->position - lo->position);
  const double h0 = deg_to_rad(lo->heading_deg);
  const double dh = wrap_angle(deg_to_rad(hi->heading_deg) - h0);
  return {p, wrap_angle(h0 + u * dh)};
}

PolygonRing RobotConfig::ring(const TransducerSpec& spec, Pose2 pose) const {
  PolygonRing r;
  r.n_sides = n_sides;
  r.side_length = side_m;
  r.split_gap = gap_m;
  r.pose = pose;
  r.aperture = deg_to_rad(spec.aperture_deg);
  r.range = spec.range_m;
  return r;
}

const TransducerSpec& Scenario::transducer(const std::string& name) const {
  auto it = transducers.find(name);
  if (it == transducers.end()) {
    throw Error(ErrorCode::schema, "unknown transducer class '" + name + "'");
  }
  return it->second;
}

double Scenario::max_range() const {
  double r = 0.0;
  for (const auto& b : beacons) r = std::max(r, transducer(b.transducer).range_m);
  return std::min(r, transducer(robot.transducer).range_m);
}

Scenario default_scenario() {
  Scenario s;
  s.name = "annex_room";
  s.room = {{0.0, 0.0}, {4.5, 0.0}, {4.5, 11.5}, {0.0, 11.5}};
  s.transducers["hc_sr04"] = TransducerSpec{9.0, 30.0, 40000.0};
  s.transducers["premium"] = TransducerSpec{14.0, 30.0, 40000.0};

  BeaconConfig b1;
  b1.id = 1;
  b1.position = {0.05, 0.05};
  b1.orientation_deg = 45.0;
  BeaconConfig b2 = b1;
  b2.id = 2;
  b2.position = {4.45, 0.05};
  b2.orientation_deg = 135.0;
  s.beacons = {b1, b2};

  // Waypoints avoid the corner diagonals, which fall on seams between
  // adjacent robot cones at this heading.
  s.robot.path = {{0.0, {1.2, 2.5}, 90.0},
                  {20.0, {3.2, 2.5}, 90.0},
                  {40.0, {3.2, 6.0}, 90.0},
                  {60.0, {1.2, 6.0}, 90.0},
                  {80.0, {1.2, 2.5}, 90.0}};
  return s;
}

namespace {

// Strict reader over one JSON object: tracks the field path for messages and
// rejects keys that were never consumed.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw Error(ErrorCode::schema, "field '" + path + "': " + what);
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& req(const std::string& key) {
    if (!has(key)) fail(at(key), "missing required field");
    return j_.at(key);
  }

  double num(const std::string& key, double def) {
    if (!has(key)) return def;
    return as_num(j_.at(key), at(key));
  }
  double num(const std::string& key) { return as_num(req(key), at(key)); }

  int integer(const std::string& key, int def) {
    if (!has(key)) return def;
    return as_int(j_.at(key), at(key));
  }
  int integer(const std::string& key) { return as_int(req(key), at(key)); }

  bool boolean(const std::string& key, bool def) {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_boolean()) fail(at(key), "expected true or false");
    return v.get<bool>();
  }

  std::string str(const std::string& key, const std::string& def) {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_string()) fail(at(key), "expected a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.contains(it.key())) fail(at(it.key()), "unknown field");
    }
  }

  static double as_num(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path, "expected a finite number");
    return d;
  }

  static int as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
  }

  static Vec2 as_vec2(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2) fail(path, "expected [x, y]");
    return {as_num(v[0], path + "[0]"), as_num(v[1], path + "[1]")};
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string idx(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

const json& array_field(Obj& o, const std::string& key) {
  const json& v = o.req(key);
  if (!v.is_array()) Obj::fail(o.at(key), "expected a list");
  return v;
}

TransducerSpec read_transducer(const json& j, const std::string& path) {
  Obj o(j, path);
  TransducerSpec t;
  t.range_m = o.num("range_m");
  t.aperture_deg = o.num("aperture_deg");
  t.carrier_hz = o.num("carrier_hz", t.carrier_hz);
  o.finish();
  return t;
}

BeaconConfig read_beacon(const json& j, const std::string& path) {
  Obj o(j, path);
  BeaconConfig b;
  b.id = o.integer("id");
  b.position = Obj::as_vec2(o.req("position"), o.at("position"));
  b.orientation_deg = o.num("orientation_deg");
  b.n_transducers = o.integer("n_transducers", b.n_transducers);
  b.arc_deg = o.num("arc_deg", b.arc_deg);
  b.apothem_m = o.num("apothem_m", b.apothem_m);
  b.low_power = o.boolean("low_power", b.low_power);
  b.height_m = o.num("height_m", b.height_m);
  b.transducer = o.str("transducer", b.transducer);
  o.finish();
  return b;
}

RobotConfig read_robot(const json& j, const std::string& path) {
  Obj o(j, path);
  RobotConfig r;
  r.id = o.integer("id", r.id);
  {
    Obj ring(o.req("ring"), o.at("ring"));
    r.n_sides = ring.integer("n_sides", r.n_sides);
    r.side_m = ring.num("side_m", r.side_m);
    r.gap_m = ring.num("gap_m", r.gap_m);
    r.height_m = ring.num("height_m", r.height_m);
    r.transducer = ring.str("transducer", r.transducer);
    ring.finish();
  }
  const json& p = array_field(o, "path");
  for (std::size_t i = 0; i < p.size(); ++i) {
    Obj w(p[i], idx(o.at("path"), i));
    Waypoint wp;
    wp.t = w.num("t");
    wp.position = Obj::as_vec2(w.req("position"), w.at("position"));
    wp.heading_deg = w.num("heading_deg", 0.0);
    w.finish();
    r.path.push_back(wp);
  }
  r.speed_bound = o.num("speed_bound_mps", r.speed_bound);
  o.finish();
  return r;
}

Scenario from_json(const json& root) {
  Obj o(root, "");
  Scenario s;
  s.schema_version = o.integer("schema_version");
  if (s.schema_version != kSchemaVersion) {
    Obj::fail("schema_version", "unsupported version " + std::to_string(s.schema_version));
  }
  s.name = o.str("name", s.name);
  if (o.has("seed")) {
    const json& v = root.at("seed");
    if (!v.is_number_unsigned()) Obj::fail("seed", "expected a non-negative integer");
    s.seed = v.get<std::uint64_t>();
  }

  const json& room = array_field(o, "room");
  for (std::size_t i = 0; i < room.size(); ++i) s.room.push_back(Obj::as_vec2(room[i], idx("room", i)));

  if (o.has("air")) {
    Obj a(root.at("air"), "air");
    s.air.temperature_c = a.num("temperature_c", s.air.temperature_c);
    s.air.humidity_pct = a.num("humidity_pct", s.air.humidity_pct);
    a.finish();
  }

  {
    const json& t = o.req("transducers");
    if (!t.is_object()) Obj::fail("transducers", "expected an object of named classes");
    for (auto it = t.begin(); it != t.end(); ++it) {
      s.transducers[it.key()] = read_transducer(it.value(), "transducers." + it.key());
    }
  }

  const json& beacons = array_field(o, "beacons");
  for (std::size_t i = 0; i < beacons.size(); ++i) {
    s.beacons.push_back(read_beacon(beacons[i], idx("beacons", i)));
  }

  s.robot = read_robot(o.req("robot"), "robot");

  if (o.has("noise")) {
    Obj n(root.at("noise"), "noise");
    s.noise.tof_sigma_s = n.num("tof_sigma_s", s.noise.tof_sigma_s);
    s.noise.outlier_rate = n.num("outlier_rate", s.noise.outlier_rate);
    if (n.has("outlier_cm_range")) {
      const json& v = root.at("noise").at("outlier_cm_range");
      const Vec2 r = Obj::as_vec2(v, "noise.outlier_cm_range");
      s.noise.outlier_min_cm = r.x;
      s.noise.outlier_max_cm = r.y;
    }
    n.finish();
  }

  if (o.has("rf")) {
    Obj r(root.at("rf"), "rf");
    const std::string kind = r.str("sync_kind", "simple_ook");
    if (kind == "simple_ook") {
      s.rf.sync_kind = SyncKind::simple_ook;
    } else if (kind == "packet_radio") {
      s.rf.sync_kind = SyncKind::packet_radio;
    } else {
      Obj::fail("rf.sync_kind", "expected simple_ook or packet_radio");
    }
    s.rf.ook_latency_s = r.num("ook_latency_s", s.rf.ook_latency_s);
    if (r.has("packet_latency_s")) {
      const Vec2 v = Obj::as_vec2(root.at("rf").at("packet_latency_s"), "rf.packet_latency_s");
      s.rf.packet_latency_min_s = v.x;
      s.rf.packet_latency_max_s = v.y;
    }
    s.rf.report_latency_s = r.num("report_latency_s", s.rf.report_latency_s);
    s.rf.overhead_s = r.num("overhead_s", s.rf.overhead_s);
    r.finish();
  }

  if (o.has("pacing")) {
    Obj p(root.at("pacing"), "pacing");
    const std::string kind = p.str("kind", "attenuation_wait");
    if (kind == "ack_gated") {
      s.pacing.kind = Pacing::ack_gated;
    } else if (kind == "attenuation_wait") {
      s.pacing.kind = Pacing::attenuation_wait;
    } else {
      Obj::fail("pacing.kind", "expected ack_gated or attenuation_wait");
    }
    s.pacing.min_guard_s = p.num("min_guard_s", s.pacing.min_guard_s);
    s.pacing.ghost_backoff = p.boolean("ghost_backoff", s.pacing.ghost_backoff);
    p.finish();
  }

  if (o.has("filter")) {
    Obj f(root.at("filter"), "filter");
    try {
      s.filter.kind = filter_kind_from_string(f.str("kind", "none"));
    } catch (const Error& e) {
      Obj::fail("filter.kind", e.what());
    }
    s.filter.window = f.integer("window", s.filter.window);
    s.filter.alpha = f.num("alpha", s.filter.alpha);
    s.filter.kalman_r = f.num("kalman_r", s.filter.kalman_r);
    s.filter.kalman_q = f.num("kalman_q", s.filter.kalman_q);
    s.filter.kalman_p0 = f.num("kalman_p0", s.filter.kalman_p0);
    f.finish();
  }

  if (o.has("solver")) {
    Obj v(root.at("solver"), "solver");
    const std::string mode = v.str("mode", "planar");
    if (mode == "planar") {
      s.solver = SolveMode::planar;
    } else if (mode == "spatial") {
      s.solver = SolveMode::spatial;
    } else {
      Obj::fail("solver.mode", "expected planar or spatial");
    }
    v.finish();
  }

  if (o.has("channel")) {
    Obj c(root.at("channel"), "channel");
    s.max_order = c.integer("max_order", s.max_order);
    c.finish();
  }

  o.finish();
  return s;
}

json vec(Vec2 v) { return json::array({v.x, v.y}); }

// Converts a byte offset in `text` to "line L, column C".
std::string locate(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports the byte just past the offending token.
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    throw Error(ErrorCode::schema, "syntax error at " + locate(text, at) + ": " + e.what());
  }
  Scenario s;
  try {
    s = from_json(root);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::schema, e.what());
  }
  validate_scenario(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::schema, "cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
  json root;
  root["schema_version"] = s.schema_version;
  root["name"] = s.name;
  root["seed"] = s.seed;
  root["room"] = json::array();
  for (const auto& v : s.room) root["room"].push_back(vec(v));
  root["air"] = {{"temperature_c", s.air.temperature_c}, {"humidity_pct", s.air.humidity_pct}};
  root["transducers"] = json::object();
  for (const auto& [name, t] : s.transducers) {
    root["transducers"][name] = {
        {"range_m", t.range_m}, {"aperture_deg", t.aperture_deg}, {"carrier_hz", t.carrier_hz}};
  }
  root["beacons"] = json::array();
  for (const auto& b : s.beacons) {
    root["beacons"].push_back({{"id", b.id},
                               {"position", vec(b.position)},
                               {"orientation_deg", b.orientation_deg},
                               {"n_transducers", b.n_transducers},
                               {"arc_deg", b.arc_deg},
                               {"apothem_m", b.apothem_m},
                               {"low_power", b.low_power},
                               {"height_m", b.height_m},
                               {"transducer", b.transducer}});
  }
  json path = json::array();
  for (const auto& w : s.robot.path) {
    path.push_back({{"t", w.t}, {"position", vec(w.position)}, {"heading_deg", w.heading_deg}});
  }
  root["robot"] = {{"id", s.robot.id},
                   {"ring",
                    {{"n_sides", s.robot.n_sides},
                     {"side_m", s.robot.side_m},
                     {"gap_m", s.robot.gap_m},
                     {"height_m", s.robot.height_m},
                     {"transducer", s.robot.transducer}}},
                   {"path", path},
                   {"speed_bound_mps", s.robot.speed_bound}};
  root["noise"] = {{"tof_sigma_s", s.noise.tof_sigma_s},
                   {"outlier_rate", s.noise.outlier_rate},
                   {"outlier_cm_range", {s.noise.outlier_min_cm, s.noise.outlier_max_cm}}};
  root["rf"] = {{"sync_kind", s.rf.sync_kind == SyncKind::simple_ook ? "simple_ook" : "packet_radio"},
                {"ook_latency_s", s.rf.ook_latency_s},
                {"packet_latency_s", {s.rf.packet_latency_min_s, s.rf.packet_latency_max_s}},
                {"report_latency_s", s.rf.report_latency_s},
                {"overhead_s", s.rf.overhead_s}};
  root["pacing"] = {{"kind", to_string(s.pacing.kind)},
                    {"min_guard_s", s.pacing.min_guard_s},
                    {"ghost_backoff", s.pacing.ghost_backoff}};
  root["filter"] = {{"kind", to_string(s.filter.kind)},
                    {"window", s.filter.window},
                    {"alpha", s.filter.alpha},
                    {"kalman_r", s.filter.kalman_r},
                    {"kalman_q", s.filter.kalman_q},
                    {"kalman_p0", s.filter.kalman_p0}};
  root["solver"] = {{"mode", s.solver == SolveMode::planar ? "planar" : "spatial"}};
  root["channel"] = {{"max_order", s.max_order}};
  return root.dump(2) + "\n";
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::simulation, "cannot write '" + path + "'");
  out << serialize_scenario(s);
}

void validate_scenario(const Scenario& s) {
  auto fail = [](const std::string& path, const std::string& what) {
    throw Error(ErrorCode::schema, "field '" + path + "': " + what);
  };
  auto check = [&](const std::string& path, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::schema) throw;
      fail(path, e.what());
    }
  };

  Room room;
  check("room", [&] { room = s.make_room(); });
  check("air.temperature_c", [&] { (void)s.air.sound_speed(); });
  check("noise", [&] { s.noise.validate(); });
  check("rf", [&] { s.rf.validate(); });
  check("filter", [&] { s.filter.validate(); });
  if (s.max_order != 0 && s.max_order != 1) fail("channel.max_order", "must be 0 or 1");
  if (!(s.pacing.min_guard_s >= 0.0)) fail("pacing.min_guard_s", "must be >= 0");

  for (const auto& [name, t] : s.transducers) {
    const std::string p = "transducers." + name;
    if (!(t.range_m > 0.0)) fail(p + ".range_m", "must be positive");
    if (!(t.aperture_deg > 0.0 && t.aperture_deg < 180.0)) fail(p + ".aperture_deg", "must lie in (0, 180)");
    if (!(t.carrier_hz > 0.0)) fail(p + ".carrier_hz", "must be positive");
  }

  std::set<int> ids;
  for (std::size_t i = 0; i < s.beacons.size(); ++i) {
    const auto& b = s.beacons[i];
    const std::string p = idx("beacons", i);
    if (!ids.insert(b.id).second) fail(p + ".id", "duplicate beacon id " + std::to_string(b.id));
    if (!s.transducers.contains(b.transducer)) fail(p + ".transducer", "unknown class '" + b.transducer + "'");
    if (!(b.height_m > 0.0)) fail(p + ".height_m", "must be positive");
    if (b.n_transducers < 1) fail(p + ".n_transducers", "must be >= 1");
    if (!(b.arc_deg > 0.0 && b.arc_deg <= 360.0)) fail(p + ".arc_deg", "must lie in (0, 360]");
    if (!(b.apothem_m > 0.0)) fail(p + ".apothem_m", "must be positive");
    const double n = b.n_transducers * 360.0 / b.arc_deg;
    if (n < 3.0 - 1e-9) fail(p + ".arc_deg", "implies a polygon with fewer than 3 sides");
    if (std::abs(n - std::round(n)) > 1e-6) {
      fail(p + ".arc_deg", "360 * n_transducers / arc_deg must be an integer side count");
    }
    if (!room.contains(b.position)) fail(p + ".position", "lies outside the room");
  }

  const auto& r = s.robot;
  if (r.n_sides < 3) fail("robot.ring.n_sides", "must be >= 3");
  if (!(r.side_m > 0.0)) fail("robot.ring.side_m", "must be positive");
  if (!(r.gap_m >= 0.0)) fail("robot.ring.gap_m", "must be >= 0");
  if (!(r.height_m > 0.0)) fail("robot.ring.height_m", "must be positive");
  if (!s.transducers.contains(r.transducer)) fail("robot.ring.transducer", "unknown class '" + r.transducer + "'");
  if (!(r.speed_bound >= 0.0)) fail("robot.speed_bound_mps", "must be >= 0");
  if (r.path.empty()) fail("robot.path", "needs at least one waypoint");
  for (std::size_t i = 0; i < r.path.size(); ++i) {
    const std::string p = idx("robot.path", i);
    if (i > 0 && !(r.path[i].t > r.path[i - 1].t)) fail(p + ".t", "waypoint times must increase");
    if (!room.contains(r.path[i].position)) fail(p + ".position", "lies outside the room");
  }
}

}  // namespace sappo
