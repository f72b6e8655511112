#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include <aqualoc/errors.hpp>

namespace aqualoc::tools {
namespace {

using nlohmann::json;

// Walks a JSON object, reading known keys and rejecting the rest.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) fail("expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  template <typename T>
  void get(const char* key, T& out) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(std::string("bad value for '") + key + "'");
    }
  }

  void vec3(const char* key, Vec3& out) {
    std::vector<double> v;
    if (!j_.contains(key)) return;
    get(key, v);
    if (v.size() != 3) fail(std::string("'") + key + "' needs 3 numbers");
    out = Vec3(v[0], v[1], v[2]);
  }

  void diag3(const char* key, Mat3& out) {
    if (!j_.contains(key)) return;
    Vec3 d = out.diagonal();
    vec3(key, d);
    out = d.asDiagonal();
  }

  const json& child(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string path(const char* key) const { return where_ + "." + key; }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) fail("unknown key '" + k + "'");
    }
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError("config " + where_ + ": " + what); }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

template <typename Enum, typename ParseFn>
void get_enum(Reader& r, const char* key, Enum& out, ParseFn parse) {
  std::string s;
  if (!r.has(key)) return;
  r.get(key, s);
  try {
    out = parse(s);
  } catch (const Error& e) {
    r.fail(e.what());
  }
}

NoiseModel read_noise(const json& j, const std::string& where, NoiseModel base) {
  Reader r(j, where);
  r.diag3("gyro", base.gyro);
  r.diag3("accel", base.accel);
  r.diag3("dvl", base.dvl);
  r.diag3("pseudo", base.pseudo);
  r.finish();
  return base;
}

sim::FieldConfig read_field(const json& j, const std::string& where) {
  sim::FieldConfig f;
  Reader r(j, where);
  if (r.has("param")) {
    std::string name;
    r.get("param", name);
    const auto p = parse_wq_parameter(name);
    if (!p) r.fail("unknown parameter '" + name + "'");
    f.param = *p;
  }
  get_enum(r, "family", f.family, sim::parse_field_family);
  r.get("base", f.base);
  r.vec3("gradient", f.gradient);
  if (r.has("plumes")) {
    const json& arr = r.child("plumes");
    if (!arr.is_array()) r.fail("'plumes' must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Reader pr(arr[i], where + ".plumes[" + std::to_string(i) + "]");
      sim::Plume p;
      pr.vec3("center", p.center);
      pr.get("amplitude", p.amplitude);
      pr.get("sigma_h", p.sigma_h);
      pr.get("sigma_v", p.sigma_v);
      pr.finish();
      f.plumes.push_back(p);
    }
  }
  r.finish();
  return f;
}

void read_scenario(const json& j, RunConfig& out) {
  sim::ScenarioConfig& sc = out.scenario;
  Reader r(j, "scenario");
  get_enum(r, "kind", sc.kind, sim::parse_trajectory_kind);
  r.get("speed", sc.speed);
  r.get("depth", sc.depth);
  r.get("depth_amplitude", sc.depth_amplitude);
  r.get("depth_period", sc.depth_period);
  r.get("duration", sc.duration);
  r.get("ramp_time", sc.ramp_time);
  r.get("dive_time", sc.dive_time);
  r.get("heading", sc.heading);
  r.get("leg_length", sc.leg_length);
  r.get("leg_spacing", sc.leg_spacing);
  r.get("loiter_radius", sc.loiter_radius);
  r.get("seed", sc.seed);
  if (r.has("rates")) {
    Reader rr(r.child("rates"), r.path("rates"));
    rr.get("imu", sc.rates.imu);
    rr.get("dvl", sc.rates.dvl);
    rr.get("depth", sc.rates.depth);
    rr.get("gps", sc.rates.gps);
    rr.get("wq", sc.rates.wq);
    rr.finish();
  }
  if (r.has("noise")) {
    Reader nr(r.child("noise"), r.path("noise"));
    nr.get("gyro", sc.noise.gyro);
    nr.get("accel", sc.noise.accel);
    nr.get("dvl", sc.noise.dvl);
    nr.get("depth", sc.noise.depth);
    nr.get("gps", sc.noise.gps);
    nr.get("wq", sc.noise.wq);
    nr.finish();
  }
  if (r.has("gps")) {
    Reader gr(r.child("gps"), r.path("gps"));
    get_enum(gr, "mode", sc.gps.mode, sim::parse_gps_availability);
    gr.get("window", sc.gps.window);
    gr.get("period", sc.gps.period);
    gr.finish();
  }
  if (r.has("origin")) {
    std::vector<double> o;
    r.get("origin", o);
    if (o.size() != 2) r.fail("'origin' needs [lat, lon]");
    sc.calib.origin_lat = o[0];
    sc.calib.origin_lon = o[1];
  }
  r.vec3("gravity", sc.calib.gravity);
  if (r.has("dvl_rotation")) {
    std::vector<double> m;
    r.get("dvl_rotation", m);
    if (m.size() != 9) r.fail("'dvl_rotation' needs 9 numbers (row-major)");
    for (int i = 0; i < 9; ++i) sc.calib.dvl.rotation(i / 3, i % 3) = m[i];
    if (!is_rotation(sc.calib.dvl.rotation, 1e-6)) r.fail("'dvl_rotation' is not a rotation matrix");
  }
  r.vec3("dvl_translation", sc.calib.dvl.translation);
  if (r.has("filter_noise")) sc.calib.noise = read_noise(r.child("filter_noise"), r.path("filter_noise"), sc.calib.noise);
  if (r.has("fields")) {
    const json& arr = r.child("fields");
    if (!arr.is_array()) r.fail("'fields' must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      out.fields.push_back(read_field(arr[i], "scenario.fields[" + std::to_string(i) + "]"));
    }
  }
  r.finish();
  try {
    sc.validate();
  } catch (const DataError& e) {
    throw ParseError(std::string("config scenario: ") + e.what());
  }
}

void read_filter(const json& j, FilterOverrides& f) {
  Reader r(j, "filter");
  if (r.has("noise")) f.noise = read_noise(r.child("noise"), r.path("noise"), NoiseModel{});
  auto opt = [&](const char* key, std::optional<double>& out) {
    if (!r.has(key)) return;
    double v = 0.0;
    r.get(key, v);
    out = v;
  };
  opt("initial_p_scale", f.initial_p_scale);
  opt("max_dt", f.max_dt);
  opt("gps_vertical_variance", f.gps_vertical_variance);
  opt("initial_heading", f.initial_heading);
  opt("ekf_dvl", f.ekf_dvl);
  opt("ekf_depth", f.ekf_depth);
  for (const char* key : {"depth_frame", "gps_frame"}) {
    if (!r.has(key)) continue;
    PositionUpdateFrame frame{};
    get_enum(r, key, frame, parse_frame);
    (std::string(key) == "depth_frame" ? f.depth_frame : f.gps_frame) = frame;
  }
  r.finish();
}

}  // namespace

PositionUpdateFrame parse_frame(const std::string& s) {
  if (s == "vehicle_centered") return PositionUpdateFrame::vehicle_centered;
  if (s == "global_right") return PositionUpdateFrame::global_right;
  throw DataError("unknown update frame '" + s + "' (vehicle_centered|global_right)");
}

std::string to_string(PositionUpdateFrame f) {
  return f == PositionUpdateFrame::vehicle_centered ? "vehicle_centered" : "global_right";
}

void FilterOverrides::apply(FilterConfig& cfg) const {
  if (noise) cfg.noise = *noise;
  if (initial_p_scale) cfg.initial_p_scale = *initial_p_scale;
  if (max_dt) cfg.max_dt = *max_dt;
  if (depth_frame) cfg.depth_frame = *depth_frame;
  if (gps_frame) cfg.gps_frame = *gps_frame;
  if (gps_vertical_variance) cfg.gps_vertical_variance = *gps_vertical_variance;
  if (ekf_dvl) cfg.ekf.dvl = *ekf_dvl;
  if (ekf_depth) cfg.ekf.depth = *ekf_depth;
  if (initial_heading) cfg.initial_heading = *initial_heading;
}

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig out;
  Reader top(j, "root");
  if (top.has("scenario")) read_scenario(top.child("scenario"), out);
  if (top.has("filter")) read_filter(top.child("filter"), out.filter);
  top.finish();
  return out;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace aqualoc::tools
