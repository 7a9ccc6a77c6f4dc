#include "tunnelnav/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tunnelnav/errors.hpp"

namespace tunnelnav {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void config_error(const std::string& what) { throw TunnelError(ErrorCode::ConfigError, what); }

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      config_error("unknown key '" + key + "' in " + where);
    }
  }
}

double number(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) config_error(where + "." + key + " must be a number");
  return v.get<double>();
}

int integer(const json& obj, const char* key, int fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) config_error(where + "." + key + " must be an integer");
  return v.get<int>();
}

Vec3 vec3(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) config_error(where + " must be an array of 3 numbers");
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    if (!v[i].is_number()) config_error(where + " must be an array of 3 numbers");
    out[i] = v[i].get<double>();
  }
  return out;
}

Mat3 mat3(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) config_error(where + " must be a 3x3 array");
  Mat3 out;
  for (int i = 0; i < 3; ++i) out.row(i) = vec3(v[i], where).transpose();
  return out;
}

json to_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

json to_json(const Mat3& m) {
  json rows = json::array();
  for (int i = 0; i < 3; ++i) rows.push_back(to_json(Vec3(m.row(i).transpose())));
  return rows;
}

TunnelSpec parse_tunnel(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) config_error(where + ".kind is required");
  const std::string kind = j.at("kind").get<std::string>();
  TunnelSpec t;
  if (kind == "cylinder") {
    check_keys(j, {"kind", "R", "length"}, where);
    t.kind = TunnelKind::Cylinder;
    t.R = number(j, "R", 1.0, where);
    if (j.contains("length")) t.length = number(j, "length", 0.0, where);
  } else if (kind == "torus") {
    check_keys(j, {"kind", "R", "r"}, where);
    t.kind = TunnelKind::Torus;
    t.R = number(j, "R", 2.0, where);
    t.r = number(j, "r", 0.5, where);
  } else if (kind == "revolution" || kind == "surface_of_revolution") {
    check_keys(j, {"kind", "profile", "b_min", "b_max"}, where);
    t.kind = TunnelKind::Revolution;
    if (!j.contains("profile") || !j.at("profile").is_array()) config_error(where + ".profile must be an array");
    for (const json& c : j.at("profile")) {
      if (!c.is_number()) config_error(where + ".profile must hold numbers");
      t.profile.push_back(c.get<double>());
    }
    t.b_min = number(j, "b_min", 0.0, where);
    t.b_max = number(j, "b_max", 1.0, where);
  } else if (kind == "warped") {
    check_keys(j, {"kind", "base", "linear", "offset", "quadratic"}, where);
    t.kind = TunnelKind::Warped;
    if (!j.contains("base")) config_error(where + ".base is required");
    t.base = std::make_shared<TunnelSpec>(parse_tunnel(j.at("base"), where + ".base"));
    if (j.contains("linear")) t.warp.linear = mat3(j.at("linear"), where + ".linear");
    if (j.contains("offset")) t.warp.offset = vec3(j.at("offset"), where + ".offset");
    if (j.contains("quadratic")) {
      const json& q = j.at("quadratic");
      if (!q.is_array() || q.size() != 3) config_error(where + ".quadratic must hold three 3x3 arrays");
      for (int i = 0; i < 3; ++i) t.warp.quadratic[i] = mat3(q[i], where + ".quadratic");
    }
  } else {
    config_error("unknown tunnel kind '" + kind + "'");
  }
  return t;
}

json tunnel_json(const TunnelSpec& t) {
  json j;
  j["kind"] = to_string(t.kind);
  switch (t.kind) {
    case TunnelKind::Cylinder:
      j["R"] = t.R;
      if (t.length) j["length"] = *t.length;
      break;
    case TunnelKind::Torus:
      j["R"] = t.R;
      j["r"] = t.r;
      break;
    case TunnelKind::Revolution:
      j["profile"] = t.profile;
      j["b_min"] = t.b_min;
      j["b_max"] = t.b_max;
      break;
    case TunnelKind::Warped:
      j["base"] = tunnel_json(*t.base);
      j["linear"] = to_json(t.warp.linear);
      j["offset"] = to_json(t.warp.offset);
      j["quadratic"] = json::array({to_json(t.warp.quadratic[0]), to_json(t.warp.quadratic[1]), to_json(t.warp.quadratic[2])});
      break;
  }
  return j;
}

}  // namespace

ParametricTunnel TunnelSpec::build() const {
  switch (kind) {
    case TunnelKind::Cylinder:
      return length ? ParametricTunnel::cylinder(R, *length) : ParametricTunnel::cylinder(R);
    case TunnelKind::Torus:
      return ParametricTunnel::torus(R, r);
    case TunnelKind::Revolution:
      return ParametricTunnel::revolution(profile, b_min, b_max);
    case TunnelKind::Warped:
      if (!base) throw TunnelError(ErrorCode::ConfigError, "warped tunnel without a base");
      return ParametricTunnel::warped(base->build(), warp);
  }
  throw TunnelError(ErrorCode::ConfigError, "unknown tunnel kind");
}

SensorConfig Scenario::resolved_sensor(const TunnelConstants& constants) const {
  SensorConfig s = sensor;
  if (auto_eta) s.patch_radius_eta = constants.eta;
  if (auto_stride) s.ray_march_step = zone.d_minus > 0.0 ? std::min(0.01, zone.d_minus / 5.0) : 0.01;
  return s;
}

AuditConfig Scenario::audit_config() const {
  AuditConfig a;
  a.grid = audit_grid;
  a.d_minus = zone.d_minus;
  a.d_plus = zone.d_plus;
  a.d_star = zone.d_star;
  a.delta_s = zone.delta_s;
  return a;
}

void Scenario::validate() const {
  try {
    SensorConfig s = sensor;
    if (auto_eta) s.patch_radius_eta = 1.0;
    if (auto_stride) s.ray_march_step = 0.01;
    s.validate();
    controller.validate();
    tunnel.build();
  } catch (const TunnelError& e) {
    config_error(e.what());
  }
  if (!(0.0 < zone.d_minus && zone.d_minus < zone.d_star && zone.d_star < zone.d_plus)) {
    config_error("zone must satisfy 0 < d_minus < d_star < d_plus");
  }
  if (!(zone.delta_s >= 0.0)) config_error("zone.delta_s must be non-negative");
  if (audit_grid < 4) config_error("audit_grid must be at least 4");
}

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    config_error(std::string("malformed scenario: ") + e.what());
  }
  check_keys(j, {"tunnel", "sensor", "controller", "zone", "audit_grid", "seed", "output", "start", "samples"},
             "scenario");
  Scenario s;
  if (!j.contains("tunnel")) config_error("scenario.tunnel is required");
  s.tunnel = parse_tunnel(j.at("tunnel"), "tunnel");

  if (j.contains("sensor")) {
    const json& o = j.at("sensor");
    check_keys(o, {"alpha_s", "alpha_e", "n_phi", "max_range", "ray_march_step", "root_tol", "patch_radius_eta"},
               "sensor");
    SensorConfig& c = s.sensor;
    c.alpha_s = number(o, "alpha_s", c.alpha_s, "sensor");
    c.alpha_e = number(o, "alpha_e", c.alpha_e, "sensor");
    c.n_phi = integer(o, "n_phi", c.n_phi, "sensor");
    c.max_range = number(o, "max_range", c.max_range, "sensor");
    c.root_tol = number(o, "root_tol", c.root_tol, "sensor");
    s.auto_stride = !o.contains("ray_march_step");
    c.ray_march_step = number(o, "ray_march_step", c.ray_march_step, "sensor");
    s.auto_eta = !o.contains("patch_radius_eta");
    c.patch_radius_eta = number(o, "patch_radius_eta", c.patch_radius_eta, "sensor");
  }
  if (j.contains("controller")) {
    const json& o = j.at("controller");
    check_keys(o, {"speed", "gain", "dt", "heading_sign", "horizon", "v_b_required", "converge_tol"}, "controller");
    ControllerConfig& c = s.controller;
    c.speed = number(o, "speed", c.speed, "controller");
    c.gain = number(o, "gain", c.gain, "controller");
    c.dt = number(o, "dt", c.dt, "controller");
    c.heading_sign = integer(o, "heading_sign", c.heading_sign, "controller");
    c.horizon = number(o, "horizon", c.horizon, "controller");
    c.v_b_required = number(o, "v_b_required", c.v_b_required, "controller");
    c.converge_tol = number(o, "converge_tol", c.converge_tol, "controller");
  }
  if (!j.contains("zone")) config_error("scenario.zone is required");
  {
    const json& o = j.at("zone");
    check_keys(o, {"d_minus", "d_plus", "d_star", "delta_s"}, "zone");
    s.zone.d_minus = number(o, "d_minus", 0.0, "zone");
    s.zone.d_plus = number(o, "d_plus", 0.0, "zone");
    s.zone.d_star = number(o, "d_star", 0.0, "zone");
    s.zone.delta_s = number(o, "delta_s", 0.0, "zone");
  }
  s.audit_grid = integer(j, "audit_grid", s.audit_grid, "scenario");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) config_error("scenario.seed must be a non-negative integer");
    s.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("output")) {
    if (!j.at("output").is_string()) config_error("scenario.output must be a string");
    s.output = j.at("output").get<std::string>();
  }
  if (j.contains("start")) s.start = vec3(j.at("start"), "start");
  if (j.contains("samples")) {
    if (!j.at("samples").is_array()) config_error("scenario.samples must be an array of points");
    for (const json& p : j.at("samples")) s.samples.push_back(vec3(p, "samples"));
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open scenario file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string dump_scenario(const Scenario& s) {
  json j;
  j["tunnel"] = tunnel_json(s.tunnel);
  json sensor;
  sensor["alpha_s"] = s.sensor.alpha_s;
  sensor["alpha_e"] = s.sensor.alpha_e;
  sensor["n_phi"] = s.sensor.n_phi;
  sensor["max_range"] = s.sensor.max_range;
  sensor["root_tol"] = s.sensor.root_tol;
  if (!s.auto_stride) sensor["ray_march_step"] = s.sensor.ray_march_step;
  if (!s.auto_eta) sensor["patch_radius_eta"] = s.sensor.patch_radius_eta;
  j["sensor"] = sensor;
  const ControllerConfig& c = s.controller;
  j["controller"] = {{"speed", c.speed},         {"gain", c.gain},
                     {"dt", c.dt},               {"heading_sign", c.heading_sign},
                     {"horizon", c.horizon},     {"v_b_required", c.v_b_required},
                     {"converge_tol", c.converge_tol}};
  j["zone"] = {{"d_minus", s.zone.d_minus},
               {"d_plus", s.zone.d_plus},
               {"d_star", s.zone.d_star},
               {"delta_s", s.zone.delta_s}};
  j["audit_grid"] = s.audit_grid;
  j["seed"] = s.seed;
  if (!s.output.empty()) j["output"] = s.output;
  if (s.start) j["start"] = to_json(*s.start);
  if (!s.samples.empty()) {
    json pts = json::array();
    for (const Vec3& p : s.samples) pts.push_back(to_json(p));
    j["samples"] = pts;
  }
  return j.dump(2) + "\n";
}

void save_scenario(const Scenario& scenario, const std::string& path) {
  std::ofstream out(path);
  if (!out) config_error("cannot write scenario file " + path);
  out << dump_scenario(scenario);
}

}  // namespace tunnelnav
