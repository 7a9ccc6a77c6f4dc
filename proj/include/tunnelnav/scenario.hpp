#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tunnelnav/audit.hpp"
#include "tunnelnav/navsim.hpp"
#include "tunnelnav/sensor.hpp"
#include "tunnelnav/tunnel.hpp"

namespace tunnelnav {

/// Serializable description of a tunnel.
struct TunnelSpec {
  TunnelKind kind = TunnelKind::Torus;
  double R = 2.0;                 // cylinder radius or torus centre-circle radius
  double r = 0.5;                 // torus tube radius
  std::optional<double> length;   // finite cylinder length; absent means infinite
  std::vector<double> profile;    // revolution radius polynomial in z
  double b_min = 0.0;
  double b_max = 1.0;
  std::shared_ptr<TunnelSpec> base;  // warped tunnels only
  PolynomialWarp warp;

  ParametricTunnel build() const;
};

struct Scenario {
  TunnelSpec tunnel;
  SensorConfig sensor;
  bool auto_eta = true;     // patch radius taken from the audit
  bool auto_stride = true;  // ray stride min(0.01, d_minus / 5)
  ControllerConfig controller;
  Zone zone;
  int audit_grid = 64;
  std::uint64_t seed = 0;
  std::string output;
  std::optional<Vec3> start;
  std::vector<Vec3> samples;

  /// Sensor with the automatic fields filled in from audited constants.
  SensorConfig resolved_sensor(const TunnelConstants& constants) const;
  AuditConfig audit_config() const;
  /// Checks every module precondition that does not need geometry.
  void validate() const;
};

/// Parses JSON text. Unknown or misplaced keys, type errors and invalid
/// values throw ConfigError.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
std::string dump_scenario(const Scenario& scenario);
void save_scenario(const Scenario& scenario, const std::string& path);

}  // namespace tunnelnav
