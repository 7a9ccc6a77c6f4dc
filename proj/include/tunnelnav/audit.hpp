#pragma once

#include <string>
#include <vector>

#include "tunnelnav/tunnel.hpp"

namespace tunnelnav {

/// Regularity and Lipschitz certificates of a tunnel for a given operational
/// zone. Lipschitz constants are sampled difference quotients inflated by the
/// audit's safety factor, so they are estimates, not proofs.
struct TunnelConstants {
  double delta_tau = 0.0;      // min over samples of II(tau,tau) - kappa_minus
  double delta_kappa = 0.0;    // min over samples of 1 - d_plus * kappa_plus
  double theta_min = 0.0;      // min angle between the E- line and the meridian line
  double L_N = 0.0;
  double L_kappa = 0.0;
  double L_E = 0.0;
  double L_B = 0.0;
  double delta_B_minus = 0.0;  // min |grad B|
  double delta_B_plus = 0.0;   // max |grad B|
  double L_tau = 0.0;          // Lipschitz estimate of the offset meridian field
  double d_minus = 0.0;
  double d_plus = 0.0;
  double d_star = 0.0;
  double delta_s = 0.0;
  double eta = 0.0;            // patch radius used by the sensor model
  double max_abs_kappa = 0.0;  // sampled max of |kappa_+-|

  /// Lower bound on theta implied by delta_tau and L_N: asin(sqrt(dt / 2 L_N)).
  double theta_floor() const;
};

struct AuditConfig {
  int grid = 64;
  double d_minus = 0.0;
  double d_plus = 0.0;
  double d_star = 0.0;
  double delta_s = 0.0;
  double safety = 1.25;
};

struct RegularityAudit {
  TunnelConstants constants;
  bool passed = true;
  std::vector<std::string> failures;
  int samples = 0;
};

/// Samples a grid x grid lattice over the tunnel's audit window.
RegularityAudit regularity_audit(const ParametricTunnel& tunnel, const AuditConfig& config);
RegularityAudit regularity_audit(const ParametricTunnel& tunnel, int grid, double d_plus);

/// Chart coordinates of the audit lattice, row-major in (u, v).
std::vector<Vec2> audit_grid(const ParametricTunnel& tunnel, int grid);

/// Flat `name = value` report, one constant per line, 17 significant digits.
std::string format_report(const RegularityAudit& audit);

}  // namespace tunnelnav
