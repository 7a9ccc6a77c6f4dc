#include "tunnelnav/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "tunnelnav/errors.hpp"
#include "tunnelnav/format.hpp"
#include "tunnelnav/frame.hpp"

namespace tunnelnav {

namespace {

std::vector<double> axis_samples(const AxisRange& a, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = a.periodic ? a.lo + a.span() * i / n : a.lo + a.span() * i / (n - 1);
  }
  return out;
}

struct Sample {
  std::optional<ShapeFrame> frame;
  Vec3 offset_point = Vec3::Zero();
  Vec3 offset_tau = Vec3::Zero();
};

std::string where(const Vec2& uv) {
  return "(u,v)=(" + fmt17(uv[0]) + ", " + fmt17(uv[1]) + ")";
}

}  // namespace

double TunnelConstants::theta_floor() const {
  if (!(L_N > 0.0) || !(delta_tau > 0.0)) return 0.0;
  return std::asin(std::sqrt(std::min(1.0, delta_tau / (2.0 * L_N))));
}

std::vector<Vec2> audit_grid(const ParametricTunnel& tunnel, int grid) {
  const ChartBox box = tunnel.audit_window();
  const auto us = axis_samples(box.u, grid);
  const auto vs = axis_samples(box.v, grid);
  std::vector<Vec2> out;
  out.reserve(us.size() * vs.size());
  for (double u : us) {
    for (double v : vs) out.emplace_back(u, v);
  }
  return out;
}

RegularityAudit regularity_audit(const ParametricTunnel& tunnel, int grid, double d_plus) {
  AuditConfig config;
  config.grid = grid;
  config.d_plus = d_plus;
  return regularity_audit(tunnel, config);
}

RegularityAudit regularity_audit(const ParametricTunnel& tunnel, const AuditConfig& config) {
  if (config.grid < 2) throw TunnelError(ErrorCode::InvalidArgument, "audit grid needs at least 2 samples per axis");
  if (!(config.d_plus > 0.0)) throw TunnelError(ErrorCode::InvalidArgument, "d_plus must be positive");

  const int n = config.grid;
  const ChartBox box = tunnel.audit_window();
  const std::vector<Vec2> uvs = audit_grid(tunnel, n);

  RegularityAudit out;
  TunnelConstants& c = out.constants;
  c.d_minus = config.d_minus;
  c.d_plus = config.d_plus;
  c.d_star = config.d_star;
  c.delta_s = config.delta_s;
  c.delta_tau = std::numeric_limits<double>::infinity();
  c.delta_kappa = std::numeric_limits<double>::infinity();
  c.theta_min = kPi / 2.0;
  c.delta_B_minus = std::numeric_limits<double>::infinity();
  c.delta_B_plus = 0.0;

  Vec2 worst_tau_uv = Vec2::Zero(), worst_kappa_uv = Vec2::Zero();
  std::vector<Sample> samples(uvs.size());
  for (std::size_t k = 0; k < uvs.size(); ++k) {
    try {
      samples[k].frame = surface_frame(tunnel, uvs[k]);
    } catch (const TunnelError& e) {
      out.failures.push_back(std::string(e.what()));
      continue;
    }
    const ShapeFrame& f = *samples[k].frame;
    ++out.samples;
    const double gap = second_fundamental_form(f, f.tau, f.tau) - f.kappa_minus;
    if (gap < c.delta_tau) {
      c.delta_tau = gap;
      worst_tau_uv = f.uv;
    }
    const double margin = 1.0 - config.d_plus * f.kappa_plus;
    if (margin < c.delta_kappa) {
      c.delta_kappa = margin;
      worst_kappa_uv = f.uv;
    }
    c.theta_min = std::min(c.theta_min, line_angle(f.E_minus, f.tau));
    const double g = f.grad_B.norm();
    c.delta_B_minus = std::min(c.delta_B_minus, g);
    c.delta_B_plus = std::max(c.delta_B_plus, g);
    c.max_abs_kappa = std::max({c.max_abs_kappa, std::abs(f.kappa_minus), std::abs(f.kappa_plus)});

    samples[k].offset_point = f.point + config.d_star * f.N;
    const Vec3 stretched = f.tau - config.d_star * f.apply_shape(f.tau);
    samples[k].offset_tau = stretched.normalized();
  }

  // Difference quotients over lattice neighbours (right, up, diagonal).
  double q_N = 0.0, q_kappa = 0.0, q_E = 0.0, q_B = 0.0, q_tau = 0.0;
  auto index = [&](int i, int j) -> std::optional<std::size_t> {
    if (i >= n) {
      if (!box.u.periodic) return std::nullopt;
      i -= n;
    }
    if (j >= n) {
      if (!box.v.periodic) return std::nullopt;
      j -= n;
    }
    return static_cast<std::size_t>(i) * n + j;
  };
  const int steps[3][2] = {{1, 0}, {0, 1}, {1, 1}};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto a = index(i, j);
      if (!samples[*a].frame) continue;
      for (const auto& s : steps) {
        const auto b = index(i + s[0], j + s[1]);
        if (!b || !samples[*b].frame) continue;
        const ShapeFrame& fa = *samples[*a].frame;
        const ShapeFrame& fb = *samples[*b].frame;
        const double ds = (fa.point - fb.point).norm();
        if (!(ds > 1e-14)) continue;
        q_N = std::max(q_N, (fa.N - fb.N).norm() / ds);
        q_kappa = std::max({q_kappa, std::abs(fa.kappa_minus - fb.kappa_minus) / ds,
                            std::abs(fa.kappa_plus - fb.kappa_plus) / ds});
        q_E = std::max({q_E, (fa.E_minus - align_sign(fb.E_minus, fa.E_minus)).norm() / ds,
                        (fa.E_plus - align_sign(fb.E_plus, fa.E_plus)).norm() / ds});
        q_B = std::max(q_B, (fa.grad_B - fb.grad_B).norm() / ds);
        const double dso = (samples[*a].offset_point - samples[*b].offset_point).norm();
        if (dso > 1e-14) {
          const Vec3& ta = samples[*a].offset_tau;
          q_tau = std::max(q_tau, (ta - align_sign(samples[*b].offset_tau, ta)).norm() / dso);
        }
      }
    }
  }

  // |kappa| <= ||S|| <= L_N holds for the true constant, so the sampled
  // curvature maximum is a valid lower bound alongside the quotients.
  c.L_N = config.safety * std::max(q_N, c.max_abs_kappa);
  c.L_kappa = config.safety * q_kappa;
  c.L_E = config.safety * q_E;
  c.L_B = config.safety * q_B;
  c.L_tau = config.d_star > 0.0 ? config.safety * q_tau : 0.0;
  c.eta = c.L_N > 0.0 ? 0.5 * std::min(1.0 / c.L_N, tunnel.feature_size()) : 0.5 * tunnel.feature_size();

  if (out.samples == 0) {
    out.passed = false;
    out.failures.emplace_back("no valid audit samples");
    return out;
  }
  if (!(c.delta_tau > 0.0)) {
    out.failures.push_back("meridian curvature gap II(tau,tau) - kappa_minus = " + fmt17(c.delta_tau) +
                           " is not positive at " + where(worst_tau_uv));
  }
  if (!(c.delta_kappa > 0.0)) {
    out.failures.push_back("offset curvature margin 1 - d_plus*kappa_plus = " + fmt17(c.delta_kappa) +
                           " is not positive at " + where(worst_kappa_uv));
  }
  if (c.delta_tau > 2.0 * c.L_N) {
    out.failures.push_back("curvature gap exceeds 2*L_N");
  }
  if (c.delta_tau > 0.0 && c.theta_min < c.theta_floor() - 1e-12) {
    out.failures.push_back("angle between E- and the meridian falls below asin(sqrt(delta_tau/(2 L_N)))");
  }
  if (config.d_minus > 0.0 || config.d_star > 0.0) {
    if (!(0.0 < config.d_minus && config.d_minus < config.d_star && config.d_star < config.d_plus)) {
      out.failures.emplace_back("operational zone must satisfy 0 < d_minus < d_star < d_plus");
    }
  }
  out.passed = out.failures.empty();
  return out;
}

std::string format_report(const RegularityAudit& audit) {
  const TunnelConstants& c = audit.constants;
  std::ostringstream os;
  auto line = [&](const char* name, double value) { os << name << " = " << fmt17(value) << '\n'; };
  line("delta_tau", c.delta_tau);
  line("delta_kappa", c.delta_kappa);
  line("theta_min", c.theta_min);
  line("theta_floor", c.theta_floor());
  line("L_N", c.L_N);
  line("L_kappa", c.L_kappa);
  line("L_E", c.L_E);
  line("L_B", c.L_B);
  line("delta_B_minus", c.delta_B_minus);
  line("delta_B_plus", c.delta_B_plus);
  line("L_tau", c.L_tau);
  line("d_minus", c.d_minus);
  line("d_plus", c.d_plus);
  line("d_star", c.d_star);
  line("delta_s", c.delta_s);
  line("eta", c.eta);
  line("max_abs_kappa", c.max_abs_kappa);
  os << "samples = " << audit.samples << '\n';
  os << "passed = " << (audit.passed ? "true" : "false") << '\n';
  for (const auto& f : audit.failures) os << "failure = " << f << '\n';
  return os.str();
}

}  // namespace tunnelnav
