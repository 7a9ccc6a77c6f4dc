#pragma once

#include <array>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "tunnelnav/types.hpp"

namespace tunnelnav {

/// Position and first/second partial derivatives of a chart at (u, v).
struct ChartJet {
  Vec3 X, Xu, Xv, Xuu, Xuv, Xvv;
};

/// Basic coordinate b = B(u, v) and its chart partials.
struct BasisJet {
  double b = 0.0;
  double bu = 0.0;
  double bv = 0.0;
};

struct AxisRange {
  double lo = 0.0;
  double hi = 0.0;
  bool periodic = false;

  bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
  double span() const { return hi - lo; }
};

/// Rectangle of chart coordinates.
struct ChartBox {
  AxisRange u;
  AxisRange v;
};

enum class TunnelKind { Cylinder, Torus, Revolution, Warped };
enum class BasisType { Line, Circle, Interval };

const char* to_string(TunnelKind kind);
const char* to_string(BasisType type);

/// Quadratic map p -> offset + linear * p + (p^T Q_i p)_i used to bend a base
/// tunnel into a new one. The identity warp leaves the base untouched.
struct PolynomialWarp {
  Mat3 linear = Mat3::Identity();
  Vec3 offset = Vec3::Zero();
  std::array<Mat3, 3> quadratic = {Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};

  Vec3 apply(const Vec3& p) const;
  Mat3 jacobian(const Vec3& p) const;
  /// Second-derivative contraction: component i is a^T (Q_i + Q_i^T) b.
  Vec3 hessian(const Vec3& a, const Vec3& b) const;
  /// Solves apply(q) = p by Newton iteration starting from q = p.
  Vec3 inverse(const Vec3& p) const;

  static PolynomialWarp identity() { return {}; }
};

/// Analytic chart with closed-form derivatives. Implementations are immutable.
class Chart {
 public:
  virtual ~Chart() = default;

  virtual TunnelKind kind() const = 0;
  virtual ChartJet jet(const Vec2& uv) const = 0;
  virtual Vec3 point(const Vec2& uv) const { return jet(uv).X; }
  virtual BasisJet basis(const Vec2& uv) const = 0;
  virtual BasisType basis_type() const = 0;
  virtual ChartBox domain() const = 0;
  /// +1 when Xu x Xv points into the tunnel, -1 otherwise.
  virtual int orientation() const = 0;
  /// Smallest geometric length scale (tube or cross-section radius).
  virtual double feature_size() const = 0;
  /// Chart box guaranteed to contain the nearest point of S to r.
  virtual ChartBox scan_window(const Vec3& r) const;
  /// Finite chart box sampled by audits.
  virtual ChartBox audit_window() const;
};

/// A tunnel surface S with its basis projection B, backed by an analytic chart.
/// Cheap to copy; the chart is shared and immutable.
class ParametricTunnel {
 public:
  /// Right circular cylinder of radius R along the z axis. Infinite length
  /// gives a line basis, finite length an open tunnel with z in [0, length].
  static ParametricTunnel cylinder(double R, double length = std::numeric_limits<double>::infinity());
  /// Torus with axis z, centre-circle radius R and tube radius r (R > r).
  static ParametricTunnel torus(double R, double r);
  /// Surface of revolution about z with radius f(z) = sum_k c_k z^k on [b_min, b_max].
  static ParametricTunnel revolution(std::vector<double> profile, double b_min, double b_max);
  /// Image of a base tunnel under a polynomial diffeomorphism.
  static ParametricTunnel warped(const ParametricTunnel& base, const PolynomialWarp& warp);

  explicit ParametricTunnel(std::shared_ptr<const Chart> chart);

  TunnelKind kind() const { return chart_->kind(); }
  BasisType basis_type() const { return chart_->basis_type(); }
  bool is_open() const { return basis_type() == BasisType::Interval; }
  ChartBox domain() const { return chart_->domain(); }
  int orientation() const { return chart_->orientation(); }
  double feature_size() const { return chart_->feature_size(); }

  ChartJet jet(const Vec2& uv) const { return chart_->jet(uv); }
  Vec3 point(const Vec2& uv) const { return chart_->point(uv); }
  BasisJet basis(const Vec2& uv) const { return chart_->basis(uv); }
  ChartBox scan_window(const Vec3& r) const { return chart_->scan_window(r); }
  ChartBox audit_window() const { return chart_->audit_window(); }

  /// Maps uv into the canonical domain: periodic axes wrapped, bounded axes clamped.
  Vec2 normalize(const Vec2& uv) const;
  bool contains(const Vec2& uv) const;

  const Chart& chart() const { return *chart_; }

 private:
  std::shared_ptr<const Chart> chart_;
};

}  // namespace tunnelnav
