#include "tunnelnav/cli.hpp"

#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tunnelnav/audit.hpp"
#include "tunnelnav/errors.hpp"
#include "tunnelnav/estimator.hpp"
#include "tunnelnav/format.hpp"
#include "tunnelnav/navsim.hpp"
#include "tunnelnav/scenario.hpp"
#include "tunnelnav/sensor.hpp"
#include "tunnelnav/verify.hpp"

namespace tunnelnav {

namespace {

constexpr int kCheckFailed = 1;
constexpr int kConfigFailed = 2;

struct Options {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int grid = 0;
  bool oracle = false;
  std::vector<double> alphas = {0.4, 0.2, 0.1, 0.05, 0.025, 0.0125};
  std::vector<double> point;
  double alpha = 0.0;
  std::string suite = "all";
};

Vec3 to_vec3(const std::vector<double>& p) {
  if (p.size() != 3) throw TunnelError(ErrorCode::InvalidArgument, "--point needs three comma-separated numbers");
  return {p[0], p[1], p[2]};
}

std::string csv_join(std::initializer_list<std::string> cells) {
  std::string line;
  for (const std::string& c : cells) {
    if (!line.empty()) line += ',';
    line += c;
  }
  return line + '\n';
}

// Writes to --out when given, else to the command's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw TunnelError(ErrorCode::InvalidArgument, "cannot write " + path);
    }
    stream_ = file_ ? file_.get() : &fallback;
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

struct Context {
  Scenario scenario;
  ParametricTunnel tunnel;
  RegularityAudit audit;
  SensorConfig sensor;
  ProjectionOptions projection;
};

Context load_context(const Options& opt) {
  if (opt.config.empty()) throw TunnelError(ErrorCode::ConfigError, "--config is required");
  Scenario s = load_scenario(opt.config);
  if (opt.grid > 0) s.audit_grid = opt.grid;
  Context ctx{s, s.tunnel.build(), {}, {}, {}};
  ctx.audit = regularity_audit(ctx.tunnel, s.audit_config());
  ctx.sensor = s.resolved_sensor(ctx.audit.constants);
  ctx.projection.oracle = opt.oracle;
  if (opt.grid > 0) ctx.projection.grid = opt.grid;
  return ctx;
}

std::vector<Vec3> query_points(const Options& opt, const Scenario& s) {
  if (!opt.point.empty()) return {to_vec3(opt.point)};
  if (!s.samples.empty()) return s.samples;
  if (s.start) return {*s.start};
  throw TunnelError(ErrorCode::ConfigError, "no query point: pass --point or list samples in the scenario");
}

std::string out_path(const Options& opt, const Scenario& s) { return opt.out.empty() ? s.output : opt.out; }

int cmd_audit(const Options& opt, std::ostream& out, std::ostream& err) {
  const Context ctx = load_context(opt);
  Sink sink(opt.out, out);
  *sink << format_report(ctx.audit);
  for (const std::string& f : ctx.audit.failures) err << "audit: " << f << '\n';
  return ctx.audit.passed ? 0 : kCheckFailed;
}

int cmd_scan(const Options& opt, std::ostream& out) {
  const Context ctx = load_context(opt);
  const Vec3 r = query_points(opt, ctx.scenario).front();
  const double alpha = opt.alpha > 0.0 ? opt.alpha : ctx.sensor.alpha_e;
  SensorConfig cfg = ctx.sensor;
  cfg.alpha_s = std::max(cfg.alpha_s, alpha);
  const RayScan s = scan(ctx.tunnel, r, alpha, cfg, ctx.projection);
  const std::vector<double> x = scaled_depth_profile(s);
  Sink sink(out_path(opt, ctx.scenario), out);
  *sink << "phi,distance,x,limit_y\n";
  for (std::size_t k = 0; k < s.phis.size(); ++k) {
    *sink << csv_join({fmt17(s.phis[k]), fmt17(s.distances[k]), fmt17(x[k]),
                       fmt17(limit_depth(s.frame, s.center.distance, s.phis[k]))});
  }
  return 0;
}

int cmd_estimate(const Options& opt, std::ostream& out, std::ostream& err) {
  const Context ctx = load_context(opt);
  EstimatorOptions eopt;
  eopt.strict = false;
  eopt.projection = ctx.projection;
  eopt.delta_s = ctx.scenario.zone.delta_s;
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  int status = 0;
  Sink sink(out_path(opt, ctx.scenario), out);
  *sink << "x,y,z,phi0,phi_pi,phi_star,exactness,well_posed\n";
  for (const Vec3& r : query_points(opt, ctx.scenario)) {
    double phi0 = kNaN, phi_pi = kNaN, phi_star = kNaN, angle = kNaN;
    bool well_posed = false;
    try {
      const DirectionEstimate est = mdpbe(ctx.tunnel, r, ctx.sensor, eopt);
      phi_star = est.phi_star;
      angle = exactness(est).angle;
      well_posed = est.well_posed;
      if (est.well_posed) {
        // phi0 is the maximum closer to azimuth 0.
        const double a = est.maxima_phis[0], b = est.maxima_phis[1];
        const bool a_first = std::abs(wrap_pi(a)) <= std::abs(wrap_pi(b));
        phi0 = a_first ? a : b;
        phi_pi = a_first ? b : a;
      } else {
        status = kCheckFailed;
      }
    } catch (const TunnelError& e) {
      err << "estimate at (" << fmt17(r[0]) << ", " << fmt17(r[1]) << ", " << fmt17(r[2]) << "): " << e.what() << '\n';
      status = kCheckFailed;
    }
    *sink << csv_join({fmt17(r[0]), fmt17(r[1]), fmt17(r[2]), fmt17(phi0), fmt17(phi_pi), fmt17(phi_star),
                       fmt17(angle), well_posed ? "1" : "0"});
  }
  return status;
}

int cmd_sweep(const Options& opt, std::ostream& out, std::ostream& err) {
  const Context ctx = load_context(opt);
  EstimatorOptions eopt;
  eopt.projection = ctx.projection;
  eopt.delta_s = ctx.scenario.zone.delta_s;
  const std::vector<SweepRow> rows =
      alpha_sweep(ctx.tunnel, query_points(opt, ctx.scenario), opt.alphas, ctx.sensor, eopt);
  Sink sink(out_path(opt, ctx.scenario), out);
  *sink << "alpha,max_exactness,wellposed_rate\n";
  int status = 0;
  for (const SweepRow& row : rows) {
    *sink << csv_join({fmt17(row.alpha), fmt17(row.max_exactness), fmt17(row.wellposed_rate)});
    for (const std::string& m : row.messages) err << "sweep alpha=" << fmt17(row.alpha) << ": " << m << '\n';
    if (row.errors > 0) status = kCheckFailed;
  }
  return status;
}

int cmd_simulate(const Options& opt, std::ostream& out, std::ostream& err) {
  const Context ctx = load_context(opt);
  if (!ctx.audit.passed) {
    for (const std::string& f : ctx.audit.failures) err << "audit: " << f << '\n';
    return kCheckFailed;
  }
  const Scenario& s = ctx.scenario;
  if (!s.start && opt.point.empty()) throw TunnelError(ErrorCode::ConfigError, "simulate needs a start point");
  const Vec3 start = opt.point.empty() ? *s.start : to_vec3(opt.point);
  ControllerConfig cc = s.controller;
  cc.v_b_required = required_basis_rate(cc, ctx.audit.constants);

  const SimLog log = run_scenario(ctx.tunnel, cc, ctx.sensor, s.zone, start, ctx.projection);
  const SolveReport rep = evaluate_solve(log, cc, s.zone.d_star);

  const std::string path = out_path(opt, s);
  {
    Sink sink(path, out);
    *sink << "t,x,y,z,d,b,phi_star,exactness,well_posed\n";
    for (const SimRow& r : log.rows) {
      *sink << csv_join({fmt17(r.t), fmt17(r.position[0]), fmt17(r.position[1]), fmt17(r.position[2]), fmt17(r.d),
                         fmt17(r.b), fmt17(r.phi_star), fmt17(r.exactness), r.well_posed ? "1" : "0"});
    }
  }
  if (path.empty()) out << '\n';
  auto kv = [&](const char* key, const std::string& value) { out << key << " = " << value << '\n'; };
  kv("solved", rep.solved ? "true" : "false");
  kv("closed", log.closed ? "true" : "false");
  kv("t0", fmt17(rep.t0));
  kv("horizon", fmt17(rep.horizon));
  kv("direction_sign", std::to_string(rep.direction_sign));
  kv("min_abs_bdot", fmt17(rep.min_abs_bdot));
  kv("v_b_required", fmt17(rep.v_b_required));
  kv("d_monotone", rep.d_monotone ? "true" : "false");
  kv("final_d_error", fmt17(rep.final_d_error));
  kv("end_reached", rep.end_reached ? "true" : "false");
  kv("contact", log.contact ? "true" : "false");
  if (!log.error.empty()) kv("error", log.error);
  return rep.solved ? 0 : kCheckFailed;
}

int cmd_verify(const Options& opt, std::ostream& out) {
  std::uint64_t seed = opt.seed;
  if (!opt.seed_given && !opt.config.empty()) seed = load_scenario(opt.config).seed;
  std::vector<std::string> names;
  if (opt.suite == "all") {
    names = verify_suite_names();
  } else {
    std::stringstream ss(opt.suite);
    for (std::string item; std::getline(ss, item, ',');) names.push_back(item);
  }
  int status = 0;
  for (const std::string& name : names) {
    const CheckResult res = run_verify_suite(name, seed);
    out << format_check(res) << '\n';
    if (!res.passed) status = kCheckFailed;
  }
  return status;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tunnel navigation geometry kernel, sensor model and simulator"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", opt.config, "Scenario file (JSON)");
    if (config_required) c->required();
    sub->add_option("--out", opt.out, "Output path; defaults to the scenario output or stdout");
    sub->add_option("--grid", opt.grid, "Audit and projection lattice resolution")->check(CLI::PositiveNumber);
    sub->add_flag("--oracle", opt.oracle, "Dense brute-force projection");
  };
  auto* audit = app.add_subcommand("audit", "Regularity and Lipschitz certificates");
  add_common(audit, true);
  auto* scan_cmd = app.add_subcommand("scan", "Cone scan profile at one point");
  add_common(scan_cmd, true);
  scan_cmd->add_option("--point", opt.point, "Query point x,y,z")->delimiter(',')->expected(3);
  scan_cmd->add_option("--alpha", opt.alpha, "Cone half-angle")->check(CLI::PositiveNumber);
  auto* estimate = app.add_subcommand("estimate", "Direction estimate per sample point");
  add_common(estimate, true);
  estimate->add_option("--point", opt.point, "Query point x,y,z")->delimiter(',')->expected(3);
  auto* sweep = app.add_subcommand("sweep", "Exactness versus cone angle");
  add_common(sweep, true);
  sweep->add_option("--alphas", opt.alphas, "Comma-separated cone angles")->delimiter(',');
  auto* simulate = app.add_subcommand("simulate", "Closed-loop run and solve verdict");
  add_common(simulate, true);
  simulate->add_option("--point", opt.point, "Start point x,y,z")->delimiter(',')->expected(3);
  auto* verify = app.add_subcommand("verify", "Property suites");
  add_common(verify, false);
  verify->add_option("--suite", opt.suite, "Suite name, comma list, or 'all'");
  for (CLI::App* sub : {audit, scan_cmd, estimate, sweep, simulate, verify}) {
    sub->add_option_function<std::uint64_t>(
        "--seed",
        [&](const std::uint64_t& s) {
          opt.seed = s;
          opt.seed_given = true;
        },
        "Seed for sampled test cases");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (audit->parsed()) return cmd_audit(opt, out, err);
    if (scan_cmd->parsed()) return cmd_scan(opt, out);
    if (estimate->parsed()) return cmd_estimate(opt, out, err);
    if (sweep->parsed()) return cmd_sweep(opt, out, err);
    if (simulate->parsed()) return cmd_simulate(opt, out, err);
    if (verify->parsed()) return cmd_verify(opt, out);
  } catch (const TunnelError& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::ConfigError ? kConfigFailed : kCheckFailed;
  }
  return kCheckFailed;
}

}  // namespace tunnelnav
