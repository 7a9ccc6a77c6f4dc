#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_util.hpp"
#include "tunnelnav/cli.hpp"
#include "tunnelnav/errors.hpp"
#include "tunnelnav/scenario.hpp"

using namespace tunnelnav;
using namespace tunnelnav::testing;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "tunnelnav");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string scenario(const std::string& name) { return scenario_dir() + "/" + name; }

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("tunnelnav_test_" + name)).string();
}

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = temp_path(name);
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST(Scenario, LoadsShippedFiles) {
  for (const char* f : {"torus.json", "cylinder.json", "open_cylinder.json"}) {
    const Scenario s = load_scenario(scenario(f));
    EXPECT_NO_THROW(s.validate()) << f;
    EXPECT_NO_THROW(s.tunnel.build()) << f;
    EXPECT_TRUE(s.start.has_value()) << f;
  }
}

TEST(Scenario, RoundTrip) {
  const Scenario a = load_scenario(scenario("torus.json"));
  const std::string text = dump_scenario(a);
  const Scenario b = parse_scenario(text);
  EXPECT_EQ(dump_scenario(b), text);
  EXPECT_EQ(b.tunnel.kind, TunnelKind::Torus);
  EXPECT_DOUBLE_EQ(b.tunnel.R, 2.0);
  EXPECT_DOUBLE_EQ(b.zone.d_star, 0.25);
  EXPECT_EQ(b.samples.size(), a.samples.size());
}

TEST(Scenario, RoundTripsWarpedAndRevolution) {
  const std::string text = R"({
    "tunnel": {"kind": "warped",
               "base": {"kind": "surface_of_revolution", "profile": [1.0, -0.1, 0.05], "b_min": -1.0, "b_max": 3.0},
               "linear": [[1, 0.1, 0], [0, 0.95, 0.05], [0, 0, 1.1]]},
    "zone": {"d_minus": 0.1, "d_plus": 0.4, "d_star": 0.2, "delta_s": 0.1}
  })";
  const Scenario s = parse_scenario(text);
  EXPECT_EQ(s.tunnel.kind, TunnelKind::Warped);
  ASSERT_TRUE(s.tunnel.base);
  EXPECT_EQ(s.tunnel.base->kind, TunnelKind::Revolution);
  const ParametricTunnel t = s.tunnel.build();
  const Scenario again = parse_scenario(dump_scenario(s));
  const ParametricTunnel u = again.tunnel.build();
  EXPECT_LT((t.point({0.3, 1.0}) - u.point({0.3, 1.0})).norm(), 1e-15);
}

TEST(Scenario, RejectsBadInput) {
  auto code = [](const std::string& text) {
    try {
      parse_scenario(text);
    } catch (const TunnelError& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code(R"({"tunnel": {"kind": "torus", "R": 2, "r": 0.5}, "bogus": 1})"), ErrorCode::ConfigError);
  EXPECT_EQ(code(R"({"tunnel": {"kind": "torus", "R": 2, "r": 0.5, "length": 3}})"), ErrorCode::ConfigError);
  EXPECT_EQ(code(R"({"tunnel": {"kind": "klein"}})"), ErrorCode::ConfigError);
  EXPECT_EQ(code(R"({"tunnel": {"kind": "torus", "R": "two", "r": 0.5}})"), ErrorCode::ConfigError);
  EXPECT_EQ(code("{not json"), ErrorCode::ConfigError);
  EXPECT_EQ(code(R"({"tunnel": {"kind": "torus", "R": 2, "r": 0.5},
                     "zone": {"d_minus": 0.3, "d_plus": 0.4, "d_star": 0.2}})"),
            ErrorCode::ConfigError);
  EXPECT_THROW(load_scenario("/nonexistent/file.json"), TunnelError);
}

TEST(Scenario, SaveAndLoad) {
  const Scenario a = load_scenario(scenario("cylinder.json"));
  const std::string path = temp_path("save.json");
  save_scenario(a, path);
  EXPECT_EQ(dump_scenario(load_scenario(path)), dump_scenario(a));
  std::remove(path.c_str());
}

TEST(Cli, AuditReportsConstants) {
  const CliResult r = cli({"audit", "--config", scenario("torus.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  auto value = [&](const std::string& key) {
    const auto pos = r.out.find(key + " = ");
    EXPECT_NE(pos, std::string::npos) << key;
    return pos == std::string::npos ? 0.0 : std::stod(r.out.substr(pos + key.size() + 3));
  };
  EXPECT_NEAR(value("delta_tau"), 1.6, 1e-9);
  EXPECT_NEAR(value("delta_kappa"), 0.2, 1e-9);
  EXPECT_NEAR(value("L_N"), 2.5, 1e-9);
}

TEST(Cli, ConfigErrorsExitWithTwo) {
  const std::string bad = write_temp("bad.json", R"({"tunnel": {"kind": "torus", "R": 2, "r": 0.5}, "oops": 1})");
  const CliResult r = cli({"audit", "--config", bad});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("oops"), std::string::npos) << r.err;
  std::remove(bad.c_str());
  EXPECT_NE(cli({"audit"}).code, 0);
  EXPECT_NE(cli({"frobnicate"}).code, 0);
}

TEST(Cli, ScanAndEstimate) {
  CliResult r = cli({"scan", "--config", scenario("cylinder.json"), "--point", "0.5,0,0", "--alpha", "0.2"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("phi,distance,x,limit_y\n", 0), 0u);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 65);

  r = cli({"estimate", "--config", scenario("torus.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 5);
}

TEST(Cli, SweepWritesToFile) {
  const std::string out = temp_path("sweep.csv");
  const CliResult r = cli({"sweep", "--config", scenario("torus.json"), "--alphas", "0.4,0.1", "--out", out});
  EXPECT_EQ(r.code, 0) << r.err;
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  EXPECT_EQ(text.rfind("alpha,max_exactness,wellposed_rate\n", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  std::remove(out.c_str());
}

TEST(Cli, SimulateIsDeterministic) {
  const CliResult a = cli({"simulate", "--config", scenario("torus.json")});
  const CliResult b = cli({"simulate", "--config", scenario("torus.json")});
  EXPECT_EQ(a.code, 0) << a.err << a.out.substr(a.out.size() > 600 ? a.out.size() - 600 : 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("solved = true"), std::string::npos);
}

TEST(Cli, VerifySingleSuite) {
  const CliResult r = cli({"verify", "--suite", "principal-curvatures,estimator-symmetry", "--seed", "3"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("principal-curvatures: PASS"), std::string::npos);
  EXPECT_NE(r.out.find("estimator-symmetry: PASS"), std::string::npos);
  EXPECT_EQ(cli({"verify", "--suite", "no-such-suite"}).code, 1);
}
