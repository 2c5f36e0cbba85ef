#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nscbf_app/runner.hpp"
#include "nscbf_app/scenario.hpp"

namespace nscbf::app {
namespace {

namespace fs = std::filesystem;

const std::string kRect1 = std::string(NSCBF_SCENARIO_DIR) + "/rect1.scenario";

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string rect1_text() { return read_file(kRect1); }

std::string replace_line(const std::string& text, const std::string& key, const std::string& line) {
  std::istringstream in(text);
  std::string out, raw;
  while (std::getline(in, raw)) {
    if (raw.rfind(key + " ", 0) == 0) {
      if (!line.empty()) out += line + "\n";
    } else {
      out += raw + "\n";
    }
  }
  return out;
}

std::string error_of(const std::string& text) {
  try {
    parse_scenario_text(text, "test.scenario");
  } catch (const ScenarioError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nscbf_unit_" + name);
  fs::remove_all(p);
  return p;
}

TEST(Scenario, BundledRect1) {
  const Scenario s = parse_scenario(kRect1);
  Mat a(2, 2);
  a << 0, 1, -1, -1;
  EXPECT_EQ(s.a, a);
  EXPECT_EQ(s.b, Mat::Identity(2, 2));
  EXPECT_EQ(s.input_box.lower(), make_vec({-5, -5}));
  EXPECT_EQ(s.input_box.upper(), make_vec({5, 5}));
  EXPECT_DOUBLE_EQ(s.alpha, 0.01);
  EXPECT_DOUBLE_EQ(s.m_gain, 100.0);
  EXPECT_DOUBLE_EQ(s.shell.rho, 0.2);
  EXPECT_EQ(s.obstacle.p0, make_vec({2, -1}));
  EXPECT_DOUBLE_EQ(s.obstacle.d, 0.5);
  EXPECT_EQ(s.cost.kind, CostKind::kMinNorm);
  EXPECT_EQ(s.integrator.scheme, Scheme::kRk4);
  EXPECT_DOUBLE_EQ(s.integrator.dt, 1e-3);
  EXPECT_DOUBLE_EQ(s.integrator.horizon, 20.0);
  EXPECT_EQ(initial_states(s).size(), 20u);
  for (const Vec& x : initial_states(s)) EXPECT_LE(make_obstacle(s).barrier.eval(x), -0.1);
  EXPECT_TRUE(s.w_vertices.empty());
  EXPECT_EQ(s.sweep_alphas, (std::vector<double>{0, 0.001, 0.01, 0.1}));
}

TEST(Scenario, MissingRequiredKeyIsNamed) {
  const std::string err = error_of(replace_line(rect1_text(), "smoothing.alpha", ""));
  EXPECT_NE(err.find("smoothing.alpha"), std::string::npos) << err;
}

TEST(Scenario, InputMatrixDimensionMismatch) {
  const std::string err = error_of(
      replace_line(rect1_text(), "dynamics.b", "dynamics.b = [[1, 0, 0], [0, 1, 0]]"));
  EXPECT_NE(err.find("dimension"), std::string::npos) << err;
  EXPECT_NE(err.find("dynamics.b"), std::string::npos) << err;
}

TEST(Scenario, UnknownKeyHasLineNumber) {
  const std::string text = std::string("dynamics.c = 3\n") + rect1_text();
  const std::string err = error_of(text);
  EXPECT_NE(err.find("test.scenario:1"), std::string::npos) << err;
  EXPECT_NE(err.find("dynamics.c"), std::string::npos) << err;
}

TEST(Scenario, SyntaxErrors) {
  EXPECT_NE(error_of(rect1_text() + "seed 4\n").find("key = value"), std::string::npos);
  EXPECT_NE(error_of(rect1_text() + "seed = 4\n").find("duplicate"), std::string::npos);
  EXPECT_NE(error_of(replace_line(rect1_text(), "obstacle.d", "obstacle.d = [1,")).find("obstacle.d"),
            std::string::npos);
  EXPECT_NE(error_of(replace_line(rect1_text(), "obstacle.d", "obstacle.d = wide")).find("number"),
            std::string::npos);
  EXPECT_NE(error_of(replace_line(rect1_text(), "cost.kind", "cost.kind = lqr")).find("cost.kind"),
            std::string::npos);
  EXPECT_NE(error_of(replace_line(rect1_text(), "obstacle.q", "obstacle.q = [[1, -1]]"))
                .find("four"),
            std::string::npos);
  EXPECT_THROW(parse_scenario("/nonexistent/none.scenario"), ScenarioError);
}

TEST(Scenario, OptionalSections) {
  std::string text = replace_line(rect1_text(), "initial.kind", "initial.kind = list");
  text = replace_line(text, "initial.center", "initial.points = [[0, 2], [-1, 0]]");
  text = replace_line(text, "initial.radius", "");
  text = replace_line(text, "initial.count", "");
  text = replace_line(text, "disturbance.kind", "disturbance.kind = fixed_vertex");
  text += "disturbance.vertex = 1\ndynamics.w = [[-0.1, -0.1], [0.1, -0.1], [0.1, 0.1], [-0.1, 0.1]]\n";
  text += "state.lower = [-6, -6]\nstate.upper = [6, 6]\n";
  text = replace_line(text, "cost.kind", "cost.kind = nominal_tracking");
  text += "cost.k_fb = [[1, 0], [0, 1]]\n";
  const Scenario s = parse_scenario_text(text);
  EXPECT_EQ(initial_states(s).size(), 2u);
  EXPECT_EQ(s.disturbance.kind, DisturbancePolicy::Kind::kFixedVertex);
  EXPECT_EQ(make_system(s).disturbance().vertices().size(), 4u);
  ASSERT_TRUE(s.state_box.has_value());
  EXPECT_EQ(s.cost.kind, CostKind::kNominalTracking);
  EXPECT_NO_THROW(make_controller(s));
}

TEST(Runner, Overrides) {
  RunOptions o;
  o.seed = 7;
  o.dt = 5e-4;
  o.horizon = 3.0;
  o.alphas = std::vector<double>{0, 0.01};
  const Scenario s = with_overrides(parse_scenario(kRect1), o);
  EXPECT_EQ(s.seed, 7u);
  EXPECT_DOUBLE_EQ(s.integrator.dt, 5e-4);
  EXPECT_DOUBLE_EQ(s.integrator.horizon, 3.0);
  EXPECT_EQ(s.sweep_alphas.size(), 2u);
  o.horizon = 1e-5;
  EXPECT_THROW(with_overrides(parse_scenario(kRect1), o), ScenarioError);
}

TEST(Runner, FormatDouble) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-0.0), "0");
  EXPECT_EQ(format_double(1e-4), "1e-04");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_double(x)), x);
}

TEST(Runner, VerifyReportSchema) {
  const fs::path dir = scratch_dir("verify");
  RunOptions o;
  o.out_dir = dir.string();
  std::ostringstream log;
  EXPECT_EQ(run(Command::kVerify, parse_scenario(kRect1), o, log), kExitPass);
  const auto report = nlohmann::json::parse(read_file(dir / "report.json"));
  EXPECT_TRUE(report["pass"].get<bool>());
  ASSERT_TRUE(report["probes"].is_array());
  std::vector<std::string> names;
  for (const auto& p : report["probes"]) {
    for (const char* key : {"name", "samples", "worst_case", "threshold", "pass", "witnesses"}) {
      EXPECT_TRUE(p.contains(key)) << key;
    }
    names.push_back(p["name"].get<std::string>());
  }
  EXPECT_EQ(names, (std::vector<std::string>{"candidate_signs", "cbf_shell", "subset_safe",
                                             "strict_feasibility", "kappa_shell_safety",
                                             "qp_uniqueness", "continuity_kappa"}));
  EXPECT_NE(log.str().find("\"pass\":true"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Runner, SimulateCsvSchemaAndDeterminism) {
  RunOptions o;
  o.horizon = 0.5;
  const Scenario s = with_overrides(parse_scenario(kRect1), o);
  const fs::path a = scratch_dir("sim_a"), b = scratch_dir("sim_b");
  std::ostringstream log;
  o.out_dir = a.string();
  EXPECT_EQ(run(Command::kSimulate, s, o, log), kExitPass);
  o.out_dir = b.string();
  o.threads = 1;
  EXPECT_EQ(run(Command::kSimulate, s, o, log), kExitPass);
  const std::string csv = read_file(a / "traj_000.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,x1,x2,u1,u2,B,g,relax,active_set,status");
  EXPECT_NE(csv.find(",completed\n"), std::string::npos);
  for (const auto& entry : fs::directory_iterator(a)) {
    EXPECT_EQ(read_file(entry.path()), read_file(b / entry.path().filename()))
        << entry.path().filename();
  }
  const auto summary = nlohmann::json::parse(read_file(a / "summary.json"));
  EXPECT_EQ(summary["count"].get<int>(), 20);
  EXPECT_EQ(summary["completed"].get<int>(), 20);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Runner, SweepRows) {
  const fs::path dir = scratch_dir("sweep");
  RunOptions o;
  o.out_dir = dir.string();
  std::ostringstream log;
  EXPECT_EQ(run(Command::kSweep, parse_scenario(kRect1), o, log), kExitPass);
  const auto report = nlohmann::json::parse(read_file(dir / "sweep.json"));
  ASSERT_EQ(report["rows"].size(), 4u);
  EXPECT_FALSE(report["rows"][0]["probe"]["pass"].get<bool>());
  EXPECT_EQ(report["rows"][0]["mode"], "unsmoothed");
  EXPECT_TRUE(report["rows"][2]["probe"]["pass"].get<bool>());
  // a sweep whose configured alpha fails is reported as a failure
  o.alphas = std::vector<double>{0.001};
  Scenario s = with_overrides(parse_scenario(kRect1), o);
  s.alpha = 0.001;
  EXPECT_EQ(run(Command::kSweep, s, o, log), kExitFailure);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace nscbf::app
