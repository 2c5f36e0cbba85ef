#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nscbf/controller.hpp>
#include <nscbf/errors.hpp>
#include <nscbf/safety.hpp>
#include <nscbf/simulation.hpp>

namespace nscbf::app {

/// Malformed or inconsistent scenario; the message names the line and key.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

struct InitialSpec {
  enum class Kind { kRing, kList, kGrid };
  Kind kind = Kind::kRing;
  std::optional<Vec> center;  // ring; defaults to the obstacle center
  double radius = 3.0;
  int count = 20;
  double phase = 0.0;
  std::vector<Vec> points;      // list
  std::optional<Box> grid_box;  // grid
  int per_axis = 5;
};

struct VerifySpec {
  std::optional<Box> window;  // sampling window; defaults to the obstacle box grown by 2
  int samples = 500;
  int uniqueness_samples = 100;
  std::optional<double> continuity_radius;  // defaults to 1.25 (h + d)
  int continuity_count = 64;
  std::vector<double> deltas{1e-2, 1e-3, 1e-4};
};

struct Scenario {
  std::string source;
  Mat a;
  Mat b;
  std::vector<Vec> w_vertices;  // empty means W = {0}
  Box input_box = Box::symmetric(2, 5.0);
  std::optional<Box> state_box;
  RectangleObstacleSpec obstacle;
  double alpha = 0.01;
  double m_gain = 100.0;
  ShellSpec shell;
  CostSpec cost;
  IntegratorConfig integrator;
  DisturbancePolicy disturbance;
  InitialSpec initial;
  VerifySpec verify;
  std::vector<double> sweep_alphas{0.0, 0.001, 0.01, 0.1};
  std::uint64_t seed = 1;
};

/// Flat `key = value` lines; values are numbers, JSON arrays, or bare words.
/// '#' starts a comment. Unknown keys, duplicates, and missing required keys
/// are rejected.
Scenario parse_scenario_text(const std::string& text, const std::string& source = "<string>");
Scenario parse_scenario(const std::string& path);

LinearInclusion make_system(const Scenario& s);
RectangleObstacle make_obstacle(const Scenario& s);
SmoothingParams make_smoothing(const Scenario& s);
SafeController make_controller(const Scenario& s);
std::vector<Vec> initial_states(const Scenario& s);
Box verify_window(const Scenario& s);
double continuity_radius(const Scenario& s);

}  // namespace nscbf::app
