#include "nscbf_app/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace nscbf::app {
namespace {

using json = nlohmann::json;

struct Entry {
  json value;
  int line = 0;
};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool is_word(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

class Reader {
 public:
  Reader(std::map<std::string, Entry> entries, std::string source)
      : entries_(std::move(entries)), source_(std::move(source)) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    auto it = entries_.find(key);
    std::ostringstream os;
    os << source_;
    if (it != entries_.end()) os << ":" << it->second.line;
    os << ": " << key << ": " << what;
    throw ScenarioError(os.str());
  }

  const json& require(const std::string& key) const {
    consumed_.insert(key);
    auto it = entries_.find(key);
    if (it == entries_.end()) {
      throw ScenarioError(source_ + ": missing required key '" + key + "'");
    }
    return it->second.value;
  }

  double number(const std::string& key) const {
    const json& v = require(key);
    if (!v.is_number()) fail(key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(key, "expected a finite number");
    return d;
  }
  double number(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  long long integer(const std::string& key) const {
    const json& v = require(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<long long>();
  }
  long long integer(const std::string& key, long long fallback) const {
    return has(key) ? integer(key) : fallback;
  }

  std::string word(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = require(key);
    if (!v.is_string()) fail(key, "expected a word");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) const {
    const json& v = require(key);
    if (!v.is_array()) fail(key, "expected an array of numbers");
    std::vector<double> out;
    for (const json& e : v) {
      if (!e.is_number()) fail(key, "expected an array of numbers");
      out.push_back(e.get<double>());
      if (!std::isfinite(out.back())) fail(key, "expected finite numbers");
    }
    return out;
  }

  Vec vec(const std::string& key) const {
    const std::vector<double> values = numbers(key);
    if (values.empty() || values.size() > static_cast<std::size_t>(kMaxAmbientDim)) {
      fail(key, "expected 1 to 3 entries");
    }
    Vec out(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) out(static_cast<Eigen::Index>(i)) = values[i];
    return out;
  }

  std::vector<Vec> vec_list(const std::string& key) const {
    const json& v = require(key);
    if (!v.is_array()) fail(key, "expected an array of arrays");
    std::vector<Vec> out;
    for (const json& row : v) {
      if (!row.is_array() || row.empty() || row.size() > static_cast<std::size_t>(kMaxAmbientDim)) {
        fail(key, "expected rows of 1 to 3 numbers");
      }
      Vec x(static_cast<Eigen::Index>(row.size()));
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (!row[i].is_number()) fail(key, "expected numbers");
        x(static_cast<Eigen::Index>(i)) = row[i].get<double>();
      }
      if (!out.empty() && out.front().size() != x.size()) fail(key, "rows differ in length");
      out.push_back(x);
    }
    return out;
  }

  Mat mat(const std::string& key) const {
    const std::vector<Vec> rows = vec_list(key);
    if (rows.empty()) fail(key, "expected a nonempty matrix");
    Mat out(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
    return out;
  }

  Box box(const std::string& lower_key, const std::string& upper_key) const {
    const Vec lo = vec(lower_key), hi = vec(upper_key);
    if (lo.size() != hi.size()) fail(upper_key, "lower and upper differ in dimension");
    try {
      return Box(lo, hi);
    } catch (const Error& e) {
      fail(upper_key, e.what());
    }
  }

  void reject_unknown() const {
    for (const auto& [key, entry] : entries_) {
      if (!consumed_.count(key)) {
        throw ScenarioError(source_ + ":" + std::to_string(entry.line) + ": unknown key '" + key +
                            "'");
      }
    }
  }

 private:
  std::map<std::string, Entry> entries_;
  std::string source_;
  mutable std::set<std::string> consumed_;
};

std::map<std::string, Entry> tokenize(const std::string& text, const std::string& source) {
  std::map<std::string, Entry> out;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw ScenarioError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string text_value = trim(line.substr(eq + 1));
    if (!is_word(key)) throw ScenarioError(where + "invalid key '" + key + "'");
    if (text_value.empty()) throw ScenarioError(where + key + ": missing value");
    if (out.count(key)) throw ScenarioError(where + "duplicate key '" + key + "'");
    json value = json::parse(text_value, nullptr, false);
    if (value.is_discarded()) {
      if (!is_word(text_value)) throw ScenarioError(where + key + ": cannot parse value");
      value = text_value;
    }
    out[key] = Entry{std::move(value), line_no};
  }
  return out;
}

void check_dims(const Scenario& s, const Reader& r) {
  const Eigen::Index n = s.a.rows();
  if (s.a.cols() != n) r.fail("dynamics.a", "must be square");
  if (n < 1 || n > kMaxAmbientDim) r.fail("dynamics.a", "state dimension must be 1 to 3");
  if (s.b.rows() != n) r.fail("dynamics.b", "row count must equal the state dimension");
  if (s.b.cols() != s.input_box.dim()) {
    r.fail("dynamics.b", "dimension mismatch: column count " + std::to_string(s.b.cols()) +
                             " does not match the input box dimension " +
                             std::to_string(s.input_box.dim()));
  }
  for (const Vec& w : s.w_vertices) {
    if (w.size() != n) r.fail("dynamics.w", "vertices must have the state dimension");
  }
  if (n != 2) r.fail("dynamics.a", "rectangle obstacles need a planar state");
  if (s.obstacle.p0.size() != n) r.fail("obstacle.p0", "dimension mismatch");
  if (s.state_box && s.state_box->dim() != n) r.fail("state.lower", "dimension mismatch");
  if (s.cost.kind == CostKind::kNominalTracking &&
      (s.cost.nominal_gain.rows() != s.b.cols() || s.cost.nominal_gain.cols() != n)) {
    r.fail("cost.k_fb", "must be m x n");
  }
}

}  // namespace

Scenario parse_scenario_text(const std::string& text, const std::string& source) {
  const Reader r(tokenize(text, source), source);
  Scenario s;
  s.source = source;

  s.a = r.mat("dynamics.a");
  s.b = r.mat("dynamics.b");
  if (r.has("dynamics.w")) s.w_vertices = r.vec_list("dynamics.w");
  s.input_box = r.box("input.lower", "input.upper");
  if (r.has("state.lower") || r.has("state.upper")) s.state_box = r.box("state.lower", "state.upper");

  s.obstacle.p0 = r.vec("obstacle.p0");
  const std::vector<Vec> q = r.vec_list("obstacle.q");
  if (q.size() != 4) r.fail("obstacle.q", "expected four edge midpoints");
  for (std::size_t i = 0; i < 4; ++i) {
    if (q[i].size() != s.obstacle.p0.size()) r.fail("obstacle.q", "dimension mismatch with p0");
    s.obstacle.q[i] = q[i];
  }
  s.obstacle.d = r.number("obstacle.d");
  if (s.obstacle.d < 0.0) r.fail("obstacle.d", "must be >= 0");

  s.alpha = r.number("smoothing.alpha");
  if (!(s.alpha > kDefaultTieTol)) r.fail("smoothing.alpha", "must exceed the tie tolerance 1e-9");
  s.m_gain = r.number("smoothing.m_gain");
  if (!(s.m_gain > 0.0)) r.fail("smoothing.m_gain", "must be > 0");
  s.shell.rho = r.number("shell.rho", s.shell.rho);
  if (!(s.shell.rho > 0.0)) r.fail("shell.rho", "must be > 0");

  const std::string cost = r.word("cost.kind", "min_norm");
  if (cost == "min_norm") {
    s.cost.kind = CostKind::kMinNorm;
  } else if (cost == "nominal_tracking") {
    s.cost.kind = CostKind::kNominalTracking;
    s.cost.nominal_gain = r.mat("cost.k_fb");
  } else {
    r.fail("cost.kind", "expected min_norm or nominal_tracking");
  }
  if (s.cost.kind == CostKind::kMinNorm && r.has("cost.k_fb")) r.mat("cost.k_fb");

  s.integrator.dt = r.number("integrator.dt", s.integrator.dt);
  s.integrator.horizon = r.number("integrator.horizon", s.integrator.horizon);
  const std::string scheme = r.word("integrator.scheme", "rk4");
  if (scheme == "rk4") {
    s.integrator.scheme = Scheme::kRk4;
  } else if (scheme == "euler") {
    s.integrator.scheme = Scheme::kEuler;
  } else {
    r.fail("integrator.scheme", "expected rk4 or euler");
  }
  try {
    s.integrator.validate();
  } catch (const Error& e) {
    r.fail("integrator.dt", e.what());
  }

  s.seed = static_cast<std::uint64_t>(r.integer("seed", 1));
  const std::string dist = r.word("disturbance.kind", "none");
  if (dist == "none") {
    s.disturbance = DisturbancePolicy::none();
  } else if (dist == "fixed_vertex") {
    s.disturbance = DisturbancePolicy::fixed_vertex(static_cast<int>(r.integer("disturbance.vertex")));
  } else if (dist == "random") {
    s.disturbance = DisturbancePolicy::random_piecewise_constant(s.seed);
  } else if (dist == "adversarial") {
    s.disturbance = DisturbancePolicy::adversarial();
  } else {
    r.fail("disturbance.kind", "expected none, fixed_vertex, random or adversarial");
  }

  const std::string init = r.word("initial.kind", "ring");
  if (init == "ring") {
    s.initial.kind = InitialSpec::Kind::kRing;
    if (r.has("initial.center")) s.initial.center = r.vec("initial.center");
    s.initial.radius = r.number("initial.radius", s.initial.radius);
    s.initial.count = static_cast<int>(r.integer("initial.count", s.initial.count));
    s.initial.phase = r.number("initial.phase", s.initial.phase);
    if (!(s.initial.radius > 0.0)) r.fail("initial.radius", "must be > 0");
    if (s.initial.count < 1) r.fail("initial.count", "must be >= 1");
  } else if (init == "list") {
    s.initial.kind = InitialSpec::Kind::kList;
    s.initial.points = r.vec_list("initial.points");
    if (s.initial.points.empty()) r.fail("initial.points", "expected at least one state");
  } else if (init == "grid") {
    s.initial.kind = InitialSpec::Kind::kGrid;
    s.initial.grid_box = r.box("initial.lower", "initial.upper");
    s.initial.per_axis = static_cast<int>(r.integer("initial.per_axis", s.initial.per_axis));
    if (s.initial.per_axis < 2) r.fail("initial.per_axis", "must be >= 2");
  } else {
    r.fail("initial.kind", "expected ring, list or grid");
  }

  if (r.has("verify.lower") || r.has("verify.upper")) s.verify.window = r.box("verify.lower", "verify.upper");
  s.verify.samples = static_cast<int>(r.integer("verify.samples", s.verify.samples));
  if (s.verify.samples < 1) r.fail("verify.samples", "must be >= 1");
  s.verify.uniqueness_samples =
      static_cast<int>(r.integer("verify.uniqueness_samples", s.verify.uniqueness_samples));
  if (s.verify.uniqueness_samples < 1) r.fail("verify.uniqueness_samples", "must be >= 1");
  if (r.has("verify.continuity_radius")) {
    s.verify.continuity_radius = r.number("verify.continuity_radius");
    if (!(*s.verify.continuity_radius > 0.0)) r.fail("verify.continuity_radius", "must be > 0");
  }
  s.verify.continuity_count =
      static_cast<int>(r.integer("verify.continuity_count", s.verify.continuity_count));
  if (s.verify.continuity_count < 1) r.fail("verify.continuity_count", "must be >= 1");
  if (r.has("verify.deltas")) {
    s.verify.deltas = r.numbers("verify.deltas");
    if (s.verify.deltas.size() < 2) r.fail("verify.deltas", "expected at least two deltas");
    for (double d : s.verify.deltas) {
      if (!(d > 0.0)) r.fail("verify.deltas", "deltas must be > 0");
    }
  }
  if (r.has("sweep.alphas")) {
    s.sweep_alphas = r.numbers("sweep.alphas");
    for (double a : s.sweep_alphas) {
      if (a < 0.0) r.fail("sweep.alphas", "alphas must be >= 0");
    }
  }

  check_dims(s, r);
  r.reject_unknown();
  if (s.disturbance.kind == DisturbancePolicy::Kind::kFixedVertex) {
    const LinearInclusion sys = make_system(s);
    if (s.disturbance.vertex_index < 0 ||
        s.disturbance.vertex_index >= static_cast<int>(sys.disturbance().vertices().size())) {
      r.fail("disturbance.vertex", "index out of range for W");
    }
  }
  try {
    make_obstacle(s);
  } catch (const Error& e) {
    r.fail("obstacle.q", e.what());
  }
  return s;
}

Scenario parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path + ": cannot open scenario file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str(), path);
}

LinearInclusion make_system(const Scenario& s) {
  if (s.w_vertices.empty()) return LinearInclusion(s.a, s.b);
  return LinearInclusion(s.a, s.b, ConvexPolytope::from_points(s.w_vertices));
}

RectangleObstacle make_obstacle(const Scenario& s) { return from_rectangle(s.obstacle); }

SmoothingParams make_smoothing(const Scenario& s) {
  SmoothingParams p;
  p.alpha = s.alpha;
  p.m_gain = s.m_gain;
  p.input_box = s.input_box;
  p.blend = true;
  return p;
}

SafeController make_controller(const Scenario& s) {
  return SafeController(make_obstacle(s).barrier, make_system(s), make_smoothing(s), s.cost);
}

std::vector<Vec> initial_states(const Scenario& s) {
  switch (s.initial.kind) {
    case InitialSpec::Kind::kRing:
      return ring_states(s.initial.center.value_or(s.obstacle.p0), s.initial.radius,
                         s.initial.count, s.initial.phase);
    case InitialSpec::Kind::kList:
      return s.initial.points;
    case InitialSpec::Kind::kGrid:
      return grid_states(*s.initial.grid_box, s.initial.per_axis);
  }
  return {};
}

namespace {

// Largest outward reach of the inflated rectangle {B >= 0} from p0.
double inflated_reach(const Scenario& s) {
  double reach = 0.0;
  for (const Vec& q : s.obstacle.q) {
    const double h = (q - s.obstacle.p0).norm();
    reach = std::max(reach, h + s.obstacle.d / h);
  }
  return reach;
}

}  // namespace

Box verify_window(const Scenario& s) {
  if (s.verify.window) return *s.verify.window;
  const Vec half = Vec::Constant(s.obstacle.p0.size(), inflated_reach(s) + 2.0 * s.shell.rho + 1.0);
  return Box(s.obstacle.p0 - half, s.obstacle.p0 + half);
}

double continuity_radius(const Scenario& s) {
  return s.verify.continuity_radius.value_or(1.25 * inflated_reach(s));
}

}  // namespace nscbf::app
