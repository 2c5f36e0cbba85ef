#pragma once

#include <nscbf/controller.hpp>
#include <nscbf/simulation.hpp>

namespace nscbf::testing {

inline Vec v2(double a, double b) { return make_vec({a, b}); }

// Rectangle [1,3]^2 centered at (2,2) with margin 0.5; the formula examples
// are stated for this geometry.
inline RectangleObstacleSpec centered_spec() {
  return {v2(2, 2), {v2(1, 2), v2(3, 2), v2(2, 1), v2(2, 3)}, 0.5};
}

// Geometry of the bundled scenario: rectangle [1,3]x[-2,0].
inline RectangleObstacleSpec scenario_spec() {
  return {v2(2, -1), {v2(1, -1), v2(3, -1), v2(2, -2), v2(2, 0)}, 0.5};
}

inline Mat example_a() {
  Mat a(2, 2);
  a << 0, 1, -1, -1;
  return a;
}

inline LinearInclusion example_system() { return LinearInclusion(example_a(), Mat::Identity(2, 2)); }

inline LinearInclusion disturbed_system(double w) {
  return LinearInclusion(example_a(), Mat::Identity(2, 2),
                         ConvexPolytope::from_box(Box::symmetric(2, w)));
}

inline SafeController centered_controller(SmoothingParams p = {}) {
  return SafeController(from_rectangle(centered_spec()).barrier, example_system(), p);
}

inline SafeController scenario_controller(SmoothingParams p = {}) {
  return SafeController(from_rectangle(scenario_spec()).barrier, example_system(), p);
}

inline SmoothingParams unsmoothed() {
  SmoothingParams p;
  p.blend = false;
  return p;
}

}  // namespace nscbf::testing
