#include "oulab/harness.hpp"

#include <array>
#include <utility>

namespace oulab {

namespace {

// Half-space <b,x> < c: constant boundary curvature c / sum lambda_k b_k^2,
// plus the a-priori and energy checks on the 1-D section.
constexpr const char* kHalfspaceBaseline = R"json({
  "name": "halfspace_baseline",
  "seed": 1101,
  "measure": {"eigenvalues": [1.0, 0.5]},
  "domain": {"tag": "half_space", "normal": [1.0, 0.0], "offset": 1.0, "band_delta": 1.0},
  "tasks": [
    {"type": "curvature", "dimension": 2,
     "expect": {"c_value": 1.0, "c_tol": 1e-6, "cap_bounds": true}},
    {"type": "solve", "dimension": 1, "lambdas": [0.5, 1.0, 2.0],
     "resolution": 400, "box_halfwidth": 6.0, "source": {"kind": "one"},
     "checks": {"apriori": 1e-6, "energy": 1e-6}}
  ],
  "output": {"report": "report.json"}
})json";

// Sphere criteria on the inverse-square spectrum: r = 0.1 admissible with
// sampled curvature <= 0, r = 0.5 inadmissible with a blowing-up witness.
constexpr const char* kSphereDichotomy = R"json({
  "name": "sphere_dichotomy",
  "seed": 1102,
  "measure": {"generator": "inverse_pi_sq", "dimension": 50},
  "domain": {"tag": "sphere", "center": [], "radius": 0.1, "band_delta": 0.005},
  "tasks": [
    {"type": "curvature", "dimension": 10, "starts": 64, "ascent_iterations": 30,
     "expect": {"admissibility": "admissible", "c_max": 1e-3}},
    {"type": "sweep", "mode": "curvature", "dims": [10, 25, 50],
     "starts": 64, "ascent_iterations": 30, "band_samples": 1024,
     "expect": {"c_max": 1e-3}},
    {"type": "sweep", "mode": "witness", "radius": 0.5,
     "dims": [2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20,21,22,23,24,25,
              26,27,28,29,30,31,32,33,34,35,36,37,38,39,40,41,42,43,44,45,46,47,48,49,50],
     "expect": {"admissibility": "inadmissible", "increasing_from": 3,
                "at_n": 10, "at_value": 185.5266738211599, "at_tol": 0.1,
                "final_min": 1000.0}}
  ],
  "output": {"report": "report.json", "csv": "sweep.csv"}
})json";

// Admissible small ball: W^{2,2} ratio against the dimension-free constant,
// with M = 8 exactly when the sampled curvature is nonpositive (n = 2).
constexpr const char* kBallW22Bound = R"json({
  "name": "ball_w22_bound",
  "seed": 1103,
  "measure": {"generator": "inverse_pi_sq", "dimension": 2},
  "domain": {"tag": "sphere", "center": [], "radius": 0.1, "band_delta": 0.005},
  "tasks": [
    {"type": "curvature", "dimension": 1,
     "expect": {"c_value": 4.934802200544679, "c_tol": 1e-4}},
    {"type": "curvature", "dimension": 2,
     "expect": {"c_value": -7.565197799455317, "c_tol": 1e-2, "c_max": 0.0,
                "cap_bounds": true}},
    {"type": "solve", "dimension": 1, "lambda": 1.0,
     "resolution": 256, "box_halfwidth": 0.4, "source": {"kind": "one"},
     "checks": {"apriori": 1e-6, "energy": 1e-6, "w22": true}},
    {"type": "solve", "dimension": 2, "lambda": 1.0,
     "resolution": 128, "box_halfwidth": 0.8, "source": {"kind": "one"},
     "checks": {"apriori": 1e-6, "energy": 1e-6, "w22": true, "trace": 1e-4}}
  ],
  "output": {"report": "report.json"}
})json";

// G(x) = integral_0^1 g(x(s)) ds - r with g(xi) = xi on L^2(0,1): gradient
// lower bound, curvature upper bound, and the capped-field bounds.
constexpr const char* kIntegralFunctionalCheck = R"json({
  "name": "integral_functional_check",
  "seed": 1104,
  "measure": {"generator": "inverse_pi_sq", "dimension": 6},
  "domain": {"tag": "integral_functional", "g1d": {"numerator": [0.0, 1.0]},
             "level": 0.3, "a": 1.0, "alpha": 1.0, "beta": 0.0, "band_delta": 0.1},
  "tasks": [
    {"type": "curvature", "starts": 96, "ascent_iterations": 25, "band_samples": 2048,
     "expect": {"gradient_bound": true, "cap_bounds": true}}
  ],
  "output": {"report": "report.json"}
})json";

// Appendix covariance kernel of the OU path law, plus the free-space
// resolvent sanity value 1/lambda.
constexpr const char* kKernelValidation = R"json({
  "name": "kernel_validation",
  "seed": 1105,
  "measure": {"eigenvalues": [1.0]},
  "domain": {"tag": "whole_space"},
  "tasks": [
    {"type": "mc", "mode": "kernel", "start": [0.7], "paths": 100000,
     "step": 0.05, "t_max": 1.0, "tgrid": [0.25, 0.5, 1.0],
     "expect": {"max_dev_stderr": 4.0}},
    {"type": "mc", "mode": "resolvent", "lambda": 2.0, "start": [0.0],
     "paths": 64, "step": 0.001, "t_max": 12.0, "source": {"kind": "one"},
     "expect": {"value": 0.5, "tol": 1e-3, "upper_with_stderr": 0.5}}
  ],
  "output": {"report": "report.json"}
})json";

// Killed-process resolvent versus the grid solve on the interval (-1,1);
// the bridge correction removes the O(sqrt(step)) discrete-exit bias.
constexpr const char* kPdeMcCrosscheck = R"json({
  "name": "pde_mc_crosscheck",
  "seed": 1106,
  "measure": {"eigenvalues": [1.0]},
  "domain": {"tag": "sphere", "center": [0.0], "radius": 1.0, "band_delta": 0.5},
  "tasks": [
    {"type": "crosscheck", "dimension": 1, "lambda": 1.0,
     "source": {"kind": "one"},
     "probes": [[-0.5], [0.0], [0.5]],
     "solve": {"resolution": 2000, "box_halfwidth": 6.0},
     "mc": {"paths": 200000, "step": 0.001, "t_max": 12.0, "bridge": true},
     "extra_tolerance": 0.01}
  ],
  "output": {"report": "report.json"}
})json";

constexpr std::array<std::pair<const char*, const char*>, 6> kBundled = {{
    {"halfspace_baseline", kHalfspaceBaseline},
    {"sphere_dichotomy", kSphereDichotomy},
    {"ball_w22_bound", kBallW22Bound},
    {"integral_functional_check", kIntegralFunctionalCheck},
    {"kernel_validation", kKernelValidation},
    {"pde_mc_crosscheck", kPdeMcCrosscheck},
}};

}  // namespace

std::vector<std::string> bundled_scenario_names() {
  std::vector<std::string> names;
  names.reserve(kBundled.size());
  for (const auto& [name, text] : kBundled) names.emplace_back(name);
  return names;
}

const char* bundled_scenario(const std::string& name) {
  for (const auto& [key, text] : kBundled) {
    if (name == key) return text;
  }
  return nullptr;
}

}  // namespace oulab
