#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "oulab/curvature.hpp"
#include "oulab/mc.hpp"
#include "oulab/solver.hpp"

namespace oulab::config {

struct Measure {
  std::vector<double> eigenvalues;  // explicit list, or
  std::string generator;            // "inverse_pi_sq" with dimension
  int dimension = 0;
};

struct Phi {
  double constant = 0.0;
  std::vector<double> linear;
  std::vector<std::vector<double>> quad;
};

struct Domain {
  std::string tag;
  double band_delta = 1.0;
  // half_space
  std::vector<double> normal;
  double offset = 0.0;
  // sphere / ellipsoid
  std::vector<double> center;
  double radius = 0.0;
  std::vector<double> coefficients;
  // graph
  int axis = 0;
  Phi phi;
  bool has_phi = false;
  // integral_functional
  std::vector<double> g1d_numerator;
  std::vector<double> g1d_denominator;
  double level = 0.0;
  double a = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
};

struct Source {
  std::string kind = "one";  // one | zero | coordinate | bump | random_nodal
  int axis = 0;
  std::vector<double> center;
  double radius = 1.0;
  double amplitude = 1.0;
  int count = 1;  // random_nodal instances
};

struct Expect {
  std::optional<double> c_max;
  std::optional<double> c_value;
  double c_tol = 1e-3;
  bool cap_bounds = false;
  std::optional<std::string> admissibility;
  bool gradient_bound = false;
  std::optional<double> max_dev_stderr;
  std::optional<double> value;
  std::optional<double> tol;
  std::optional<double> upper_with_stderr;
  std::optional<double> monotone_within;  // diffs non-increasing within k * stderr
  bool bit_identical = false;
  std::optional<int> increasing_from;
  std::optional<double> final_min;
  std::optional<int> at_n;
  std::optional<double> at_value;
  double at_tol = 0.1;
  std::optional<double> constant_c;
};

struct CurvatureTask {
  int dimension = 0;  // 0 = measure dimension
  SamplerConfig sampler;
  Expect expect;
};

struct SolveChecks {
  std::optional<double> apriori;  // relative slack floor, e.g. 1e-6
  std::optional<double> energy;   // residual ceiling
  bool w22 = false;
  std::optional<double> trace;    // relative slack floor, e.g. 1e-4
  std::vector<int> boundary_identity_resolutions;
  double boundary_identity_min_ratio = 1.3;
};

struct SolveTask {
  int dimension = 1;
  std::vector<double> lambdas{1.0};
  GridSpec grid;
  Source source;
  SolveChecks checks;
  std::vector<std::vector<double>> probes;
  std::string export_name;  // writes <name>.bin / <name>.json next to the report
};

struct McTask {
  std::string mode = "resolvent";  // resolvent | semigroup | kernel | convergence
  double lambda = 1.0;
  double time = 1.0;
  std::vector<double> start;
  PathConfig path;
  Source source;
  std::vector<double> tgrid;
  std::vector<int> dims;
  Expect expect;
  std::string dump_path;  // per-path binary dump (resolvent mode)
};

struct SweepTask {
  std::string mode;  // witness | curvature | resolvent
  std::vector<int> dims;
  double radius = 0.0;  // witness radius override (0 = domain radius)
  SamplerConfig sampler;
  double lambda = 1.0;
  Source source;
  PathConfig path;
  std::vector<double> start;
  GridSpec grid;          // curvature mode: per-n solve for the W^{2,2} ratio
  bool has_grid = false;  // (only n <= 3 rows get one)
  Expect expect;
};

struct CrosscheckTask {
  int dimension = 1;
  double lambda = 1.0;
  Source source;
  std::vector<std::vector<double>> probes;
  GridSpec grid;
  PathConfig path;
  double extra_tolerance = 0.01;
};

struct Task {
  std::string type;
  CurvatureTask curvature;
  SolveTask solve;
  McTask mc;
  SweepTask sweep;
  CrosscheckTask crosscheck;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 1;
  Measure measure;
  Domain domain;
  std::vector<Task> tasks;
  std::string report_path = "report.json";
  std::string csv_path = "sweep.csv";
};

/// Strict parse: unknown fields anywhere raise ConfigInvalid.
Scenario parse_scenario(const nlohmann::json& doc);

}  // namespace oulab::config
