#include "scenario_internal.hpp"

#include <set>

namespace oulab::config {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigInvalid("config error at " + path + ": " + what);
}

void require_object(const json& node, const std::string& path) {
  if (!node.is_object()) fail(path, "expected an object");
}

void check_keys(const json& node, const std::set<std::string>& allowed, const std::string& path) {
  require_object(node, path);
  for (const auto& item : node.items()) {
    if (!allowed.count(item.key())) fail(path, "unknown field '" + item.key() + "'");
  }
}

double get_number(const json& node, const std::string& path) {
  if (!node.is_number()) fail(path, "expected a number");
  return node.get<double>();
}

int get_int(const json& node, const std::string& path) {
  if (!node.is_number_integer()) fail(path, "expected an integer");
  return node.get<int>();
}

std::string get_string(const json& node, const std::string& path) {
  if (!node.is_string()) fail(path, "expected a string");
  return node.get<std::string>();
}

bool get_bool(const json& node, const std::string& path) {
  if (!node.is_boolean()) fail(path, "expected a boolean");
  return node.get<bool>();
}

std::vector<double> get_vector(const json& node, const std::string& path) {
  if (!node.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (size_t i = 0; i < node.size(); ++i) out.push_back(get_number(node[i], path));
  return out;
}

std::vector<int> get_int_vector(const json& node, const std::string& path) {
  if (!node.is_array()) fail(path, "expected an array of integers");
  std::vector<int> out;
  for (size_t i = 0; i < node.size(); ++i) out.push_back(get_int(node[i], path));
  return out;
}

std::vector<std::vector<double>> get_matrix(const json& node, const std::string& path) {
  if (!node.is_array()) fail(path, "expected an array of arrays");
  std::vector<std::vector<double>> out;
  for (size_t i = 0; i < node.size(); ++i) out.push_back(get_vector(node[i], path));
  return out;
}

Measure parse_measure(const json& node, const std::string& path) {
  check_keys(node, {"eigenvalues", "generator", "dimension"}, path);
  Measure m;
  if (node.contains("eigenvalues")) m.eigenvalues = get_vector(node["eigenvalues"], path + ".eigenvalues");
  if (node.contains("generator")) m.generator = get_string(node["generator"], path + ".generator");
  if (node.contains("dimension")) m.dimension = get_int(node["dimension"], path + ".dimension");
  if (m.eigenvalues.empty() && m.generator.empty()) {
    fail(path, "measure needs either 'eigenvalues' or 'generator'");
  }
  if (!m.eigenvalues.empty() && !m.generator.empty()) {
    fail(path, "measure takes 'eigenvalues' or 'generator', not both");
  }
  if (!m.generator.empty() && m.generator != "inverse_pi_sq") {
    fail(path + ".generator", "unknown generator '" + m.generator + "'");
  }
  if (!m.generator.empty() && m.dimension < 1) {
    fail(path + ".dimension", "generator measures need a positive dimension");
  }
  return m;
}

Phi parse_phi(const json& node, const std::string& path) {
  check_keys(node, {"constant", "linear", "quad"}, path);
  Phi phi;
  if (node.contains("constant")) phi.constant = get_number(node["constant"], path + ".constant");
  if (node.contains("linear")) phi.linear = get_vector(node["linear"], path + ".linear");
  if (node.contains("quad")) phi.quad = get_matrix(node["quad"], path + ".quad");
  return phi;
}

Domain parse_domain(const json& node, const std::string& path) {
  check_keys(node,
             {"tag", "band_delta", "normal", "offset", "center", "radius", "coefficients", "axis",
              "phi", "g1d", "level", "a", "alpha", "beta"},
             path);
  Domain d;
  if (!node.contains("tag")) fail(path, "domain needs a 'tag'");
  d.tag = get_string(node["tag"], path + ".tag");
  const std::set<std::string> tags = {"half_space", "graph",        "sphere",
                                      "ellipsoid",  "whole_space", "integral_functional"};
  if (!tags.count(d.tag)) fail(path + ".tag", "unknown tag '" + d.tag + "'");
  if (node.contains("band_delta")) d.band_delta = get_number(node["band_delta"], path + ".band_delta");
  if (node.contains("normal")) d.normal = get_vector(node["normal"], path + ".normal");
  if (node.contains("offset")) d.offset = get_number(node["offset"], path + ".offset");
  if (node.contains("center")) d.center = get_vector(node["center"], path + ".center");
  if (node.contains("radius")) d.radius = get_number(node["radius"], path + ".radius");
  if (node.contains("coefficients")) {
    d.coefficients = get_vector(node["coefficients"], path + ".coefficients");
  }
  if (node.contains("axis")) d.axis = get_int(node["axis"], path + ".axis");
  if (node.contains("phi")) {
    d.phi = parse_phi(node["phi"], path + ".phi");
    d.has_phi = true;
  }
  if (node.contains("g1d")) {
    check_keys(node["g1d"], {"numerator", "denominator"}, path + ".g1d");
    if (node["g1d"].contains("numerator")) {
      d.g1d_numerator = get_vector(node["g1d"]["numerator"], path + ".g1d.numerator");
    }
    if (node["g1d"].contains("denominator")) {
      d.g1d_denominator = get_vector(node["g1d"]["denominator"], path + ".g1d.denominator");
    }
  }
  if (node.contains("level")) d.level = get_number(node["level"], path + ".level");
  if (node.contains("a")) d.a = get_number(node["a"], path + ".a");
  if (node.contains("alpha")) d.alpha = get_number(node["alpha"], path + ".alpha");
  if (node.contains("beta")) d.beta = get_number(node["beta"], path + ".beta");

  if (d.tag == "half_space" && d.normal.empty()) fail(path, "half_space needs 'normal'");
  if (d.tag == "sphere" && !(d.radius > 0.0)) fail(path, "sphere needs a positive 'radius'");
  if (d.tag == "ellipsoid" && (d.coefficients.empty() || !(d.radius > 0.0))) {
    fail(path, "ellipsoid needs 'coefficients' and a positive 'radius'");
  }
  if (d.tag == "graph" && !d.has_phi) fail(path, "graph needs 'phi'");
  if (d.tag == "integral_functional" && d.g1d_numerator.empty()) {
    fail(path, "integral_functional needs 'g1d'");
  }
  return d;
}

Source parse_source(const json& node, const std::string& path) {
  check_keys(node, {"kind", "axis", "center", "radius", "amplitude", "count"}, path);
  Source s;
  if (node.contains("kind")) s.kind = get_string(node["kind"], path + ".kind");
  const std::set<std::string> kinds = {"one", "zero", "coordinate", "bump", "random_nodal"};
  if (!kinds.count(s.kind)) fail(path + ".kind", "unknown source kind '" + s.kind + "'");
  if (node.contains("axis")) s.axis = get_int(node["axis"], path + ".axis");
  if (node.contains("center")) s.center = get_vector(node["center"], path + ".center");
  if (node.contains("radius")) s.radius = get_number(node["radius"], path + ".radius");
  if (node.contains("amplitude")) s.amplitude = get_number(node["amplitude"], path + ".amplitude");
  if (node.contains("count")) s.count = get_int(node["count"], path + ".count");
  if (s.count < 1) fail(path + ".count", "count must be >= 1");
  return s;
}

Expect parse_expect(const json& node, const std::string& path) {
  check_keys(node,
             {"c_max", "c_value", "c_tol", "cap_bounds", "admissibility", "gradient_bound",
              "max_dev_stderr", "value", "tol", "upper_with_stderr", "monotone_within",
              "bit_identical", "increasing_from", "final_min", "at_n", "at_value", "at_tol",
              "constant_c"},
             path);
  Expect e;
  if (node.contains("c_max")) e.c_max = get_number(node["c_max"], path + ".c_max");
  if (node.contains("c_value")) e.c_value = get_number(node["c_value"], path + ".c_value");
  if (node.contains("c_tol")) e.c_tol = get_number(node["c_tol"], path + ".c_tol");
  if (node.contains("cap_bounds")) e.cap_bounds = get_bool(node["cap_bounds"], path + ".cap_bounds");
  if (node.contains("admissibility")) {
    e.admissibility = get_string(node["admissibility"], path + ".admissibility");
  }
  if (node.contains("gradient_bound")) {
    e.gradient_bound = get_bool(node["gradient_bound"], path + ".gradient_bound");
  }
  if (node.contains("max_dev_stderr")) {
    e.max_dev_stderr = get_number(node["max_dev_stderr"], path + ".max_dev_stderr");
  }
  if (node.contains("value")) e.value = get_number(node["value"], path + ".value");
  if (node.contains("tol")) e.tol = get_number(node["tol"], path + ".tol");
  if (node.contains("upper_with_stderr")) {
    e.upper_with_stderr = get_number(node["upper_with_stderr"], path + ".upper_with_stderr");
  }
  if (node.contains("monotone_within")) {
    e.monotone_within = get_number(node["monotone_within"], path + ".monotone_within");
  }
  if (node.contains("bit_identical")) {
    e.bit_identical = get_bool(node["bit_identical"], path + ".bit_identical");
  }
  if (node.contains("increasing_from")) {
    e.increasing_from = get_int(node["increasing_from"], path + ".increasing_from");
  }
  if (node.contains("final_min")) e.final_min = get_number(node["final_min"], path + ".final_min");
  if (node.contains("at_n")) e.at_n = get_int(node["at_n"], path + ".at_n");
  if (node.contains("at_value")) e.at_value = get_number(node["at_value"], path + ".at_value");
  if (node.contains("at_tol")) e.at_tol = get_number(node["at_tol"], path + ".at_tol");
  if (node.contains("constant_c")) e.constant_c = get_number(node["constant_c"], path + ".constant_c");
  return e;
}

void parse_sampler_fields(const json& node, SamplerConfig& sampler, const std::string& path) {
  if (node.contains("starts")) sampler.starts = get_int(node["starts"], path + ".starts");
  if (node.contains("ascent_iterations")) {
    sampler.ascent_iterations = get_int(node["ascent_iterations"], path + ".ascent_iterations");
  }
  if (node.contains("fd_step")) sampler.fd_step = get_number(node["fd_step"], path + ".fd_step");
  if (node.contains("band_samples")) {
    sampler.band_samples = get_int(node["band_samples"], path + ".band_samples");
  }
  if (node.contains("box_halfwidth")) {
    sampler.box_halfwidth = get_number(node["box_halfwidth"], path + ".box_halfwidth");
  }
}

void parse_grid_fields(const json& node, GridSpec& g, const std::string& path) {
  if (node.contains("resolution")) g.resolution = get_int(node["resolution"], path + ".resolution");
  if (node.contains("box_halfwidth")) {
    g.box_halfwidth = get_number(node["box_halfwidth"], path + ".box_halfwidth");
  }
  if (node.contains("boundary_scheme")) {
    const std::string s = get_string(node["boundary_scheme"], path + ".boundary_scheme");
    if (s == "cut") {
      g.scheme = BoundaryScheme::cut;
    } else if (s == "mask") {
      g.scheme = BoundaryScheme::mask;
    } else {
      fail(path + ".boundary_scheme", "expected 'cut' or 'mask'");
    }
  }
}

GridSpec parse_grid(const json& node, const std::string& path) {
  check_keys(node, {"resolution", "box_halfwidth", "boundary_scheme"}, path);
  GridSpec g;
  parse_grid_fields(node, g, path);
  return g;
}

void parse_path_fields(const json& node, PathConfig& path_cfg, const std::string& path) {
  if (node.contains("paths")) path_cfg.paths = static_cast<long>(get_number(node["paths"], path + ".paths"));
  if (node.contains("step")) path_cfg.step = get_number(node["step"], path + ".step");
  if (node.contains("t_max")) path_cfg.t_max = get_number(node["t_max"], path + ".t_max");
  if (node.contains("bridge")) path_cfg.bridge = get_bool(node["bridge"], path + ".bridge");
  if (node.contains("dimension")) path_cfg.dimension = get_int(node["dimension"], path + ".dimension");
}

Task parse_task(const json& node, const std::string& path) {
  require_object(node, path);
  if (!node.contains("type")) fail(path, "task needs a 'type'");
  Task task;
  task.type = get_string(node["type"], path + ".type");
  if (task.type == "curvature") {
    check_keys(node,
               {"type", "dimension", "starts", "ascent_iterations", "fd_step", "band_samples",
                "box_halfwidth", "expect"},
               path);
    if (node.contains("dimension")) {
      task.curvature.dimension = get_int(node["dimension"], path + ".dimension");
    }
    parse_sampler_fields(node, task.curvature.sampler, path);
    if (node.contains("expect")) task.curvature.expect = parse_expect(node["expect"], path + ".expect");
  } else if (task.type == "solve") {
    check_keys(node, {"type", "dimension", "lambda", "lambdas", "resolution", "box_halfwidth",
                      "boundary_scheme", "source", "checks", "probes", "export"},
               path);
    if (node.contains("export")) {
      task.solve.export_name = get_string(node["export"], path + ".export");
    }
    if (node.contains("dimension")) task.solve.dimension = get_int(node["dimension"], path + ".dimension");
    if (node.contains("lambda")) task.solve.lambdas = {get_number(node["lambda"], path + ".lambda")};
    if (node.contains("lambdas")) task.solve.lambdas = get_vector(node["lambdas"], path + ".lambdas");
    for (double lambda : task.solve.lambdas) {
      if (!(lambda > 0.0)) fail(path, "solve tasks need lambda > 0");
    }
    parse_grid_fields(node, task.solve.grid, path);
    if (node.contains("source")) task.solve.source = parse_source(node["source"], path + ".source");
    if (node.contains("checks")) {
      const auto& c = node["checks"];
      check_keys(c,
                 {"apriori", "energy", "w22", "trace", "boundary_identity_resolutions",
                  "boundary_identity_min_ratio"},
                 path + ".checks");
      if (c.contains("apriori")) task.solve.checks.apriori = get_number(c["apriori"], path + ".checks.apriori");
      if (c.contains("energy")) task.solve.checks.energy = get_number(c["energy"], path + ".checks.energy");
      if (c.contains("w22")) task.solve.checks.w22 = get_bool(c["w22"], path + ".checks.w22");
      if (c.contains("trace")) task.solve.checks.trace = get_number(c["trace"], path + ".checks.trace");
      if (c.contains("boundary_identity_resolutions")) {
        task.solve.checks.boundary_identity_resolutions =
            get_int_vector(c["boundary_identity_resolutions"], path + ".checks");
      }
      if (c.contains("boundary_identity_min_ratio")) {
        task.solve.checks.boundary_identity_min_ratio =
            get_number(c["boundary_identity_min_ratio"], path + ".checks");
      }
    }
    if (node.contains("probes")) task.solve.probes = get_matrix(node["probes"], path + ".probes");
  } else if (task.type == "mc") {
    check_keys(node, {"type", "mode", "lambda", "time", "start", "paths", "step", "t_max",
                      "bridge", "dimension", "source", "tgrid", "dims", "expect", "dump"},
               path);
    if (node.contains("dump")) task.mc.dump_path = get_string(node["dump"], path + ".dump");
    if (node.contains("mode")) task.mc.mode = get_string(node["mode"], path + ".mode");
    const std::set<std::string> modes = {"resolvent", "semigroup", "kernel", "convergence"};
    if (!modes.count(task.mc.mode)) fail(path + ".mode", "unknown mc mode '" + task.mc.mode + "'");
    if (node.contains("lambda")) task.mc.lambda = get_number(node["lambda"], path + ".lambda");
    if ((task.mc.mode == "resolvent" || task.mc.mode == "convergence") && !(task.mc.lambda > 0.0)) {
      fail(path, "mc tasks need lambda > 0");
    }
    if (node.contains("time")) task.mc.time = get_number(node["time"], path + ".time");
    if (node.contains("start")) task.mc.start = get_vector(node["start"], path + ".start");
    parse_path_fields(node, task.mc.path, path);
    if (node.contains("source")) task.mc.source = parse_source(node["source"], path + ".source");
    if (node.contains("tgrid")) task.mc.tgrid = get_vector(node["tgrid"], path + ".tgrid");
    if (node.contains("dims")) task.mc.dims = get_int_vector(node["dims"], path + ".dims");
    if (node.contains("expect")) task.mc.expect = parse_expect(node["expect"], path + ".expect");
  } else if (task.type == "sweep") {
    check_keys(node, {"type", "mode", "dims", "radius", "starts", "ascent_iterations", "fd_step",
                      "band_samples", "box_halfwidth", "lambda", "source", "paths", "step",
                      "t_max", "bridge", "start", "solve", "expect"},
               path);
    if (node.contains("solve")) {
      task.sweep.grid = parse_grid(node["solve"], path + ".solve");
      task.sweep.has_grid = true;
    }
    if (!node.contains("mode")) fail(path, "sweep needs a 'mode'");
    task.sweep.mode = get_string(node["mode"], path + ".mode");
    const std::set<std::string> modes = {"witness", "curvature", "resolvent"};
    if (!modes.count(task.sweep.mode)) fail(path + ".mode", "unknown sweep mode");
    if (!node.contains("dims")) fail(path, "sweep needs 'dims'");
    task.sweep.dims = get_int_vector(node["dims"], path + ".dims");
    if (node.contains("radius")) task.sweep.radius = get_number(node["radius"], path + ".radius");
    parse_sampler_fields(node, task.sweep.sampler, path);
    if (node.contains("lambda")) task.sweep.lambda = get_number(node["lambda"], path + ".lambda");
    if (node.contains("source")) task.sweep.source = parse_source(node["source"], path + ".source");
    parse_path_fields(node, task.sweep.path, path);
    if (node.contains("start")) task.sweep.start = get_vector(node["start"], path + ".start");
    if (node.contains("expect")) task.sweep.expect = parse_expect(node["expect"], path + ".expect");
  } else if (task.type == "crosscheck") {
    check_keys(node, {"type", "dimension", "lambda", "source", "probes", "solve", "mc",
                      "extra_tolerance"},
               path);
    if (node.contains("dimension")) {
      task.crosscheck.dimension = get_int(node["dimension"], path + ".dimension");
    }
    if (node.contains("lambda")) task.crosscheck.lambda = get_number(node["lambda"], path + ".lambda");
    if (node.contains("source")) {
      task.crosscheck.source = parse_source(node["source"], path + ".source");
    }
    if (!node.contains("probes")) fail(path, "crosscheck needs 'probes'");
    task.crosscheck.probes = get_matrix(node["probes"], path + ".probes");
    if (node.contains("solve")) task.crosscheck.grid = parse_grid(node["solve"], path + ".solve");
    if (node.contains("mc")) {
      check_keys(node["mc"], {"paths", "step", "t_max", "bridge", "dimension"}, path + ".mc");
      parse_path_fields(node["mc"], task.crosscheck.path, path + ".mc");
    }
    if (node.contains("extra_tolerance")) {
      task.crosscheck.extra_tolerance = get_number(node["extra_tolerance"], path + ".extra_tolerance");
    }
  } else {
    fail(path + ".type", "unknown task type '" + task.type + "'");
  }
  return task;
}

}  // namespace

Scenario parse_scenario(const json& doc) {
  check_keys(doc, {"name", "seed", "measure", "domain", "tasks", "output"}, "$");
  Scenario sc;
  if (doc.contains("name")) sc.name = get_string(doc["name"], "$.name");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer() && !doc["seed"].is_number_unsigned()) {
      fail("$.seed", "expected an integer");
    }
    sc.seed = doc["seed"].get<std::uint64_t>();
  }
  if (!doc.contains("measure")) fail("$", "scenario needs a 'measure'");
  sc.measure = parse_measure(doc["measure"], "$.measure");
  if (!doc.contains("domain")) fail("$", "scenario needs a 'domain'");
  sc.domain = parse_domain(doc["domain"], "$.domain");
  if (doc.contains("tasks")) {
    if (!doc["tasks"].is_array()) fail("$.tasks", "expected an array");
    for (size_t i = 0; i < doc["tasks"].size(); ++i) {
      sc.tasks.push_back(parse_task(doc["tasks"][i], "$.tasks[" + std::to_string(i) + "]"));
    }
  }
  if (doc.contains("output")) {
    check_keys(doc["output"], {"report", "csv"}, "$.output");
    if (doc["output"].contains("report")) {
      sc.report_path = get_string(doc["output"]["report"], "$.output.report");
    }
    if (doc["output"].contains("csv")) {
      sc.csv_path = get_string(doc["output"]["csv"], "$.output.csv");
    }
  }
  return sc;
}

}  // namespace oulab::config
