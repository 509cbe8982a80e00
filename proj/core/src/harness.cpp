#include "oulab/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "oulab/rng.hpp"
#include "scenario_internal.hpp"

namespace oulab {

using nlohmann::json;

namespace {

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

std::string format17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Verdict {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::string comparison;  // "<=", ">=", "=="
  bool pass = false;

  json to_json() const {
    return json{{"name", name},
                {"value", value},
                {"threshold", threshold},
                {"comparison", comparison},
                {"pass", pass}};
  }
};

Verdict make_le(std::string name, double value, double threshold) {
  return Verdict{std::move(name), value, threshold, "<=", value <= threshold};
}
Verdict make_ge(std::string name, double value, double threshold) {
  return Verdict{std::move(name), value, threshold, ">=", value >= threshold};
}
Verdict make_eq(std::string name, double value, double threshold) {
  return Verdict{std::move(name), value, threshold, "==", value == threshold};
}

struct ScenarioContext {
  config::Scenario scenario;
  SpectralGaussian measure = SpectralGaussian::make({1.0});
  std::unique_ptr<LevelSetDomain> domain;
  IntegralFunctionalDiagnostics if_diag;
  bool has_if_diag = false;
  std::string out_dir = ".";
  bool write_files = true;

  struct SweepRow {
    int n = 0;
    double h_sup = std::numeric_limits<double>::quiet_NaN();
    double witness = std::numeric_limits<double>::quiet_NaN();
    double a = std::numeric_limits<double>::quiet_NaN();
    double b = std::numeric_limits<double>::quiet_NaN();
    double c = std::numeric_limits<double>::quiet_NaN();
    double k_sq = std::numeric_limits<double>::quiet_NaN();
    double w22_ratio = std::numeric_limits<double>::quiet_NaN();
    double mc_estimate = std::numeric_limits<double>::quiet_NaN();
    double mc_stderr = std::numeric_limits<double>::quiet_NaN();
  };
  std::vector<SweepRow> sweep_rows;
};

SpectralGaussian build_measure(const config::Measure& spec) {
  if (!spec.generator.empty()) return SpectralGaussian::inverse_pi_sq(spec.dimension);
  return SpectralGaussian::make(spec.eigenvalues);
}

std::vector<double> padded(const std::vector<double>& v, int dim) {
  std::vector<double> out(static_cast<size_t>(dim), 0.0);
  for (size_t i = 0; i < v.size() && i < out.size(); ++i) out[i] = v[i];
  return out;
}

std::unique_ptr<LevelSetDomain> build_domain(const config::Domain& spec,
                                             const SpectralGaussian& measure,
                                             ScenarioContext& ctx, std::uint64_t seed) {
  const int dim = measure.dimension();
  if (spec.tag == "half_space") {
    return std::make_unique<LevelSetDomain>(
        LevelSetDomain::half_space(padded(spec.normal, dim), spec.offset, spec.band_delta));
  }
  if (spec.tag == "sphere") {
    return std::make_unique<LevelSetDomain>(
        LevelSetDomain::sphere(padded(spec.center, dim), spec.radius, spec.band_delta));
  }
  if (spec.tag == "ellipsoid") {
    if (static_cast<int>(spec.coefficients.size()) != dim) {
      throw ConfigInvalid("ellipsoid coefficients must match the measure dimension");
    }
    return std::make_unique<LevelSetDomain>(LevelSetDomain::ellipsoid(
        spec.coefficients, padded(spec.center, dim), spec.radius, spec.band_delta));
  }
  if (spec.tag == "graph") {
    GraphPhi phi;
    phi.constant = spec.phi.constant;
    phi.linear = spec.phi.linear;
    phi.quad = spec.phi.quad;
    return std::make_unique<LevelSetDomain>(
        LevelSetDomain::graph(std::move(phi), spec.axis, dim, spec.band_delta));
  }
  if (spec.tag == "whole_space") {
    return std::make_unique<LevelSetDomain>(LevelSetDomain::whole_space(dim));
  }
  if (spec.tag == "integral_functional") {
    Rational1D g1d(spec.g1d_numerator, spec.g1d_denominator);
    ctx.has_if_diag = true;
    return std::make_unique<LevelSetDomain>(integral_functional_domain(
        measure, std::move(g1d), spec.level, dim, spec.a, spec.alpha, spec.beta, spec.band_delta,
        &ctx.if_diag, 2048, seed));
  }
  throw ConfigInvalid("unknown domain tag '" + spec.tag + "'");
}

/// Scenario source -> grid source field. random_nodal kinds are materialized
/// separately (they need the grid). MC tasks accept only function-like kinds.
SourceField make_field(const config::Source& src, int dim) {
  const double amp = src.amplitude;
  if (src.kind == "one") {
    return [amp](std::span<const double>) { return amp; };
  }
  if (src.kind == "zero") {
    return [](std::span<const double>) { return 0.0; };
  }
  if (src.kind == "coordinate") {
    const int axis = src.axis;
    return [amp, axis](std::span<const double> x) {
      return axis < static_cast<int>(x.size()) ? amp * x[static_cast<size_t>(axis)] : 0.0;
    };
  }
  if (src.kind == "bump") {
    std::vector<double> center = padded(src.center, dim);
    const double radius = src.radius;
    return [amp, radius, center](std::span<const double> x) {
      double s_sq = 0.0;
      for (size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - (i < center.size() ? center[i] : 0.0);
        s_sq += d * d;
      }
      s_sq /= radius * radius;
      if (s_sq >= 1.0) return 0.0;
      return amp * std::exp(1.0 - 1.0 / (1.0 - s_sq));
    };
  }
  throw ConfigInvalid("source kind '" + src.kind + "' is not a pointwise field");
}

std::vector<double> random_nodal_source(const GridDomain& grid, double amplitude,
                                        std::uint64_t seed) {
  rng::Sequence rnd(seed);
  std::vector<double> f(grid.size());
  for (auto& v : f) v = amplitude * rnd.normal();
  return f;
}

json estimate_json(const McEstimate& est) {
  return json{{"estimate", est.estimate},  {"std_error", est.std_error},
              {"tail_bound", est.tail_bound}, {"paths", est.paths},
              {"censored", est.censored}};
}

// -- task runners -----------------------------------------------------------

json run_curvature_task(ScenarioContext& ctx, const config::CurvatureTask& task,
                        std::vector<Verdict>& verdicts, std::uint64_t seed) {
  const int dim = task.dimension > 0 ? task.dimension : ctx.measure.dimension();
  const SpectralGaussian m = ctx.measure.head(dim);
  const LevelSetDomain d = ctx.domain->truncate(dim);
  SamplerConfig sampler = task.sampler;
  sampler.seed = rng::mix(seed ^ 0x5u);
  const CurvatureReport report = constants_ABC(m, d, sampler);

  json out;
  out["dimension"] = dim;
  out["A"] = report.A;
  out["B"] = report.B;
  out["C"] = report.C;
  out["band_a"] = report.band_a;
  out["band_b"] = report.band_b;
  out["delta"] = report.delta;
  out["sample_count"] = report.sample_count;
  out["boundary_points"] = report.boundary_points;
  out["ascent_iterations"] = report.ascent_iterations;
  out["degenerate_skipped"] = report.degenerate_skipped;
  out["is_lower_bound_estimate"] = report.is_lower_bound_estimate;

  const auto& dom = ctx.scenario.domain;
  if (dom.tag == "sphere") {
    const auto verdict =
        sphere_admissibility(ctx.measure, padded(dom.center, ctx.measure.dimension()), dom.radius);
    out["admissibility"] = to_string(verdict);
    out["admissibility_lhs"] = dom.radius * (std::sqrt([&] {
                                 double s = 0.0;
                                 for (double v : dom.center) s += v * v;
                                 return s;
                               }()) + dom.radius);
    out["tail_trace"] = ctx.measure.tail_trace(1);
    out["trace"] = ctx.measure.trace();
    if (task.expect.admissibility) {
      verdicts.push_back(Verdict{"admissibility_is_" + *task.expect.admissibility,
                                 static_cast<double>(to_string(verdict) == *task.expect.admissibility),
                                 1.0, "==",
                                 to_string(verdict) == *task.expect.admissibility});
    }
  } else if (dom.tag == "ellipsoid") {
    const bool ok = ellipsoid_admissibility(ctx.measure, dom.coefficients,
                                            padded(dom.center, ctx.measure.dimension()), dom.radius);
    out["admissibility"] = ok ? "admissible" : "undetermined";
    if (task.expect.admissibility) {
      const std::string got = ok ? "admissible" : "undetermined";
      verdicts.push_back(Verdict{"admissibility_is_" + *task.expect.admissibility,
                                 static_cast<double>(got == *task.expect.admissibility), 1.0, "==",
                                 got == *task.expect.admissibility});
    }
  }
  if (ctx.has_if_diag) {
    out["integral_functional"] = json{{"grad_lower_bound", ctx.if_diag.grad_lower_bound},
                                      {"sampled_grad_min", ctx.if_diag.sampled_grad_min},
                                      {"h_sup_bound", ctx.if_diag.h_sup_bound},
                                      {"min_g1d_prime", ctx.if_diag.min_g1d_prime},
                                      {"min_g1d_second", ctx.if_diag.min_g1d_second},
                                      {"gradient_ok", ctx.if_diag.gradient_ok},
                                      {"growth_ok", ctx.if_diag.growth_ok}};
    if (task.expect.gradient_bound) {
      verdicts.push_back(make_ge("if_gradient_lower_bound", ctx.if_diag.sampled_grad_min,
                                 ctx.if_diag.grad_lower_bound));
      verdicts.push_back(make_le("if_sampled_c_below_bound", report.C,
                                 ctx.if_diag.h_sup_bound + 1e-6));
    }
  }

  if (task.expect.c_max) verdicts.push_back(make_le("sampled_c_max", report.C, *task.expect.c_max));
  if (task.expect.c_value) {
    verdicts.push_back(
        make_le("sampled_c_matches", std::abs(report.C - *task.expect.c_value), task.expect.c_tol));
  }
  if (task.expect.cap_bounds) {
    verdicts.push_back(make_le("cap_a_bound", report.A, report.band_a + 1e-9));
    verdicts.push_back(make_le("cap_b_bound", report.B,
                               report.band_b + 3.0 * report.band_a * report.band_a / report.delta +
                                   1e-9));
  }
  return out;
}

json run_solve_task(ScenarioContext& ctx, const config::SolveTask& task,
                    std::vector<Verdict>& verdicts, std::uint64_t seed) {
  const int dim = task.dimension;
  const SpectralGaussian m = ctx.measure.head(dim);
  const LevelSetDomain d = ctx.domain->truncate(dim);
  auto grid = std::make_shared<const GridDomain>(discretize(m, d, task.grid));

  json out;
  out["dimension"] = dim;
  out["interior_cells"] = grid->size();
  out["resolution"] = task.grid.resolution;

  std::optional<CurvatureReport> curvature;
  if (task.checks.w22 || task.checks.trace) {
    SamplerConfig sampler;
    sampler.seed = rng::mix(seed ^ 0x7u);
    curvature = constants_ABC(m, d, sampler);
    out["curvature"] = json{{"A", curvature->A}, {"B", curvature->B}, {"C", curvature->C}};
  }

  double min_apriori_i = std::numeric_limits<double>::infinity();
  double min_apriori_ii = std::numeric_limits<double>::infinity();
  double max_energy = 0.0;
  double max_w22_ratio = 0.0;
  double min_k_sq = std::numeric_limits<double>::infinity();
  double min_trace_slack = std::numeric_limits<double>::infinity();
  double m_constant = 0.0;

  json solves = json::array();
  int instance_count = (task.source.kind == "random_nodal") ? task.source.count : 1;
  for (size_t li = 0; li < task.lambdas.size(); ++li) {
    const double lambda = task.lambdas[li];
    for (int inst = 0; inst < instance_count; ++inst) {
      GridSolution sol;
      if (task.source.kind == "random_nodal") {
        const std::uint64_t fseed = rng::mix(seed ^ (0x100u + li * 64 + static_cast<size_t>(inst)));
        sol = solve_dirichlet(m, grid, random_nodal_source(*grid, task.source.amplitude, fseed),
                              lambda);
      } else {
        sol = solve_dirichlet(m, grid, make_field(task.source, dim), lambda);
      }
      json entry;
      entry["lambda"] = lambda;
      entry["instance"] = inst;
      entry["rel_residual"] = sol.rel_residual;
      entry["l2_sq"] = sol.l2_sq;
      entry["f_l2_sq"] = sol.f_l2_sq;
      entry["dirichlet_energy"] = sol.dirichlet_energy;
      if (task.checks.energy) {
        const double res = check_energy_identity(m, sol);
        entry["energy_residual"] = res;
        max_energy = std::max(max_energy, res);
      }
      if (task.checks.apriori) {
        const auto [si, sii] = check_apriori(m, sol);
        const double norm = sol.f_l2_sq > 0.0 ? sol.f_l2_sq : 1.0;
        entry["apriori_slack_i_rel"] = si / norm;
        entry["apriori_slack_ii_rel"] = sii / norm;
        min_apriori_i = std::min(min_apriori_i, si / norm);
        min_apriori_ii = std::min(min_apriori_ii, sii / norm);
      }
      if (task.checks.w22 && curvature) {
        const W22Check w = check_w22_bound(m, sol, *curvature);
        entry["w22_ratio"] = w.achieved_ratio;
        entry["k_sq"] = w.k_sq;
        entry["m_constant"] = w.m_constant;
        max_w22_ratio = std::max(max_w22_ratio, w.achieved_ratio);
        min_k_sq = std::min(min_k_sq, w.k_sq);
        m_constant = w.m_constant;
      }
      if (task.checks.trace && curvature) {
        const double slack = trace_inequality_check(m, sol, d, *curvature);
        const double norm = sol.f_l2_sq > 0.0 ? sol.f_l2_sq : 1.0;
        entry["trace_slack_rel"] = slack / norm;
        min_trace_slack = std::min(min_trace_slack, slack / norm);
      }
      if (!task.probes.empty() && li == 0 && inst == 0) {
        json probes = json::array();
        for (const auto& p : task.probes) {
          probes.push_back(json{{"x", p}, {"u", sol.interpolate(p)}});
        }
        entry["probes"] = probes;
      }
      if (!task.export_name.empty() && li == 0 && inst == 0 && ctx.write_files) {
        namespace fs = std::filesystem;
        const fs::path base = fs::path(ctx.out_dir);
        fs::create_directories(base);
        const std::string data = (base / (task.export_name + ".bin")).string();
        const std::string header = (base / (task.export_name + ".json")).string();
        export_solution(sol, data, header);
        entry["export"] = json{{"data", data}, {"header", header}};
      }
      solves.push_back(std::move(entry));
    }
  }
  out["solves"] = std::move(solves);

  if (task.checks.apriori) {
    verdicts.push_back(make_ge("apriori_i_rel_slack", min_apriori_i, -*task.checks.apriori));
    verdicts.push_back(make_ge("apriori_ii_rel_slack", min_apriori_ii, -*task.checks.apriori));
  }
  if (task.checks.energy) {
    verdicts.push_back(make_le("energy_identity_residual", max_energy, *task.checks.energy));
  }
  if (task.checks.w22 && curvature) {
    verdicts.push_back(make_le("w22_ratio_below_k_sq", max_w22_ratio, min_k_sq));
    if (curvature->C <= 0.0) {
      verdicts.push_back(make_eq("m_equals_8_for_nonpositive_c", m_constant, 8.0));
    }
  }
  if (task.checks.trace) {
    verdicts.push_back(make_ge("trace_rel_slack", min_trace_slack, -*task.checks.trace));
  }

  if (!task.checks.boundary_identity_resolutions.empty()) {
    json refine = json::array();
    double prev = 0.0;
    for (size_t k = 0; k < task.checks.boundary_identity_resolutions.size(); ++k) {
      GridSpec spec = task.grid;
      spec.resolution = task.checks.boundary_identity_resolutions[k];
      auto g2 = std::make_shared<const GridDomain>(discretize(m, d, spec));
      const GridSolution sol =
          solve_dirichlet(m, g2, make_field(task.source, dim), task.lambdas.front());
      const double res = boundary_identity_residual(m, sol, d);
      refine.push_back(json{{"resolution", spec.resolution}, {"residual", res}});
      if (k > 0) {
        const double ratio = prev / std::max(res, 1e-300);
        verdicts.push_back(make_ge("boundary_identity_ratio_" + std::to_string(k), ratio,
                                   task.checks.boundary_identity_min_ratio));
      }
      prev = res;
    }
    out["boundary_identity"] = std::move(refine);
  }
  return out;
}

json run_mc_task(ScenarioContext& ctx, const config::McTask& task, std::vector<Verdict>& verdicts,
                 std::uint64_t seed) {
  PathConfig cfg = task.path;
  cfg.seed = seed;
  json out;
  out["mode"] = task.mode;
  const int dim = cfg.dimension > 0 ? cfg.dimension
                                    : (task.start.empty() ? ctx.measure.dimension()
                                                          : static_cast<int>(task.start.size()));
  const std::vector<double> start = padded(task.start, ctx.measure.dimension());
  const PathField field = make_field(task.source, ctx.measure.dimension());

  if (task.mode == "resolvent") {
    cfg.dimension = dim;
    ExitEnsemble ensemble;
    const bool want_dump = !task.dump_path.empty() && ctx.write_files;
    const McEstimate est = resolvent_mc(ctx.measure, *ctx.domain, field, task.lambda,
                                        std::span<const double>(start), cfg,
                                        want_dump ? &ensemble : nullptr);
    out["result"] = estimate_json(est);
    if (want_dump) {
      namespace fs = std::filesystem;
      const fs::path base = fs::path(ctx.out_dir);
      fs::create_directories(base);
      const std::string dump = (base / task.dump_path).string();
      dump_ensemble(ensemble, dump);
      out["dump"] = dump;
    }
    if (task.expect.value) {
      const double tol = task.expect.tol.value_or(0.0) + 3.0 * est.std_error + est.tail_bound;
      verdicts.push_back(
          make_le("resolvent_matches", std::abs(est.estimate - *task.expect.value), tol));
    }
    if (task.expect.upper_with_stderr) {
      // Trapezoid quadrature of e^{-lambda t} overshoots by h^2 lambda / 12;
      // allow twice that on top of the statistical slack.
      const double quad_slack = cfg.step * cfg.step * task.lambda / 6.0;
      verdicts.push_back(make_le("resolvent_upper", est.estimate,
                                 *task.expect.upper_with_stderr + est.std_error + quad_slack));
    }
  } else if (task.mode == "semigroup") {
    cfg.dimension = dim;
    const McEstimate est = killed_semigroup(ctx.measure, *ctx.domain, field, task.time,
                                            std::span<const double>(start), cfg);
    out["result"] = estimate_json(est);
    if (task.expect.value) {
      const double tol = task.expect.tol.value_or(0.0) + 3.0 * est.std_error;
      verdicts.push_back(
          make_le("semigroup_matches", std::abs(est.estimate - *task.expect.value), tol));
    }
  } else if (task.mode == "kernel") {
    cfg.dimension = dim;
    const KernelCheckResult kc = kernel_check(ctx.measure, task.tgrid,
                                              std::span<const double>(start), cfg);
    json entries = json::array();
    for (const auto& e : kc.entries) {
      entries.push_back(json{{"coord", e.coord},
                             {"t", e.t},
                             {"s", e.s},
                             {"empirical", e.empirical},
                             {"analytic", e.analytic},
                             {"std_error", e.std_error}});
    }
    out["entries"] = std::move(entries);
    out["max_deviation_stderr"] = kc.max_deviation;
    if (task.expect.max_dev_stderr) {
      verdicts.push_back(
          make_le("kernel_max_deviation", kc.max_deviation, *task.expect.max_dev_stderr));
    }
  } else if (task.mode == "convergence") {
    const auto rows = cylindrical_convergence(ctx.measure, *ctx.domain, field, task.lambda,
                                              std::span<const double>(start), task.dims, cfg);
    json table = json::array();
    for (const auto& r : rows) {
      table.push_back(json{{"n", r.n},
                           {"start_outside", r.start_outside},
                           {"estimate", r.estimate},
                           {"std_error", r.std_error},
                           {"diff_prev", r.diff_prev},
                           {"diff_std_error", r.diff_std_error}});
    }
    out["table"] = std::move(table);
    if (task.expect.monotone_within) {
      bool ok = true;
      double worst = -std::numeric_limits<double>::infinity();
      for (size_t i = 2; i < rows.size(); ++i) {
        if (rows[i].start_outside || rows[i - 1].start_outside) continue;
        const double slack = *task.expect.monotone_within *
                             (rows[i].diff_std_error + rows[i - 1].diff_std_error);
        const double excess = rows[i].diff_prev - rows[i - 1].diff_prev - slack;
        worst = std::max(worst, excess);
        if (excess > 0.0) ok = false;
      }
      verdicts.push_back(Verdict{"convergence_monotone_within_stderr", worst, 0.0, "<=", ok});
    }
    if (task.expect.bit_identical) {
      bool identical = rows.size() > 1;
      for (size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].estimate != rows[0].estimate) identical = false;
      }
      verdicts.push_back(
          Verdict{"estimates_bit_identical", identical ? 1.0 : 0.0, 1.0, "==", identical});
    }
  }
  return out;
}

json run_sweep_task(ScenarioContext& ctx, const config::SweepTask& task,
                    std::vector<Verdict>& verdicts, std::uint64_t seed) {
  json out;
  out["mode"] = task.mode;
  json rows = json::array();
  const auto& dom = ctx.scenario.domain;

  if (task.mode == "witness") {
    const double radius = task.radius > 0.0 ? task.radius : dom.radius;
    const std::vector<double> center = padded(dom.center, ctx.measure.dimension());
    if (task.expect.admissibility) {
      const auto verdict = sphere_admissibility(ctx.measure, center, radius);
      out["admissibility"] = to_string(verdict);
      verdicts.push_back(Verdict{"admissibility_is_" + *task.expect.admissibility,
                                 static_cast<double>(to_string(verdict) == *task.expect.admissibility),
                                 1.0, "==",
                                 to_string(verdict) == *task.expect.admissibility});
    }
    double prev = -std::numeric_limits<double>::infinity();
    bool increasing = true;
    double final_value = 0.0;
    double at_value = std::numeric_limits<double>::quiet_NaN();
    for (int n : task.dims) {
      const double w = sphere_blowup_witness(ctx.measure, center, radius, n);
      ScenarioContext::SweepRow row;
      row.n = n;
      row.h_sup = w;
      row.witness = w;
      ctx.sweep_rows.push_back(row);
      rows.push_back(json{{"n", n}, {"witness", w}});
      if (task.expect.increasing_from && n > *task.expect.increasing_from && w <= prev) {
        increasing = false;
      }
      if (task.expect.at_n && n == *task.expect.at_n) at_value = w;
      prev = w;
      final_value = w;
    }
    if (task.expect.increasing_from) {
      verdicts.push_back(Verdict{"witness_strictly_increasing", increasing ? 1.0 : 0.0, 1.0, "==",
                                 increasing});
    }
    if (task.expect.at_n && task.expect.at_value) {
      verdicts.push_back(make_le("witness_at_n" + std::to_string(*task.expect.at_n),
                                 std::abs(at_value - *task.expect.at_value), task.expect.at_tol));
    }
    if (task.expect.final_min) {
      verdicts.push_back(make_ge("witness_final", final_value, *task.expect.final_min));
    }
  } else if (task.mode == "curvature") {
    double max_c = -std::numeric_limits<double>::infinity();
    bool constant_ok = true;
    for (int n : task.dims) {
      const SpectralGaussian m = ctx.measure.head(n);
      const LevelSetDomain d = ctx.domain->truncate(n);
      SamplerConfig sampler = task.sampler;
      sampler.seed = rng::mix(seed ^ (0x900u + static_cast<unsigned>(n)));
      const CurvatureReport rep = constants_ABC(m, d, sampler);
      const double c_plus = std::max(rep.C, 0.0);
      const double m_const =
          8.0 + 4.0 * c_plus *
                    (2.0 + 2.0 * std::sqrt(2.0) * rep.A / std::sqrt(task.lambda) +
                     std::abs(rep.C) * rep.A * rep.A / task.lambda + rep.B / task.lambda);
      ScenarioContext::SweepRow row;
      row.n = n;
      row.h_sup = rep.C;
      row.a = rep.A;
      row.b = rep.B;
      row.c = rep.C;
      row.k_sq = 1.0 / (task.lambda * task.lambda) + 2.0 / task.lambda + m_const;
      if (task.has_grid && n <= 3) {
        auto grid = std::make_shared<const GridDomain>(discretize(m, d, task.grid));
        const GridSolution sol =
            solve_dirichlet(m, grid, make_field(task.source, n), task.lambda);
        row.w22_ratio = check_w22_bound(m, sol, rep).achieved_ratio;
      }
      ctx.sweep_rows.push_back(row);
      rows.push_back(json{{"n", n}, {"A", rep.A}, {"B", rep.B}, {"C", rep.C}, {"K_sq", row.k_sq}});
      if (!std::isnan(row.w22_ratio)) rows.back()["w22_ratio"] = row.w22_ratio;
      max_c = std::max(max_c, rep.C);
      if (task.expect.constant_c && std::abs(rep.C - *task.expect.constant_c) > task.expect.c_tol) {
        constant_ok = false;
      }
    }
    if (task.expect.c_max) verdicts.push_back(make_le("sweep_c_max", max_c, *task.expect.c_max));
    if (task.expect.constant_c) {
      verdicts.push_back(
          Verdict{"sweep_c_constant", constant_ok ? 1.0 : 0.0, 1.0, "==", constant_ok});
    }
  } else if (task.mode == "resolvent") {
    PathConfig cfg = task.path;
    cfg.seed = seed;
    const std::vector<double> start = padded(task.start, ctx.measure.dimension());
    const PathField field = make_field(task.source, ctx.measure.dimension());
    const auto table = cylindrical_convergence(ctx.measure, *ctx.domain, field, task.lambda,
                                               std::span<const double>(start), task.dims, cfg);
    for (const auto& r : table) {
      ScenarioContext::SweepRow row;
      row.n = r.n;
      row.mc_estimate = r.estimate;
      row.mc_stderr = r.std_error;
      ctx.sweep_rows.push_back(row);
      rows.push_back(json{{"n", r.n},
                          {"estimate", r.estimate},
                          {"std_error", r.std_error},
                          {"start_outside", r.start_outside}});
    }
  }
  out["rows"] = std::move(rows);
  return out;
}

json run_crosscheck_task(ScenarioContext& ctx, const config::CrosscheckTask& task,
                         std::vector<Verdict>& verdicts, std::uint64_t seed) {
  const int dim = task.dimension;
  const SpectralGaussian m = ctx.measure.head(dim);
  const LevelSetDomain d = ctx.domain->truncate(dim);
  auto grid = std::make_shared<const GridDomain>(discretize(m, d, task.grid));
  const SourceField field = make_field(task.source, dim);
  const GridSolution sol = solve_dirichlet(m, grid, field, task.lambda);

  PathConfig cfg = task.path;
  cfg.seed = seed;
  cfg.dimension = dim;

  json out;
  out["dimension"] = dim;
  out["lambda"] = task.lambda;
  out["interior_cells"] = grid->size();
  json table = json::array();
  for (size_t pi = 0; pi < task.probes.size(); ++pi) {
    const auto& probe = task.probes[pi];
    if (static_cast<int>(probe.size()) != dim) {
      throw ConfigInvalid("crosscheck probe dimension mismatch");
    }
    const double u_grid = sol.interpolate(probe);
    const McEstimate est = resolvent_mc(m, d, field, task.lambda,
                                        std::span<const double>(probe), cfg);
    const double diff = std::abs(u_grid - est.estimate);
    const double tol = 3.0 * est.std_error + task.extra_tolerance + est.tail_bound;
    table.push_back(json{{"x", probe},
                         {"u_grid", u_grid},
                         {"u_mc", est.estimate},
                         {"std_error", est.std_error},
                         {"tail_bound", est.tail_bound},
                         {"diff", diff},
                         {"tolerance", tol}});
    verdicts.push_back(make_le("crosscheck_probe_" + std::to_string(pi), diff, tol));
  }
  out["probes"] = std::move(table);
  return out;
}

void write_sweep_csv(const ScenarioContext& ctx, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open CSV output '" + path + "'");
  os << "# oulab sweep: one row per truncation dimension; empty cells = not applicable\n";
  os << "n,h_sup,witness,A,B,C,K_sq,w22_ratio,mc_estimate,mc_stderr\n";
  auto cell = [](double v) { return std::isnan(v) ? std::string() : format17(v); };
  for (const auto& row : ctx.sweep_rows) {
    os << row.n << ',' << cell(row.h_sup) << ',' << cell(row.witness) << ',' << cell(row.a) << ','
       << cell(row.b) << ',' << cell(row.c) << ',' << cell(row.k_sq) << ','
       << cell(row.w22_ratio) << ',' << cell(row.mc_estimate) << ',' << cell(row.mc_stderr)
       << '\n';
  }
}

}  // namespace

RunResult run_scenario_json(const std::string& config_text, const RunOptions& options) {
  json doc;
  try {
    doc = json::parse(config_text);
  } catch (const json::parse_error& e) {
    throw ConfigInvalid(std::string("config is not valid JSON: ") + e.what());
  }
  ScenarioContext ctx;
  ctx.scenario = config::parse_scenario(doc);
  if (options.seed_override) ctx.scenario.seed = *options.seed_override;
  for (auto& task : ctx.scenario.tasks) {
    if (options.paths_override) {
      task.mc.path.paths = *options.paths_override;
      task.sweep.path.paths = *options.paths_override;
      task.crosscheck.path.paths = *options.paths_override;
    }
    if (options.resolution_override) {
      task.solve.grid.resolution = *options.resolution_override;
      task.crosscheck.grid.resolution = *options.resolution_override;
    }
  }

  ctx.out_dir = options.out_dir.empty() ? "." : options.out_dir;
  ctx.write_files = options.write_files;
  ctx.measure = build_measure(ctx.scenario.measure);
  ctx.domain = build_domain(ctx.scenario.domain, ctx.measure, ctx, ctx.scenario.seed);

  json report;
  report["scenario"] = doc;
  report["name"] = ctx.scenario.name;
  report["seed"] = ctx.scenario.seed;
  report["versions"] = json{{"oulab", kVersion}};
  json tasks = json::array();

  const double t_start = now_seconds();
  bool all_passed = true;
  bool task_error = false;
  for (size_t ti = 0; ti < ctx.scenario.tasks.size(); ++ti) {
    const auto& task = ctx.scenario.tasks[ti];
    if (!options.task_filter.empty() && task.type != options.task_filter) continue;
    json entry;
    entry["type"] = task.type;
    std::vector<Verdict> verdicts;
    const double t0 = now_seconds();
    try {
      const std::uint64_t task_seed = ctx.scenario.seed + ti;
      if (task.type == "curvature") {
        entry["results"] = run_curvature_task(ctx, task.curvature, verdicts, task_seed);
      } else if (task.type == "solve") {
        entry["results"] = run_solve_task(ctx, task.solve, verdicts, task_seed);
      } else if (task.type == "mc") {
        entry["results"] = run_mc_task(ctx, task.mc, verdicts, task_seed);
      } else if (task.type == "sweep") {
        entry["results"] = run_sweep_task(ctx, task.sweep, verdicts, task_seed);
      } else if (task.type == "crosscheck") {
        entry["results"] = run_crosscheck_task(ctx, task.crosscheck, verdicts, task_seed);
      }
    } catch (const ConfigInvalid&) {
      throw;
    } catch (const std::exception& e) {
      entry["error"] = e.what();
      task_error = true;
      all_passed = false;
    }
    json verdicts_json = json::array();
    for (const auto& v : verdicts) {
      verdicts_json.push_back(v.to_json());
      if (!v.pass) all_passed = false;
    }
    entry["verdicts"] = std::move(verdicts_json);
    entry["elapsed_seconds"] = now_seconds() - t0;
    tasks.push_back(std::move(entry));
  }
  report["tasks"] = std::move(tasks);
  report["pass"] = all_passed;
  report["timing"] = json{{"total_seconds", now_seconds() - t_start}};

  RunResult result;
  result.all_passed = all_passed;
  result.exit_code = (all_passed && !task_error) ? 0 : 1;
  result.report_json = report.dump(2);

  if (options.write_files) {
    namespace fs = std::filesystem;
    const fs::path base = options.out_dir.empty() ? fs::path(".") : fs::path(options.out_dir);
    fs::create_directories(base);
    const fs::path report_path = base / ctx.scenario.report_path;
    std::ofstream os(report_path);
    if (!os) throw Error("cannot open report output '" + report_path.string() + "'");
    os << result.report_json << '\n';
    result.report_path = report_path.string();
    if (!ctx.sweep_rows.empty()) {
      const fs::path csv_path = base / ctx.scenario.csv_path;
      write_sweep_csv(ctx, csv_path.string());
      result.csv_path = csv_path.string();
    }
  }
  return result;
}

RunResult run_scenario(const std::string& path_or_name, const RunOptions& options) {
  if (const char* embedded = bundled_scenario(path_or_name)) {
    return run_scenario_json(embedded, options);
  }
  std::ifstream is(path_or_name);
  if (!is) {
    throw ConfigInvalid("cannot open config '" + path_or_name +
                        "' (not a file, and not a bundled scenario name)");
  }
  std::stringstream buffer;
  buffer << is.rdbuf();
  return run_scenario_json(buffer.str(), options);
}

}  // namespace oulab
