#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "oulab/rng.hpp"
#include "oulab/solver.hpp"

using namespace oulab;

namespace {

std::shared_ptr<const GridDomain> make_grid(const SpectralGaussian& m, const LevelSetDomain& d,
                                            int resolution, double box = 6.0) {
  GridSpec spec;
  spec.resolution = resolution;
  spec.box_halfwidth = box;
  return std::make_shared<const GridDomain>(discretize(m, d, spec));
}

SourceField bump(double radius, std::vector<double> center = {}) {
  return [radius, center](std::span<const double> x) {
    double s_sq = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
      const double c = i < center.size() ? center[i] : 0.0;
      s_sq += (x[i] - c) * (x[i] - c);
    }
    s_sq /= radius * radius;
    return s_sq < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s_sq)) : 0.0;
  };
}

}  // namespace

TEST_CASE("sobolev norms of simple fields") {
  const auto m = SpectralGaussian::make({1.0});
  const auto full = LevelSetDomain::whole_space(1);
  const auto grid = make_grid(m, full, 1000);

  SUBCASE("zero field") {
    GridSolution sol;
    sol.grid = grid;
    sol.u.assign(grid->size(), 0.0);
    sol.f.assign(grid->size(), 0.0);
    sol.lambda = 1.0;
    const auto norms = sobolev_norms(m, sol);
    CHECK(norms.l2_sq == 0.0);
    CHECK(norms.grad_sq == 0.0);
    CHECK(norms.hess_sq == 0.0);
  }
  SUBCASE("u = x: int |Q^{1/2}Du|^2 dmu = lambda_1 = 1") {
    GridSolution sol;
    sol.grid = grid;
    sol.u.resize(grid->size());
    sol.f.assign(grid->size(), 0.0);
    sol.lambda = 1.0;
    for (size_t i = 0; i < grid->size(); ++i) {
      sol.u[i] = grid->position(i)[0];
      sol.l2_sq += grid->weight[i] * sol.u[i] * sol.u[i];
    }
    const auto norms = sobolev_norms(m, sol);
    CHECK(norms.grad_sq == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(norms.hess_sq == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
    CHECK(norms.l2_sq == doctest::Approx(1.0).epsilon(1e-6));  // E x^2 = 1
  }
  SUBCASE("u = x^2: int lambda^2 (D^2u)^2 dmu = 4") {
    GridSolution sol;
    sol.grid = grid;
    sol.u.resize(grid->size());
    sol.f.assign(grid->size(), 0.0);
    sol.lambda = 1.0;
    for (size_t i = 0; i < grid->size(); ++i) {
      const double x = grid->position(i)[0];
      sol.u[i] = x * x;
    }
    const auto norms = sobolev_norms(m, sol);
    CHECK(norms.hess_sq == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(norms.omitted_mass < 1e-6);  // only box-edge cells are excluded
  }
}

TEST_CASE("energy identity holds to solver tolerance") {
  const auto m = SpectralGaussian::make({1.0});
  const auto interval = LevelSetDomain::sphere({0.0}, 1.0, 0.2);
  const auto grid = make_grid(m, interval, 300);

  SUBCASE("f = 0") {
    const auto sol = solve_dirichlet(m, grid, std::vector<double>(grid->size(), 0.0), 1.0);
    CHECK(check_energy_identity(m, sol) == 0.0);
  }
  SUBCASE("f = 1, lambda = 1") {
    const auto sol = solve_dirichlet(m, grid, std::vector<double>(grid->size(), 1.0), 1.0);
    CHECK(check_energy_identity(m, sol) < 1e-6);
  }
  SUBCASE("20 random sources") {
    rng::Sequence rnd(808);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> f(grid->size());
      for (auto& v : f) v = rnd.normal();
      const auto sol = solve_dirichlet(m, grid, f, 1.0);
      CHECK(check_energy_identity(m, sol) < 1e-6);
    }
  }
}

TEST_CASE("a-priori slacks are nonnegative for random sources") {
  const auto m2 = SpectralGaussian::make({1.0, 0.5});
  const auto disc = LevelSetDomain::sphere({0.0, 0.0}, 1.0, 0.2);
  const auto grid = make_grid(m2, disc, 64);
  rng::Sequence rnd(909);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> f(grid->size());
    for (auto& v : f) v = rnd.normal();
    for (double lambda : {0.5, 1.0, 2.0}) {
      const auto sol = solve_dirichlet(m2, grid, f, lambda);
      const auto [si, sii] = check_apriori(m2, sol);
      CHECK(si >= -1e-6 * sol.f_l2_sq);
      CHECK(sii >= -1e-6 * sol.f_l2_sq);
    }
  }
}

TEST_CASE("a-priori slacks vanish for f = 0") {
  const auto m = SpectralGaussian::make({1.0});
  const auto interval = LevelSetDomain::sphere({0.0}, 1.0, 0.2);
  const auto grid = make_grid(m, interval, 100);
  const auto sol = solve_dirichlet(m, grid, std::vector<double>(grid->size(), 0.0), 2.0);
  const auto [si, sii] = check_apriori(m, sol);
  CHECK(si == 0.0);
  CHECK(sii == 0.0);
}

TEST_CASE("W22 bound constant") {
  const auto m = SpectralGaussian::make({1.0});
  const auto interval = LevelSetDomain::sphere({0.0}, 1.0, 0.2);
  const auto grid = make_grid(m, interval, 200);
  const auto sol = solve_dirichlet(m, grid, std::vector<double>(grid->size(), 1.0), 1.0);

  SUBCASE("C <= 0 gives M = 8 exactly") {
    CurvatureReport rep;
    rep.A = 0.3;
    rep.B = 2.0;
    rep.C = -1.5;
    const auto w = check_w22_bound(m, sol, rep);
    CHECK(w.m_constant == 8.0);
    CHECK(w.k_sq == doctest::Approx(1.0 + 2.0 + 8.0));
  }
  SUBCASE("A = B = C = 1, lambda = 1: M = 8 + 4(2 + 2 sqrt2 + 1 + 1)") {
    CurvatureReport rep;
    rep.A = 1.0;
    rep.B = 1.0;
    rep.C = 1.0;
    const auto w = check_w22_bound(m, sol, rep);
    CHECK(w.m_constant == doctest::Approx(35.31370849898476).epsilon(1e-14));
  }
}

TEST_CASE("boundary identity residual decreases under refinement") {
  const auto m = SpectralGaussian::make({1.0});
  const auto interval = LevelSetDomain::sphere({0.0}, 1.0, 0.2);
  const auto f = bump(0.5);

  double prev = 0.0;
  for (int k = 0; k < 3; ++k) {
    const int res = 100 << k;
    const auto grid = make_grid(m, interval, res);
    const auto sol = solve_dirichlet(m, grid, f, 1.0);
    const double residual = boundary_identity_residual(m, sol, interval);
    if (k > 0) CHECK(residual < prev / 1.3);
    prev = residual;
  }
}

TEST_CASE("boundary identity rejects sources that reach the boundary") {
  const auto m = SpectralGaussian::make({1.0});
  const auto interval = LevelSetDomain::sphere({0.0}, 1.0, 0.2);
  const auto grid = make_grid(m, interval, 200);
  const auto sol = solve_dirichlet(m, grid, std::vector<double>(grid->size(), 1.0), 1.0);
  CHECK_THROWS_AS(boundary_identity_residual(m, sol, interval), UnsupportedSource);
}

TEST_CASE("boundary identity residual vanishes for f = 0") {
  const auto m = SpectralGaussian::make({1.0});
  const auto interval = LevelSetDomain::sphere({0.0}, 1.0, 0.2);
  const auto grid = make_grid(m, interval, 200);
  const auto sol = solve_dirichlet(m, grid, std::vector<double>(grid->size(), 0.0), 1.0);
  CHECK(boundary_identity_residual(m, sol, interval) == 0.0);
}

TEST_CASE("trace inequality") {
  const auto m = SpectralGaussian::make({1.0, 0.5});
  const auto disc = LevelSetDomain::sphere({0.0, 0.0}, 1.0, 0.2);
  const auto grid = make_grid(m, disc, 64);
  SamplerConfig cfg;
  cfg.starts = 32;
  cfg.band_samples = 1024;
  const auto report = constants_ABC(m, disc, cfg);

  SUBCASE("u = 0 gives slack 0") {
    const auto sol = solve_dirichlet(m, grid, std::vector<double>(grid->size(), 0.0), 1.0);
    CHECK(trace_inequality_check(m, sol, disc, report) == doctest::Approx(0.0).scale(1.0));
  }
  SUBCASE("random sources keep the slack above -1e-4 ||f||^2") {
    rng::Sequence rnd(4242);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> f(grid->size());
      for (auto& v : f) v = rnd.normal();
      const auto sol = solve_dirichlet(m, grid, f, 1.0);
      const double slack = trace_inequality_check(m, sol, disc, report);
      CHECK(slack >= -1e-4 * sol.f_l2_sq);
    }
  }
  SUBCASE("unbounded domains are rejected") {
    const auto hs = LevelSetDomain::half_space({1.0, 0.0}, 1.0, 1.0);
    const auto hs_grid = make_grid(m, hs, 64);
    const auto sol = solve_dirichlet(m, hs_grid, std::vector<double>(hs_grid->size(), 1.0), 1.0);
    CHECK_THROWS_AS(trace_inequality_check(m, sol, hs, report), UnboundedDomain);
  }
}

TEST_CASE("1-D trace boundary term is the two-point weighted sum") {
  // For the interval, the surface integral degenerates to the two endpoint
  // contributions with weight N(+-1) |Q^{1/2} g'| / |g'|.
  const auto m = SpectralGaussian::make({1.0});
  const auto interval = LevelSetDomain::sphere({0.0}, 1.0, 0.2);
  const auto grid = make_grid(m, interval, 2000);
  const auto sol = solve_dirichlet(m, grid, bump(0.5), 1.0);
  CurvatureReport rep;
  rep.A = 10.0;  // large A,B so the slack is dominated by the RHS; we only
  rep.B = 10.0;  // validate that LHS is finite and the slack positive here.
  const double slack = trace_inequality_check(m, sol, interval, rep);
  CHECK(slack > 0.0);
}

TEST_CASE("all four checks pass on the gallery domains in n = 1 and 2") {
  GraphPhi phi;
  phi.constant = 0.6;
  phi.linear = {0.3, 0.0};

  struct Case {
    LevelSetDomain domain;
    int dim;
    std::vector<double> bump_center;
  };
  const std::vector<Case> cases = {
      {LevelSetDomain::sphere({0.0}, 1.0, 0.2), 1, {0.0}},
      {LevelSetDomain::half_space({1.0}, 1.5, 1.0), 1, {0.0}},
      {LevelSetDomain::sphere({0.0, 0.0}, 1.0, 0.2), 2, {0.0, 0.0}},
      {LevelSetDomain::ellipsoid({1.0, 2.0}, {0.0, 0.0}, 1.0, 0.2), 2, {0.0, 0.0}},
      {LevelSetDomain::half_space({1.0, 0.0}, 1.5, 1.0), 2, {0.0, 0.0}},
      // The graph boundary passes within ~0.58 of the origin; keep the source
      // support well inside.
      {LevelSetDomain::graph(phi, 1, 2, 0.5), 2, {0.0, -0.5}},
  };
  const auto measure = SpectralGaussian::make({1.0, 0.5});
  for (const auto& c : cases) {
    CAPTURE(to_string(c.domain.tag()));
    CAPTURE(c.dim);
    const auto center = c.bump_center;
    const auto bump = [center](std::span<const double> x) {
      double s_sq = 0.0;
      for (size_t i = 0; i < x.size(); ++i) {
        s_sq += (x[i] - center[i]) * (x[i] - center[i]);
      }
      s_sq /= 0.25;
      return s_sq < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s_sq)) : 0.0;
    };
    const auto m = measure.head(c.dim);
    GridSpec spec;
    spec.resolution = c.dim == 1 ? 400 : 96;
    spec.box_halfwidth = 4.0;
    auto grid = std::make_shared<const GridDomain>(discretize(m, c.domain, spec));
    const auto sol = solve_dirichlet(m, grid, SourceField(bump), 1.0);

    CHECK(check_energy_identity(m, sol) < 1e-6);
    const auto [si, sii] = check_apriori(m, sol);
    CHECK(si >= -1e-6 * sol.f_l2_sq);
    CHECK(sii >= -1e-6 * sol.f_l2_sq);

    SamplerConfig scfg;
    scfg.starts = 64;
    scfg.band_samples = 1024;
    const auto report = constants_ABC(m, c.domain, scfg);
    const auto w22 = check_w22_bound(m, sol, report);
    CHECK(w22.achieved_ratio <= w22.k_sq);

    CHECK(boundary_identity_residual(m, sol, c.domain) >= 0.0);
    if (c.domain.is_bounded()) {
      CHECK(trace_inequality_check(m, sol, c.domain, report) >= -1e-4 * sol.f_l2_sq);
    }
  }
}
