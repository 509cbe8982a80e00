#include <algorithm>
#include <cmath>
#include <string>

#include "oulab/solver.hpp"

namespace oulab {

namespace {

struct DiffOps {
  const GridDomain& grid;
  const std::vector<double>& u;

  int32_t shifted2(size_t i, int a, int oa, int b, int ob) const {
    std::array<int, 3> c = grid.coords[i];
    c[static_cast<size_t>(a)] += oa;
    c[static_cast<size_t>(b)] += ob;
    for (int k = 0; k < grid.dim; ++k) {
      if (c[static_cast<size_t>(k)] < 0 || c[static_cast<size_t>(k)] >= grid.cells[static_cast<size_t>(k)]) {
        return -1;
      }
    }
    const size_t flat = static_cast<size_t>(c[0]) +
                        static_cast<size_t>(grid.cells[0]) *
                            (static_cast<size_t>(c[1]) +
                             static_cast<size_t>(grid.cells[1]) * static_cast<size_t>(c[2]));
    return grid.interior_of_flat[flat];
  }

  /// Central difference when both neighbors are interior, one-sided fallback
  /// near the mask edge.
  double d1(size_t i, int a) const {
    const double h = grid.spacing[static_cast<size_t>(a)];
    const int32_t p = grid.neighbor[i][static_cast<size_t>(a)][1];
    const int32_t m = grid.neighbor[i][static_cast<size_t>(a)][0];
    if (p >= 0 && m >= 0) return (u[static_cast<size_t>(p)] - u[static_cast<size_t>(m)]) / (2.0 * h);
    if (p >= 0) return (u[static_cast<size_t>(p)] - u[i]) / h;
    if (m >= 0) return (u[i] - u[static_cast<size_t>(m)]) / h;
    return 0.0;
  }

  /// Two full layers inside: every axis has +-1 and +-2 interior and every
  /// axis pair has its four diagonal neighbors interior.
  bool is_deep(size_t i) const {
    for (int a = 0; a < grid.dim; ++a) {
      if (grid.shifted(i, a, 1) < 0 || grid.shifted(i, a, -1) < 0) return false;
      if (grid.shifted(i, a, 2) < 0 || grid.shifted(i, a, -2) < 0) return false;
      for (int b = a + 1; b < grid.dim; ++b) {
        if (shifted2(i, a, 1, b, 1) < 0 || shifted2(i, a, 1, b, -1) < 0 ||
            shifted2(i, a, -1, b, 1) < 0 || shifted2(i, a, -1, b, -1) < 0) {
          return false;
        }
      }
    }
    return true;
  }

  /// Full central first/second-difference stencil: all Chebyshev-1 neighbors.
  bool stencil_complete(size_t i) const {
    for (int a = 0; a < grid.dim; ++a) {
      if (grid.shifted(i, a, 1) < 0 || grid.shifted(i, a, -1) < 0) return false;
      for (int b = a + 1; b < grid.dim; ++b) {
        if (shifted2(i, a, 1, b, 1) < 0 || shifted2(i, a, 1, b, -1) < 0 ||
            shifted2(i, a, -1, b, 1) < 0 || shifted2(i, a, -1, b, -1) < 0) {
          return false;
        }
      }
    }
    return true;
  }

  double d2(size_t i, int a, int b) const {
    if (a == b) {
      const double h = grid.spacing[static_cast<size_t>(a)];
      const int32_t p = grid.shifted(i, a, 1);
      const int32_t m = grid.shifted(i, a, -1);
      return (u[static_cast<size_t>(p)] - 2.0 * u[i] + u[static_cast<size_t>(m)]) / (h * h);
    }
    const double ha = grid.spacing[static_cast<size_t>(a)];
    const double hb = grid.spacing[static_cast<size_t>(b)];
    const int32_t pp = shifted2(i, a, 1, b, 1);
    const int32_t pm = shifted2(i, a, 1, b, -1);
    const int32_t mp = shifted2(i, a, -1, b, 1);
    const int32_t mm = shifted2(i, a, -1, b, -1);
    return (u[static_cast<size_t>(pp)] - u[static_cast<size_t>(pm)] - u[static_cast<size_t>(mp)] +
            u[static_cast<size_t>(mm)]) /
           (4.0 * ha * hb);
  }
};

struct BoundaryFields {
  bool valid = false;
  std::array<double, 3> x_b{0, 0, 0};
  std::vector<double> du;    // extrapolated Du(x_b)
  std::vector<double> d2u;   // extrapolated D^2u(x_b), row-major dim x dim
};

/// Linear extrapolation of central-difference fields to the crossing point.
/// The cut cell has no central stencil, and the two layers behind it read the
/// cut cell's reduced-accuracy value; the fields are formed three and four
/// cells behind the cut, where the stencils are clean, and extrapolated over
/// the longer (still O(h^2)) lever.
constexpr int kBoundaryFieldDepth = 3;

BoundaryFields boundary_fields(const GridDomain& grid, const DiffOps& ops,
                               const GridDomain::Cut& cut, bool need_hessian) {
  BoundaryFields out;
  const int n = grid.dim;
  const int32_t i0s =
      grid.shifted(static_cast<size_t>(cut.cell), cut.axis, -kBoundaryFieldDepth * cut.dir);
  if (i0s < 0) return out;
  const size_t i0 = static_cast<size_t>(i0s);
  const int32_t i1s =
      grid.shifted(static_cast<size_t>(cut.cell), cut.axis, -(kBoundaryFieldDepth + 1) * cut.dir);
  if (i1s < 0) return out;
  const size_t i1 = static_cast<size_t>(i1s);
  if (!ops.stencil_complete(i0) || !ops.stencil_complete(i1)) return out;

  // x_b lies (depth + theta) h beyond i0 along the cut axis.
  const double lever = kBoundaryFieldDepth + cut.theta;
  auto extrap = [&](double v0, double v1) { return v0 + lever * (v0 - v1); };

  out.du.resize(static_cast<size_t>(n));
  for (int a = 0; a < n; ++a) {
    out.du[static_cast<size_t>(a)] = extrap(ops.d1(i0, a), ops.d1(i1, a));
  }
  if (need_hessian) {
    out.d2u.resize(static_cast<size_t>(n) * static_cast<size_t>(n));
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b) {
        const double v = extrap(ops.d2(i0, a, b), ops.d2(i1, a, b));
        out.d2u[static_cast<size_t>(a) * n + b] = v;
        out.d2u[static_cast<size_t>(b) * n + a] = v;
      }
    }
  }
  const auto xi = grid.position(static_cast<size_t>(cut.cell));
  out.x_b = xi;
  out.x_b[static_cast<size_t>(cut.axis)] +=
      cut.dir * cut.theta * grid.spacing[static_cast<size_t>(cut.axis)];
  out.valid = true;
  return out;
}

}  // namespace

SobolevNorms sobolev_norms(const SpectralGaussian& measure, const GridSolution& sol) {
  const GridDomain& grid = *sol.grid;
  DiffOps ops{grid, sol.u};
  SobolevNorms norms;
  norms.l2_sq = sol.l2_sq;
  for (size_t i = 0; i < grid.size(); ++i) {
    const double w = grid.weight[i];
    double g = 0.0;
    for (int a = 0; a < grid.dim; ++a) {
      const double d = ops.d1(i, a);
      g += measure.eigenvalue(a) * d * d;
    }
    norms.grad_sq += w * g;
    if (ops.is_deep(i)) {
      double hsum = 0.0;
      for (int a = 0; a < grid.dim; ++a) {
        for (int b = 0; b < grid.dim; ++b) {
          const double d = ops.d2(i, a, b);
          hsum += measure.eigenvalue(a) * measure.eigenvalue(b) * d * d;
        }
      }
      norms.hess_sq += w * hsum;
    } else {
      norms.omitted_mass += w;
    }
  }
  return norms;
}

double check_energy_identity(const SpectralGaussian& /*measure*/, const GridSolution& sol) {
  if (sol.f_l2_sq == 0.0) return 0.0;
  const double lhs = sol.lambda * sol.l2_sq + 0.5 * sol.dirichlet_energy;
  return std::abs(lhs - sol.fu) / sol.f_l2_sq;
}

std::pair<double, double> check_apriori(const SpectralGaussian& /*measure*/,
                                        const GridSolution& sol) {
  const double slack_i = sol.f_l2_sq / (sol.lambda * sol.lambda) - sol.l2_sq;
  const double slack_ii = 2.0 * sol.f_l2_sq / sol.lambda - sol.dirichlet_energy;
  return {slack_i, slack_ii};
}

W22Check check_w22_bound(const SpectralGaussian& measure, const GridSolution& sol,
                         const CurvatureReport& report) {
  W22Check out;
  const double lambda = sol.lambda;
  const double c_plus = std::max(report.C, 0.0);
  out.m_constant = 8.0 + 4.0 * c_plus *
                             (2.0 + 2.0 * std::sqrt(2.0) * report.A / std::sqrt(lambda) +
                              std::abs(report.C) * report.A * report.A / lambda +
                              report.B / lambda);
  out.k_sq = 1.0 / (lambda * lambda) + 2.0 / lambda + out.m_constant;
  const SobolevNorms norms = sobolev_norms(measure, sol);
  out.achieved_ratio = (sol.f_l2_sq > 0.0) ? norms.w22_sq() / sol.f_l2_sq : 0.0;
  return out;
}

double boundary_identity_residual(const SpectralGaussian& measure, const GridSolution& sol,
                                  const LevelSetDomain& domain) {
  const GridDomain& grid = *sol.grid;
  const int n = grid.dim;
  if (domain.dimension() != n) throw DimensionMismatch("boundary_identity_residual: dimensions");
  DiffOps ops{grid, sol.u};

  // L u = lambda u - f must vanish on the boundary, i.e. f = 0 near it.
  for (size_t i = 0; i < grid.size(); ++i) {
    if (!ops.is_deep(i) && sol.f[i] != 0.0) {
      throw UnsupportedSource(
          "boundary_identity_residual: source does not vanish near the boundary");
    }
  }
  if (sol.f_l2_sq == 0.0) return 0.0;

  std::vector<double> dg(static_cast<size_t>(n));
  double max_residual = 0.0;
  int used = 0;
  for (const auto& cut : grid.cuts) {
    if (!cut.domain_cut) continue;
    const BoundaryFields bf = boundary_fields(grid, ops, cut, /*need_hessian=*/true);
    if (!bf.valid) continue;
    const std::span<const double> xb(bf.x_b.data(), static_cast<size_t>(n));
    domain.gradient(xb, dg);
    double h_val;
    try {
      h_val = curvature_h_raw(measure, domain, xb);
    } catch (const DegenerateGradient&) {
      continue;  // excluded in the continuum; skipped with a counter here
    }
    // LHS: <D^2u QDg, QDu>; RHS: h <Q^{1/2}Du, Q^{1/2}Dg>^2
    double lhs = 0.0;
    for (int a = 0; a < n; ++a) {
      double row = 0.0;
      for (int b = 0; b < n; ++b) {
        row += bf.d2u[static_cast<size_t>(a) * n + b] * measure.eigenvalue(b) * dg[static_cast<size_t>(b)];
      }
      lhs += row * measure.eigenvalue(a) * bf.du[static_cast<size_t>(a)];
    }
    double mixed = 0.0;
    for (int a = 0; a < n; ++a) {
      mixed += measure.eigenvalue(a) * bf.du[static_cast<size_t>(a)] * dg[static_cast<size_t>(a)];
    }
    const double rhs = h_val * mixed * mixed;
    max_residual = std::max(max_residual, std::abs(lhs - rhs));
    ++used;
  }
  if (used == 0) throw NoBoundaryFound("boundary_identity_residual: no usable boundary cuts");
  return max_residual / sol.f_l2_sq;
}

double trace_inequality_check(const SpectralGaussian& measure, const GridSolution& sol,
                              const LevelSetDomain& domain, const CurvatureReport& report) {
  const GridDomain& grid = *sol.grid;
  const int n = grid.dim;
  if (!domain.is_bounded()) {
    throw UnboundedDomain("trace_inequality_check: bounded domains only");
  }
  DiffOps ops{grid, sol.u};
  const auto head = measure.head(n);

  // Boundary integral of <Q^{1/2}Du, Q^{1/2}Dg>^2 / |Q^{1/2}Dg| against the
  // weighted surface measure, via axis crossings: each axis-a cut contributes
  // the patch area (volume/h_a) * |n_a| with n the Euclidean unit normal.
  std::vector<double> dg(static_cast<size_t>(n));
  double lhs = 0.0;
  for (const auto& cut : grid.cuts) {
    if (!cut.domain_cut) continue;
    const BoundaryFields bf = boundary_fields(grid, ops, cut, /*need_hessian=*/false);
    if (!bf.valid) continue;
    const std::span<const double> xb(bf.x_b.data(), static_cast<size_t>(n));
    domain.gradient(xb, dg);
    double dg_norm_sq = 0.0, q_half_sq = 0.0, mixed = 0.0;
    for (int a = 0; a < n; ++a) {
      dg_norm_sq += dg[static_cast<size_t>(a)] * dg[static_cast<size_t>(a)];
      q_half_sq += measure.eigenvalue(a) * dg[static_cast<size_t>(a)] * dg[static_cast<size_t>(a)];
      mixed += measure.eigenvalue(a) * bf.du[static_cast<size_t>(a)] * dg[static_cast<size_t>(a)];
    }
    if (dg_norm_sq < 1e-28 || q_half_sq < 1e-28) continue;
    const double dg_norm = std::sqrt(dg_norm_sq);
    const double q_half = std::sqrt(q_half_sq);
    const double n_axis = std::abs(dg[static_cast<size_t>(cut.axis)]) / dg_norm;
    const double patch = grid.cell_volume / grid.spacing[static_cast<size_t>(cut.axis)];
    const double n_den = head.density(xb);
    lhs += (mixed * mixed / q_half) * n_den * (q_half / dg_norm) * n_axis * patch;
  }

  const SobolevNorms norms = sobolev_norms(measure, sol);
  double lu_sq = 0.0;  // ||L u||^2 = ||lambda u - f||^2
  for (size_t i = 0; i < grid.size(); ++i) {
    const double v = sol.lambda * sol.u[i] - sol.f[i];
    lu_sq += grid.weight[i] * v * v;
  }
  const double grad_norm = std::sqrt(norms.grad_sq);
  const double rhs = (2.0 * std::sqrt(lu_sq) + std::sqrt(norms.hess_sq)) * grad_norm * report.A +
                     report.B * norms.grad_sq;
  return rhs - lhs;
}

}  // namespace oulab
