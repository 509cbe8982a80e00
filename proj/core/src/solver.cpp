#include <cmath>
#include <fstream>
#include <string>

#include <json.hpp>

#include "oulab/solver.hpp"

namespace oulab {

namespace {

/// Precomputed side coefficients of the symmetric divergence-form operator:
/// c = volume * lambda_a * N_half / (2 theta h_a^2), with N_half evaluated at
/// the midpoint of the (possibly cut) segment. The assembled matrix is
/// lambda W + K with W = diag(w_i) and K the SPD link form.
struct Stencil {
  std::vector<std::array<std::array<double, 2>, 3>> coeff;

  static Stencil build(const SpectralGaussian& measure, const GridDomain& grid) {
    Stencil s;
    s.coeff.resize(grid.size());
    const auto head = measure.head(grid.dim);
    std::vector<double> xm(static_cast<size_t>(grid.dim));
    for (size_t i = 0; i < grid.size(); ++i) {
      const auto xi = grid.position(i);
      for (int a = 0; a < grid.dim; ++a) {
        const double h = grid.spacing[static_cast<size_t>(a)];
        const double lam = measure.eigenvalue(a);
        for (int d = 0; d < 2; ++d) {
          const int off = (d == 0) ? -1 : 1;
          const double th = grid.theta[i][static_cast<size_t>(a)][static_cast<size_t>(d)];
          for (int k = 0; k < grid.dim; ++k) xm[static_cast<size_t>(k)] = xi[static_cast<size_t>(k)];
          xm[static_cast<size_t>(a)] += off * 0.5 * th * h;
          const double n_half =
              head.density(std::span<const double>(xm.data(), static_cast<size_t>(grid.dim)));
          s.coeff[i][static_cast<size_t>(a)][static_cast<size_t>(d)] =
              grid.cell_volume * lam * n_half / (2.0 * th * h * h);
        }
      }
    }
    return s;
  }

  /// out = (lambda W + K) u
  void apply(const GridDomain& grid, double lambda, const std::vector<double>& u,
             std::vector<double>& out) const {
    const size_t m = grid.size();
    for (size_t i = 0; i < m; ++i) {
      double acc = lambda * grid.weight[i] * u[i];
      for (int a = 0; a < grid.dim; ++a) {
        for (int d = 0; d < 2; ++d) {
          const double cc = coeff[i][static_cast<size_t>(a)][static_cast<size_t>(d)];
          const int32_t nb = grid.neighbor[i][static_cast<size_t>(a)][static_cast<size_t>(d)];
          const double un = (nb >= 0) ? u[static_cast<size_t>(nb)] : 0.0;
          acc += cc * (u[i] - un);
        }
      }
      out[i] = acc;
    }
  }

  double diagonal(const GridDomain& grid, double lambda, size_t i) const {
    double dg = lambda * grid.weight[i];
    for (int a = 0; a < grid.dim; ++a) {
      for (int d = 0; d < 2; ++d) {
        dg += coeff[i][static_cast<size_t>(a)][static_cast<size_t>(d)];
      }
    }
    return dg;
  }
};

}  // namespace

double GridSolution::interpolate(std::span<const double> x) const {
  const GridDomain& g = *grid;
  if (static_cast<int>(x.size()) != g.dim) throw DimensionMismatch("interpolate: bad point");
  std::array<int, 3> base{0, 0, 0};
  std::array<double, 3> frac{0, 0, 0};
  for (int a = 0; a < g.dim; ++a) {
    const double s = (x[static_cast<size_t>(a)] - g.origin[static_cast<size_t>(a)]) /
                     g.spacing[static_cast<size_t>(a)];
    const double fl = std::floor(s);
    base[static_cast<size_t>(a)] = static_cast<int>(fl);
    frac[static_cast<size_t>(a)] = s - fl;
  }
  double value = 0.0;
  const int corners = 1 << g.dim;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    std::array<int, 3> cc{0, 0, 0};
    for (int a = 0; a < g.dim; ++a) {
      const int bit = (c >> a) & 1;
      cc[static_cast<size_t>(a)] = base[static_cast<size_t>(a)] + bit;
      w *= bit ? frac[static_cast<size_t>(a)] : (1.0 - frac[static_cast<size_t>(a)]);
    }
    bool inside = true;
    for (int a = 0; a < g.dim; ++a) {
      if (cc[static_cast<size_t>(a)] < 0 || cc[static_cast<size_t>(a)] >= g.cells[static_cast<size_t>(a)]) {
        inside = false;
        break;
      }
    }
    if (!inside) continue;  // null extension
    const size_t flat = static_cast<size_t>(cc[0]) +
                        static_cast<size_t>(g.cells[0]) *
                            (static_cast<size_t>(cc[1]) +
                             static_cast<size_t>(g.cells[1]) * static_cast<size_t>(cc[2]));
    const int32_t idx = g.interior_of_flat[flat];
    if (idx >= 0) value += w * u[static_cast<size_t>(idx)];
  }
  return value;
}

GridSolution solve_dirichlet(const SpectralGaussian& measure,
                             std::shared_ptr<const GridDomain> grid_ptr,
                             const std::vector<double>& f, double lambda) {
  const GridDomain& grid = *grid_ptr;
  if (!(lambda > 0.0)) throw NonPositiveLambda("solve_dirichlet: lambda must be positive");
  if (f.size() != grid.size()) throw DimensionMismatch("solve_dirichlet: bad source vector");
  for (double v : f) {
    if (!std::isfinite(v)) throw Error("solve_dirichlet: source is not finite");
  }

  const Stencil stencil = Stencil::build(measure, grid);
  const size_t m = grid.size();

  std::vector<double> b(m);
  double b_norm_sq = 0.0;
  for (size_t i = 0; i < m; ++i) {
    b[i] = grid.weight[i] * f[i];
    b_norm_sq += b[i] * b[i];
  }

  GridSolution sol;
  sol.grid = grid_ptr;
  sol.f = f;
  sol.lambda = lambda;
  sol.u.assign(m, 0.0);

  const double b_norm = std::sqrt(b_norm_sq);
  if (b_norm == 0.0) {
    sol.rel_residual = 0.0;
  } else {
    // Jacobi-preconditioned conjugate gradients.
    std::vector<double> r = b, z(m), p(m), ap(m), diag(m);
    for (size_t i = 0; i < m; ++i) diag[i] = stencil.diagonal(grid, lambda, i);
    double rz = 0.0;
    for (size_t i = 0; i < m; ++i) {
      z[i] = r[i] / diag[i];
      rz += r[i] * z[i];
    }
    p = z;
    const double tol = 1e-10;
    const int max_iter = 100000;
    double r_norm = b_norm;
    int iter = 0;
    for (; iter < max_iter && r_norm / b_norm > tol; ++iter) {
      stencil.apply(grid, lambda, p, ap);
      double pap = 0.0;
      for (size_t i = 0; i < m; ++i) pap += p[i] * ap[i];
      const double alpha = rz / pap;
      double r_norm_sq = 0.0;
      for (size_t i = 0; i < m; ++i) {
        sol.u[i] += alpha * p[i];
        r[i] -= alpha * ap[i];
        r_norm_sq += r[i] * r[i];
      }
      r_norm = std::sqrt(r_norm_sq);
      double rz_next = 0.0;
      for (size_t i = 0; i < m; ++i) {
        z[i] = r[i] / diag[i];
        rz_next += r[i] * z[i];
      }
      const double beta = rz_next / rz;
      rz = rz_next;
      for (size_t i = 0; i < m; ++i) p[i] = z[i] + beta * p[i];
    }
    sol.rel_residual = r_norm / b_norm;
    sol.iterations = iter;
    if (sol.rel_residual > tol) {
      throw SolverDiverged("solve_dirichlet: CG stalled at relative residual " +
                           std::to_string(sol.rel_residual));
    }
  }

  // Cache the discrete inner products used by the identity and a-priori checks.
  for (size_t i = 0; i < m; ++i) {
    sol.l2_sq += grid.weight[i] * sol.u[i] * sol.u[i];
    sol.f_l2_sq += grid.weight[i] * f[i] * f[i];
    sol.fu += grid.weight[i] * f[i] * sol.u[i];
  }
  double quad = 0.0;  // u^T K u
  for (size_t i = 0; i < m; ++i) {
    for (int a = 0; a < grid.dim; ++a) {
      for (int d = 0; d < 2; ++d) {
        const double cc = stencil.coeff[i][static_cast<size_t>(a)][static_cast<size_t>(d)];
        const int32_t nb = grid.neighbor[i][static_cast<size_t>(a)][static_cast<size_t>(d)];
        const double un = (nb >= 0) ? sol.u[static_cast<size_t>(nb)] : 0.0;
        quad += cc * (sol.u[i] - un) * sol.u[i];
      }
    }
  }
  sol.dirichlet_energy = 2.0 * quad;
  return sol;
}

GridSolution solve_dirichlet(const SpectralGaussian& measure,
                             std::shared_ptr<const GridDomain> grid_ptr, const SourceField& f,
                             double lambda) {
  const GridDomain& grid = *grid_ptr;
  std::vector<double> fv(grid.size());
  std::vector<double> x(static_cast<size_t>(grid.dim));
  for (size_t i = 0; i < grid.size(); ++i) {
    const auto xi = grid.position(i);
    for (int a = 0; a < grid.dim; ++a) x[static_cast<size_t>(a)] = xi[static_cast<size_t>(a)];
    fv[i] = f(std::span<const double>(x.data(), x.size()));
  }
  return solve_dirichlet(measure, std::move(grid_ptr), fv, lambda);
}

void export_solution(const GridSolution& sol, const std::string& data_path,
                     const std::string& header_path) {
  const GridDomain& grid = *sol.grid;
  {
    std::ofstream os(data_path, std::ios::binary);
    if (!os) throw Error("export_solution: cannot open '" + data_path + "'");
    os.write(reinterpret_cast<const char*>(sol.u.data()),
             static_cast<std::streamsize>(sol.u.size() * sizeof(double)));
  }
  // Alternating exterior/interior run lengths over the flat lattice,
  // starting with an exterior run (possibly of length zero).
  std::vector<std::int64_t> rle;
  std::int64_t run = 0;
  bool interior = false;
  for (const int32_t idx : grid.interior_of_flat) {
    const bool is_interior = idx >= 0;
    if (is_interior == interior) {
      ++run;
    } else {
      rle.push_back(run);
      run = 1;
      interior = is_interior;
    }
  }
  rle.push_back(run);

  nlohmann::json header;
  header["format"] = "float64-le";
  header["data_file"] = data_path;
  header["dimension"] = grid.dim;
  header["cells"] = std::vector<int>(grid.cells.begin(), grid.cells.begin() + grid.dim);
  header["spacing"] = std::vector<double>(grid.spacing.begin(), grid.spacing.begin() + grid.dim);
  header["origin"] = std::vector<double>(grid.origin.begin(), grid.origin.begin() + grid.dim);
  header["interior_cells"] = grid.size();
  header["resolvent_lambda"] = sol.lambda;
  header["rel_residual"] = sol.rel_residual;
  header["mask_rle"] = rle;
  std::ofstream os(header_path);
  if (!os) throw Error("export_solution: cannot open '" + header_path + "'");
  os << header.dump(2) << '\n';
}

std::vector<double> apply_ou_operator(const SpectralGaussian& measure, const GridDomain& grid,
                                      const std::vector<double>& u) {
  if (u.size() != grid.size()) throw DimensionMismatch("apply_ou_operator: bad vector");
  const Stencil stencil = Stencil::build(measure, grid);
  std::vector<double> out(grid.size());
  stencil.apply(grid, 0.0, u, out);  // out = K u = W (-L) u
  for (size_t i = 0; i < grid.size(); ++i) out[i] = -out[i] / grid.weight[i];
  return out;
}

}  // namespace oulab
