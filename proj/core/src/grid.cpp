#include <cmath>
#include <string>

#include "oulab/solver.hpp"

namespace oulab {

int32_t GridDomain::shifted(size_t i, int axis, int offset) const {
  std::array<int, 3> c = coords[i];
  c[static_cast<size_t>(axis)] += offset;
  if (c[static_cast<size_t>(axis)] < 0 || c[static_cast<size_t>(axis)] >= cells[static_cast<size_t>(axis)]) {
    return -1;
  }
  const size_t flat =
      static_cast<size_t>(c[0]) +
      static_cast<size_t>(cells[0]) * (static_cast<size_t>(c[1]) +
                                       static_cast<size_t>(cells[1]) * static_cast<size_t>(c[2]));
  return interior_of_flat[flat];
}

GridDomain discretize(const SpectralGaussian& measure, const LevelSetDomain& domain,
                      const GridSpec& spec) {
  const int n = domain.dimension();
  if (n < 1 || n > 3) {
    throw DimensionTooLarge("discretize: grids support 1 <= n <= 3, got " + std::to_string(n));
  }
  if (measure.dimension() < n) throw DimensionMismatch("discretize: measure dimension too small");
  if (spec.resolution < 4) throw Error("discretize: resolution must be at least 4");

  GridDomain grid;
  grid.dim = n;
  grid.scheme = spec.scheme;
  grid.cell_volume = 1.0;
  for (int a = 0; a < n; ++a) {
    const double half = spec.box_halfwidth * std::sqrt(measure.eigenvalue(a));
    grid.cells[static_cast<size_t>(a)] = spec.resolution;
    grid.spacing[static_cast<size_t>(a)] = 2.0 * half / spec.resolution;
    grid.origin[static_cast<size_t>(a)] = -half + 0.5 * grid.spacing[static_cast<size_t>(a)];
    grid.cell_volume *= grid.spacing[static_cast<size_t>(a)];
  }

  const size_t total = static_cast<size_t>(grid.cells[0]) * static_cast<size_t>(grid.cells[1]) *
                       static_cast<size_t>(grid.cells[2]);
  grid.interior_of_flat.assign(total, -1);

  std::vector<double> x(static_cast<size_t>(n));
  auto center = [&](const std::array<int, 3>& c) {
    for (int a = 0; a < n; ++a) {
      x[static_cast<size_t>(a)] = grid.origin[static_cast<size_t>(a)] +
                                  grid.spacing[static_cast<size_t>(a)] * c[static_cast<size_t>(a)];
    }
    return std::span<const double>(x.data(), static_cast<size_t>(n));
  };

  std::array<int, 3> c{0, 0, 0};
  size_t flat = 0;
  for (c[2] = 0; c[2] < grid.cells[2]; ++c[2]) {
    for (c[1] = 0; c[1] < grid.cells[1]; ++c[1]) {
      for (c[0] = 0; c[0] < grid.cells[0]; ++c[0], ++flat) {
        if (domain.value(center(c)) < 0.0) {
          grid.interior_of_flat[flat] = static_cast<int32_t>(grid.coords.size());
          grid.coords.push_back(c);
        }
      }
    }
  }
  if (grid.coords.empty()) {
    throw EmptyDomain("discretize: no cell center lies inside the domain");
  }

  const auto head = measure.head(n);
  grid.weight.resize(grid.size());
  grid.density.resize(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    const double dN = head.density(center(grid.coords[i]));
    grid.density[i] = dN;
    grid.weight[i] = dN * grid.cell_volume;
  }

  // Links and cut fractions. Bisection of g along the axis segment.
  grid.neighbor.resize(grid.size());
  grid.theta.resize(grid.size());
  std::vector<double> xa(static_cast<size_t>(n));
  for (size_t i = 0; i < grid.size(); ++i) {
    const auto xi = grid.position(i);
    for (int a = 0; a < n; ++a) {
      for (int d = 0; d < 2; ++d) {
        const int off = (d == 0) ? -1 : 1;
        const int32_t nb = grid.shifted(i, a, off);
        grid.neighbor[i][static_cast<size_t>(a)][static_cast<size_t>(d)] = nb;
        double th = 1.0;
        if (nb < 0) {
          const int edge = grid.coords[i][static_cast<size_t>(a)] + off;
          const bool in_box = edge >= 0 && edge < grid.cells[static_cast<size_t>(a)];
          bool domain_cut = false;
          if (in_box && spec.scheme == BoundaryScheme::cut) {
            // Neighbor center is exterior: bisect for the crossing fraction.
            for (int k = 0; k < n; ++k) xa[static_cast<size_t>(k)] = xi[static_cast<size_t>(k)];
            double lo = 0.0, hi = 1.0;
            const double h = grid.spacing[static_cast<size_t>(a)];
            for (int it = 0; it < 60; ++it) {
              const double mid = 0.5 * (lo + hi);
              xa[static_cast<size_t>(a)] = xi[static_cast<size_t>(a)] + off * mid * h;
              if (domain.value(std::span<const double>(xa.data(), static_cast<size_t>(n))) < 0.0) {
                lo = mid;
              } else {
                hi = mid;
              }
            }
            th = std::max(0.5 * (lo + hi), 1e-6);
            domain_cut = true;
          } else if (in_box) {
            domain_cut = true;  // masked scheme: boundary pinned at the neighbor center
          }
          grid.cuts.push_back(GridDomain::Cut{static_cast<int32_t>(i), static_cast<int8_t>(a),
                                              static_cast<int8_t>(off), domain_cut, th});
        }
        grid.theta[i][static_cast<size_t>(a)][static_cast<size_t>(d)] = th;
      }
    }
  }
  return grid;
}

}  // namespace oulab
