#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "oulab/curvature.hpp"
#include "oulab/domain.hpp"
#include "oulab/spectral_gaussian.hpp"

namespace oulab {

enum class BoundaryScheme { cut, mask };

struct GridSpec {
  int resolution = 128;          // cells per axis
  double box_halfwidth = 6.0;    // per-axis half width in units of sqrt(lambda_k)
  BoundaryScheme scheme = BoundaryScheme::cut;
};

/// Masked tensor grid over the truncation box, cell-centered. Interior cells
/// are those whose center satisfies g < 0; links to exterior neighbors carry
/// the cut fraction theta in (0,1] measured to the g = 0 crossing.
class GridDomain {
 public:
  int dim = 0;
  std::array<int, 3> cells{1, 1, 1};
  std::array<double, 3> spacing{0, 0, 0};
  std::array<double, 3> origin{0, 0, 0};  // coordinate of the (0,0,0) cell center
  double cell_volume = 0.0;
  BoundaryScheme scheme = BoundaryScheme::cut;

  std::vector<std::array<int, 3>> coords;     // interior index -> lattice coords
  std::vector<int32_t> interior_of_flat;      // flat lattice -> interior index or -1
  std::vector<double> weight;                 // N(x_i) * cell volume
  std::vector<double> density;                // N(x_i)

  // Per interior cell, per axis, per direction (0 = minus, 1 = plus):
  // neighbor interior index, or -1 when the link is cut (theta below applies).
  std::vector<std::array<std::array<int32_t, 2>, 3>> neighbor;
  std::vector<std::array<std::array<double, 2>, 3>> theta;

  struct Cut {
    int32_t cell;
    int8_t axis;
    int8_t dir;  // -1 or +1
    bool domain_cut;  // false when the link leaves the truncation box instead
    double theta;
  };
  std::vector<Cut> cuts;

  size_t size() const { return coords.size(); }
  std::array<double, 3> position(size_t i) const {
    std::array<double, 3> x{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      x[static_cast<size_t>(a)] =
          origin[static_cast<size_t>(a)] +
          spacing[static_cast<size_t>(a)] * coords[i][static_cast<size_t>(a)];
    }
    return x;
  }
  /// Interior index of the cell offset from interior cell i, or -1.
  int32_t shifted(size_t i, int axis, int offset) const;
};

/// Builds the masked grid; cut fractions by bisection of g along the axis.
/// Throws EmptyDomain when no cell center lies in O and DimensionTooLarge for n > 3.
GridDomain discretize(const SpectralGaussian& measure, const LevelSetDomain& domain,
                      const GridSpec& spec);

using SourceField = std::function<double(std::span<const double>)>;

/// Discrete weak solution of lambda u - L u = f, u = 0 on the boundary.
struct GridSolution {
  std::shared_ptr<const GridDomain> grid;
  std::vector<double> u;
  std::vector<double> f;
  double lambda = 0.0;
  double rel_residual = 0.0;
  int iterations = 0;

  // Discrete inner products cached at solve time (weights w_i = N_i * volume).
  double l2_sq = 0.0;                // sum w u^2
  double f_l2_sq = 0.0;              // sum w f^2
  double fu = 0.0;                   // sum w f u
  double dirichlet_energy = 0.0;     // discrete version of int |Q^{1/2} Du|^2 dmu

  /// Multilinear interpolation with null extension outside the mask.
  double interpolate(std::span<const double> x) const;
};

/// Writes the solution as a flat little-endian float64 array (interior cells
/// in lattice scan order) plus a JSON header holding dims, extents and a
/// run-length encoding of the interior mask (alternating exterior/interior
/// run lengths, starting with exterior).
void export_solution(const GridSolution& sol, const std::string& data_path,
                     const std::string& header_path);

/// Symmetric divergence-form solve via Jacobi-preconditioned conjugate
/// gradients to 1e-10 relative residual.
GridSolution solve_dirichlet(const SpectralGaussian& measure, std::shared_ptr<const GridDomain> grid,
                             const std::vector<double>& f, double lambda);
GridSolution solve_dirichlet(const SpectralGaussian& measure, std::shared_ptr<const GridDomain> grid,
                             const SourceField& f, double lambda);

/// Applies the discrete Ornstein-Uhlenbeck operator to interior samples
/// (Dirichlet zero beyond cuts and the box).
std::vector<double> apply_ou_operator(const SpectralGaussian& measure, const GridDomain& grid,
                                      const std::vector<double>& u);

struct SobolevNorms {
  double l2_sq = 0.0;
  double grad_sq = 0.0;     // int sum lambda_k (D_k u)^2, central differences
  double hess_sq = 0.0;     // int sum lambda_h lambda_k (D_hk u)^2, two layers inside
  double omitted_mass = 0.0;  // measure of the interior annulus excluded from hess_sq

  double w12_sq() const { return l2_sq + grad_sq; }
  double w22_sq() const { return l2_sq + grad_sq + hess_sq; }
};

SobolevNorms sobolev_norms(const SpectralGaussian& measure, const GridSolution& sol);

/// |lambda int u^2 + 1/2 int |Q^{1/2}Du|^2 - int f u| / ||f||^2; exact to solver
/// tolerance because the scheme is symmetric.
double check_energy_identity(const SpectralGaussian& measure, const GridSolution& sol);

/// Slacks of the a-priori bounds (i) int u^2 <= ||f||^2/lambda^2 and
/// (ii) int |Q^{1/2}Du|^2 <= 2||f||^2/lambda. Nonnegative up to solver tolerance.
std::pair<double, double> check_apriori(const SpectralGaussian& measure, const GridSolution& sol);

struct W22Check {
  double achieved_ratio = 0.0;  // ||u||^2_{W^{2,2}} / ||f||^2
  double k_sq = 0.0;            // 1/lambda^2 + 2/lambda + M
  double m_constant = 0.0;      // 8 + 4 max{C,0} (2 + 2 sqrt2 A/sqrt(lambda) + |C|A^2/lambda + B/lambda)
};

W22Check check_w22_bound(const SpectralGaussian& measure, const GridSolution& sol,
                         const CurvatureReport& report);

/// Max over boundary samples of |<D^2u QDg, QDu> - h <Q^{1/2}Du, Q^{1/2}Dg>^2|,
/// normalized by ||f||^2. Requires f to vanish near the boundary
/// (UnsupportedSource otherwise).
double boundary_identity_residual(const SpectralGaussian& measure, const GridSolution& sol,
                                  const LevelSetDomain& domain);

/// Slack (RHS - LHS) of the boundary trace inequality for bounded domains.
double trace_inequality_check(const SpectralGaussian& measure, const GridSolution& sol,
                              const LevelSetDomain& domain, const CurvatureReport& report);

}  // namespace oulab
