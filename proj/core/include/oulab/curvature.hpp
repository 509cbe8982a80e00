#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "oulab/domain.hpp"
#include "oulab/spectral_gaussian.hpp"

namespace oulab {

/// Boundary curvature functional
///   h(x) = -2 Lg / |Q^{1/2}Dg|^2 + <D^2g QDg, QDg> / |Q^{1/2}Dg|^4,
/// with Lg = 1/2 sum_k lambda_k (D^2 g)_kk - 1/2 sum_k x_k (Dg)_k.
/// Requires |g(x)| <= boundary_tol and a nondegenerate Q-gradient.
double curvature_h(const SpectralGaussian& measure, const LevelSetDomain& domain,
                   std::span<const double> x, double boundary_tol = 1e-6);

/// Same expression without the on-boundary check; defined in a neighborhood of
/// the boundary and used by the ascent machinery.
double curvature_h_raw(const SpectralGaussian& measure, const LevelSetDomain& domain,
                       std::span<const double> x);

/// Gallery closed forms for h at a boundary point (half_space, sphere,
/// ellipsoid, graph, integral_functional).
double closed_form_h(const SpectralGaussian& measure, const LevelSetDomain& domain,
                     std::span<const double> x);

struct SamplerConfig {
  std::uint64_t seed = 20240601;
  int starts = 512;             // ascent starts
  int ascent_iterations = 50;   // projected-gradient ascent iterations per start
  double fd_step = 1e-5;        // finite-difference step for the ascent gradient
  int band_samples = 4096;      // target size of the band sample pool
  double box_halfwidth = 6.0;   // Gaussian sampling stays within this many sqrt(lambda_k)
  double boundary_tol = 1e-10;  // |g| tolerance for located boundary points
  double degenerate_tol = 1e-8; // |Q^{1/2}Dg| below this raises DegenerateGradient
};

/// Sampled estimates of the constants of the main bound. All suprema are
/// lower-bound estimates (sampling plus ascent cannot certify a supremum).
struct CurvatureReport {
  double A = 0.0;       // sup_O |Q^{1/2} D g~|      (capped field)
  double B = 0.0;       // sup_O ||Q^{1/2} D^2 g~ Q^{1/2}||_HS
  double C = 0.0;       // sup_{boundary} h
  double band_a = 0.0;  // sup_{|g|<=delta} |Q^{1/2} D g|   (uncapped)
  double band_b = 0.0;  // sup_{|g|<=delta} ||Q^{1/2} D^2 g Q^{1/2}||_HS
  double delta = 0.0;
  long sample_count = 0;
  int ascent_iterations = 0;
  int boundary_points = 0;
  int degenerate_skipped = 0;
  bool is_lower_bound_estimate = true;
};

/// Estimates A, B by sampling the band |g| <= delta after applying the smooth
/// cap, and C by boundary sampling followed by projected-gradient ascent of h
/// constrained to g = 0. Deterministic for a fixed config.
CurvatureReport constants_ABC(const SpectralGaussian& measure, const LevelSetDomain& domain,
                              const SamplerConfig& config = {});

enum class Admissibility { admissible, inadmissible, undetermined };
const char* to_string(Admissibility a);

/// Sphere criterion: admissible if r(||x0|| + r) < sum_{k>=2} lambda_k,
/// inadmissible if r^2 > Tr Q, undetermined otherwise.
Admissibility sphere_admissibility(const SpectralGaussian& measure, std::span<const double> x0,
                                   double r);

/// Witness value H_n(x0 + r_n e_n) with r_n^2 = r^2 - sum_{k>n} x0_k^2.
/// Throws RadiusTooSmall when r_n^2 <= 0.
double sphere_blowup_witness(const SpectralGaussian& measure, std::span<const double> x0,
                             double r, int n);

/// Ellipsoid criterion: r(||T^{1/2}x0|| + r) < sum_{k != kbar} lambda_k t_k,
/// with kbar = argmax lambda_k t_k.
bool ellipsoid_admissibility(const SpectralGaussian& measure, std::span<const double> t,
                             std::span<const double> x0, double r);

/// Closed-form h for the region below a graph, evaluated at a boundary point.
double graph_domain_h(const SpectralGaussian& measure, const GraphPhi& phi, int axis,
                      std::span<const double> x, double boundary_tol = 1e-6);

struct IntegralFunctionalDiagnostics {
  double grad_lower_bound = 0.0;    // 8 a^2 / pi^4, a provable |D_H G_n|_H^2 lower bound
  double sampled_grad_min = 0.0;    // min over sampled points of |D_H G_n|_H^2
  double h_sup_bound = 0.0;         // upper bound for sup h derived from the gradient bound
  double min_g1d_prime = 0.0;       // sampled min |g'| (hypothesis |g'| >= a)
  double min_g1d_second = 0.0;      // sampled inf g''
  bool gradient_ok = false;         // sampled_grad_min >= grad_lower_bound
  bool growth_ok = false;           // xi g'(xi) <= alpha g(xi) + beta on samples
};

/// Domain {x : integral_0^1 g1d((P_n x)(s)) ds < r} on the inverse-square
/// spectrum with e_k(s) = sqrt(2) sin(k pi s); the s-integral uses composite
/// Simpson quadrature. Verifies |g1d'| >= a on a dense sample
/// (HypothesisViolated otherwise) and fills the diagnostics.
LevelSetDomain integral_functional_domain(const SpectralGaussian& measure, Rational1D g1d,
                                          double r, int n, double a, double alpha, double beta,
                                          double band_delta,
                                          IntegralFunctionalDiagnostics* diag = nullptr,
                                          int panels = 2048, std::uint64_t seed = 20240601);

}  // namespace oulab
