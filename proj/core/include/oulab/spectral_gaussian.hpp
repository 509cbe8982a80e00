#pragma once

#include <span>
#include <vector>

#include "oulab/errors.hpp"

namespace oulab {

/// Centered Gaussian measure on R^n with diagonal covariance
/// Q = diag(lambda_1, ..., lambda_n), lambda_1 >= ... >= lambda_n > 0.
///
/// Immutable after construction; safe to share across threads.
class SpectralGaussian {
 public:
  /// Validates positivity and the non-increasing ordering.
  /// Throws NonPositiveEigenvalue or NotSorted.
  static SpectralGaussian make(std::vector<double> eigenvalues);

  /// lambda_k = 1/(pi^2 k^2), k = 1..n (the L^2(0,1) Laplacian spectrum).
  static SpectralGaussian inverse_pi_sq(int n);

  int dimension() const { return static_cast<int>(eigenvalues_.size()); }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  double eigenvalue(int k) const { return eigenvalues_[static_cast<size_t>(k)]; }
  double trace() const { return trace_; }

  /// Sum of lambda_k for zero-based k >= from.
  double tail_trace(int from) const;

  /// Truncation to the first n eigenvalues.
  SpectralGaussian head(int n) const;

  /// Gaussian density N(x) = prod_k (2 pi lambda_k)^{-1/2} exp(-x_k^2/(2 lambda_k)).
  double density(std::span<const double> x) const;

  /// Cameron-Martin norm |h|_H = (sum h_k^2/lambda_k)^{1/2}.
  double cm_norm(std::span<const double> h) const;

  /// |Q^{1/2} v|^2 = sum lambda_k v_k^2.
  double q_half_norm_sq(std::span<const double> v) const;

  /// |Q v|^2 = sum lambda_k^2 v_k^2.
  double q_norm_sq(std::span<const double> v) const;

 private:
  explicit SpectralGaussian(std::vector<double> eigenvalues);

  std::vector<double> eigenvalues_;
  double trace_ = 0.0;
};

/// Tensor Gauss-Hermite quadrature against the density of a SpectralGaussian.
/// Per-axis nodes are probabilists' Gauss-Hermite points scaled by sqrt(lambda_k);
/// per-axis weights sum to 1.
struct QuadratureGrid {
  int dimension = 0;
  std::vector<std::vector<double>> nodes;    // [axis][point]
  std::vector<std::vector<double>> weights;  // [axis][point]

  /// Integrates f over R^n against the measure. f receives the point coordinates.
  template <typename F>
  double integrate(F&& f) const {
    std::vector<double> x(static_cast<size_t>(dimension), 0.0);
    std::vector<size_t> idx(static_cast<size_t>(dimension), 0);
    double sum = 0.0;
    const size_t level = nodes.empty() ? 0 : nodes[0].size();
    if (level == 0) return 0.0;
    while (true) {
      double w = 1.0;
      for (int a = 0; a < dimension; ++a) {
        x[static_cast<size_t>(a)] = nodes[static_cast<size_t>(a)][idx[static_cast<size_t>(a)]];
        w *= weights[static_cast<size_t>(a)][idx[static_cast<size_t>(a)]];
      }
      sum += w * f(std::span<const double>(x));
      int a = 0;
      for (; a < dimension; ++a) {
        if (++idx[static_cast<size_t>(a)] < nodes[static_cast<size_t>(a)].size()) break;
        idx[static_cast<size_t>(a)] = 0;
      }
      if (a == dimension) break;
    }
    return sum;
  }
};

/// Builds an n-dimensional tensor grid with `level` points per axis.
/// Exact on polynomials of per-axis degree <= 2*level - 1.
/// Throws DimensionTooLarge for n > 3 and DimensionMismatch for n > dim(measure).
QuadratureGrid quadrature(const SpectralGaussian& measure, int n, int level);

/// Probabilists' Gauss-Hermite rule for N(0,1): nodes and weights, weights sum to 1.
void gauss_hermite(int level, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace oulab
