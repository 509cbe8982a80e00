#include "oulab/spectral_gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

namespace oulab {

SpectralGaussian::SpectralGaussian(std::vector<double> eigenvalues)
    : eigenvalues_(std::move(eigenvalues)) {
  trace_ = 0.0;
  for (double lam : eigenvalues_) trace_ += lam;
}

SpectralGaussian SpectralGaussian::make(std::vector<double> eigenvalues) {
  if (eigenvalues.empty()) {
    throw NonPositiveEigenvalue("eigenvalue list is empty");
  }
  double prev = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < eigenvalues.size(); ++k) {
    const double lam = eigenvalues[k];
    if (!(lam > 0.0) || !std::isfinite(lam)) {
      throw NonPositiveEigenvalue("eigenvalue " + std::to_string(k + 1) +
                                  " is not a positive real: " + std::to_string(lam));
    }
    if (lam > prev) {
      throw NotSorted("eigenvalue sequence must be non-increasing (violated at index " +
                      std::to_string(k + 1) + ")");
    }
    prev = lam;
  }
  return SpectralGaussian(std::move(eigenvalues));
}

SpectralGaussian SpectralGaussian::inverse_pi_sq(int n) {
  if (n < 1) throw NonPositiveEigenvalue("dimension must be >= 1");
  std::vector<double> lam(static_cast<size_t>(n));
  const double pi2 = std::numbers::pi * std::numbers::pi;
  for (int k = 1; k <= n; ++k) {
    lam[static_cast<size_t>(k - 1)] = 1.0 / (pi2 * k * k);
  }
  return SpectralGaussian(std::move(lam));
}

double SpectralGaussian::tail_trace(int from) const {
  double s = 0.0;
  for (size_t k = static_cast<size_t>(from); k < eigenvalues_.size(); ++k) s += eigenvalues_[k];
  return s;
}

SpectralGaussian SpectralGaussian::head(int n) const {
  if (n < 1 || n > dimension()) {
    throw DimensionMismatch("head(" + std::to_string(n) + ") out of range for dimension " +
                            std::to_string(dimension()));
  }
  return SpectralGaussian(
      std::vector<double>(eigenvalues_.begin(), eigenvalues_.begin() + n));
}

double SpectralGaussian::density(std::span<const double> x) const {
  if (x.size() != eigenvalues_.size()) {
    throw DimensionMismatch("density: point dimension " + std::to_string(x.size()) +
                            " != measure dimension " + std::to_string(eigenvalues_.size()));
  }
  double log_n = 0.0;
  for (size_t k = 0; k < eigenvalues_.size(); ++k) {
    log_n -= 0.5 * (std::log(2.0 * std::numbers::pi * eigenvalues_[k]) +
                    x[k] * x[k] / eigenvalues_[k]);
  }
  return std::exp(log_n);
}

double SpectralGaussian::cm_norm(std::span<const double> h) const {
  if (h.size() != eigenvalues_.size()) {
    throw DimensionMismatch("cm_norm: vector dimension " + std::to_string(h.size()) +
                            " != measure dimension " + std::to_string(eigenvalues_.size()));
  }
  double s = 0.0;
  for (size_t k = 0; k < eigenvalues_.size(); ++k) s += h[k] * h[k] / eigenvalues_[k];
  return std::sqrt(s);
}

double SpectralGaussian::q_half_norm_sq(std::span<const double> v) const {
  double s = 0.0;
  for (size_t k = 0; k < v.size(); ++k) s += eigenvalues_[k] * v[k] * v[k];
  return s;
}

double SpectralGaussian::q_norm_sq(std::span<const double> v) const {
  double s = 0.0;
  for (size_t k = 0; k < v.size(); ++k) s += eigenvalues_[k] * eigenvalues_[k] * v[k] * v[k];
  return s;
}

// Physicists' Gauss-Hermite rule (weight e^{-x^2}) by Newton iteration on the
// normalized recurrence, then rescaled to the probabilists' weight
// e^{-x^2/2}/sqrt(2 pi) so that the weights sum to 1.
void gauss_hermite(int level, std::vector<double>& nodes, std::vector<double>& weights) {
  const int n = level;
  nodes.assign(static_cast<size_t>(n), 0.0);
  weights.assign(static_cast<size_t>(n), 0.0);
  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * nodes[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * nodes[1];
    } else {
      z = 2.0 * z - nodes[static_cast<size_t>(i - 2)];
    }
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    nodes[static_cast<size_t>(i)] = z;
    nodes[static_cast<size_t>(n - 1 - i)] = -z;
    weights[static_cast<size_t>(i)] = 2.0 / (pp * pp);
    weights[static_cast<size_t>(n - 1 - i)] = weights[static_cast<size_t>(i)];
  }
  // Physicists' -> probabilists': x -> sqrt(2) x, w -> w / sqrt(pi).
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  for (int i = 0; i < n; ++i) {
    nodes[static_cast<size_t>(i)] *= std::numbers::sqrt2;
    weights[static_cast<size_t>(i)] *= inv_sqrt_pi;
  }
  // Sort ascending (the fill order above interleaves the two halves).
  std::vector<std::pair<double, double>> nw(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    nw[static_cast<size_t>(i)] = {nodes[static_cast<size_t>(i)], weights[static_cast<size_t>(i)]};
  std::sort(nw.begin(), nw.end());
  for (int i = 0; i < n; ++i) {
    nodes[static_cast<size_t>(i)] = nw[static_cast<size_t>(i)].first;
    weights[static_cast<size_t>(i)] = nw[static_cast<size_t>(i)].second;
  }
}

QuadratureGrid quadrature(const SpectralGaussian& measure, int n, int level) {
  if (n > 3) {
    throw DimensionTooLarge("tensor quadrature supports n <= 3, got n = " + std::to_string(n));
  }
  if (n < 1 || n > measure.dimension()) {
    throw DimensionMismatch("quadrature dimension out of range");
  }
  if (level < 2) level = 2;
  std::vector<double> base_nodes, base_weights;
  gauss_hermite(level, base_nodes, base_weights);
  QuadratureGrid grid;
  grid.dimension = n;
  grid.nodes.resize(static_cast<size_t>(n));
  grid.weights.resize(static_cast<size_t>(n));
  for (int a = 0; a < n; ++a) {
    const double scale = std::sqrt(measure.eigenvalue(a));
    auto& nd = grid.nodes[static_cast<size_t>(a)];
    nd = base_nodes;
    for (double& v : nd) v *= scale;
    grid.weights[static_cast<size_t>(a)] = base_weights;
  }
  return grid;
}

}  // namespace oulab
