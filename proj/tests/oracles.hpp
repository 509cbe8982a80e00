#pragma once

// Test-only oracles, independent of the implementation paths they check.

#include <cmath>
#include <vector>

namespace oracles {

/// Survival probability of the 1-D OU process (unit lambda_1 unless given)
/// killed at the endpoints of (-b, b): Crank-Nicolson time stepping of
/// v_t = (1/2) lambda v'' - (1/2) x v', v(0) = 1, v(+-b) = 0, evaluated at x.
/// Dense grid + small dt; the only contact with the library is the equation.
inline double ou_survival_cn(double t, double x, double b, double lambda = 1.0, int m = 4001,
                             double dt = 1e-4) {
  const double h = 2.0 * b / (m - 1);
  const int n = m - 2;  // interior nodes
  std::vector<double> v(static_cast<size_t>(n), 1.0);

  // Divergence form: (1/2N) d/dx (lambda N dv/dx), N = exp(-x^2/(2 lambda)).
  std::vector<double> lower(static_cast<size_t>(n)), diag(static_cast<size_t>(n)),
      upper(static_cast<size_t>(n));
  std::vector<double> cw(static_cast<size_t>(n)), ce(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double xi = -b + h * (i + 1);
    const double n_c = std::exp(-xi * xi / (2.0 * lambda));
    const double n_w = std::exp(-(xi - 0.5 * h) * (xi - 0.5 * h) / (2.0 * lambda));
    const double n_e = std::exp(-(xi + 0.5 * h) * (xi + 0.5 * h) / (2.0 * lambda));
    cw[static_cast<size_t>(i)] = 0.5 * lambda * n_w / (n_c * h * h);
    ce[static_cast<size_t>(i)] = 0.5 * lambda * n_e / (n_c * h * h);
  }

  const int steps = static_cast<int>(std::llround(t / dt));
  std::vector<double> rhs(static_cast<size_t>(n)), dp(static_cast<size_t>(n)),
      cp(static_cast<size_t>(n));
  for (int s = 0; s < steps; ++s) {
    // (I - dt/2 L) v_new = (I + dt/2 L) v_old
    for (int i = 0; i < n; ++i) {
      const double vw = (i > 0) ? v[static_cast<size_t>(i - 1)] : 0.0;
      const double ve = (i < n - 1) ? v[static_cast<size_t>(i + 1)] : 0.0;
      const double lv = cw[static_cast<size_t>(i)] * (vw - v[static_cast<size_t>(i)]) +
                        ce[static_cast<size_t>(i)] * (ve - v[static_cast<size_t>(i)]);
      rhs[static_cast<size_t>(i)] = v[static_cast<size_t>(i)] + 0.5 * dt * lv;
      lower[static_cast<size_t>(i)] = -0.5 * dt * cw[static_cast<size_t>(i)];
      upper[static_cast<size_t>(i)] = -0.5 * dt * ce[static_cast<size_t>(i)];
      diag[static_cast<size_t>(i)] =
          1.0 + 0.5 * dt * (cw[static_cast<size_t>(i)] + ce[static_cast<size_t>(i)]);
    }
    // Thomas algorithm.
    cp[0] = upper[0] / diag[0];
    dp[0] = rhs[0] / diag[0];
    for (int i = 1; i < n; ++i) {
      const double denom = diag[static_cast<size_t>(i)] -
                           lower[static_cast<size_t>(i)] * cp[static_cast<size_t>(i - 1)];
      cp[static_cast<size_t>(i)] = upper[static_cast<size_t>(i)] / denom;
      dp[static_cast<size_t>(i)] = (rhs[static_cast<size_t>(i)] -
                                    lower[static_cast<size_t>(i)] * dp[static_cast<size_t>(i - 1)]) /
                                   denom;
    }
    v[static_cast<size_t>(n - 1)] = dp[static_cast<size_t>(n - 1)];
    for (int i = n - 2; i >= 0; --i) {
      v[static_cast<size_t>(i)] =
          dp[static_cast<size_t>(i)] - cp[static_cast<size_t>(i)] * v[static_cast<size_t>(i + 1)];
    }
  }
  // Linear interpolation at x.
  const double s = (x + b) / h - 1.0;
  const int i0 = static_cast<int>(std::floor(s));
  const double frac = s - i0;
  auto at = [&](int i) {
    if (i < 0 || i >= n) return 0.0;
    return v[static_cast<size_t>(i)];
  };
  return (1.0 - frac) * at(i0) + frac * at(i0 + 1);
}

/// Gaussian moments oracle: E[x^{2p}] for N(0, lambda).
inline double gaussian_even_moment(double lambda, int p) {
  double value = 1.0;  // (2p-1)!! lambda^p
  for (int k = 2 * p - 1; k > 1; k -= 2) value *= k;
  return value * std::pow(lambda, p);
}

}  // namespace oracles
