#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "oulab/domain.hpp"
#include "oulab/spectral_gaussian.hpp"

namespace oulab {

/// Path simulation parameters. The truncation dimension selects how many
/// coordinates evolve; the state is padded with zeros beyond it, so the
/// killed process lives on the cylindrical section G o P_n.
struct PathConfig {
  double step = 1e-3;
  double t_max = 12.0;
  long paths = 100000;
  std::uint64_t seed = 1;
  int dimension = 0;   // 0 = take the dimension of the start point
  bool bridge = false; // Brownian-bridge crossing correction (frozen coefficients)
  int threads = 0;     // 0 = hardware concurrency

  void validate() const;
};

/// Exact OU transition over a step of size h:
/// x'_k = e^{-h/2} x_k + sqrt(lambda_k (1 - e^{-h})) z_k.
void ou_step(const SpectralGaussian& measure, std::span<double> x, double h,
             std::span<const double> noise);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  double tail_bound = 0.0;  // sup|F| e^{-lambda T_max} / lambda (resolvent only)
  long paths = 0;
  long censored = 0;  // paths alive at T_max
};

struct PathRecord {
  double tau = 0.0;       // discrete exit time (or T_max when censored)
  double integral = 0.0;  // discounted path integral
  bool censored = false;
};

struct ExitEnsemble {
  McEstimate summary;
  std::vector<PathRecord> records;
};

/// Debug dump: one packed little-endian record per path
/// (uint64 path index, float64 tau, float64 discounted integral).
void dump_ensemble(const ExitEnsemble& ensemble, const std::string& path);

using PathField = std::function<double(std::span<const double>)>;

/// T^O(t) F(x) = E[F(X(t,x)) 1_{tau >= t}] by discrete sign checking of G.
McEstimate killed_semigroup(const SpectralGaussian& measure, const LevelSetDomain& domain,
                            const PathField& F, double t, std::span<const double> x,
                            const PathConfig& config);

/// U(x) = int_0^inf e^{-lambda t} T^O(t)F(x) dt by per-path trapezoid on
/// [0, tau ^ T_max]; the truncation tail is reported separately.
McEstimate resolvent_mc(const SpectralGaussian& measure, const LevelSetDomain& domain,
                        const PathField& F, double lambda, std::span<const double> x,
                        const PathConfig& config, ExitEnsemble* ensemble = nullptr);

struct KernelCheckEntry {
  int coord = 0;
  double t = 0.0, s = 0.0;
  double empirical = 0.0;
  double analytic = 0.0;  // lambda_k e^{-(t+s)/2} (e^{min(t,s)} - 1)
  double std_error = 0.0;
};

struct KernelCheckResult {
  std::vector<KernelCheckEntry> entries;
  double max_deviation = 0.0;  // max |empirical - analytic| / std_error
};

/// Empirical covariance of Y_k(t) = X_k(t) - e^{-t/2} x_k on a (t,s) grid
/// versus the path-covariance kernel.
KernelCheckResult kernel_check(const SpectralGaussian& measure, std::vector<double> tgrid,
                               std::span<const double> x, const PathConfig& config);

struct ConvergenceRow {
  int n = 0;
  bool start_outside = false;
  double estimate = 0.0;
  double std_error = 0.0;
  double diff_prev = 0.0;        // |U_n - U_prev| under common random numbers
  double diff_std_error = 0.0;   // stderr of the per-path difference
};

/// Runs resolvent_mc on the cylindrical truncations G o P_n for each n in
/// dims, with common random numbers across n.
std::vector<ConvergenceRow> cylindrical_convergence(const SpectralGaussian& measure,
                                                    const LevelSetDomain& domain,
                                                    const PathField& F, double lambda,
                                                    std::span<const double> x,
                                                    const std::vector<int>& dims,
                                                    const PathConfig& config);

}  // namespace oulab
