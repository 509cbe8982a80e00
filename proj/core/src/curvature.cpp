#include "oulab/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "domain_impl.hpp"
#include "oulab/rng.hpp"

namespace oulab {

const char* to_string(Admissibility a) {
  switch (a) {
    case Admissibility::admissible: return "admissible";
    case Admissibility::inadmissible: return "inadmissible";
    case Admissibility::undetermined: return "undetermined";
  }
  return "unknown";
}

namespace {

struct HParts {
  double h = 0.0;
  double q_half_dg_sq = 0.0;
};

// Assembles h from g's derivatives at x; returns nullopt on degenerate gradient.
std::optional<HParts> h_at(const SpectralGaussian& measure, const LevelSetDomain& domain,
                           std::span<const double> x, double degenerate_tol) {
  const int n = domain.dimension();
  std::vector<double> dg(static_cast<size_t>(n));
  std::vector<double> d2g(static_cast<size_t>(n) * static_cast<size_t>(n));
  domain.gradient(x, dg);
  domain.hessian(x, d2g.data());

  const auto& lam = measure.eigenvalues();
  double q_half_sq = 0.0;
  for (int k = 0; k < n; ++k) {
    q_half_sq += lam[static_cast<size_t>(k)] * dg[static_cast<size_t>(k)] * dg[static_cast<size_t>(k)];
  }
  if (std::sqrt(q_half_sq) < degenerate_tol) return std::nullopt;

  double lg = 0.0;
  for (int k = 0; k < n; ++k) {
    lg += 0.5 * lam[static_cast<size_t>(k)] * d2g[static_cast<size_t>(k) * n + k] -
          0.5 * x[static_cast<size_t>(k)] * dg[static_cast<size_t>(k)];
  }
  // <D^2g QDg, QDg>
  double quad = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      row += d2g[static_cast<size_t>(i) * n + j] * lam[static_cast<size_t>(j)] * dg[static_cast<size_t>(j)];
    }
    quad += row * lam[static_cast<size_t>(i)] * dg[static_cast<size_t>(i)];
  }
  HParts parts;
  parts.q_half_dg_sq = q_half_sq;
  parts.h = -2.0 * lg / q_half_sq + quad / (q_half_sq * q_half_sq);
  return parts;
}

void check_dims(const SpectralGaussian& measure, const LevelSetDomain& domain,
                std::span<const double> x) {
  if (measure.dimension() < domain.dimension() ||
      static_cast<int>(x.size()) != domain.dimension()) {
    throw DimensionMismatch("curvature: measure/domain/point dimensions are inconsistent");
  }
}

}  // namespace

double curvature_h_raw(const SpectralGaussian& measure, const LevelSetDomain& domain,
                       std::span<const double> x) {
  check_dims(measure, domain, x);
  const auto parts = h_at(measure, domain, x, 1e-8);
  if (!parts) throw DegenerateGradient("curvature_h: |Q^{1/2}Dg| below threshold");
  return parts->h;
}

double curvature_h(const SpectralGaussian& measure, const LevelSetDomain& domain,
                   std::span<const double> x, double boundary_tol) {
  check_dims(measure, domain, x);
  const double g = domain.value(x);
  if (std::abs(g) > boundary_tol) {
    throw NotOnBoundary("curvature_h: |g(x)| = " + std::to_string(std::abs(g)) +
                        " exceeds tolerance");
  }
  return curvature_h_raw(measure, domain, x);
}

// -- gallery closed forms ---------------------------------------------------

namespace {

double half_space_h(const SpectralGaussian& measure, const LevelSetDomain& domain) {
  const auto& b = domain.normal_or_center();
  double denom = 0.0;
  for (size_t k = 0; k < b.size() && k < static_cast<size_t>(domain.dimension()); ++k) {
    denom += measure.eigenvalue(static_cast<int>(k)) * b[k] * b[k];
  }
  if (denom <= 0.0) throw DegenerateGradient("half_space: Q-degenerate normal");
  return domain.level_offset_or_radius() / denom;
}

double sphere_h(const SpectralGaussian& measure, const LevelSetDomain& domain,
                std::span<const double> x) {
  const auto& x0 = domain.normal_or_center();
  const int n = domain.dimension();
  double inner = 0.0, qhalf = 0.0, qfull = 0.0, tr = 0.0;
  for (int k = 0; k < n; ++k) {
    const double d = x[static_cast<size_t>(k)] - x0[static_cast<size_t>(k)];
    const double lam = measure.eigenvalue(k);
    inner += d * x[static_cast<size_t>(k)];
    qhalf += lam * d * d;
    qfull += lam * lam * d * d;
    tr += lam;
  }
  if (qhalf <= 0.0) throw DegenerateGradient("sphere: Q-degenerate gradient");
  return (inner - tr + qfull / qhalf) / (2.0 * qhalf);
}

double ellipsoid_h(const SpectralGaussian& measure, const LevelSetDomain& domain,
                   std::span<const double> x) {
  const auto& x0 = domain.normal_or_center();
  const auto& t = domain.ellipsoid_coefficients();
  const int n = domain.dimension();
  double inner = 0.0, qhalf = 0.0, qcube = 0.0, tr = 0.0;
  for (int k = 0; k < n; ++k) {
    const double d = x[static_cast<size_t>(k)] - x0[static_cast<size_t>(k)];
    const double lam = measure.eigenvalue(k);
    const double tk = t[static_cast<size_t>(k)];
    inner += tk * d * x[static_cast<size_t>(k)];
    qhalf += lam * tk * tk * d * d;
    qcube += lam * lam * tk * tk * tk * d * d;
    tr += lam * tk;
  }
  if (qhalf <= 0.0) throw DegenerateGradient("ellipsoid: Q-degenerate gradient");
  return (inner - tr + qcube / qhalf) / (2.0 * qhalf);
}

}  // namespace

double graph_domain_h(const SpectralGaussian& measure, const GraphPhi& phi, int axis,
                      std::span<const double> x, double boundary_tol) {
  const int n = static_cast<int>(x.size());
  std::vector<double> y(x.begin(), x.end());
  y[static_cast<size_t>(axis)] = 0.0;
  const double phi_val = phi.value(y);
  if (std::abs(x[static_cast<size_t>(axis)] - phi_val) > boundary_tol) {
    throw NotOnBoundary("graph_domain_h: x_k != Phi(x~)");
  }
  std::vector<double> dphi(static_cast<size_t>(n));
  std::vector<double> d2phi(static_cast<size_t>(n) * static_cast<size_t>(n));
  phi.gradient(y, dphi);
  phi.hessian(y, d2phi.data(), n);

  double denom = measure.eigenvalue(axis);
  double first_num = phi_val;
  double second_num = 0.0;
  for (int h = 0; h < n; ++h) {
    if (h == axis) continue;
    const double lam_h = measure.eigenvalue(h);
    denom += lam_h * dphi[static_cast<size_t>(h)] * dphi[static_cast<size_t>(h)];
    first_num += lam_h * d2phi[static_cast<size_t>(h) * n + h] -
                 x[static_cast<size_t>(h)] * dphi[static_cast<size_t>(h)];
    for (int l = 0; l < n; ++l) {
      if (l == axis) continue;
      second_num += lam_h * measure.eigenvalue(l) * d2phi[static_cast<size_t>(h) * n + l] *
                    dphi[static_cast<size_t>(h)] * dphi[static_cast<size_t>(l)];
    }
  }
  // The second fraction carries a minus sign: D^2 g = -D^2 Phi on {x_k = Phi}.
  return first_num / denom - second_num / (denom * denom);
}

double closed_form_h(const SpectralGaussian& measure, const LevelSetDomain& domain,
                     std::span<const double> x) {
  check_dims(measure, domain, x);
  switch (domain.tag()) {
    case GeometryTag::half_space:
      return half_space_h(measure, domain);
    case GeometryTag::sphere:
      return sphere_h(measure, domain, x);
    case GeometryTag::ellipsoid:
      return ellipsoid_h(measure, domain, x);
    case GeometryTag::graph:
      return graph_domain_h(measure, *domain.graph_phi(), domain.graph_axis(), x);
    case GeometryTag::integral_functional:
      // The s-space expression coincides with the generic assembly.
      return curvature_h_raw(measure, domain, x);
    default:
      throw Error("closed_form_h: no closed form for this geometry");
  }
}

// -- admissibility criteria -------------------------------------------------

Admissibility sphere_admissibility(const SpectralGaussian& measure, std::span<const double> x0,
                                   double r) {
  if (!(r > 0.0)) throw RadiusTooSmall("sphere_admissibility: r must be positive");
  double norm_sq = 0.0;
  for (double v : x0) norm_sq += v * v;
  const double lhs = r * (std::sqrt(norm_sq) + r);
  if (lhs < measure.tail_trace(1)) return Admissibility::admissible;
  if (r * r > measure.trace()) return Admissibility::inadmissible;
  return Admissibility::undetermined;
}

double sphere_blowup_witness(const SpectralGaussian& measure, std::span<const double> x0,
                             double r, int n) {
  if (n < 1 || n > measure.dimension()) {
    throw DimensionMismatch("sphere_blowup_witness: n out of range");
  }
  double tail_sq = 0.0;
  for (size_t k = static_cast<size_t>(n); k < x0.size(); ++k) tail_sq += x0[k] * x0[k];
  const double rn_sq = r * r - tail_sq;
  if (!(rn_sq > 0.0)) {
    throw RadiusTooSmall("sphere_blowup_witness: r^2 <= sum_{k>n} x0_k^2");
  }
  const double rn = std::sqrt(rn_sq);
  const double x0n = (static_cast<size_t>(n - 1) < x0.size()) ? x0[static_cast<size_t>(n - 1)] : 0.0;
  double partial = 0.0;
  for (int k = 0; k < n - 1; ++k) partial += measure.eigenvalue(k);
  return (rn_sq + rn * x0n - partial) / (2.0 * measure.eigenvalue(n - 1) * rn_sq);
}

bool ellipsoid_admissibility(const SpectralGaussian& measure, std::span<const double> t,
                             std::span<const double> x0, double r) {
  if (t.size() != x0.size() || t.size() != static_cast<size_t>(measure.dimension())) {
    throw DimensionMismatch("ellipsoid_admissibility: size mismatch");
  }
  size_t kbar = 0;
  double best = -1.0;
  double total = 0.0;
  double tx0_sq = 0.0;
  for (size_t k = 0; k < t.size(); ++k) {
    const double prod = measure.eigenvalue(static_cast<int>(k)) * t[k];
    total += prod;
    if (prod > best) {
      best = prod;
      kbar = k;
    }
    tx0_sq += t[k] * x0[k] * x0[k];
  }
  const double threshold = total - measure.eigenvalue(static_cast<int>(kbar)) * t[kbar];
  return r * (std::sqrt(tx0_sq) + r) < threshold;
}

// -- sampled constants ------------------------------------------------------

namespace {

struct BoundaryLocator {
  const SpectralGaussian& measure;
  const LevelSetDomain& domain;
  const SamplerConfig& config;
  std::vector<double> anchor;  // a point with g < 0, when one is known

  // Newton steps along Dg, polished by bisection along the final segment.
  // Returns false when no boundary crossing could be located from x.
  bool project(std::vector<double>& x) const {
    const int n = domain.dimension();
    std::vector<double> dg(static_cast<size_t>(n));
    for (int iter = 0; iter < 60; ++iter) {
      const double g = domain.value(x);
      if (std::abs(g) <= config.boundary_tol) return true;
      domain.gradient(x, dg);
      double norm_sq = 0.0;
      for (double v : dg) norm_sq += v * v;
      if (norm_sq < 1e-28) return false;
      const double step = -g / norm_sq;
      for (int k = 0; k < n; ++k) x[static_cast<size_t>(k)] += step * dg[static_cast<size_t>(k)];
    }
    return std::abs(domain.value(x)) <= 1e3 * config.boundary_tol;
  }

  bool bisect_segment(std::vector<double> lo, std::vector<double> hi, double g_lo,
                      std::vector<double>& out) const {
    const int n = domain.dimension();
    std::vector<double> mid(static_cast<size_t>(n));
    for (int it = 0; it < 200; ++it) {
      for (int k = 0; k < n; ++k) {
        mid[static_cast<size_t>(k)] = 0.5 * (lo[static_cast<size_t>(k)] + hi[static_cast<size_t>(k)]);
      }
      const double gm = domain.value(mid);
      if (std::abs(gm) <= config.boundary_tol) {
        out = mid;
        return true;
      }
      if (gm * g_lo < 0.0) {
        hi = mid;
      } else {
        lo = mid;
        g_lo = gm;
      }
    }
    out = mid;
    return std::abs(domain.value(mid)) <= 1e3 * config.boundary_tol;
  }

  // Scans along the Q-gradient direction for a sign change and bisects;
  // falls back to the segment from the interior anchor.
  bool locate(std::vector<double> x, std::vector<double>& out) const {
    const int n = domain.dimension();
    const double g0 = domain.value(x);
    if (std::abs(g0) <= config.boundary_tol) {
      out = std::move(x);
      return true;
    }
    std::vector<double> dg(static_cast<size_t>(n)), dir(static_cast<size_t>(n));
    domain.gradient(x, dg);
    double norm = 0.0;
    for (int k = 0; k < n; ++k) {
      dir[static_cast<size_t>(k)] = measure.eigenvalue(k) * dg[static_cast<size_t>(k)];
      norm += dir[static_cast<size_t>(k)] * dir[static_cast<size_t>(k)];
    }
    norm = std::sqrt(norm);
    if (norm >= 1e-14) {
      for (auto& v : dir) v /= norm;
      // March in the direction that decreases |g|.
      const double sign = (g0 > 0.0) ? -1.0 : 1.0;
      double step = 0.05 * std::sqrt(measure.eigenvalue(0));
      std::vector<double> lo = x, hi = x;
      double t = 0.0;
      for (int j = 0; j < 40; ++j) {
        t += step;
        step *= 1.6;
        for (int k = 0; k < n; ++k) {
          hi[static_cast<size_t>(k)] =
              x[static_cast<size_t>(k)] + sign * t * dir[static_cast<size_t>(k)];
        }
        if (domain.value(hi) * g0 < 0.0) {
          return bisect_segment(lo, hi, domain.value(lo), out);
        }
        lo = hi;
      }
    }
    if (anchor.empty()) return false;
    // Anchor fallback: the segment anchor -> x (extended outward if needed)
    // crosses the boundary whenever x is outside.
    std::vector<double> outer = x;
    double g_outer = g0;
    for (int j = 0; j < 60 && g_outer <= 0.0; ++j) {
      for (int k = 0; k < n; ++k) {
        outer[static_cast<size_t>(k)] =
            anchor[static_cast<size_t>(k)] +
            2.0 * (outer[static_cast<size_t>(k)] - anchor[static_cast<size_t>(k)]);
      }
      g_outer = domain.value(outer);
    }
    if (g_outer <= 0.0) return false;
    return bisect_segment(anchor, outer, domain.value(anchor), out);
  }
};

/// A point with g < 0: gallery geometry when available, otherwise probing.
std::vector<double> interior_anchor(const SpectralGaussian& measure, const LevelSetDomain& domain,
                                    rng::Sequence& rnd) {
  const int n = domain.dimension();
  std::vector<double> x(static_cast<size_t>(n), 0.0);
  auto ok = [&](const std::vector<double>& p) { return domain.value(p) < 0.0; };

  switch (domain.tag()) {
    case GeometryTag::sphere:
    case GeometryTag::ellipsoid: {
      const auto& c = domain.normal_or_center();
      for (int k = 0; k < n; ++k) x[static_cast<size_t>(k)] = c[static_cast<size_t>(k)];
      if (ok(x)) return x;
      break;
    }
    case GeometryTag::half_space: {
      const auto& b = domain.normal_or_center();
      double norm_sq = 0.0;
      for (int k = 0; k < n; ++k) norm_sq += b[static_cast<size_t>(k)] * b[static_cast<size_t>(k)];
      if (norm_sq > 0.0) {
        const double target = domain.level_offset_or_radius() - std::max(domain.band_delta(), 1.0);
        for (int k = 0; k < n; ++k) {
          x[static_cast<size_t>(k)] = b[static_cast<size_t>(k)] * target / norm_sq;
        }
        if (ok(x)) return x;
      }
      break;
    }
    case GeometryTag::graph: {
      const int axis = domain.graph_axis();
      if (axis < n) {
        std::fill(x.begin(), x.end(), 0.0);
        const double phi0 = domain.graph_phi()->value(x);
        x[static_cast<size_t>(axis)] = phi0 - std::max(domain.band_delta(), 1.0);
        if (ok(x)) return x;
      }
      break;
    }
    default:
      break;
  }
  std::fill(x.begin(), x.end(), 0.0);
  if (ok(x)) return x;
  // Scan the first eigendirection, then fall back to Gaussian probing.
  for (double c : {-1.0, 1.0, -2.0, 2.0, -5.0, 5.0, -20.0, 20.0}) {
    x[0] = c * std::sqrt(measure.eigenvalue(0));
    if (ok(x)) return x;
  }
  for (int trial = 0; trial < 4096; ++trial) {
    for (int k = 0; k < n; ++k) {
      x[static_cast<size_t>(k)] = std::sqrt(measure.eigenvalue(k)) * rnd.normal();
    }
    if (ok(x)) return x;
  }
  throw NoBoundaryFound("no interior point found for the domain");
}

}  // namespace

CurvatureReport constants_ABC(const SpectralGaussian& measure, const LevelSetDomain& domain,
                              const SamplerConfig& config) {
  const int n = domain.dimension();
  if (measure.dimension() < n) throw DimensionMismatch("constants_ABC: measure too small");
  const double delta = domain.band_delta();
  const SmoothCap cap = SmoothCap::make(delta);
  rng::Sequence rnd(config.seed);
  BoundaryLocator locator{measure, domain, config, interior_anchor(measure, domain, rnd)};

  CurvatureReport report;
  report.delta = delta;
  report.ascent_iterations = config.ascent_iterations;
  report.C = -std::numeric_limits<double>::infinity();

  std::vector<std::vector<double>> band_points;
  std::vector<std::vector<double>> boundary_points;

  auto gaussian_point = [&]() {
    std::vector<double> x(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
      double z = rnd.normal();
      z = std::clamp(z, -config.box_halfwidth, config.box_halfwidth);
      x[static_cast<size_t>(k)] = std::sqrt(measure.eigenvalue(k)) * z;
    }
    return x;
  };

  // Gaussian rejection sampling into the band.
  for (int i = 0; i < config.band_samples; ++i) {
    auto x = gaussian_point();
    if (std::abs(domain.value(x)) <= delta) band_points.push_back(std::move(x));
  }

  // Boundary points from sign-changing Gaussian starts.
  for (int s = 0; s < config.starts; ++s) {
    std::vector<double> b;
    if (locator.locate(gaussian_point(), b)) boundary_points.push_back(std::move(b));
  }
  if (boundary_points.empty()) {
    throw NoBoundaryFound("constants_ABC: no g = 0 crossing located");
  }

  // Fill the band near the boundary (rejection sampling alone misses thin
  // bands in high dimension).
  {
    std::vector<double> dg(static_cast<size_t>(n));
    const size_t per_boundary =
        std::max<size_t>(1, static_cast<size_t>(config.band_samples) / (2 * boundary_points.size()));
    for (const auto& b : boundary_points) {
      domain.gradient(b, dg);
      double norm_sq = 0.0;
      for (double v : dg) norm_sq += v * v;
      if (norm_sq < 1e-28) continue;
      for (size_t j = 0; j < per_boundary; ++j) {
        const double target = (2.0 * rnd.uniform() - 1.0) * delta;
        std::vector<double> x = b;
        // One Newton step puts g close to target for smooth g; a couple more
        // polish it. Accept whatever lands inside the band.
        for (int it = 0; it < 4; ++it) {
          const double g = domain.value(x);
          domain.gradient(x, dg);
          norm_sq = 0.0;
          for (double v : dg) norm_sq += v * v;
          if (norm_sq < 1e-28) break;
          const double step = (target - g) / norm_sq;
          for (int k = 0; k < n; ++k) {
            x[static_cast<size_t>(k)] += step * dg[static_cast<size_t>(k)];
          }
        }
        if (std::abs(domain.value(x)) <= delta) band_points.push_back(std::move(x));
      }
    }
  }

  // A, B over the capped field; band_a, band_b over the raw band.
  std::vector<double> dg(static_cast<size_t>(n));
  std::vector<double> d2g(static_cast<size_t>(n) * static_cast<size_t>(n));
  std::vector<double> dgt(static_cast<size_t>(n));
  std::vector<double> d2gt(static_cast<size_t>(n) * static_cast<size_t>(n));
  auto absorb = [&](std::span<const double> x) {
    const double g = domain.value(x);
    if (std::abs(g) > delta) return;
    domain.gradient(x, dg);
    domain.hessian(x, d2g.data());
    double qhalf_sq = 0.0;
    double hs_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      qhalf_sq += measure.eigenvalue(i) * dg[static_cast<size_t>(i)] * dg[static_cast<size_t>(i)];
      for (int j = 0; j < n; ++j) {
        const double m = d2g[static_cast<size_t>(i) * n + j];
        hs_sq += measure.eigenvalue(i) * measure.eigenvalue(j) * m * m;
      }
    }
    report.band_a = std::max(report.band_a, std::sqrt(qhalf_sq));
    report.band_b = std::max(report.band_b, std::sqrt(hs_sq));
    if (g < 0.0 || std::abs(g) <= config.boundary_tol * 1e3) {
      double gt;
      cap.apply(g, dg, d2g.data(), n, gt, dgt, d2gt.data());
      double qhalf_cap = 0.0, hs_cap = 0.0;
      for (int i = 0; i < n; ++i) {
        qhalf_cap += measure.eigenvalue(i) * dgt[static_cast<size_t>(i)] * dgt[static_cast<size_t>(i)];
        for (int j = 0; j < n; ++j) {
          const double m = d2gt[static_cast<size_t>(i) * n + j];
          hs_cap += measure.eigenvalue(i) * measure.eigenvalue(j) * m * m;
        }
      }
      report.A = std::max(report.A, std::sqrt(qhalf_cap));
      report.B = std::max(report.B, std::sqrt(hs_cap));
    }
  };
  for (const auto& x : band_points) absorb(x);
  for (const auto& b : boundary_points) absorb(b);
  report.sample_count = static_cast<long>(band_points.size() + boundary_points.size());

  // Projected-gradient ascent of h constrained to g = 0.
  const double base_step = 0.05 * std::sqrt(measure.eigenvalue(0));
  for (auto& b : boundary_points) {
    double current;
    try {
      current = curvature_h_raw(measure, domain, b);
    } catch (const DegenerateGradient&) {
      ++report.degenerate_skipped;
      continue;
    }
    double alpha = base_step;
    std::vector<double> grad_h(static_cast<size_t>(n)), tangent(static_cast<size_t>(n));
    std::vector<double> candidate;
    for (int iter = 0; iter < config.ascent_iterations && n > 1; ++iter) {
      // Finite-difference gradient of h.
      bool ok = true;
      std::vector<double> xp = b;
      for (int k = 0; k < n; ++k) {
        const double orig = xp[static_cast<size_t>(k)];
        double hp, hm;
        try {
          xp[static_cast<size_t>(k)] = orig + config.fd_step;
          hp = curvature_h_raw(measure, domain, xp);
          xp[static_cast<size_t>(k)] = orig - config.fd_step;
          hm = curvature_h_raw(measure, domain, xp);
        } catch (const DegenerateGradient&) {
          ok = false;
          xp[static_cast<size_t>(k)] = orig;
          break;
        }
        xp[static_cast<size_t>(k)] = orig;
        grad_h[static_cast<size_t>(k)] = (hp - hm) / (2.0 * config.fd_step);
      }
      if (!ok) break;
      domain.gradient(b, dg);
      double gg = 0.0, gh = 0.0;
      for (int k = 0; k < n; ++k) {
        gg += dg[static_cast<size_t>(k)] * dg[static_cast<size_t>(k)];
        gh += dg[static_cast<size_t>(k)] * grad_h[static_cast<size_t>(k)];
      }
      if (gg < 1e-28) break;
      double tnorm = 0.0;
      for (int k = 0; k < n; ++k) {
        tangent[static_cast<size_t>(k)] =
            grad_h[static_cast<size_t>(k)] - (gh / gg) * dg[static_cast<size_t>(k)];
        tnorm += tangent[static_cast<size_t>(k)] * tangent[static_cast<size_t>(k)];
      }
      tnorm = std::sqrt(tnorm);
      if (tnorm < 1e-14) break;
      candidate = b;
      for (int k = 0; k < n; ++k) {
        candidate[static_cast<size_t>(k)] += alpha * tangent[static_cast<size_t>(k)] / tnorm;
      }
      if (!locator.project(candidate)) {
        alpha *= 0.5;
        continue;
      }
      double h_cand;
      try {
        h_cand = curvature_h_raw(measure, domain, candidate);
      } catch (const DegenerateGradient&) {
        alpha *= 0.5;
        continue;
      }
      if (h_cand > current) {
        current = h_cand;
        b = candidate;
        alpha *= 1.3;
      } else {
        alpha *= 0.5;
      }
    }
    report.C = std::max(report.C, current);
    ++report.boundary_points;
  }
  if (report.boundary_points == 0) {
    throw DegenerateGradient("constants_ABC: all boundary samples had degenerate gradients");
  }
  return report;
}

// -- integral functional ----------------------------------------------------

namespace {

class IntegralFunctionalImpl final : public detail::DomainImpl {
 public:
  Rational1D g1d;
  double level = 0.0;  // r
  std::vector<double> s_weights;           // Simpson weights, length panels+1
  std::vector<std::vector<double>> basis;  // [k][j] = sqrt(2) sin((k+1) pi s_j)

  void eval_path(std::span<const double> x, std::vector<double>& path) const {
    const size_t ns = s_weights.size();
    path.assign(ns, 0.0);
    for (size_t k = 0; k < static_cast<size_t>(full_dim); ++k) {
      const double xk = x[k];
      if (xk == 0.0) continue;
      const auto& row = basis[k];
      for (size_t j = 0; j < ns; ++j) path[j] += xk * row[j];
    }
  }

  double value(std::span<const double> x) const override {
    std::vector<double> path;
    eval_path(x, path);
    double v = 0.0;
    for (size_t j = 0; j < path.size(); ++j) v += s_weights[j] * g1d.value(path[j]);
    return v - level;
  }

  bool analytic() const override { return true; }

  void gradient(std::span<const double> x, std::span<double> out) const override {
    std::vector<double> path;
    eval_path(x, path);
    std::vector<double> gp(path.size());
    for (size_t j = 0; j < path.size(); ++j) gp[j] = s_weights[j] * g1d.d1(path[j]);
    for (size_t k = 0; k < static_cast<size_t>(full_dim); ++k) {
      double v = 0.0;
      const auto& row = basis[k];
      for (size_t j = 0; j < path.size(); ++j) v += gp[j] * row[j];
      out[k] = v;
    }
  }

  void hessian(std::span<const double> x, double* out) const override {
    std::vector<double> path;
    eval_path(x, path);
    std::vector<double> gpp(path.size());
    for (size_t j = 0; j < path.size(); ++j) gpp[j] = s_weights[j] * g1d.d2(path[j]);
    const size_t nf = static_cast<size_t>(full_dim);
    for (size_t h = 0; h < nf; ++h) {
      for (size_t k = h; k < nf; ++k) {
        double v = 0.0;
        for (size_t j = 0; j < path.size(); ++j) v += gpp[j] * basis[h][j] * basis[k][j];
        out[h * nf + k] = v;
        out[k * nf + h] = v;
      }
    }
  }
};

}  // namespace

LevelSetDomain integral_functional_domain(const SpectralGaussian& measure, Rational1D g1d,
                                          double r, int n, double a, double alpha, double beta,
                                          double band_delta, IntegralFunctionalDiagnostics* diag,
                                          int panels, std::uint64_t seed) {
  const double pi = std::numbers::pi;
  if (n < 1 || n > measure.dimension()) {
    throw DimensionMismatch("integral_functional_domain: n out of range");
  }
  for (int k = 1; k <= n; ++k) {
    const double expected = 1.0 / (pi * pi * k * k);
    if (std::abs(measure.eigenvalue(k - 1) - expected) > 1e-12 * expected) {
      throw HypothesisViolated(
          "integral_functional_domain requires the inverse-square spectrum 1/(pi^2 k^2)");
    }
  }
  if (!(a > 0.0)) throw HypothesisViolated("integral_functional_domain: a must be positive");
  if (panels % 2 != 0) ++panels;

  // Dense hypothesis check: |g'| >= a (and record inf g'' and the growth bound).
  double min_gp = std::numeric_limits<double>::infinity();
  double min_gpp = std::numeric_limits<double>::infinity();
  bool growth_ok = true;
  const double xi_range = 50.0;
  const int xi_samples = 20000;
  for (int i = 0; i <= xi_samples; ++i) {
    const double xi = -xi_range + 2.0 * xi_range * i / xi_samples;
    const double gp = g1d.d1(xi);
    min_gp = std::min(min_gp, std::abs(gp));
    min_gpp = std::min(min_gpp, g1d.d2(xi));
    if (xi * gp > alpha * g1d.value(xi) + beta + 1e-9) growth_ok = false;
  }
  if (min_gp < a * (1.0 - 1e-12)) {
    throw HypothesisViolated("integral_functional_domain: sampled |g'| = " +
                             std::to_string(min_gp) + " < a = " + std::to_string(a));
  }

  auto impl = std::make_shared<IntegralFunctionalImpl>();
  impl->full_dim = n;
  impl->tag = GeometryTag::integral_functional;
  impl->band_delta = band_delta;
  impl->bounded = false;
  impl->g1d = std::move(g1d);
  impl->level = r;
  impl->scalar_param = r;
  const size_t ns = static_cast<size_t>(panels) + 1;
  impl->s_weights.assign(ns, 0.0);
  const double hs = 1.0 / panels;
  for (size_t j = 0; j < ns; ++j) {
    double w = (j == 0 || j + 1 == ns) ? 1.0 : ((j % 2 == 1) ? 4.0 : 2.0);
    impl->s_weights[j] = w * hs / 3.0;
  }
  impl->basis.resize(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    auto& row = impl->basis[static_cast<size_t>(k)];
    row.resize(ns);
    for (size_t j = 0; j < ns; ++j) {
      row[j] = std::numbers::sqrt2 * std::sin((k + 1) * pi * static_cast<double>(j) * hs);
    }
  }
  LevelSetDomain domain = LevelSetDomain::from_impl(impl);

  if (diag != nullptr) {
    // Provable lower bound: |<DG, e_1>| >= sqrt(2) a integral_0^1 sin(pi s) ds
    // = 2 sqrt(2) a / pi, hence |D_H G_n|_H^2 >= lambda_1 (2 sqrt2 a/pi)^2 = 8 a^2/pi^4.
    diag->grad_lower_bound = 8.0 * a * a / (pi * pi * pi * pi);
    diag->min_g1d_prime = min_gp;
    diag->min_g1d_second = min_gpp;
    diag->growth_ok = growth_ok;
    rng::Sequence rnd(seed);
    double min_grad = std::numeric_limits<double>::infinity();
    std::vector<double> x(static_cast<size_t>(n)), dg(static_cast<size_t>(n));
    for (int trial = 0; trial < 200; ++trial) {
      for (int k = 0; k < n; ++k) {
        x[static_cast<size_t>(k)] = std::sqrt(measure.eigenvalue(k)) * rnd.normal();
      }
      domain.gradient(x, dg);
      double v = 0.0;
      for (int k = 0; k < n; ++k) {
        v += measure.eigenvalue(k) * dg[static_cast<size_t>(k)] * dg[static_cast<size_t>(k)];
      }
      min_grad = std::min(min_grad, v);
    }
    diag->sampled_grad_min = min_grad;
    diag->gradient_ok = min_grad >= diag->grad_lower_bound * (1.0 - 1e-9);
    const double bracket = std::max(-min_gpp, 0.0) / 6.0 + alpha * r + beta;
    diag->h_sup_bound = bracket > 0.0 ? bracket / diag->grad_lower_bound : 0.0;
  }
  return domain;
}

}  // namespace oulab
