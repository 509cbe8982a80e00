#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "oulab/errors.hpp"
#include "oulab/spectral_gaussian.hpp"

namespace oulab {

enum class GeometryTag {
  half_space,
  graph,
  sphere,
  ellipsoid,
  integral_functional,
  custom,
  whole_space,
};

const char* to_string(GeometryTag tag);

/// Quadratic graph profile phi(y) = c + <m, y> + 0.5 <S y, y>, evaluated on the
/// ambient coordinates with the distinguished axis zeroed out.
struct GraphPhi {
  double constant = 0.0;
  std::vector<double> linear;               // may be empty (treated as zero)
  std::vector<std::vector<double>> quad;    // symmetric; may be empty

  double value(std::span<const double> y) const;
  void gradient(std::span<const double> y, std::span<double> out) const;
  void hessian(std::span<const double> y, double* out, int n) const;
};

/// Rational scalar function p(xi)/q(xi) with analytic first and second
/// derivatives; q empty means the polynomial p.
class Rational1D {
 public:
  Rational1D() = default;
  Rational1D(std::vector<double> numerator, std::vector<double> denominator = {});

  double value(double xi) const;
  double d1(double xi) const;
  double d2(double xi) const;

  const std::vector<double>& numerator() const { return num_; }
  const std::vector<double>& denominator() const { return den_; }

 private:
  std::vector<double> num_{0.0};
  std::vector<double> den_{};
};

namespace detail {
class DomainImpl;
}

/// Level-set domain O = {x : g(x) < 0} with gradient/Hessian evaluators.
/// Gallery domains carry analytic derivatives; custom fields fall back to
/// central finite differences. Instances are immutable views and cheap to copy;
/// truncate(n) yields the cylindrical section g_n = g o P_n.
class LevelSetDomain {
 public:
  double value(std::span<const double> x) const;
  void gradient(std::span<const double> x, std::span<double> out) const;
  /// Row-major n*n Hessian, n = dimension().
  void hessian(std::span<const double> x, double* out) const;

  bool contains(std::span<const double> x) const { return value(x) < 0.0; }

  int dimension() const { return view_dim_; }
  int ambient_dimension() const;
  GeometryTag tag() const;
  double band_delta() const;
  bool is_bounded() const;
  bool has_analytic_derivatives() const;

  /// Cylindrical truncation: the n-dimensional domain {xi : g(P_n xi) < 0}.
  LevelSetDomain truncate(int n) const;

  static LevelSetDomain half_space(std::vector<double> normal, double offset, double band_delta);
  static LevelSetDomain sphere(std::vector<double> center, double radius, double band_delta);
  static LevelSetDomain ellipsoid(std::vector<double> coefficients, std::vector<double> center,
                                  double radius, double band_delta);
  static LevelSetDomain graph(GraphPhi phi, int axis, int dimension, double band_delta);
  static LevelSetDomain whole_space(int dimension);
  static LevelSetDomain custom(int dimension, std::function<double(std::span<const double>)> g,
                               double band_delta, bool bounded = false);

  // Gallery parameter access (empty/zero when not applicable).
  const std::vector<double>& normal_or_center() const;
  double level_offset_or_radius() const;
  const std::vector<double>& ellipsoid_coefficients() const;
  int graph_axis() const;
  const GraphPhi* graph_phi() const;

  // Used by the integral-functional factory.
  static LevelSetDomain from_impl(std::shared_ptr<const detail::DomainImpl> impl);
  const detail::DomainImpl& impl() const { return *impl_; }

 private:
  LevelSetDomain(std::shared_ptr<const detail::DomainImpl> impl, int view_dim);

  std::shared_ptr<const detail::DomainImpl> impl_;
  int view_dim_ = 0;
};

/// Odd C^2 profile eta with eta(r) = r on [0, delta/2], constant for r >= delta,
/// ||eta'||_inf <= 1 and ||eta''||_inf <= 3/delta. The plateau value forced by
/// those derivative bounds is 3 delta / 4. Construction verifies the bounds by
/// dense sampling and fails if they are violated.
class SmoothCap {
 public:
  static SmoothCap make(double delta);

  double delta() const { return delta_; }
  double plateau() const { return 0.75 * delta_; }

  double eta(double r) const;
  double eta_d1(double r) const;
  double eta_d2(double r) const;

  /// Chain rule: g_t = eta(g), Dg_t = eta'(g) Dg,
  /// D2g_t = eta'(g) D2g + eta''(g) Dg (x) Dg.
  void apply(double g, std::span<const double> dg, const double* d2g, int n, double& g_t,
             std::span<double> dg_t, double* d2g_t) const;

 private:
  explicit SmoothCap(double delta) : delta_(delta) {}
  double delta_ = 1.0;
};

}  // namespace oulab
