#include "oulab/domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "domain_impl.hpp"

namespace oulab {

const char* to_string(GeometryTag tag) {
  switch (tag) {
    case GeometryTag::half_space: return "half_space";
    case GeometryTag::graph: return "graph";
    case GeometryTag::sphere: return "sphere";
    case GeometryTag::ellipsoid: return "ellipsoid";
    case GeometryTag::integral_functional: return "integral_functional";
    case GeometryTag::custom: return "custom";
    case GeometryTag::whole_space: return "whole_space";
  }
  return "unknown";
}

double GraphPhi::value(std::span<const double> y) const {
  double v = constant;
  for (size_t i = 0; i < linear.size() && i < y.size(); ++i) v += linear[i] * y[i];
  if (!quad.empty()) {
    for (size_t i = 0; i < quad.size() && i < y.size(); ++i) {
      for (size_t j = 0; j < quad[i].size() && j < y.size(); ++j) {
        v += 0.5 * quad[i][j] * y[i] * y[j];
      }
    }
  }
  return v;
}

void GraphPhi::gradient(std::span<const double> y, std::span<double> out) const {
  for (size_t i = 0; i < out.size(); ++i) {
    double v = (i < linear.size()) ? linear[i] : 0.0;
    if (!quad.empty() && i < quad.size()) {
      for (size_t j = 0; j < quad[i].size() && j < y.size(); ++j) v += quad[i][j] * y[j];
    }
    out[i] = v;
  }
}

void GraphPhi::hessian(std::span<const double> /*y*/, double* out, int n) const {
  std::memset(out, 0, sizeof(double) * static_cast<size_t>(n) * static_cast<size_t>(n));
  if (quad.empty()) return;
  for (int i = 0; i < n && i < static_cast<int>(quad.size()); ++i) {
    for (int j = 0; j < n && j < static_cast<int>(quad[static_cast<size_t>(i)].size()); ++j) {
      out[i * n + j] = quad[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
  }
}

namespace {

double poly_eval(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (size_t i = c.size(); i-- > 0;) v = v * x + c[i];
  return v;
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
  if (c.size() <= 1) return {0.0};
  std::vector<double> d(c.size() - 1);
  for (size_t i = 1; i < c.size(); ++i) d[i - 1] = static_cast<double>(i) * c[i];
  return d;
}

}  // namespace

Rational1D::Rational1D(std::vector<double> numerator, std::vector<double> denominator)
    : num_(std::move(numerator)), den_(std::move(denominator)) {
  if (num_.empty()) num_ = {0.0};
}

double Rational1D::value(double xi) const {
  const double p = poly_eval(num_, xi);
  if (den_.empty()) return p;
  return p / poly_eval(den_, xi);
}

double Rational1D::d1(double xi) const {
  const auto dn = poly_derivative(num_);
  if (den_.empty()) return poly_eval(dn, xi);
  const auto dd = poly_derivative(den_);
  const double p = poly_eval(num_, xi), q = poly_eval(den_, xi);
  const double dp = poly_eval(dn, xi), dq = poly_eval(dd, xi);
  return (dp * q - p * dq) / (q * q);
}

double Rational1D::d2(double xi) const {
  const auto dn = poly_derivative(num_);
  const auto dn2 = poly_derivative(dn);
  if (den_.empty()) return poly_eval(dn2, xi);
  const auto dd = poly_derivative(den_);
  const auto dd2 = poly_derivative(dd);
  const double p = poly_eval(num_, xi), q = poly_eval(den_, xi);
  const double dp = poly_eval(dn, xi), dq = poly_eval(dd, xi);
  const double d2p = poly_eval(dn2, xi), d2q = poly_eval(dd2, xi);
  // (p/q)'' = (p'' q^2 - 2 p' q' q - p q'' q + 2 p q'^2) / q^3
  return (d2p * q * q - 2.0 * dp * dq * q - p * d2q * q + 2.0 * p * dq * dq) / (q * q * q);
}

namespace detail {
namespace {

class HalfSpaceImpl final : public DomainImpl {
 public:
  double value(std::span<const double> x) const override {
    double v = -scalar_param;
    for (size_t k = 0; k < vec_param.size(); ++k) v += vec_param[k] * x[k];
    return v;
  }
  bool analytic() const override { return true; }
  void gradient(std::span<const double> /*x*/, std::span<double> out) const override {
    std::copy(vec_param.begin(), vec_param.end(), out.begin());
  }
  void hessian(std::span<const double> /*x*/, double* out) const override {
    std::memset(out, 0, sizeof(double) * static_cast<size_t>(full_dim) * static_cast<size_t>(full_dim));
  }
};

class SphereImpl final : public DomainImpl {
 public:
  double value(std::span<const double> x) const override {
    double v = -scalar_param * scalar_param;
    for (size_t k = 0; k < vec_param.size(); ++k) {
      const double d = x[k] - vec_param[k];
      v += d * d;
    }
    return v;
  }
  bool analytic() const override { return true; }
  void gradient(std::span<const double> x, std::span<double> out) const override {
    for (size_t k = 0; k < vec_param.size(); ++k) out[k] = 2.0 * (x[k] - vec_param[k]);
  }
  void hessian(std::span<const double> /*x*/, double* out) const override {
    const size_t n = static_cast<size_t>(full_dim);
    std::memset(out, 0, sizeof(double) * n * n);
    for (size_t k = 0; k < n; ++k) out[k * n + k] = 2.0;
  }
};

class EllipsoidImpl final : public DomainImpl {
 public:
  double value(std::span<const double> x) const override {
    double v = -scalar_param * scalar_param;
    for (size_t k = 0; k < vec_param.size(); ++k) {
      const double d = x[k] - vec_param[k];
      v += coeff_param[k] * d * d;
    }
    return v;
  }
  bool analytic() const override { return true; }
  void gradient(std::span<const double> x, std::span<double> out) const override {
    for (size_t k = 0; k < vec_param.size(); ++k) {
      out[k] = 2.0 * coeff_param[k] * (x[k] - vec_param[k]);
    }
  }
  void hessian(std::span<const double> /*x*/, double* out) const override {
    const size_t n = static_cast<size_t>(full_dim);
    std::memset(out, 0, sizeof(double) * n * n);
    for (size_t k = 0; k < n; ++k) out[k * n + k] = 2.0 * coeff_param[k];
  }
};

class GraphImpl final : public DomainImpl {
 public:
  // g(x) = x_k - phi(x with axis k zeroed)
  double value(std::span<const double> x) const override {
    std::vector<double> y(x.begin(), x.end());
    y[static_cast<size_t>(axis_param)] = 0.0;
    return x[static_cast<size_t>(axis_param)] - phi->value(y);
  }
  bool analytic() const override { return true; }
  void gradient(std::span<const double> x, std::span<double> out) const override {
    std::vector<double> y(x.begin(), x.end());
    y[static_cast<size_t>(axis_param)] = 0.0;
    phi->gradient(y, out);
    for (auto& v : out) v = -v;
    out[static_cast<size_t>(axis_param)] = 1.0;
  }
  void hessian(std::span<const double> x, double* out) const override {
    std::vector<double> y(x.begin(), x.end());
    y[static_cast<size_t>(axis_param)] = 0.0;
    phi->hessian(y, out, full_dim);
    const size_t n = static_cast<size_t>(full_dim);
    for (size_t i = 0; i < n * n; ++i) out[i] = -out[i];
    const size_t k = static_cast<size_t>(axis_param);
    for (size_t i = 0; i < n; ++i) {
      out[i * n + k] = 0.0;
      out[k * n + i] = 0.0;
    }
  }
};

class WholeSpaceImpl final : public DomainImpl {
 public:
  double value(std::span<const double>) const override { return -1.0; }
  bool analytic() const override { return true; }
  void gradient(std::span<const double>, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
  }
  void hessian(std::span<const double>, double* out) const override {
    std::memset(out, 0, sizeof(double) * static_cast<size_t>(full_dim) * static_cast<size_t>(full_dim));
  }
};

class CustomImpl final : public DomainImpl {
 public:
  std::function<double(std::span<const double>)> g;
  double value(std::span<const double> x) const override { return g(x); }
};

}  // namespace
}  // namespace detail

LevelSetDomain::LevelSetDomain(std::shared_ptr<const detail::DomainImpl> impl, int view_dim)
    : impl_(std::move(impl)), view_dim_(view_dim) {}

LevelSetDomain LevelSetDomain::from_impl(std::shared_ptr<const detail::DomainImpl> impl) {
  const int dim = impl->full_dim;
  return LevelSetDomain(std::move(impl), dim);
}

int LevelSetDomain::ambient_dimension() const { return impl_->full_dim; }
GeometryTag LevelSetDomain::tag() const { return impl_->tag; }
double LevelSetDomain::band_delta() const { return impl_->band_delta; }
bool LevelSetDomain::is_bounded() const { return impl_->bounded; }
bool LevelSetDomain::has_analytic_derivatives() const { return impl_->analytic(); }
const std::vector<double>& LevelSetDomain::normal_or_center() const { return impl_->vec_param; }
double LevelSetDomain::level_offset_or_radius() const { return impl_->scalar_param; }
const std::vector<double>& LevelSetDomain::ellipsoid_coefficients() const {
  return impl_->coeff_param;
}
int LevelSetDomain::graph_axis() const { return impl_->axis_param; }
const GraphPhi* LevelSetDomain::graph_phi() const { return impl_->phi.get(); }

namespace {
// Pads a view vector with zeros up to the ambient dimension.
inline void pad(std::span<const double> x, int full_dim, std::vector<double>& buf) {
  buf.assign(static_cast<size_t>(full_dim), 0.0);
  std::copy(x.begin(), x.end(), buf.begin());
}
}  // namespace

double LevelSetDomain::value(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != view_dim_) {
    throw DimensionMismatch("domain value: expected dimension " + std::to_string(view_dim_));
  }
  if (view_dim_ == impl_->full_dim) return impl_->value(x);
  std::vector<double> buf;
  pad(x, impl_->full_dim, buf);
  return impl_->value(buf);
}

void LevelSetDomain::gradient(std::span<const double> x, std::span<double> out) const {
  if (static_cast<int>(x.size()) != view_dim_ || static_cast<int>(out.size()) != view_dim_) {
    throw DimensionMismatch("domain gradient: dimension mismatch");
  }
  if (impl_->analytic()) {
    if (view_dim_ == impl_->full_dim) {
      impl_->gradient(x, out);
    } else {
      std::vector<double> buf, grad(static_cast<size_t>(impl_->full_dim));
      pad(x, impl_->full_dim, buf);
      impl_->gradient(buf, grad);
      std::copy(grad.begin(), grad.begin() + view_dim_, out.begin());
    }
    return;
  }
  // Central finite differences, O(step^2).
  const double step = 1e-6;
  std::vector<double> xp(x.begin(), x.end());
  for (int k = 0; k < view_dim_; ++k) {
    const double orig = xp[static_cast<size_t>(k)];
    xp[static_cast<size_t>(k)] = orig + step;
    const double vp = value(xp);
    xp[static_cast<size_t>(k)] = orig - step;
    const double vm = value(xp);
    xp[static_cast<size_t>(k)] = orig;
    out[static_cast<size_t>(k)] = (vp - vm) / (2.0 * step);
  }
}

void LevelSetDomain::hessian(std::span<const double> x, double* out) const {
  const size_t n = static_cast<size_t>(view_dim_);
  if (x.size() != n) throw DimensionMismatch("domain hessian: dimension mismatch");
  if (impl_->analytic()) {
    if (view_dim_ == impl_->full_dim) {
      impl_->hessian(x, out);
    } else {
      const size_t nf = static_cast<size_t>(impl_->full_dim);
      std::vector<double> buf, hess(nf * nf);
      pad(x, impl_->full_dim, buf);
      impl_->hessian(buf, hess.data());
      for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) out[i * n + j] = hess[i * nf + j];
      }
    }
    return;
  }
  const double step = 1e-4;
  std::vector<double> xp(x.begin(), x.end());
  const double v0 = value(xp);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i; j < n; ++j) {
      double vij;
      if (i == j) {
        const double oi = xp[i];
        xp[i] = oi + step;
        const double vp = value(xp);
        xp[i] = oi - step;
        const double vm = value(xp);
        xp[i] = oi;
        vij = (vp - 2.0 * v0 + vm) / (step * step);
      } else {
        const double oi = xp[i], oj = xp[j];
        xp[i] = oi + step; xp[j] = oj + step;
        const double vpp = value(xp);
        xp[j] = oj - step;
        const double vpm = value(xp);
        xp[i] = oi - step;
        const double vmm = value(xp);
        xp[j] = oj + step;
        const double vmp = value(xp);
        xp[i] = oi; xp[j] = oj;
        vij = (vpp - vpm - vmp + vmm) / (4.0 * step * step);
      }
      out[i * n + j] = vij;
      out[j * n + i] = vij;
    }
  }
}

LevelSetDomain LevelSetDomain::truncate(int n) const {
  if (n < 1 || n > impl_->full_dim) {
    throw DimensionMismatch("truncate(" + std::to_string(n) + ") out of range");
  }
  return LevelSetDomain(impl_, n);
}

LevelSetDomain LevelSetDomain::half_space(std::vector<double> normal, double offset,
                                          double band_delta) {
  double norm = 0.0;
  for (double b : normal) norm += b * b;
  if (!(norm > 0.0)) throw DegenerateGradient("half_space normal must be nonzero");
  auto impl = std::make_shared<detail::HalfSpaceImpl>();
  impl->full_dim = static_cast<int>(normal.size());
  impl->tag = GeometryTag::half_space;
  impl->band_delta = band_delta;
  impl->bounded = false;
  impl->vec_param = std::move(normal);
  impl->scalar_param = offset;
  return from_impl(impl);
}

LevelSetDomain LevelSetDomain::sphere(std::vector<double> center, double radius,
                                      double band_delta) {
  if (!(radius > 0.0)) throw RadiusTooSmall("sphere radius must be positive");
  auto impl = std::make_shared<detail::SphereImpl>();
  impl->full_dim = static_cast<int>(center.size());
  impl->tag = GeometryTag::sphere;
  impl->band_delta = band_delta;
  impl->bounded = true;
  impl->vec_param = std::move(center);
  impl->scalar_param = radius;
  return from_impl(impl);
}

LevelSetDomain LevelSetDomain::ellipsoid(std::vector<double> coefficients,
                                         std::vector<double> center, double radius,
                                         double band_delta) {
  if (coefficients.size() != center.size()) {
    throw DimensionMismatch("ellipsoid coefficients/center size mismatch");
  }
  for (double t : coefficients) {
    if (!(t > 0.0)) throw Error("ellipsoid coefficients must be positive");
  }
  if (!(radius > 0.0)) throw RadiusTooSmall("ellipsoid radius must be positive");
  auto impl = std::make_shared<detail::EllipsoidImpl>();
  impl->full_dim = static_cast<int>(center.size());
  impl->tag = GeometryTag::ellipsoid;
  impl->band_delta = band_delta;
  impl->bounded = true;
  impl->vec_param = std::move(center);
  impl->coeff_param = std::move(coefficients);
  impl->scalar_param = radius;
  return from_impl(impl);
}

LevelSetDomain LevelSetDomain::graph(GraphPhi phi, int axis, int dimension, double band_delta) {
  if (axis < 0 || axis >= dimension) throw DimensionMismatch("graph axis out of range");
  auto impl = std::make_shared<detail::GraphImpl>();
  impl->full_dim = dimension;
  impl->tag = GeometryTag::graph;
  impl->band_delta = band_delta;
  impl->bounded = false;
  impl->axis_param = axis;
  impl->phi = std::make_unique<GraphPhi>(std::move(phi));
  return from_impl(impl);
}

LevelSetDomain LevelSetDomain::whole_space(int dimension) {
  auto impl = std::make_shared<detail::WholeSpaceImpl>();
  impl->full_dim = dimension;
  impl->tag = GeometryTag::whole_space;
  impl->band_delta = 1.0;
  impl->bounded = false;
  return from_impl(impl);
}

LevelSetDomain LevelSetDomain::custom(int dimension,
                                      std::function<double(std::span<const double>)> g,
                                      double band_delta, bool bounded) {
  auto impl = std::make_shared<detail::CustomImpl>();
  impl->full_dim = dimension;
  impl->tag = GeometryTag::custom;
  impl->band_delta = band_delta;
  impl->bounded = bounded;
  impl->g = std::move(g);
  return from_impl(impl);
}

// SmoothCap ---------------------------------------------------------------

double SmoothCap::eta(double r) const {
  const double s = std::abs(r);
  const double half = 0.5 * delta_;
  double v;
  if (s <= half) {
    v = s;
  } else if (s >= delta_) {
    v = plateau();
  } else {
    const double t = (s - half) / half;
    v = half + half * (t - t * t * t + 0.5 * t * t * t * t);
  }
  return (r < 0.0) ? -v : v;
}

double SmoothCap::eta_d1(double r) const {
  const double s = std::abs(r);
  const double half = 0.5 * delta_;
  if (s <= half) return 1.0;
  if (s >= delta_) return 0.0;
  const double t = (s - half) / half;
  return 1.0 - (3.0 * t * t - 2.0 * t * t * t);
}

double SmoothCap::eta_d2(double r) const {
  const double s = std::abs(r);
  const double half = 0.5 * delta_;
  if (s <= half || s >= delta_) return 0.0;
  const double t = (s - half) / half;
  const double v = -6.0 * t * (1.0 - t) / half;
  return (r < 0.0) ? -v : v;
}

SmoothCap SmoothCap::make(double delta) {
  if (!(delta > 0.0)) throw Error("SmoothCap: delta must be positive");
  SmoothCap cap(delta);
  // The constants 1 and 3/delta are load bearing in the A,B estimates.
  const int samples = 10000;
  double max_d1 = 0.0, max_d2 = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double r = (-1.2 + 2.4 * i / samples) * delta;
    max_d1 = std::max(max_d1, std::abs(cap.eta_d1(r)));
    max_d2 = std::max(max_d2, std::abs(cap.eta_d2(r)));
    if (std::abs(r) <= 0.5 * delta && std::abs(cap.eta(r) - r) > 1e-15 * delta) {
      throw Error("SmoothCap: profile is not the identity on [-delta/2, delta/2]");
    }
  }
  if (max_d1 > 1.0 + 1e-9) throw Error("SmoothCap: ||eta'|| exceeds 1");
  if (max_d2 > 3.0 / delta + 1e-9) throw Error("SmoothCap: ||eta''|| exceeds 3/delta");
  return cap;
}

void SmoothCap::apply(double g, std::span<const double> dg, const double* d2g, int n, double& g_t,
                      std::span<double> dg_t, double* d2g_t) const {
  const double e1 = eta_d1(g);
  const double e2 = eta_d2(g);
  g_t = eta(g);
  for (int i = 0; i < n; ++i) dg_t[static_cast<size_t>(i)] = e1 * dg[static_cast<size_t>(i)];
  if (d2g_t == nullptr) return;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      d2g_t[i * n + j] = e1 * d2g[i * n + j] + e2 * dg[static_cast<size_t>(i)] * dg[static_cast<size_t>(j)];
    }
  }
}

}  // namespace oulab
