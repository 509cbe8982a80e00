#pragma once

#include <memory>
#include <span>
#include <vector>

#include "oulab/domain.hpp"

namespace oulab::detail {

/// Evaluation backend of a LevelSetDomain. The public class pads view vectors
/// with zeros before calling into the impl, so every method sees full_dim
/// coordinates.
class DomainImpl {
 public:
  virtual ~DomainImpl() = default;
  virtual double value(std::span<const double> x) const = 0;
  virtual bool analytic() const { return false; }
  virtual void gradient(std::span<const double> /*x*/, std::span<double> /*out*/) const {}
  virtual void hessian(std::span<const double> /*x*/, double* /*out*/) const {}

  int full_dim = 0;
  GeometryTag tag = GeometryTag::custom;
  double band_delta = 1.0;
  bool bounded = false;

  std::vector<double> vec_param;    // half_space normal / sphere center / ellipsoid center
  std::vector<double> coeff_param;  // ellipsoid coefficients
  double scalar_param = 0.0;        // half_space offset / radius
  int axis_param = 0;               // graph axis
  std::unique_ptr<GraphPhi> phi;
};

}  // namespace oulab::detail
