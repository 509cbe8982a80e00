#pragma once

#include <stdexcept>
#include <string>

namespace oulab {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define OULAB_DEFINE_ERROR(Name)              \
  struct Name : Error {                       \
    using Error::Error;                       \
  }

// spectral_gaussian
OULAB_DEFINE_ERROR(NonPositiveEigenvalue);
OULAB_DEFINE_ERROR(NotSorted);
OULAB_DEFINE_ERROR(DimensionMismatch);
OULAB_DEFINE_ERROR(DimensionTooLarge);

// domain geometry
OULAB_DEFINE_ERROR(DegenerateGradient);
OULAB_DEFINE_ERROR(NotOnBoundary);
OULAB_DEFINE_ERROR(NoBoundaryFound);
OULAB_DEFINE_ERROR(RadiusTooSmall);
OULAB_DEFINE_ERROR(HypothesisViolated);

// elliptic solver
OULAB_DEFINE_ERROR(EmptyDomain);
OULAB_DEFINE_ERROR(SolverDiverged);
OULAB_DEFINE_ERROR(NonPositiveLambda);
OULAB_DEFINE_ERROR(UnsupportedSource);
OULAB_DEFINE_ERROR(UnboundedDomain);

// monte carlo
OULAB_DEFINE_ERROR(StartOutsideDomain);

// harness
OULAB_DEFINE_ERROR(ConfigInvalid);
OULAB_DEFINE_ERROR(TaskFailed);

#undef OULAB_DEFINE_ERROR

}  // namespace oulab
