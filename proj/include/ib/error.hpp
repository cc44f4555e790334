#pragma once

#include <stdexcept>
#include <string>

namespace ib {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define IB_DEFINE_ERROR(Name)          \
  class Name : public Error {          \
   public:                             \
    using Error::Error;                \
  }

IB_DEFINE_ERROR(NegativeEntry);
IB_DEFINE_ERROR(NotNormalized);
IB_DEFINE_ERROR(EmptyAlphabet);
IB_DEFINE_ERROR(LengthMismatch);
IB_DEFINE_ERROR(CardinalityMismatch);
IB_DEFINE_ERROR(OutOfRange);
IB_DEFINE_ERROR(IndexOutOfRange);
IB_DEFINE_ERROR(ShapeMismatch);
IB_DEFINE_ERROR(NonPositiveTemperature);
IB_DEFINE_ERROR(EmptyDataset);
IB_DEFINE_ERROR(InfiniteBound);
IB_DEFINE_ERROR(NotPositiveDefinite);
IB_DEFINE_ERROR(EigenFailure);
IB_DEFINE_ERROR(SandwichViolation);
IB_DEFINE_ERROR(ForeignCurvePoint);
IB_DEFINE_ERROR(DistortionOutOfRange);
IB_DEFINE_ERROR(MarkovViolation);
IB_DEFINE_ERROR(EnumerationTooLarge);
IB_DEFINE_ERROR(ParseError);

#undef IB_DEFINE_ERROR

}  // namespace ib
