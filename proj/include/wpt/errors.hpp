#pragma once

#include <stdexcept>
#include <string>

namespace wpt {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AntipodalPoints : Error { using Error::Error; };
struct InvalidPoint : Error { using Error::Error; };
struct BaseMismatch : Error { using Error::Error; };
struct ManifoldMismatch : Error { using Error::Error; };
struct InfeasibleWeights : Error { using Error::Error; };
struct SourceMismatch : Error { using Error::Error; };
struct NonOptimalPlan : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct ParameterOutOfRange : Error { using Error::Error; };
struct SolverFailure : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct NotInterior : Error { using Error::Error; };
struct SegmentNotOptimal : Error { using Error::Error; };
struct NegativeF : Error { using Error::Error; };
struct AssumptionViolation : Error { using Error::Error; };

}  // namespace wpt
