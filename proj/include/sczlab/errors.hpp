#pragma once

#include <stdexcept>
#include <string>

namespace sczlab {

// Base class for every failure the lab raises deliberately.
struct LabError : std::runtime_error {
  explicit LabError(const std::string& msg) : std::runtime_error(msg) {}
};

#define SCZLAB_ERROR(Name)                                        \
  struct Name : LabError {                                        \
    explicit Name(const std::string& msg) : LabError(msg) {}      \
  }

SCZLAB_ERROR(EmptyBallError);          // ball contains no grid node
SCZLAB_ERROR(EmptyFamilyError);        // ball family with zero members
SCZLAB_ERROR(NegativeWeightError);     // weight function with a negative node value
SCZLAB_ERROR(ZeroWeightNodeError);     // weight vanished below the positivity floor
SCZLAB_ERROR(UnresolvedAnnulusError);  // annulus holds no grid node
SCZLAB_ERROR(NonPositiveRhoError);     // critical radius evaluator returned <= 0
SCZLAB_ERROR(DisconnectedError);       // geodesic target unreachable
SCZLAB_ERROR(DomainTooSmallError);     // requested object does not fit in the box
SCZLAB_ERROR(NoBracketError);          // measure/radius ratio never crosses 1 in the bracket
SCZLAB_ERROR(SingularityUnresolvedError);  // excluded-shell bound too large a share
SCZLAB_ERROR(CoincidentPointsError);   // kernel evaluated on the diagonal
SCZLAB_ERROR(NonpositiveTimeError);    // heat kernel at t <= 0
SCZLAB_ERROR(QuadratureFailureError);  // adaptive integration did not converge
SCZLAB_ERROR(ParameterRelationViolatedError);  // operator/class parameter map violated
SCZLAB_ERROR(NormEstimateZeroError);   // empirical operator norm came out zero
SCZLAB_ERROR(WeightOutOfRangeError);   // weight outside the admissible class range
SCZLAB_ERROR(ConfigError);             // bad scenario configuration

#undef SCZLAB_ERROR

}  // namespace sczlab
