#pragma once

#include <stdexcept>
#include <string>

namespace striplab {

// common base so callers can catch everything from this library at once
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// evaluation requested outside the strip of certified analyticity / decay
struct StripViolation : Error { using Error::Error; };
// a grid result would exceed the configured sample cap
struct GridOverflow : Error { using Error::Error; };
// operand shapes or grid specs do not match
struct DimensionMismatch : Error { using Error::Error; };
// an operation needing a derivative evaluator got none
struct MissingDerivative : Error { using Error::Error; };
// iterates of the K-functional solver left the trust region
struct SolverDiverged : Error { using Error::Error; };
// an inequality check found a violating probe (details in the message)
struct CheckFailed : Error { using Error::Error; };
// resolvent requested too close to the (estimated) spectrum
struct NearSpectrum : Error { using Error::Error; };
// measure decay cannot control the group growth in the Phillips integral
struct GrowthMismatch : Error { using Error::Error; };
// contour calculus requested for a function without enough decay
struct NotElementary : Error { using Error::Error; };
// contour height not strictly between group type and analyticity width
struct StripOrder : Error { using Error::Error; };
// a regularization / limiting procedure stagnated above tolerance
struct NoConvergence : Error { using Error::Error; };
// measure support sticks out of the window the kernels were built for
struct SupportViolation : Error { using Error::Error; };
// outer grid too short for the requested kernel supports
struct GridTooShort : Error { using Error::Error; };
// kernel parameters in the wrong order (e.g. alpha <= omega)
struct ParameterOrder : Error { using Error::Error; };
// malformed config file / unknown key (message carries line info)
struct ConfigError : Error { using Error::Error; };

}  // namespace striplab
