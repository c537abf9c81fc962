#pragma once

#include <stdexcept>
#include <string>

namespace lyshift {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// weight spec construction / evaluation
struct MalformedSpec : Error { using Error::Error; };
struct ZeroWeight : Error { using Error::Error; };
struct BoundViolation : Error { using Error::Error; };
struct OutOfDomain : Error { using Error::Error; };

// vector / operator plumbing
struct SideMismatch : Error { using Error::Error; };
struct EmptyRange : Error { using Error::Error; };
struct NotBilateral : Error { using Error::Error; };
struct WrongSide : Error { using Error::Error; };

// witness construction
struct DecayNotEstablished : Error { using Error::Error; };
struct DivergenceNotEstablished : Error { using Error::Error; };
struct DeciderNotEstablished : Error { using Error::Error; };
struct TargetsOverlap : Error { using Error::Error; };
struct VerificationFailed : Error { using Error::Error; };

struct DepthInfeasible : Error {
  DepthInfeasible(const std::string& msg, int feasible)
      : Error(msg), feasible_depth(feasible) {}
  int feasible_depth;  // deepest level that was still representable
};

struct IOFailure : Error { using Error::Error; };

}  // namespace lyshift
