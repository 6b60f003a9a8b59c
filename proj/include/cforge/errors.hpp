#pragma once
#include <stdexcept>
#include <string>

namespace cforge {

struct Error : std::runtime_error {
  explicit Error(const std::string& m) : std::runtime_error(m) {}
};

// A leading term could not be certified nonzero at the working precision.
struct PrecisionExhausted : Error {
  explicit PrecisionExhausted(const std::string& m) : Error("precision exhausted: " + m) {}
};

struct NotAUnit : Error {
  explicit NotAUnit(const std::string& m) : Error("not a unit: " + m) {}
};

struct RingMismatch : Error {
  explicit RingMismatch(const std::string& m) : Error("ring mismatch: " + m) {}
};

struct NotApplicable : Error {
  explicit NotApplicable(const std::string& m) : Error("not applicable: " + m) {}
};

struct DegreeBoundTooSmall : Error {
  explicit DegreeBoundTooSmall(const std::string& m) : Error("degree bound too small: " + m) {}
};

struct EdgeNotPresent : Error {
  explicit EdgeNotPresent(const std::string& m) : Error("edge not present: " + m) {}
};

struct IncompatibleWeight : Error {
  explicit IncompatibleWeight(const std::string& m) : Error("incompatible weight: " + m) {}
};

struct OutOfExploredRegion : Error {
  explicit OutOfExploredRegion(const std::string& m) : Error("outside explored region: " + m) {}
};

struct InvarianceViolation : Error {
  explicit InvarianceViolation(const std::string& m) : Error("invariance violation: " + m) {}
};

struct ClosureIncomplete : Error {
  explicit ClosureIncomplete(const std::string& m) : Error("closure incomplete: " + m) {}
};

struct UsageError : Error {
  explicit UsageError(const std::string& m) : Error("usage: " + m) {}
};

}  // namespace cforge
