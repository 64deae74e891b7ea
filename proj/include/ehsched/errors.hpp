// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace ehsched {

/// Base class for every error the library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Scenario violates its preconditions (negative or non-finite values,
/// non-positive battery capacity, or a raw scenario where a normalized one
/// is required).
struct InvalidScenario : Error {
  using Error::Error;
};

/// Deadline is not strictly positive (or not finite).
struct InvalidDeadline : Error {
  using Error::Error;
};

/// Bit target is negative or not finite.
struct InvalidBitTarget : Error {
  using Error::Error;
};

/// The requested number of bits exceeds what any schedule can deliver.
/// `bound_bits` is the supremum of deliverable bits for the instance.
struct UnreachableBitTarget : Error {
  UnreachableBitTarget(const std::string& msg, double bound)
      : Error(msg), bound_bits(bound) {}
  double bound_bits;
};

/// An internal solver invariant failed. Signals a bug or a degenerate
/// unnormalized input, never a valid outcome.
struct AlgorithmInvariantViolated : Error {
  using Error::Error;
};

/// Brute-force verification was asked for an instance above desk scale.
struct OracleTooExpensive : Error {
  using Error::Error;
};

/// Malformed scenario or policy file.
struct ParseError : Error {
  using Error::Error;
};

}  // namespace ehsched
