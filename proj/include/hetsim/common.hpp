#pragma once

#include <stdexcept>
#include <string>

namespace hetsim {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad scenario/config input (counts, ranges, unreadable files).
struct ConfigError : Error {
  using Error::Error;
};

// Problem instance exceeds an exact-solver cap.
struct SizeError : Error {
  using Error::Error;
};

// Objective carries no usable signal (e.g. all-zero rates under log utility).
struct DegenerateObjectiveError : Error {
  using Error::Error;
};

// A documented structural invariant failed; message names the invariant.
struct InvariantViolation : Error {
  using Error::Error;
};

}  // namespace hetsim
