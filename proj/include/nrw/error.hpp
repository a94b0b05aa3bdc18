#pragma once

#include <stdexcept>
#include <string>

namespace nrw {

// Bad input: violated precondition, unsupported dimension, malformed data.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The numerics gave up: blow-up sentinel, grid too short, truncated support.
class NumericalAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw PreconditionError(what);
}

}  // namespace nrw
