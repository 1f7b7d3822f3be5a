#pragma once

#include <stdexcept>
#include <string>

namespace qmdp {

/// Caller-supplied input violates a documented precondition (bad shape,
/// out-of-range parameter, malformed file). The CLI maps this to exit code 2.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical or logic failure that valid inputs should never trigger.
class InternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qmdp
