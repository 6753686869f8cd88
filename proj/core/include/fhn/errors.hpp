#pragma once

#include <stdexcept>
#include <string>

namespace fhn {

/// Invalid call: bad argument combination, unknown option, violated precondition.
class usage_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not deliver a result within its tolerances.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fhn
