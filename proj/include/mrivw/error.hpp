#pragma once

#include <stdexcept>
#include <string>

namespace mrivw {

// Malformed or missing input: bad files, unknown ids, invalid arguments.
class input_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation that is undefined for the given data, e.g. a null
// instrument (beta_x == 0) or a non-positive delta-method variance.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mrivw
