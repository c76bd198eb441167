#pragma once

#include <stdexcept>
#include <string>

namespace dofsynth {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Bad parameters, dimension mismatches, out-of-range values.
class ValidationError : public Error {
public:
  using Error::Error;
};

// File and format failures; messages carry the offending path.
class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace dofsynth
