#pragma once

#include <stdexcept>
#include <string>

namespace fglasso {

// Base for all library errors. Callers that only care about "something went
// wrong in fglasso" can catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class InvalidConfig : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class InsufficientSamples : public Error {
 public:
  using Error::Error;
};

class SingularDiagonal : public Error {
 public:
  using Error::Error;
};

}  // namespace fglasso
