#pragma once

#include <stdexcept>
#include <string>

namespace eclab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class MalformedConeError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

// Imaginary part of a tube argument left its cone.
class TubeViolation : public Error {
 public:
  using Error::Error;
};

class TruncationInsufficient : public Error {
 public:
  using Error::Error;
};

// A structural hypothesis of an estimate does not hold (e.g. the cone contains a line).
class HypothesisViolated : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace eclab
