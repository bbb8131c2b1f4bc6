#pragma once

#include <stdexcept>
#include <string>

namespace bpperm {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input errors. The command line maps these to exit code 2.
class ParseError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Problem size exceeds what an exact or enumerative routine accepts.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// No perfect matching with all-positive weight exists.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class DegeneracyError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

// Beliefs do not satisfy the rank-one gauge condition of a fixed point.
class NotFixedPointError : public Error {
 public:
  using Error::Error;
};

class InconsistencyError : public Error {
 public:
  using Error::Error;
};

// Free energy is infinite (positive belief on a zero weight).
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace bpperm
