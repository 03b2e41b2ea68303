#pragma once

#include <stdexcept>
#include <string>

namespace uavcov {

// Every failure raised by the library derives from Error so callers (CLI,
// Python bindings) can catch one type and still switch on the concrete kind.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidConfiguration : public Error {
 public:
  using Error::Error;
};

class BoundsError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class InfeasibleAltitude : public Error {
 public:
  using Error::Error;
};

class IllegalAction : public Error {
 public:
  using Error::Error;
};

class DeadEnd : public Error {
 public:
  using Error::Error;
};

class InfeasibleLeg : public Error {
 public:
  using Error::Error;
};

class InfeasibleMission : public Error {
 public:
  using Error::Error;
};

class PolicyNotConverged : public Error {
 public:
  using Error::Error;
};

// Raised when an assembled result violates an invariant that construction
// should have guaranteed. Always a bug.
class InternalConsistency : public Error {
 public:
  using Error::Error;
};

}  // namespace uavcov
