#pragma once

#include <stdexcept>
#include <string>

namespace ccdist {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// A structure or norm returned a non-finite value.
class EvaluationFailure : public Error {
 public:
  using Error::Error;
};

// The integral curve left the (inflated) chart box before t = 1, i.e. the
// control is outside the domain of the end-point map at this discretization.
class BoxExit : public Error {
 public:
  BoxExit(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

class NonFiniteState : public Error {
 public:
  using Error::Error;
};

class NotAMember : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ccdist
