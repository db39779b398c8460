#pragma once

#include <stdexcept>
#include <string>

namespace chaoslab {

/// A call was made outside its documented preconditions.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical or dynamical failure (singular block, bad reduction, ...).
class DynamicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LocusProximityError : public DynamicsError {
 public:
  using DynamicsError::DynamicsError;
};

class SingularBlockError : public DynamicsError {
 public:
  using DynamicsError::DynamicsError;
};

class ReductionInvalidError : public DynamicsError {
 public:
  using DynamicsError::DynamicsError;
};

class ConditionInconsistencyError : public DynamicsError {
 public:
  using DynamicsError::DynamicsError;
};

class InsufficientRecurrenceError : public DynamicsError {
 public:
  using DynamicsError::DynamicsError;
};

class ResolutionTooFineError : public DynamicsError {
 public:
  using DynamicsError::DynamicsError;
};

/// Bad user configuration; `key` names the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace chaoslab
