#pragma once

#include <stdexcept>
#include <string>

namespace fluxanneal {

/// A caller broke a documented precondition (dimension mismatch, bad range,
/// asymmetric matrix, ...).
class ContractViolation : public std::invalid_argument {
 public:
  explicit ContractViolation(const std::string& what) : std::invalid_argument(what) {}
};

/// The request is well-formed but exceeds a hard size limit of the backend.
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite flux or momentum detected during MD evolution. Usually means
/// the time step is too large or the schedule is pathological.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(long step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

/// Base class for remote-subsolver failures; catch this to trigger fallback.
class RemoteError : public std::runtime_error {
 public:
  explicit RemoteError(const std::string& what) : std::runtime_error(what) {}
};

class TransportError : public RemoteError {
 public:
  explicit TransportError(const std::string& what) : RemoteError(what) {}
};

class TimeoutError : public RemoteError {
 public:
  explicit TimeoutError(const std::string& what) : RemoteError(what) {}
};

class MalformedResponseError : public RemoteError {
 public:
  explicit MalformedResponseError(const std::string& what) : RemoteError(what) {}
};

class RemoteCapacityError : public RemoteError {
 public:
  explicit RemoteCapacityError(const std::string& what) : RemoteError(what) {}
};

}  // namespace fluxanneal
