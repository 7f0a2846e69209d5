#pragma once

#include <stdexcept>
#include <string>

namespace trpinn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration: bad sizes, weights, counts or config text.
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Shape mismatch or a node that does not belong to the tape it is used with.
class StructuralError : public Error {
  public:
    using Error::Error;
};

/// Input data violating a documented contract (non-finite samples, asymmetric kernels...).
class DataError : public Error {
  public:
    using Error::Error;
};

/// Point outside of the domain of a function.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// Non-finite loss or gradient during training.
class NumericalError : public Error {
  public:
    NumericalError(std::string phase, long iteration, const std::string& what)
        : Error(what + " (phase " + phase + ", iteration " + std::to_string(iteration) + ")"),
          phase_(std::move(phase)),
          iteration_(iteration) {}

    const std::string& phase() const noexcept { return phase_; }
    long iteration() const noexcept { return iteration_; }

  private:
    std::string phase_;
    long iteration_;
};

}  // namespace trpinn
