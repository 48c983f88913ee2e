#ifndef CWMEAS_ERRORS_HPP
#define CWMEAS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cwmeas {

/// An input violates a documented invariant (bad parameter, bad weights).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A problem size exceeds what a brute-force routine supports.
class SizeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// An argument lies outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A required piece of configuration is missing (e.g. no bath time given).
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical guard tripped at run time: integrator stability, norm drift.
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested thermodynamic phase does not exist for these parameters.
class PhaseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reading or writing a file failed; the message carries the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cwmeas

#endif  // CWMEAS_ERRORS_HPP
