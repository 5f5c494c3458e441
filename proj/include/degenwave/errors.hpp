#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace degenwave {

/// Input outside the mathematical domain of an operation (s <= 1, v < 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Riemann state with z < w beyond the clamp tolerance.
class AdmissibilityError : public std::domain_error {
 public:
  AdmissibilityError(const std::string& what, std::size_t index)
      : std::domain_error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Invalid configuration value (delta <= 0, cut outside the domain, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite value produced by the time stepper.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, std::size_t step)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// File that cannot be read, parsed or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace degenwave
