#pragma once

#include <stdexcept>
#include <string>

namespace dig {

/// Input failed a structural precondition (bad network, size mismatch, ...).
class ValidationError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// An iterative kernel hit its iteration cap; carries the last estimate.
class NumericFailure : public std::runtime_error {
  public:
    NumericFailure(const std::string& what, double last_estimate)
        : std::runtime_error(what), last_estimate_(last_estimate) {}

    double last_estimate() const noexcept { return last_estimate_; }

  private:
    double last_estimate_;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace dig
