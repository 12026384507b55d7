#pragma once

#include <stdexcept>
#include <string>

namespace rbpma {

// File-level problems: missing files, ragged CSV rows, unparsable numbers.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failures, e.g. an eigensolver that did not converge.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, long iterations)
      : std::runtime_error(what), iterations_(iterations) {}

  long iterations() const { return iterations_; }

 private:
  long iterations_;
};

}  // namespace rbpma
