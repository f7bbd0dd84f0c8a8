#pragma once

#include <stdexcept>
#include <string>

namespace butterfly_lab {

// Raised when a numerical route cannot certify its result (complex roots,
// root count mismatch, failed cross-check, fit residual above tolerance).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace butterfly_lab
