#pragma once

#include <stdexcept>
#include <string>

namespace fracctl {

// Argument outside the numerically supported range (negative Gamma argument,
// Mittag-Leffler argument beyond the series domain bound, adjoint evaluation
// at the terminal singularity, ...).
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A truncated series or iteration hit its cap before the stopping test fired,
// or an iterate became non-finite.
class convergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Incompatible matrix/vector dimensions across an operation.
class dimension_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The averaged Gramian is not invertible at the configured tolerance, so no
// open-loop control exists for the requested target.
class singular_gramian_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent run configuration.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fracctl
