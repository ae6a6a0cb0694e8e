#pragma once

#include <stdexcept>
#include <string>

namespace varsma {

// Bad argument values: non-finite entries, out-of-range indices, malformed input.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Incompatible shapes: T < q, too few rows for the requested lag order, ...
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Regressor Gram matrix is numerically singular.
class CollinearityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Residual covariance unusable even after eigenvalue flooring.
class DegenerateFitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every optimizer start failed; message carries the per-start statuses.
class FitFailureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace varsma
