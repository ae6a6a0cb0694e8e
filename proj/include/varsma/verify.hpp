#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace varsma {

struct VerifyOptions {
  double tol_identity = 1e-10;  // relative, covariance identities
  double tol_log_det = 1e-10;   // absolute, determinant identity
  double tol_grad = 1e-5;       // relative, gradient vs finite differences
  std::uint64_t seed = 2024;
  // Self-test hook: adds a battery entry computed with a sign-flipped
  // coefficient, which must be caught as a failure.
  bool inject_sign_error = false;
};

struct VerifyReport {
  struct Line {
    std::string name;
    double deviation = 0.0;
    double tolerance = 0.0;
    bool pass = false;
  };
  std::vector<Line> lines;
  bool all_pass = true;
};

// Built-in identity and gradient battery: the four covariance identities over
// stable and mildly non-invertible polynomials (q = 1..3, T from q up to 50,
// including the T = q edge) plus finite-difference gradient checks. Prints one
// line per entry to `log` when given.
VerifyReport run_verify_battery(const VerifyOptions& options, std::ostream* log = nullptr);

}  // namespace varsma
