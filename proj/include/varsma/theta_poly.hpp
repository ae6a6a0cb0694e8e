#pragma once

#include <Eigen/Dense>
#include <vector>

namespace varsma {

// Scalar moving-average polynomial theta(L) = 1 + theta_1 L + ... + theta_q L^q.
// theta_0 = 1 is implicit and never stored; q = 0 denotes theta(L) = 1.
// Trailing zero coefficients are kept: the caller's declared order is respected.
class ThetaPoly {
 public:
  ThetaPoly() = default;
  explicit ThetaPoly(Eigen::VectorXd coeffs);  // throws ValidationError on non-finite entries

  int q() const { return static_cast<int>(coeffs_.size()); }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }

  // theta_i for i in 1..q
  double coeff(int i) const { return coeffs_(i - 1); }

 private:
  Eigen::VectorXd coeffs_;
};

ThetaPoly make_theta(const Eigen::VectorXd& coeffs);
ThetaPoly make_theta(const std::vector<double>& coeffs);

// First n coefficients of the power series theta(L)^{-1}.
// psi[0] = 1 and psi[t] = -sum_{j=1..min(t,q)} theta_j psi[t-j]; cost O(n q).
Eigen::VectorXd psi_weights(const ThetaPoly& theta, int n);

}  // namespace varsma
