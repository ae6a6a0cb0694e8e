#include "varsma/theta_poly.hpp"

#include <cmath>

#include "varsma/errors.hpp"

namespace varsma {

ThetaPoly::ThetaPoly(Eigen::VectorXd coeffs) : coeffs_(std::move(coeffs)) {
  for (Eigen::Index i = 0; i < coeffs_.size(); ++i) {
    if (!std::isfinite(coeffs_(i))) {
      throw ValidationError("theta coefficient " + std::to_string(i + 1) + " is not finite");
    }
  }
}

ThetaPoly make_theta(const Eigen::VectorXd& coeffs) { return ThetaPoly(coeffs); }

ThetaPoly make_theta(const std::vector<double>& coeffs) {
  return ThetaPoly(Eigen::Map<const Eigen::VectorXd>(coeffs.data(),
                                                     static_cast<Eigen::Index>(coeffs.size())));
}

Eigen::VectorXd psi_weights(const ThetaPoly& theta, int n) {
  if (n < 1) throw ValidationError("psi_weights: n must be >= 1");
  const int q = theta.q();
  Eigen::VectorXd psi(n);
  psi(0) = 1.0;
  for (int t = 1; t < n; ++t) {
    double acc = 0.0;
    const int jmax = std::min(t, q);
    for (int j = 1; j <= jmax; ++j) acc += theta.coeff(j) * psi(t - j);
    psi(t) = -acc;
  }
  return psi;
}

}  // namespace varsma
