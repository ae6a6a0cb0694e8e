#pragma once

#include <Eigen/Dense>

#include "varsma/theta_poly.hpp"

namespace varsma {

// Dense, brute-force constructions of the MA(q) covariance algebra, used as
// ground truth against the implicit fast paths. Everything here is
// O(T^2)..O(T^3) on purpose; production code never calls it.

// (gamma_0, ..., gamma_q) with gamma_l = sum_{j=0..q-l} theta_j theta_{j+l},
// theta_0 = 1, unit innovation variance.
Eigen::VectorXd autocov_gamma(const ThetaPoly& theta);

// T x T symmetric banded Toeplitz fill of the autocovariances (bandwidth q).
Eigen::MatrixXd build_sigma_dense(const ThetaPoly& theta, int T);

// T x T lower-banded Toeplitz factor with ones on the diagonal.
Eigen::MatrixXd build_theta_T_dense(const ThetaPoly& theta, int T);

// T x q presample block [Theta_*; 0]. Requires T >= q.
Eigen::MatrixXd build_theta_star_dense(const ThetaPoly& theta, int T);

// Deviations of the four covariance identities on one (theta, T) instance.
// The first two are max elementwise deviations relative to |Sigma_T|_inf,
// the inverse check is relative to |Sigma_T^{-1}|_inf, and the determinant
// check is absolute on the logs. All four hold for any finite theta,
// invertible or not.
struct Prop1Report {
  double dev_factorization = 0.0;  // Sigma = Theta Theta' + Star Star'
  double dev_lambda_form = 0.0;    // Sigma = Theta (I + lambda lambda') Theta'
  double dev_inverse = 0.0;        // Sigma^{-1} = Theta^{-T} K Theta^{-1}, K implicit
  double dev_log_det = 0.0;        // |log det(lambda'lambda + I_q) - log det Sigma|

  double max_dev() const;
};

Prop1Report verify_prop1(const ThetaPoly& theta, int T);

}  // namespace varsma
