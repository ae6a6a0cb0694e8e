#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "varsma/theta_poly.hpp"

namespace varsma {

// Theta_T^{-1} M by back-substitution, row by row:
//   out[t] = M[t] - sum_{j=1..min(t,q)} theta_j out[t-j].
// Theta_T itself is never formed; cost O(T q m) for an T x m input.
Eigen::MatrixXd apply_theta_inverse(const ThetaPoly& theta, const Eigen::MatrixXd& M);

// Theta_{*;T-q}, T x q: the upper-triangular reversal block Theta_* on top
// (theta_q on its diagonal, entry (i,j) = theta_{q-(j-i)} for j >= i), zeros below.
// Requires T >= q.
Eigen::MatrixXd theta_star_matrix(const ThetaPoly& theta, int T);

// d Theta_{*;T-q} / d theta_i: ones on the (q-i)-th superdiagonal of the top block.
Eigen::MatrixXd theta_star_matrix_deriv(const ThetaPoly& theta, int i, int T);

// lambda = Theta_T^{-1} Theta_{*;T-q}, T x q (empty for q = 0).
Eigen::MatrixXd build_lambda(const ThetaPoly& theta, int T);

// G = lambda' lambda + I_q with its Cholesky factor, reused for solves and
// the log-determinant. G is SPD for any finite lambda.
struct SmallGram {
  Eigen::MatrixXd gram;  // q x q
  Eigen::LLT<Eigen::MatrixXd> llt;

  double log_det() const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;
};

SmallGram small_gram(const Eigen::MatrixXd& lambda);

// K M with K = (I_T + lambda lambda')^{-1}, applied via the Woodbury form
//   K M = M - lambda G^{-1} (lambda' M),
// never materializing the T x T matrix; cost O(T q m + q^3).
Eigen::MatrixXd apply_K(const Eigen::MatrixXd& lambda, const SmallGram& gram,
                        const Eigen::MatrixXd& M);
Eigen::MatrixXd apply_K(const ThetaPoly& theta, int T, const Eigen::MatrixXd& M);

// K^{1/2} M through the spectral map of the q x q Gram lambda' lambda:
// applying it twice reproduces apply_K. Used to form residual covariances as
// explicit Gram matrices, which stay PSD under roundoff.
Eigen::MatrixXd apply_K_sqrt(const Eigen::MatrixXd& lambda, const Eigen::MatrixXd& M);

// log det Sigma_T = log det(lambda' lambda + I_q), via the q x q factorization.
double log_det_sigma(const ThetaPoly& theta, int T);

// d(Theta_T^{-1} M)/d theta_i = -(L^i theta(L)^{-2}) * M for i in 1..q:
// two back-substitution passes, a downward shift by i rows (zero fill on top),
// and a sign flip.
Eigen::MatrixXd apply_dtheta_inverse(const ThetaPoly& theta, int i, const Eigen::MatrixXd& M);

}  // namespace varsma
