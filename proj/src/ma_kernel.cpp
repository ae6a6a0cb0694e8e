#include "varsma/ma_kernel.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "varsma/errors.hpp"

namespace varsma {

Eigen::MatrixXd apply_theta_inverse(const ThetaPoly& theta, const Eigen::MatrixXd& M) {
  const int T = static_cast<int>(M.rows());
  const int q = theta.q();
  Eigen::MatrixXd out = M;
  if (q == 0) return out;
  for (int t = 1; t < T; ++t) {
    const int jmax = std::min(t, q);
    for (int j = 1; j <= jmax; ++j) {
      out.row(t).noalias() -= theta.coeff(j) * out.row(t - j);
    }
  }
  return out;
}

Eigen::MatrixXd theta_star_matrix(const ThetaPoly& theta, int T) {
  const int q = theta.q();
  if (T < q) throw DimensionError("theta_star_matrix: T < q");
  Eigen::MatrixXd star = Eigen::MatrixXd::Zero(T, q);
  for (int i = 0; i < q; ++i) {
    for (int j = i; j < q; ++j) {
      star(i, j) = theta.coeff(q - (j - i));
    }
  }
  return star;
}

Eigen::MatrixXd theta_star_matrix_deriv(const ThetaPoly& theta, int i, int T) {
  const int q = theta.q();
  if (i < 1 || i > q) throw ValidationError("theta_star_matrix_deriv: i out of 1..q");
  if (T < q) throw DimensionError("theta_star_matrix_deriv: T < q");
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(T, q);
  // entry (r, c) holds theta_{q-(c-r)}; it depends on theta_i iff c - r = q - i
  for (int r = 0; r < q; ++r) {
    const int c = r + (q - i);
    if (c < q) d(r, c) = 1.0;
  }
  return d;
}

Eigen::MatrixXd build_lambda(const ThetaPoly& theta, int T) {
  return apply_theta_inverse(theta, theta_star_matrix(theta, T));
}

double SmallGram::log_det() const {
  if (gram.rows() == 0) return 0.0;
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

Eigen::MatrixXd SmallGram::solve(const Eigen::MatrixXd& rhs) const {
  if (gram.rows() == 0) return rhs;
  return llt.solve(rhs);
}

SmallGram small_gram(const Eigen::MatrixXd& lambda) {
  SmallGram g;
  const Eigen::Index q = lambda.cols();
  g.gram = Eigen::MatrixXd::Identity(q, q);
  g.gram.noalias() += lambda.transpose() * lambda;
  if (q > 0) {
    g.llt.compute(g.gram);
    if (g.llt.info() != Eigen::Success) {
      throw std::runtime_error("small_gram: Cholesky of lambda'lambda + I failed");
    }
  }
  return g;
}

Eigen::MatrixXd apply_K(const Eigen::MatrixXd& lambda, const SmallGram& gram,
                        const Eigen::MatrixXd& M) {
  if (lambda.cols() == 0) return M;
  Eigen::MatrixXd out = M;
  out.noalias() -= lambda * gram.solve(lambda.transpose() * M);
  return out;
}

Eigen::MatrixXd apply_K(const ThetaPoly& theta, int T, const Eigen::MatrixXd& M) {
  if (T < theta.q()) throw DimensionError("apply_K: T < q");
  if (M.rows() != T) throw DimensionError("apply_K: M has wrong row count");
  const Eigen::MatrixXd lambda = build_lambda(theta, T);
  return apply_K(lambda, small_gram(lambda), M);
}

Eigen::MatrixXd apply_K_sqrt(const Eigen::MatrixXd& lambda, const Eigen::MatrixXd& M) {
  const Eigen::Index q = lambda.cols();
  if (q == 0) return M;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lambda.transpose() * lambda);
  // (I + ll')^{-1/2} = I + l V diag(g(s)) V' l' with g(s) = ((1+s)^{-1/2}-1)/s
  Eigen::VectorXd gs(q);
  for (Eigen::Index i = 0; i < q; ++i) {
    const double s = std::max(0.0, es.eigenvalues()(i));
    gs(i) = s > 1e-12 ? (1.0 / std::sqrt(1.0 + s) - 1.0) / s : -0.5 + 0.375 * s;
  }
  const Eigen::MatrixXd core =
      es.eigenvectors() * gs.asDiagonal() * es.eigenvectors().transpose();
  Eigen::MatrixXd out = M;
  out.noalias() += lambda * (core * (lambda.transpose() * M));
  return out;
}

double log_det_sigma(const ThetaPoly& theta, int T) {
  if (T < theta.q()) throw DimensionError("log_det_sigma: T < q");
  if (theta.q() == 0) return 0.0;
  return small_gram(build_lambda(theta, T)).log_det();
}

Eigen::MatrixXd apply_dtheta_inverse(const ThetaPoly& theta, int i, const Eigen::MatrixXd& M) {
  if (i < 1 || i > theta.q()) throw ValidationError("apply_dtheta_inverse: i out of 1..q");
  const int T = static_cast<int>(M.rows());
  const Eigen::MatrixXd twice = apply_theta_inverse(theta, apply_theta_inverse(theta, M));
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(T, M.cols());
  if (i < T) out.bottomRows(T - i) = -twice.topRows(T - i);
  return out;
}

}  // namespace varsma
