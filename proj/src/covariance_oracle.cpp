#include "varsma/covariance_oracle.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

#include "varsma/errors.hpp"
#include "varsma/ma_kernel.hpp"

namespace varsma {

Eigen::VectorXd autocov_gamma(const ThetaPoly& theta) {
  const int q = theta.q();
  Eigen::VectorXd th(q + 1);
  th(0) = 1.0;
  for (int i = 1; i <= q; ++i) th(i) = theta.coeff(i);
  Eigen::VectorXd gamma(q + 1);
  for (int l = 0; l <= q; ++l) {
    double acc = 0.0;
    for (int j = 0; j + l <= q; ++j) acc += th(j) * th(j + l);
    gamma(l) = acc;
  }
  return gamma;
}

Eigen::MatrixXd build_sigma_dense(const ThetaPoly& theta, int T) {
  if (T < 1) throw DimensionError("build_sigma_dense: T must be >= 1");
  const Eigen::VectorXd gamma = autocov_gamma(theta);
  const int q = theta.q();
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(T, T);
  for (int i = 0; i < T; ++i) {
    for (int j = std::max(0, i - q); j <= std::min(T - 1, i + q); ++j) {
      sigma(i, j) = gamma(std::abs(i - j));
    }
  }
  return sigma;
}

Eigen::MatrixXd build_theta_T_dense(const ThetaPoly& theta, int T) {
  if (T < theta.q()) throw DimensionError("build_theta_T_dense: T < q");
  Eigen::MatrixXd mat = Eigen::MatrixXd::Identity(T, T);
  for (int j = 1; j <= theta.q(); ++j) {
    for (int t = j; t < T; ++t) mat(t, t - j) = theta.coeff(j);
  }
  return mat;
}

Eigen::MatrixXd build_theta_star_dense(const ThetaPoly& theta, int T) {
  const int q = theta.q();
  if (T < q) throw DimensionError("build_theta_star_dense: T < q");
  Eigen::MatrixXd star = Eigen::MatrixXd::Zero(T, q);
  for (int i = 0; i < q; ++i) {
    for (int j = i; j < q; ++j) star(i, j) = theta.coeff(q - (j - i));
  }
  return star;
}

double Prop1Report::max_dev() const {
  return std::max({dev_factorization, dev_lambda_form, dev_inverse, dev_log_det});
}

Prop1Report verify_prop1(const ThetaPoly& theta, int T) {
  const int q = theta.q();
  if (T < q) throw DimensionError("verify_prop1: T < q");

  const Eigen::MatrixXd sigma = build_sigma_dense(theta, T);
  const Eigen::MatrixXd theta_t = build_theta_T_dense(theta, T);
  const Eigen::MatrixXd star = build_theta_star_dense(theta, T);
  const double sigma_scale = sigma.cwiseAbs().rowwise().sum().maxCoeff();

  Prop1Report rep;

  // (a) Sigma = Theta Theta' + Star Star'
  rep.dev_factorization =
      (sigma - theta_t * theta_t.transpose() - star * star.transpose()).cwiseAbs().maxCoeff() /
      sigma_scale;

  // (b) Sigma = Theta (I + lambda lambda') Theta', lambda from the fast path
  const Eigen::MatrixXd lambda = build_lambda(theta, T);
  Eigen::MatrixXd inner = Eigen::MatrixXd::Identity(T, T);
  inner.noalias() += lambda * lambda.transpose();
  rep.dev_lambda_form =
      (sigma - theta_t * inner * theta_t.transpose()).cwiseAbs().maxCoeff() / sigma_scale;

  // (c) Sigma^{-1} = Theta^{-T} K Theta^{-1}, K applied implicitly
  const Eigen::MatrixXd sigma_inv =
      sigma.llt().solve(Eigen::MatrixXd::Identity(T, T));
  const Eigen::MatrixXd theta_inv =
      apply_theta_inverse(theta, Eigen::MatrixXd::Identity(T, T));
  const Eigen::MatrixXd fast_inv =
      theta_inv.transpose() * apply_K(lambda, small_gram(lambda), theta_inv);
  const double inv_scale = sigma_inv.cwiseAbs().rowwise().sum().maxCoeff();
  rep.dev_inverse = (sigma_inv - fast_inv).cwiseAbs().maxCoeff() / inv_scale;

  // (d) det(lambda'lambda + I_q) = det(Sigma), compared on logs
  const Eigen::LLT<Eigen::MatrixXd> chol(sigma);
  const double dense_log_det = 2.0 * chol.matrixLLT().diagonal().array().log().sum();
  rep.dev_log_det = std::abs(log_det_sigma(theta, T) - dense_log_det);

  return rep;
}

}  // namespace varsma
