#pragma once

#include <Eigen/Dense>
#include <vector>

#include "varsma/theta_poly.hpp"

namespace varsma {

// Observation matrix X_hat: (T+p) x k, rows indexed by time, columns by
// series. The first p rows are the presample the likelihood conditions on.
using SeriesMatrix = Eigen::MatrixXd;

struct ModelSpec {
  int k = 1;          // series count
  int p = 0;          // AR order
  int q = 0;          // MA order
  bool trend = true;  // include the intercept row mu

  int n_regressors() const { return (trend ? 1 : 0) + p * k; }
};

// Untransformed response and lag design:
//   x     = rows p+1 .. T+p of X_hat             (T x k)
//   x_lag = [1 | LX | ... | L^pX]                (T x r)
// where L^iX takes rows p-i+1 .. T+p-i.
struct RawDesign {
  Eigen::MatrixXd x;
  Eigen::MatrixXd x_lag;
};

RawDesign build_design(const ModelSpec& spec, const SeriesMatrix& data);

// The same blocks filtered by Theta_T^{-1}.
struct DesignBundle {
  Eigen::MatrixXd x_theta;      // T x k
  Eigen::MatrixXd x_theta_lag;  // T x r
};

DesignBundle transform_design(const ModelSpec& spec, const SeriesMatrix& data,
                              const ThetaPoly& theta);

// Closed-form AR solution for a fixed theta.
// Coefficient stacking: B is r x k with rows [mu; Phi_1; ...; Phi_p]; block i
// right-multiplies the i-th lag, X_{t-i} Phi_i.
struct GlsFit {
  Eigen::RowVectorXd mu;              // 1 x k; size 0 when trend = false
  std::vector<Eigen::MatrixXd> phis;  // p matrices, k x k
  Eigen::MatrixXd omega;              // k x k symmetric PSD (Omega_opt)
  double nllk = 0.0;                  // concentrated negative log-likelihood

  struct Aux {
    Eigen::MatrixXd coeff;              // stacked B, r x k
    double log_det_omega = 0.0;
    double log_det_small_gram = 0.0;    // log det(lambda'lambda + I_q)
    double gram_condition = 0.0;        // condition number of X_lag' K X_lag
    bool omega_floored = false;         // eigenvalue floor engaged on Omega_opt
    int t_effective = 0;
  } aux;
};

// GLS for (mu, Phi) under the weight K, Omega_opt from the weighted residual
// Gram, and the concentrated NLLK
//   (Tk/2) log 2pi + (T/2) log det Omega_opt
//   + (k/2) log det(lambda'lambda + I_q) + Tk/2.
GlsFit gls_fit(const ModelSpec& spec, const SeriesMatrix& data, const ThetaPoly& theta);

// Scalar objective for the optimizer; exactly GlsFit::nllk.
double concentrated_nllk(const ModelSpec& spec, const SeriesMatrix& data,
                         const ThetaPoly& theta);

// Negative log-likelihood at arbitrary (mu, phis, omega), omega SPD.
// mu must have size k when spec.trend and size 0 otherwise.
double full_nllk(const ModelSpec& spec, const SeriesMatrix& data, const ThetaPoly& theta,
                 const Eigen::RowVectorXd& mu, const std::vector<Eigen::MatrixXd>& phis,
                 const Eigen::MatrixXd& omega);

// Gradient of concentrated_nllk in (theta_1..theta_q). The coefficient stack
// is held fixed at its optimum (envelope theorem); only the filters and the
// small Gram are differentiated.
Eigen::VectorXd nllk_grad(const ModelSpec& spec, const SeriesMatrix& data,
                          const ThetaPoly& theta);

// Z = X - 1 mu - sum_i L^iX Phi_i for a given fit; diagnostic only.
Eigen::MatrixXd z_residuals(const ModelSpec& spec, const SeriesMatrix& data,
                            const GlsFit& fit);

}  // namespace varsma
