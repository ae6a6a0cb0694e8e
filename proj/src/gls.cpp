#include "varsma/gls.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "varsma/errors.hpp"
#include "varsma/ma_kernel.hpp"

namespace varsma {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

void validate_inputs(const ModelSpec& spec, const SeriesMatrix& data, const ThetaPoly& theta) {
  if (spec.k < 1) throw ValidationError("ModelSpec: k must be >= 1");
  if (spec.p < 0 || spec.q < 0) throw ValidationError("ModelSpec: p and q must be >= 0");
  if (data.cols() != spec.k) throw DimensionError("data has wrong column count for spec.k");
  if (!data.allFinite()) throw ValidationError("data contains non-finite values");
  if (theta.q() != spec.q) throw DimensionError("theta order does not match spec.q");
  const int T = static_cast<int>(data.rows()) - spec.p;
  if (T < 1) throw DimensionError("need more than p rows of data");
  if (T < spec.q) throw DimensionError("effective sample T < q");
  if (T <= spec.n_regressors()) throw DimensionError("effective sample T <= regressor count");
}

// Symmetric eigendecomposition with the 1e-12 * trace floor; flags whether
// the floor engaged.
struct FlooredSpd {
  Eigen::MatrixXd matrix;   // refactored from floored eigenvalues
  double log_det = 0.0;
  bool floored = false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
};

FlooredSpd floor_spd(const Eigen::MatrixXd& sym) {
  FlooredSpd out;
  out.es.compute(sym);
  const double tr = sym.trace();
  if (!(tr > 0.0)) {
    throw DegenerateFitError("residual covariance has nonpositive trace");
  }
  const double floor = 1e-12 * tr;
  Eigen::VectorXd ev = out.es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < floor) {
      ev(i) = floor;
      out.floored = true;
    }
  }
  out.log_det = ev.array().log().sum();
  out.matrix = out.es.eigenvectors() * ev.asDiagonal() * out.es.eigenvectors().transpose();
  return out;
}

// Everything gls_fit and nllk_grad share for one (spec, data, theta).
struct Workspace {
  int T = 0;
  RawDesign raw;
  DesignBundle design;
  Eigen::MatrixXd star;    // Theta_{*;T-q}
  Eigen::MatrixXd lambda;  // T x q
  SmallGram gram;          // lambda'lambda + I_q
  Eigen::MatrixXd coeff;   // B, r x k
  Eigen::MatrixXd resid_theta;  // E = X_theta - X_theta_lag B
  Eigen::MatrixXd resid_raw;    // R = X - X_lag B   (E = Theta^{-1} R)
  Eigen::MatrixXd omega;        // symmetrized Omega_opt
  double gram_condition = 0.0;
};

Workspace solve_gls(const ModelSpec& spec, const SeriesMatrix& data, const ThetaPoly& theta) {
  validate_inputs(spec, data, theta);
  Workspace w;
  w.raw = build_design(spec, data);
  w.T = static_cast<int>(w.raw.x.rows());
  w.design.x_theta = apply_theta_inverse(theta, w.raw.x);
  w.design.x_theta_lag = apply_theta_inverse(theta, w.raw.x_lag);
  w.star = theta_star_matrix(theta, w.T);
  w.lambda = apply_theta_inverse(theta, w.star);
  w.gram = small_gram(w.lambda);

  const int r = spec.n_regressors();
  const int k = spec.k;
  if (r > 0) {
    const Eigen::MatrixXd k_lag = apply_K(w.lambda, w.gram, w.design.x_theta_lag);
    Eigen::MatrixXd a = w.design.x_theta_lag.transpose() * k_lag;
    a = 0.5 * (a + a.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    const double emax = es.eigenvalues().maxCoeff();
    const double emin = es.eigenvalues().minCoeff();
    if (!(emin > 0.0) || emax / emin > 1e13) {
      std::ostringstream msg;
      msg << "regressor Gram is numerically singular (condition number "
          << (emin > 0.0 ? emax / emin : std::numeric_limits<double>::infinity()) << ")";
      throw CollinearityError(msg.str());
    }
    w.gram_condition = emax / emin;
    w.coeff = es.eigenvectors() *
              es.eigenvalues().cwiseInverse().asDiagonal() *
              (es.eigenvectors().transpose() *
               (w.design.x_theta_lag.transpose() * apply_K(w.lambda, w.gram, w.design.x_theta)));
  } else {
    w.coeff = Eigen::MatrixXd::Zero(0, k);
    w.gram_condition = 1.0;
  }

  w.resid_theta = w.design.x_theta - w.design.x_theta_lag * w.coeff;
  w.resid_raw = w.raw.x - w.raw.x_lag * w.coeff;

  // Omega_opt as the Gram of the K^{1/2}-weighted residual. At the GLS optimum
  // this equals (X_t' K X_t - X_t' K X_lag B)/T and it cannot leave the PSD
  // cone under roundoff.
  const Eigen::MatrixXd weighted = apply_K_sqrt(w.lambda, w.resid_theta);
  w.omega = (weighted.transpose() * weighted) / static_cast<double>(w.T);
  w.omega = 0.5 * (w.omega + w.omega.transpose()).eval();
  return w;
}

double nllk_from(const Workspace& w, const ModelSpec& spec, const FlooredSpd& omega) {
  const double T = static_cast<double>(w.T);
  const double k = static_cast<double>(spec.k);
  return 0.5 * T * k * kLog2Pi + 0.5 * T * omega.log_det + 0.5 * k * w.gram.log_det() +
         0.5 * T * k;
}

}  // namespace

RawDesign build_design(const ModelSpec& spec, const SeriesMatrix& data) {
  const int n = static_cast<int>(data.rows());
  const int T = n - spec.p;
  const int k = spec.k;
  RawDesign d;
  d.x = data.bottomRows(T);
  d.x_lag.resize(T, spec.n_regressors());
  int col = 0;
  if (spec.trend) {
    d.x_lag.col(col++).setOnes();
  }
  for (int i = 1; i <= spec.p; ++i) {
    // L^i X = rows p-i+1 .. T+p-i (1-indexed)
    d.x_lag.middleCols(col, k) = data.middleRows(spec.p - i, T);
    col += k;
  }
  return d;
}

DesignBundle transform_design(const ModelSpec& spec, const SeriesMatrix& data,
                              const ThetaPoly& theta) {
  validate_inputs(spec, data, theta);
  const RawDesign raw = build_design(spec, data);
  DesignBundle out;
  out.x_theta = apply_theta_inverse(theta, raw.x);
  out.x_theta_lag = apply_theta_inverse(theta, raw.x_lag);
  return out;
}

GlsFit gls_fit(const ModelSpec& spec, const SeriesMatrix& data, const ThetaPoly& theta) {
  const Workspace w = solve_gls(spec, data, theta);
  const FlooredSpd omega = floor_spd(w.omega);

  GlsFit fit;
  fit.omega = w.omega;
  fit.nllk = nllk_from(w, spec, omega);
  int row = 0;
  if (spec.trend) {
    fit.mu = w.coeff.row(row++);
  } else {
    fit.mu.resize(0);
  }
  fit.phis.reserve(spec.p);
  for (int i = 0; i < spec.p; ++i) {
    fit.phis.push_back(w.coeff.middleRows(row, spec.k));
    row += spec.k;
  }
  fit.aux.coeff = w.coeff;
  fit.aux.log_det_omega = omega.log_det;
  fit.aux.log_det_small_gram = w.gram.log_det();
  fit.aux.gram_condition = w.gram_condition;
  fit.aux.omega_floored = omega.floored;
  fit.aux.t_effective = w.T;
  return fit;
}

double concentrated_nllk(const ModelSpec& spec, const SeriesMatrix& data,
                         const ThetaPoly& theta) {
  return gls_fit(spec, data, theta).nllk;
}

double full_nllk(const ModelSpec& spec, const SeriesMatrix& data, const ThetaPoly& theta,
                 const Eigen::RowVectorXd& mu, const std::vector<Eigen::MatrixXd>& phis,
                 const Eigen::MatrixXd& omega) {
  validate_inputs(spec, data, theta);
  const int expected_mu = spec.trend ? spec.k : 0;
  if (mu.size() != expected_mu) throw DimensionError("full_nllk: mu has wrong size");
  if (static_cast<int>(phis.size()) != spec.p) throw DimensionError("full_nllk: wrong lag count");
  for (const auto& phi : phis) {
    if (phi.rows() != spec.k || phi.cols() != spec.k)
      throw DimensionError("full_nllk: Phi block has wrong shape");
  }
  if (omega.rows() != spec.k || omega.cols() != spec.k)
    throw DimensionError("full_nllk: omega has wrong shape");
  if (!omega.isApprox(omega.transpose(), 1e-12))
    throw ValidationError("full_nllk: omega is not symmetric");
  const Eigen::LLT<Eigen::MatrixXd> chol(omega);
  if (chol.info() != Eigen::Success)
    throw ValidationError("full_nllk: omega is not positive definite");

  const RawDesign raw = build_design(spec, data);
  const int T = static_cast<int>(raw.x.rows());

  Eigen::MatrixXd coeff(spec.n_regressors(), spec.k);
  int row = 0;
  if (spec.trend) coeff.row(row++) = mu;
  for (const auto& phi : phis) {
    coeff.middleRows(row, spec.k) = phi;
    row += spec.k;
  }
  const Eigen::MatrixXd z = raw.x - raw.x_lag * coeff;
  const Eigen::MatrixXd z_theta = apply_theta_inverse(theta, z);
  const Eigen::MatrixXd lambda = build_lambda(theta, T);
  const SmallGram gram = small_gram(lambda);
  const Eigen::MatrixXd quad_form =
      z_theta.transpose() * apply_K(lambda, gram, z_theta);  // k x k

  const double log_det_omega = 2.0 * chol.matrixLLT().diagonal().array().log().sum();
  const double quad = chol.solve(quad_form).trace();
  const double Td = static_cast<double>(T);
  const double kd = static_cast<double>(spec.k);
  return 0.5 * Td * kd * kLog2Pi + 0.5 * Td * log_det_omega + 0.5 * kd * gram.log_det() +
         0.5 * quad;
}

Eigen::VectorXd nllk_grad(const ModelSpec& spec, const SeriesMatrix& data,
                          const ThetaPoly& theta) {
  const Workspace w = solve_gls(spec, data, theta);
  const int q = spec.q;
  Eigen::VectorXd grad(q);
  if (q == 0) return grad;

  const FlooredSpd omega = floor_spd(w.omega);
  const Eigen::LLT<Eigen::MatrixXd> omega_chol(omega.matrix);

  const Eigen::MatrixXd k_resid = apply_K(w.lambda, w.gram, w.resid_theta);  // K E
  const Eigen::MatrixXd proj = w.gram.solve(w.lambda.transpose() * w.resid_theta);  // G^{-1} l' E
  const double k = static_cast<double>(spec.k);

  for (int i = 1; i <= q; ++i) {
    // d lambda = d(Theta^{-1}) Star + Theta^{-1} dStar
    const Eigen::MatrixXd dlambda =
        apply_dtheta_inverse(theta, i, w.star) +
        apply_theta_inverse(theta, theta_star_matrix_deriv(theta, i, w.T));
    // d E with the coefficient stack held at its optimum
    const Eigen::MatrixXd dresid = apply_dtheta_inverse(theta, i, w.resid_raw);

    // (T/2) d log det Omega_opt = (1/2) tr(Omega^{-1} d(E' K E))
    const Eigen::MatrixXd de_term = dresid.transpose() * k_resid;             // dE' K E
    const Eigen::MatrixXd v = dlambda.transpose() * w.resid_theta;            // dl' E
    const Eigen::MatrixXd s = w.lambda.transpose() * dlambda;                 // l' dl
    const Eigen::MatrixXd e_dk_e = -v.transpose() * proj - proj.transpose() * v +
                                   proj.transpose() * (s + s.transpose()) * proj;
    const double quad_part = omega_chol.solve(de_term).trace() +
                             0.5 * omega_chol.solve(e_dk_e).trace();

    // (k/2) d log det G = k tr(G^{-1} l' dl)
    const double det_part = k * w.gram.solve(s).trace();

    grad(i - 1) = quad_part + det_part;
  }
  return grad;
}

Eigen::MatrixXd z_residuals(const ModelSpec& spec, const SeriesMatrix& data, const GlsFit& fit) {
  const RawDesign raw = build_design(spec, data);
  return raw.x - raw.x_lag * fit.aux.coeff;
}

}  // namespace varsma
