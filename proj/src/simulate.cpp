#include "varsma/simulate.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <sstream>

#include "varsma/errors.hpp"

namespace varsma {

double companion_spectral_radius(const std::vector<Eigen::MatrixXd>& phis) {
  const int p = static_cast<int>(phis.size());
  if (p == 0) return 0.0;
  const int k = static_cast<int>(phis[0].rows());
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(p * k, p * k);
  for (int i = 0; i < p; ++i) comp.block(0, i * k, k, k) = phis[i].transpose();
  if (p > 1) comp.block(k, 0, (p - 1) * k, (p - 1) * k).setIdentity();
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

SeriesMatrix gen_varsma(const GeneratorParams& params, int n) {
  const int k = params.spec.k;
  const int p = params.spec.p;
  const int q = params.spec.q;
  if (n <= p) throw DimensionError("gen_varsma: need n > p rows");
  if (params.mu.size() != k) throw DimensionError("gen_varsma: mu has wrong size");
  if (static_cast<int>(params.phis.size()) != p)
    throw DimensionError("gen_varsma: wrong number of Phi matrices");
  for (const auto& phi : params.phis) {
    if (phi.rows() != k || phi.cols() != k)
      throw DimensionError("gen_varsma: Phi block has wrong shape");
  }
  if (params.theta.q() != q) throw DimensionError("gen_varsma: theta order != spec.q");
  if (params.burn_in < 0) throw ValidationError("gen_varsma: burn_in must be >= 0");

  const double radius = companion_spectral_radius(params.phis);
  if (radius >= 1.0) {
    std::ostringstream msg;
    msg << "gen_varsma: AR part is nonstationary (companion spectral radius " << radius << ")";
    throw ValidationError(msg.str());
  }
  const Eigen::LLT<Eigen::MatrixXd> chol(params.omega);
  if (params.omega.rows() != k || params.omega.cols() != k || chol.info() != Eigen::Success)
    throw ValidationError("gen_varsma: omega is not k x k positive definite");
  const Eigen::MatrixXd chol_t = chol.matrixL().transpose();

  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const int total = params.burn_in + n;
  Eigen::MatrixXd eps(total, k);
  for (int t = 0; t < total; ++t) {
    for (int j = 0; j < k; ++j) eps(t, j) = gauss(rng);
  }
  eps = eps * chol_t;  // rows ~ N(0, omega)

  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(total, k);
  for (int t = 0; t < total; ++t) {
    Eigen::RowVectorXd row = params.mu + eps.row(t);
    for (int i = 1; i <= std::min(t, p); ++i) row.noalias() += x.row(t - i) * params.phis[i - 1];
    for (int j = 1; j <= std::min(t, q); ++j) row.noalias() += params.theta.coeff(j) * eps.row(t - j);
    x.row(t) = row;
  }
  return x.bottomRows(n);
}

std::vector<Eigen::MatrixXd> random_stationary_ar(int k, int p, std::mt19937_64& rng) {
  if (k < 1 || p < 1) throw ValidationError("random_stationary_ar: k and p must be >= 1");
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(p * k));
  std::vector<Eigen::MatrixXd> phis(p, Eigen::MatrixXd(k, k));
  for (auto& phi : phis) {
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) phi(i, j) = scale * gauss(rng);
  }
  for (int pass = 0; pass < 100; ++pass) {
    const double radius = companion_spectral_radius(phis);
    if (radius < 0.95) return phis;
    // scaling Phi_i by c^i scales every companion eigenvalue by c
    const double c = 0.9 / radius;
    double ci = 1.0;
    for (auto& phi : phis) {
      ci *= c;
      phi *= ci;
    }
  }
  throw std::runtime_error("random_stationary_ar: damping did not converge in 100 passes");
}

Eigen::MatrixXd random_spd(int k, std::mt19937_64& rng) {
  if (k < 1) throw ValidationError("random_spd: k must be >= 1");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd a(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) a(i, j) = gauss(rng);
  Eigen::MatrixXd out = a * a.transpose();
  out.diagonal().array() += 0.1;
  return out;
}

}  // namespace varsma
