#include "varsma/stability.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>

#include "varsma/errors.hpp"

namespace varsma {

namespace {

// Min of the raw inequality slacks; > 0 exactly on the open stable region.
double margin_q1(const Eigen::VectorXd& t) {
  return std::min(1.0 - t(0), 1.0 + t(0));
}

double margin_q2(const Eigen::VectorXd& t) {
  return std::min({1.0 - t(1), 1.0 - t(0) + t(1), 1.0 + t(0) + t(1)});
}

double margin_q3(const Eigen::VectorXd& t) {
  const double c1 = 1.0 + t(0) + t(1) + t(2);
  const double c2 = 3.0 + t(0) - t(1) - 3.0 * t(2);
  const double c3 = 1.0 - t(0) + t(1) - t(2);
  const double c4 = 1.0 - t(1) - t(2) * t(2) + t(0) * t(2);
  return std::min({c1, c2, c3, c4});
}

}  // namespace

StabilityReport root_test(const ThetaPoly& theta) {
  const int q = theta.q();
  if (q == 0) return {true, 1.0, StabilityMethod::RootTest};
  if (theta.coeffs().isZero(0.0)) return {true, 1.0, StabilityMethod::RootTest};

  // Companion of p(z) = z^q theta(1/z) = z^q + theta_1 z^{q-1} + ... + theta_q,
  // monic for any theta. Roots of p are the inverted roots of theta, so
  // invertibility means all |eigenvalue| < 1.
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(q, q);
  for (int i = 0; i < q; ++i) comp(0, i) = -theta.coeff(i + 1);
  comp.block(1, 0, q - 1, q - 1).setIdentity();
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
  const double max_mod = es.eigenvalues().cwiseAbs().maxCoeff();

  StabilityReport rep;
  rep.method = StabilityMethod::RootTest;
  // root moduli of theta must exceed 1 + 1e-10
  rep.margin = max_mod > 0.0 ? 1.0 / max_mod - (1.0 + 1e-10) : 1.0;
  rep.stable = rep.margin > 0.0;
  return rep;
}

StabilityReport is_invertible(const ThetaPoly& theta) {
  const Eigen::VectorXd& t = theta.coeffs();
  StabilityReport rep;
  switch (theta.q()) {
    case 0:
      return {true, 1.0, StabilityMethod::RootTest};
    case 1:
      rep = {margin_q1(t) > 0.0, margin_q1(t), StabilityMethod::ClosedFormQ1};
      return rep;
    case 2:
      rep = {margin_q2(t) > 0.0, margin_q2(t), StabilityMethod::ClosedFormQ2};
      return rep;
    case 3:
      rep = {margin_q3(t) > 0.0, margin_q3(t), StabilityMethod::ClosedFormQ3};
      return rep;
    default:
      return root_test(theta);
  }
}

ThetaPoly sample_poly_with_root_moduli(int q, double min_modulus, double max_modulus,
                                       std::mt19937_64& rng) {
  if (q < 1) throw ValidationError("sample_poly_with_root_moduli: q must be >= 1");
  std::uniform_real_distribution<double> mod(min_modulus, max_modulus);
  std::uniform_real_distribution<double> phase(0.0, M_PI);
  std::bernoulli_distribution coin(0.5);

  // theta(L) = prod over roots r of (1 - L/r); conjugate pairs keep it real.
  std::vector<std::complex<double>> coeffs{1.0};
  auto mul_root = [&coeffs](std::complex<double> root) {
    coeffs.push_back(0.0);
    const std::complex<double> a = -1.0 / root;
    for (std::size_t i = coeffs.size() - 1; i >= 1; --i) coeffs[i] += a * coeffs[i - 1];
  };

  int remaining = q;
  while (remaining > 0) {
    if (remaining >= 2 && coin(rng)) {
      const std::complex<double> z = std::polar(mod(rng), phase(rng));
      mul_root(z);
      mul_root(std::conj(z));
      remaining -= 2;
    } else {
      mul_root({coin(rng) ? mod(rng) : -mod(rng), 0.0});
      remaining -= 1;
    }
  }

  Eigen::VectorXd out(q);
  for (int i = 0; i < q; ++i) out(i) = coeffs[i + 1].real();
  return ThetaPoly(out);
}

ThetaPoly sample_stable(int q, std::mt19937_64& rng) {
  return sample_poly_with_root_moduli(q, 1.05, 3.0, rng);
}

}  // namespace varsma
