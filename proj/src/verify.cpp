#include "varsma/verify.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include "varsma/covariance_oracle.hpp"
#include "varsma/gls.hpp"
#include "varsma/ma_kernel.hpp"
#include "varsma/simulate.hpp"
#include "varsma/stability.hpp"

namespace varsma {

namespace {

double fd_gradient_dev(const ModelSpec& spec, const SeriesMatrix& data, const ThetaPoly& theta) {
  const double h = 1e-6;
  const Eigen::VectorXd grad = nllk_grad(spec, data, theta);
  Eigen::VectorXd fd(spec.q);
  for (int i = 0; i < spec.q; ++i) {
    Eigen::VectorXd up = theta.coeffs();
    Eigen::VectorXd dn = theta.coeffs();
    up(i) += h;
    dn(i) -= h;
    fd(i) = (concentrated_nllk(spec, data, make_theta(up)) -
             concentrated_nllk(spec, data, make_theta(dn))) /
            (2.0 * h);
  }
  return (grad - fd).cwiseAbs().maxCoeff() / (1.0 + fd.cwiseAbs().maxCoeff());
}

}  // namespace

VerifyReport run_verify_battery(const VerifyOptions& options, std::ostream* log) {
  VerifyReport report;
  std::mt19937_64 rng(options.seed);

  auto add = [&](const std::string& name, double dev, double tol) {
    VerifyReport::Line line{name, dev, tol, dev < tol};
    report.all_pass = report.all_pass && line.pass;
    if (log) {
      (*log) << (line.pass ? "PASS" : "FAIL") << "  " << name << "  deviation " << dev
             << "  (tol " << tol << ")\n";
    }
    report.lines.push_back(std::move(line));
  };

  // covariance identities: stable and mildly non-invertible polynomials.
  // Non-invertible roots stay within modulus [0.92, 0.99] so the exponential
  // growth of the truncated deconvolution stays representable at T = 50.
  for (int q = 1; q <= 3; ++q) {
    const std::vector<int> horizons = {q, q + 1, 10, 50};
    for (int rep = 0; rep < 4; ++rep) {
      const bool unstable_draw = rep == 3;
      const ThetaPoly theta = unstable_draw
                                  ? sample_poly_with_root_moduli(q, 0.92, 0.99, rng)
                                  : sample_stable(q, rng);
      for (int T : horizons) {
        const Prop1Report res = verify_prop1(theta, T);
        std::ostringstream name;
        name << "identities q=" << q << " T=" << T << (unstable_draw ? " (non-invertible)" : "")
             << " draw " << rep;
        add(name.str() + " factorization", res.dev_factorization, options.tol_identity);
        add(name.str() + " lambda-form", res.dev_lambda_form, options.tol_identity);
        add(name.str() + " inverse", res.dev_inverse, options.tol_identity);
        add(name.str() + " log-det", res.dev_log_det, options.tol_log_det);
      }
    }
  }

  // gradient of the concentrated likelihood vs central finite differences
  for (int q = 1; q <= 3; ++q) {
    for (int rep = 0; rep < 2; ++rep) {
      const int k = 1 + static_cast<int>(rng() % 2);
      const int p = static_cast<int>(rng() % 3);
      const int n = 80 + p;
      GeneratorParams params;
      params.spec = {k, p, q, true};
      params.mu = Eigen::RowVectorXd::Zero(k);
      params.phis = p > 0 ? random_stationary_ar(k, p, rng) : std::vector<Eigen::MatrixXd>{};
      params.theta = sample_stable(q, rng);
      params.omega = random_spd(k, rng);
      params.seed = rng();
      const SeriesMatrix data = gen_varsma(params, n);
      const ThetaPoly at = sample_stable(q, rng);
      std::ostringstream name;
      name << "gradient q=" << q << " k=" << k << " p=" << p << " draw " << rep;
      add(name.str(), fd_gradient_dev(params.spec, data, at), options.tol_grad);
    }
  }

  if (options.inject_sign_error) {
    // Self-test: lambda built from a sign-flipped polynomial must break the
    // lambda-form identity and be reported as a failure.
    const ThetaPoly theta = make_theta(Eigen::VectorXd::Constant(1, 0.5));
    const ThetaPoly flipped = make_theta(Eigen::VectorXd::Constant(1, -0.5));
    const int T = 10;
    const Eigen::MatrixXd sigma = build_sigma_dense(theta, T);
    const Eigen::MatrixXd theta_t = build_theta_T_dense(theta, T);
    const Eigen::MatrixXd lambda = build_lambda(flipped, T);
    Eigen::MatrixXd inner = Eigen::MatrixXd::Identity(T, T);
    inner.noalias() += lambda * lambda.transpose();
    const double dev = (sigma - theta_t * inner * theta_t.transpose()).cwiseAbs().maxCoeff() /
                       sigma.cwiseAbs().rowwise().sum().maxCoeff();
    add("self-test injected sign error", dev, options.tol_identity);
  }

  return report;
}

}  // namespace varsma
