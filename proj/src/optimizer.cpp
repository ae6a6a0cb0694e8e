#include "varsma/optimizer.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "varsma/errors.hpp"
#include "varsma/stability.hpp"

namespace varsma {

namespace {

void parallel_for(int total, int jobs, const std::function<void(int)>& body) {
  jobs = std::clamp(jobs, 1, std::max(1, total));
  if (jobs == 1) {
    for (int i = 0; i < total; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
        try {
          body(i);
        } catch (...) {
          std::scoped_lock lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Exact trust-region subproblem min g's + s'Hs/2, |s| <= delta, via the
// eigendecomposition of the (tiny) q x q model Hessian.
Eigen::VectorXd tr_step(const Eigen::MatrixXd& hess, const Eigen::VectorXd& grad, double delta) {
  const int n = static_cast<int>(grad.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hess);
  const Eigen::VectorXd d = es.eigenvalues();
  const Eigen::MatrixXd rot = es.eigenvectors();
  const Eigen::VectorXd gh = rot.transpose() * grad;
  const double dmin = d.minCoeff();

  const auto coords = [&](double sigma) {
    Eigen::VectorXd s(n);
    for (int i = 0; i < n; ++i) s(i) = -gh(i) / (d(i) + sigma);
    return s;
  };

  if (dmin > 0.0) {
    const Eigen::VectorXd s = coords(0.0);
    if (s.norm() <= delta) return rot * s;
  }

  // boundary solution: sigma > max(0, -dmin) with |s(sigma)| = delta
  double lo = std::max(0.0, -dmin) + std::max(1e-14, 1e-12 * std::abs(dmin));
  if (coords(lo).norm() < delta) {
    // hard case: gradient orthogonal to the lowest eigenspace; pad with an
    // eigenvector component to reach the boundary
    const Eigen::VectorXd s = coords(lo);
    int imin = 0;
    d.minCoeff(&imin);
    const double tau = std::sqrt(std::max(0.0, delta * delta - s.squaredNorm()));
    return rot * s + tau * rot.col(imin);
  }
  double hi = std::max(1.0, 2.0 * lo);
  for (int it = 0; it < 200 && coords(hi).norm() > delta; ++it) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (coords(mid).norm() > delta ? lo : hi) = mid;
  }
  return rot * coords(0.5 * (lo + hi));
}

void bfgs_update(Eigen::MatrixXd& hess, const Eigen::VectorXd& s, const Eigen::VectorXd& y) {
  const double sy = s.dot(y);
  if (sy <= 1e-10 * s.norm() * y.norm()) return;  // keep the approximation PD
  const Eigen::VectorXd hs = hess * s;
  const double shs = s.dot(hs);
  hess += (y * y.transpose()) / sy;
  if (shs > 0.0) hess -= (hs * hs.transpose()) / shs;
}

double penalized_nllk(const ModelSpec& spec, const SeriesMatrix& data, const FitOptions& options,
                      const Eigen::VectorXd& theta_vec, bool* feasible) {
  const ThetaPoly theta = make_theta(theta_vec);
  const StabilityReport rep = is_invertible(theta);
  if (feasible) *feasible = rep.stable;
  if (!rep.stable) return options.penalty_value + 1e6 * (-rep.margin);
  return concentrated_nllk(spec, data, theta);
}

StartSummary run_start(const ModelSpec& spec, const SeriesMatrix& data, const FitOptions& options,
                       const Eigen::VectorXd& theta0) {
  const int q = spec.q;
  StartSummary sum;
  sum.theta_init = theta0;
  sum.theta_final = theta0;
  sum.nllk = std::numeric_limits<double>::infinity();
  try {
    Eigen::VectorXd x = theta0;
    double f = penalized_nllk(spec, data, options, x, nullptr);
    Eigen::VectorXd g = nllk_grad(spec, data, make_theta(x));
    Eigen::MatrixXd hess = Eigen::MatrixXd::Identity(q, q);
    double delta = 0.5;
    bool scaled = false;
    sum.accepted_nllk.push_back(f);
    sum.status = "max-iters";

    for (int iter = 0; iter < options.max_iters; ++iter) {
      if (g.norm() <= options.grad_tol) {
        sum.status = "converged";
        break;
      }
      const Eigen::VectorXd s = tr_step(hess, g, delta);
      const double pred = -(g.dot(s) + 0.5 * s.dot(hess * s));
      bool feasible = false;
      const Eigen::VectorXd x_trial = x + s;
      const double f_trial = penalized_nllk(spec, data, options, x_trial, &feasible);
      const double rho = pred > 0.0 ? (f - f_trial) / pred : -1.0;

      if (f_trial < f) {
        // accepted iterates are always feasible: penalized values exceed any
        // attainable NLLK
        const Eigen::VectorXd g_new = nllk_grad(spec, data, make_theta(x_trial));
        const Eigen::VectorXd y = g_new - g;
        if (!scaled && y.dot(s) > 0.0) {
          hess *= y.dot(y) / y.dot(s);
          scaled = true;
        }
        bfgs_update(hess, s, y);
        x = x_trial;
        f = f_trial;
        g = g_new;
        sum.accepted_nllk.push_back(f);
        if (s.norm() <= options.step_tol) {
          sum.status = g.norm() <= options.grad_tol ? "converged" : "step-tol";
          break;
        }
      }
      if (rho < 0.25) {
        delta = 0.25 * std::max(s.norm(), 1e-16);
      } else if (rho > 0.75 && s.norm() > 0.8 * delta) {
        delta = std::min(2.0 * delta, 16.0);
      }
      if (delta < options.step_tol) {
        sum.status = g.norm() <= options.grad_tol ? "converged" : "step-tol";
        break;
      }
    }
    if (sum.status == "max-iters" && g.norm() <= options.grad_tol) sum.status = "converged";
    sum.theta_final = x;
    sum.nllk = f;
  } catch (const std::exception& e) {
    sum.status = std::string("error: ") + e.what();
    sum.nllk = std::numeric_limits<double>::infinity();
  }
  return sum;
}

Eigen::VectorXd linspace(double lo, double hi, int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  return v;
}

}  // namespace

FitResult fit(const ModelSpec& spec, const SeriesMatrix& data, const FitOptions& options) {
  FitResult result;
  if (spec.q == 0) {
    result.theta = ThetaPoly();
    result.fit = gls_fit(spec, data, result.theta);
    result.grad_norm = 0.0;
    result.converged = true;
    result.starts_used = 1;
    StartSummary sum;
    sum.theta_init.resize(0);
    sum.theta_final.resize(0);
    sum.nllk = result.fit.nllk;
    sum.status = "converged";
    sum.accepted_nllk.push_back(result.fit.nllk);
    result.per_start.push_back(std::move(sum));
    return result;
  }

  const int n_starts = options.starts_for(spec.q);
  std::vector<Eigen::VectorXd> inits(n_starts);
  inits[0] = Eigen::VectorXd::Zero(spec.q);  // the VAR baseline, always feasible
  for (int s = 1; s < n_starts; ++s) {
    std::mt19937_64 rng(options.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(s));
    inits[s] = sample_stable(spec.q, rng).coeffs();
  }

  std::vector<StartSummary> summaries(n_starts);
  parallel_for(n_starts, options.jobs,
               [&](int s) { summaries[s] = run_start(spec, data, options, inits[s]); });

  int winner = -1;
  for (int s = 0; s < n_starts; ++s) {
    if (summaries[s].status.rfind("error", 0) == 0) continue;
    if (winner < 0 || summaries[s].nllk < summaries[winner].nllk) winner = s;
  }
  if (winner < 0) {
    std::ostringstream msg;
    msg << "all " << n_starts << " starts failed:";
    for (int s = 0; s < n_starts; ++s) msg << " [start " << s << ": " << summaries[s].status << "]";
    throw FitFailureError(msg.str());
  }

  result.theta = make_theta(summaries[winner].theta_final);
  result.fit = gls_fit(spec, data, result.theta);
  result.grad_norm = nllk_grad(spec, data, result.theta).norm();
  result.converged = result.grad_norm <= options.grad_tol;
  result.starts_used = n_starts;
  result.per_start = std::move(summaries);
  return result;
}

LikelihoodGrid grid_nllk(const ModelSpec& spec, const SeriesMatrix& data,
                         const GridOptions& options) {
  const int q = spec.q;
  if (q < 1 || q > 2) throw ValidationError("grid_nllk: only q = 1 or 2 is supported");
  if (options.resolution < 2) throw ValidationError("grid_nllk: resolution must be >= 2");

  Eigen::VectorXd lo = options.lo;
  Eigen::VectorXd hi = options.hi;
  if (lo.size() == 0 && hi.size() == 0) {
    if (q == 1) {
      lo = Eigen::VectorXd::Constant(1, -0.999);
      hi = Eigen::VectorXd::Constant(1, 0.999);
    } else {
      lo = (Eigen::VectorXd(2) << -2.0, -1.0).finished();
      hi = (Eigen::VectorXd(2) << 2.0, 1.0).finished();
    }
  }
  if (lo.size() != q || hi.size() != q) throw DimensionError("grid_nllk: bounds must have size q");
  for (int d = 0; d < q; ++d) {
    if (!(lo(d) < hi(d))) throw ValidationError("grid_nllk: need lo < hi on every axis");
  }

  const int res = options.resolution;
  LikelihoodGrid grid;
  for (int d = 0; d < q; ++d) grid.axes.push_back(linspace(lo(d), hi(d), res));
  const int cols = q == 2 ? res : 1;
  grid.nllk.setConstant(res, cols, std::numeric_limits<double>::quiet_NaN());
  grid.mask.setConstant(res, cols, false);

  parallel_for(res * cols, options.jobs, [&](int idx) {
    const int i = idx / cols;
    const int j = idx % cols;
    Eigen::VectorXd t(q);
    t(0) = grid.axes[0](i);
    if (q == 2) t(1) = grid.axes[1](j);
    const ThetaPoly theta = make_theta(t);
    if (!is_invertible(theta).stable) return;
    grid.mask(i, j) = true;
    grid.nllk(i, j) = concentrated_nllk(spec, data, theta);
  });
  return grid;
}

}  // namespace varsma
