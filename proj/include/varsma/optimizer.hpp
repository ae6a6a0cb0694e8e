#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "varsma/gls.hpp"
#include "varsma/theta_poly.hpp"

namespace varsma {

struct FitOptions {
  int n_starts = 0;             // 0 = auto: 5 for q <= 2, 10 for q >= 3
  int max_iters = 200;          // per start
  double grad_tol = 1e-6;       // gradient norm at which a start is converged
  double step_tol = 1e-10;      // accepted-step length at which a start stops
  double penalty_value = 1e12;  // objective outside the invertibility domain
  std::uint64_t seed = 0;
  int jobs = 1;                 // concurrent starts

  int starts_for(int q) const { return n_starts > 0 ? n_starts : (q <= 2 ? 5 : 10); }
};

struct StartSummary {
  Eigen::VectorXd theta_init;
  Eigen::VectorXd theta_final;
  double nllk = 0.0;
  std::string status;  // "converged" | "max-iters" | "step-tol" | "error: ..."
  std::vector<double> accepted_nllk;  // nonincreasing by construction
};

struct FitResult {
  ThetaPoly theta;  // strictly inside the invertibility domain
  GlsFit fit;
  double grad_norm = 0.0;
  bool converged = false;
  int starts_used = 0;
  std::vector<StartSummary> per_start;
};

// Minimize the concentrated NLLK over theta: trust-region quasi-Newton local
// search from multiple starts (start 1 is always theta = 0), infeasible trial
// points penalized by penalty_value plus a multiple of the margin violation.
// Deterministic given (seed, options). Throws FitFailureError if every start
// fails.
FitResult fit(const ModelSpec& spec, const SeriesMatrix& data, const FitOptions& options = {});

struct GridOptions {
  Eigen::VectorXd lo;   // empty = default bounds for the given q
  Eigen::VectorXd hi;
  int resolution = 25;  // points per axis, >= 2
  int jobs = 1;
};

// Rectangular theta grid of NLLK values for q in {1, 2}. Points outside the
// invertibility domain are masked and never evaluated. Default bounds:
// [-0.999, 0.999] for q = 1, [-2, 2] x [-1, 1] for q = 2.
struct LikelihoodGrid {
  std::vector<Eigen::VectorXd> axes;                         // q coordinate vectors
  Eigen::MatrixXd nllk;                                      // axis0 x axis1 (1 col if q = 1)
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask;   // true = stable, evaluated
};

LikelihoodGrid grid_nllk(const ModelSpec& spec, const SeriesMatrix& data,
                         const GridOptions& options = {});

}  // namespace varsma
