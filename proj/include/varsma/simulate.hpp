#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "varsma/gls.hpp"
#include "varsma/theta_poly.hpp"

namespace varsma {

struct GeneratorParams {
  ModelSpec spec;
  Eigen::RowVectorXd mu;              // 1 x k
  std::vector<Eigen::MatrixXd> phis;  // p matrices, k x k, right multiplication
  ThetaPoly theta;                    // invertibility not required
  Eigen::MatrixXd omega;              // k x k SPD innovation covariance
  int burn_in = 200;
  std::uint64_t seed = 0;
};

// Spectral radius of the AR companion matrix; < 1 certifies stationarity.
double companion_spectral_radius(const std::vector<Eigen::MatrixXd>& phis);

// n rows of X_t = mu + X_{t-1} Phi_1 + ... + X_{t-p} Phi_p
//                 + eps_t + theta_1 eps_{t-1} + ... + theta_q eps_{t-q},
// i.i.d. Gaussian eps with covariance omega, run for burn_in + n steps from
// zero initial conditions with the burn-in discarded. Deterministic given the
// seed. Throws ValidationError for nonstationary phis (radius reported).
SeriesMatrix gen_varsma(const GeneratorParams& params, int n);

// Random AR coefficients damped until the companion spectral radius is below
// 0.95 (at most 100 damping passes).
std::vector<Eigen::MatrixXd> random_stationary_ar(int k, int p, std::mt19937_64& rng);

// A A' + 0.1 I for a random square A; smallest eigenvalue >= 0.1.
Eigen::MatrixXd random_spd(int k, std::mt19937_64& rng);

}  // namespace varsma
