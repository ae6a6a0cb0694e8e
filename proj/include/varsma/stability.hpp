#pragma once

#include <random>

#include "varsma/theta_poly.hpp"

namespace varsma {

enum class StabilityMethod { ClosedFormQ1, ClosedFormQ2, ClosedFormQ3, RootTest };

// Verdict on invertibility of theta(L), i.e. all roots strictly outside the
// unit circle. margin > 0 exactly on the open stable region; for the closed
// forms it is the smallest raw inequality slack, for the root test it is
// (min root modulus - 1).
struct StabilityReport {
  bool stable = false;
  double margin = 0.0;
  StabilityMethod method = StabilityMethod::RootTest;
};

// Closed-form inequality domains for q <= 3, companion-matrix root test above.
// q = 0 is stable with margin 1 by convention.
StabilityReport is_invertible(const ThetaPoly& theta);

// Root test for any q: eigenvalues of the companion matrix of
// z^q theta(1/z), which is monic regardless of trailing zeros in theta.
StabilityReport root_test(const ThetaPoly& theta);

// Random real polynomial with q roots of modulus drawn uniformly in
// [min_modulus, max_modulus]; complex roots come in conjugate pairs.
ThetaPoly sample_poly_with_root_moduli(int q, double min_modulus, double max_modulus,
                                       std::mt19937_64& rng);

// Random invertible polynomial: root moduli in (1.05, 3). Always passes
// is_invertible.
ThetaPoly sample_stable(int q, std::mt19937_64& rng);

}  // namespace varsma
