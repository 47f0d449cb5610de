// SPDX-License-Identifier: Apache-2.0
//
// Levy-Khintchine triplets, the characteristic exponent, and the
// multiplicative decoherence factor acting on position matrix elements.

#pragma once

#include "qdyn/hilbert.hpp"

#include <vector>

namespace qdyn {

struct LevyJump {
  double q = 0.0;       // momentum kick
  double weight = 0.0;  // rate, >= 0
};

struct LevyTriplet {
  double drift = 0.0;     // b
  double gaussian = 0.0;  // D, >= 0
  std::vector<LevyJump> jumps;
};

// Psi(x) = i b x + D x^2/2 - sum_q w_q [exp(i q x/hbar) - 1 - i q x/(hbar(1+q^2))].
// Re Psi >= 0 everywhere; Psi(0) = 0.
Complex characteristic_exponent(const LevyTriplet& trip, double x,
                                double hbar = 1.0);

// Phi(t,x) = exp(-t Psi(x)); multiplicative in t, |Phi| <= 1, Phi(t,0) = 1.
Complex decoherence_factor(const LevyTriplet& trip, double t, double x,
                           double hbar = 1.0);

// Multiplies <x_i|rho|x_j> by Phi(t, x_i - x_j) with the minimal-image
// separation on the periodic grid (the n/2 tie is averaged over both images,
// which keeps the factor real there and Hermiticity exact). Throws
// "non-PSD decoherence field" when the result loses positivity.
DensityMatrix apply_decoherence(const DensityMatrix& rho,
                                const LevyTriplet& trip, double t);

struct BochnerResult {
  bool pass = false;
  double min_eigenvalue = 0.0;
};
// Builds Phi(t, x_i - x_j) over the given points (raw differences) and
// reports the smallest eigenvalue; passes iff >= -1e-10.
BochnerResult bochner_check(const LevyTriplet& trip, double t,
                            const std::vector<double>& points,
                            double hbar = 1.0);

}  // namespace qdyn
