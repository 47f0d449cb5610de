// SPDX-License-Identifier: Apache-2.0
//
// Unitary group representations and covariance checks for generators,
// POVMs, and the Weyl / generalized Weyl relations.

#pragma once

#include "qdyn/lindblad.hpp"
#include "qdyn/measurement.hpp"

#include <functional>
#include <string>
#include <vector>

namespace qdyn {

enum class GroupLabel { U1Phase, SO2Spin, Translation1d, Boost1d };

struct UnitaryRep {
  GroupLabel label;
  HilbertSpace space;
  std::function<Operator(double)> map;  // group parameter -> unitary
};

// theta -> exp(i theta N) on a Fock space.
UnitaryRep u1_phase_rep(const HilbertSpace& space);
// phi -> exp((i/hbar) phi S_z) with S_z = (hbar/2) sigma_z.
UnitaryRep so2_spin_rep(const HilbertSpace& space);
// a -> exp(-(i/hbar) a p_hat): the active shift |x_j> -> |x_{j + a/dx}>.
// Throws "off-lattice shift" unless a is an integer multiple of dx.
UnitaryRep translation_rep(const HilbertSpace& space);
// q -> exp((i/hbar) q x_hat); raises momentum by q for on-lattice q.
UnitaryRep boost_rep(const HilbertSpace& space);

// max over (params x samples) of || L[U rho U^dag] - U L[rho] U^dag ||_1.
double covariance_residual(const Superoperator& l, const UnitaryRep& rep,
                           const std::vector<double>& params,
                           const std::vector<DensityMatrix>& samples);
// Same check via operator-product application; usable at grid sizes where
// the dense superoperator would not fit.
double covariance_residual(const LindbladGenerator& gen, const UnitaryRep& rep,
                           const std::vector<double>& params,
                           const std::vector<DensityMatrix>& samples);

struct WeylResult {
  double residual = 0.0;
  bool on_lattice = true;
  std::string warning;  // "off-lattice shift" when applicable
};
// || U(a) U(q) - exp(i q a / hbar) U(q) U(a) ||_max with U(a) = exp(i a p_hat/hbar),
// U(q) = exp(i q x_hat/hbar) built directly from the grid operators.
WeylResult weyl_residual(const HilbertSpace& space, double a, double q);

// Fock shift isometry W^m with W = sum_n |n+1><n|.
Operator shift_isometry(const HilbertSpace& space, int m);
// || (U(theta) W^m - exp(i theta m) W^m U(theta)) P ||_max restricted by the
// projector P onto the lowest dim-m basis states.
double generalized_weyl_residual(const HilbertSpace& space, double theta, int m);

// || U^dag(g) F(M) U(g) - F(M') ||_max where M' = M - a for translations and
// M' = M for boosts (position POVMs are boost invariant).
double povm_covariance_residual(const POVM& povm, const UnitaryRep& rep,
                                double param, const Region& region);
// Joint POVM: translations shift the position cells, boosts the momentum cells.
double povm_covariance_residual(const JointPOVM& jp, const UnitaryRep& rep,
                                double param, const RectRegion& region);

}  // namespace qdyn
