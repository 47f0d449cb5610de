// SPDX-License-Identifier: Apache-2.0
//
// Effects, POVMs, and instruments on the periodic grid: smeared position
// POVM, joint position-momentum covariant POVM built on a Gaussian
// coherent-state frame, marginals, outcome statistics, a-posteriori states,
// and the repeatable von Neumann instrument.

#pragma once

#include "qdyn/hilbert.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace qdyn {

// A region is a set of cell indices in [0, n). Translations act periodically.
struct Region {
  std::vector<int> cells;
};
Region region_interval(int first, int last_inclusive, int n);  // wraps mod n
Region region_all(int n);
Region region_translate(const Region& r, int shift, int n);

struct RectRegion {
  Region x;
  Region p;
};

struct POVM {
  HilbertSpace space;
  int n_cells = 0;
  double norm_defect = 0.0;  // ||F(total) - 1||_max measured at construction
  // Effect matrices are produced on demand from the stored construction data.
  std::function<Operator(const Region&)> effect_of;
};

struct JointPOVM {
  HilbertSpace space;
  double sigma = 0.0;
  RealVector envelope;       // normalized minimal-image Gaussian, indexed by cell offset
  double norm_defect = 0.0;
  std::function<Operator(const RectRegion&)> effect_of;
};

// Minimal-image Gaussian cell weights proportional to exp(-s^2 / (2 sigma^2)),
// normalized to sum 1; the position-marginal smearing density of a Gaussian seed.
RealVector gaussian_weights(const HilbertSpace& space, double sigma);

// F(M) = (chi_M * h)(x_hat), diagonal in the position basis. h must be a
// nonnegative density summing to 1 ("invalid density" otherwise).
POVM smeared_position_povm(const HilbertSpace& space, const RealVector& h);
POVM sharp_position_pvm(const HilbertSpace& space);

// Coherent-state frame POVM: effect(MxN) = sum_{x0 in M, p0 in N} (1/n)
// |psi_{x0,p0}><psi_{x0,p0}| with psi(x) ~ env(x-x0) exp(i p0 (x-x0)/hbar).
// Throws "frame incompleteness" if the measured defect exceeds tolerance.
JointPOVM joint_xp_povm(const HilbertSpace& space, double sigma,
                        double tolerance = 1e-6);

// (position marginal, momentum marginal); each a smearing of the sharp
// observable by the seed's position/momentum diagonal density.
std::pair<POVM, POVM> marginals(const JointPOVM& jp);
// Variances of the marginal smearing densities (position, momentum).
std::pair<double, double> marginal_variances(const JointPOVM& jp);

// Tr(rho F), clipped to [0,1] for reporting.
double outcome_probability(const DensityMatrix& rho, const Operator& effect);

struct JointInstrument {
  JointPOVM povm;
};
JointInstrument joint_xp_instrument(const HilbertSpace& space, double sigma,
                                    double tolerance = 1e-6);

struct InstrumentOutcome {
  Operator unnormalized;      // F(MxN)[rho], trace = probability
  double probability = 0.0;
  DensityMatrix a_posteriori;
};
// Throws "conditioning on null event" when the outcome probability <= 1e-12.
InstrumentOutcome apply_instrument(const JointInstrument& inst,
                                   const DensityMatrix& rho, const RectRegion& r);
// Adjoint action on the identity, sum_kraus V^dag V; equals the POVM effect.
Operator instrument_adjoint_identity(const JointInstrument& inst, const RectRegion& r);

struct VonNeumannInstrument {
  HilbertSpace space;
  std::vector<Operator> projectors;
};
// Requires mutually orthogonal projectors summing to the identity
// ("invalid PVM" otherwise).
VonNeumannInstrument von_neumann_instrument(const HilbertSpace& space,
                                            std::vector<Operator> projectors);
// sum_{i in outcomes} E_i rho E_i.
Operator vn_apply(const VonNeumannInstrument& inst, const Operator& rho,
                  const std::vector<int>& outcomes);

}  // namespace qdyn
