// SPDX-License-Identifier: Apache-2.0
//
// Concrete master-equation builders (damped oscillator, two-level system,
// quantum Brownian motion, quantum linear Boltzmann equation) and their
// closed-form solutions used as analytic oracles.

#pragma once

#include "qdyn/lindblad.hpp"

#include <utility>
#include <vector>

namespace qdyn {

// N_beta = 1/(exp(beta*hbar*omega) - 1). Throws "invalid temperature" for
// a nonpositive argument; beta = +inf gives 0 (zero-temperature limit).
double thermal_occupation(double omega, double beta, double hbar = 1.0);

struct DHOParams {
  double omega = 1.0;
  double eta = 0.1;
  double beta = 1.0;
  bool zero_temperature = false;
  int dim = 40;
};

struct ShiftCovParams {
  double eta_0 = 0.0;
  std::vector<double> eta_m;  // m-photon rates, index 0 is m = 1
  double omega = 1.0;
  double beta = 1.0;
  bool zero_temperature = false;
  int dim = 40;
};

struct TwoLevelParams {
  double omega = 1.0;
  double eta = 1.0;
  double beta = 1.0;
  bool zero_temperature = false;
};

struct RotCovParams {
  double c_minus = 0.0;  // rate of T_{1,-1} = sqrt(2) sigma_-
  double c_zero = 0.0;   // rate of T_{1,0} = sigma_z
  double c_plus = 0.0;   // rate of T_{1,+1} = -sqrt(2) sigma_+
  double hamiltonian_coeff = 0.0;  // H = coeff * sigma_z
};

struct QBMParams {
  double mass = 1.0;
  double eta = 0.1;  // friction rate
  double beta = 1.0;
  HilbertSpace grid = HilbertSpace::grid1d(64, 1.0);
  bool include_friction = true;
};

struct MomentumTransfer {
  double q = 0.0;
  Complex amplitude = 1.0;
};

struct QLBEParams {
  double mass_test = 1.0;
  double mass_gas = 1.0;
  double beta = 1.0;
  double gas_density = 1.0;  // per length
  std::vector<MomentumTransfer> t_tilde;
  HilbertSpace grid = HilbertSpace::grid1d(64, 1.0);
};

// Thermal states in their natural bases.
DensityMatrix thermal_fock_state(const HilbertSpace& space, double omega,
                                 double beta, bool zero_temperature = false);
DensityMatrix thermal_qubit_state(const HilbertSpace& space, double omega,
                                  double beta, bool zero_temperature = false);
// Maxwell-Boltzmann momentum occupation exp(-beta p^2/2M)/Z on the grid.
DensityMatrix maxwell_momentum_state(const HilbertSpace& space, double mass,
                                     double beta);

// Truncated coherent-state amplitudes (not renormalized) and the weight the
// truncation discards.
Vector coherent_vector(const HilbertSpace& space, Complex alpha);
double coherent_leakage(const HilbertSpace& space, Complex alpha);
// Normalized Gaussian wave packet exp(-(x-x0)^2/4 sigma^2 + i p0 x/hbar).
Vector gaussian_packet(const HilbertSpace& space, double x0, double p0,
                       double sigma_x);

// Damped harmonic oscillator: H = hbar omega N, jump operators
// sqrt(eta (N_beta+1)) a and sqrt(eta N_beta) a^dag.
LindbladGenerator dho_generator(const DHOParams& p);
// <a>(t) = <a> exp(-i omega t - eta t/2)
Complex dho_mean_amplitude(const DHOParams& p, Complex a0, double t);
// <N>(t) = <N> exp(-eta t) + N_beta (1 - exp(-eta t))
double dho_mean_number(const DHOParams& p, double n0, double t);
// Cat-state off-diagonal suppression exp(-|alpha-beta|^2 (1-exp(-eta t))/2)
// at zero temperature.
double dho_cat_coherence(Complex alpha, Complex beta_amp, double eta, double t);

// Phase damping sqrt(2 eta_0) N plus m-photon ladder operators
// sqrt(eta_m (N_beta+1)^m) a^m and sqrt(eta_m N_beta^m) (a^dag)^m.
LindbladGenerator shift_covariant_generator(const ShiftCovParams& p);

// Two-level system: H = (hbar omega/2) sigma_z, jumps sqrt(eta (N_beta+1))
// sigma_- and sqrt(eta N_beta) sigma_+.
LindbladGenerator two_level_generator(const TwoLevelParams& p);
struct TwoLevelOracle {
  double excited_population = 0.0;
  Complex coherence;  // <sigma_-> = <1|rho|0>
};
TwoLevelOracle two_level_oracles(const TwoLevelParams& p,
                                 const DensityMatrix& rho0, double t);

// Rotation-covariant qubit generator built from the spherical tensor
// operators T_{1m}; collapses to the two-level generator for
// c_zero = 0, 2 c_minus = eta (N_beta+1), 2 c_plus = eta N_beta.
LindbladGenerator rotation_covariant_generator(const RotCovParams& p);

// Quantum Brownian motion diffusion constants and thermal length.
double qbm_dpp(const QBMParams& p);            // eta M / beta
double qbm_dxx(const QBMParams& p);            // eta beta hbar^2 / 16 M
double qbm_thermal_length(const QBMParams& p); // sqrt(beta hbar^2 / 4 M)

// With friction: H = p^2/2M + (eta/4)(x p + p x) and the single jump
// operator sqrt(eta) (x + i lambda_th^2 p/hbar)/(sqrt(2) lambda_th).
// Without friction: H = p^2/2M with Hermitian jumps sqrt(2 Dpp)/hbar x and
// sqrt(2 Dxx)/hbar p, realizing the pure double-commutator generator.
// Throws "thermal length unresolved" when friction is requested and
// lambda_th < 2 dx.
LindbladGenerator qbm_generator(const QBMParams& p);
// The four-term right-hand side assembled literally, for cross-checking
// against the Lindblad form.
Superoperator qbm_four_term_superop(const QBMParams& p);

struct QBMMoments {
  double mean_p = 0.0;
  double mean_energy = 0.0;
};
// <p>(t) = <p> exp(-eta t); <E>(t) = <E> exp(-2 eta t) + (1/2beta)(1-exp(-2 eta t)).
QBMMoments qbm_moment_oracles(const QBMParams& p, const DensityMatrix& rho0,
                              double t);

// Closed-form frictionless solutions evaluated by discrete convolution,
// parameterized directly by the diffusion constants. Momentum-transfer or
// position shifts leaving the unwrapped lattice are dropped.
Matrix qbm_exact_momentum(const HilbertSpace& space, double mass, double dpp,
                          double dxx, const Matrix& rho0, double t,
                          bool free_motion = true);
Matrix qbm_exact_position(const HilbertSpace& space, double mass, double dpp,
                          double dxx, const Matrix& rho0, double t,
                          bool free_motion = true);
// The forms are near-densities: boundary clipping of the convolution leaves
// a trace defect of the order of the packet weight at the window edge, so
// they are returned as plain operators rather than validated states.
struct QBMExactForms {
  Operator momentum_form;
  Operator position_form;
};
QBMExactForms qbm_exact_solutions(const QBMParams& p, const DensityMatrix& rho0,
                                  double t);

// Maxwell-Boltzmann dynamic structure factor; throws
// "zero momentum transfer singularity" at q = 0.
double dynamic_structure_factor_mb(double q, double energy, double mass_gas,
                                   double beta);
// Energy transfer E(q,p) = ((p+q)^2 - p^2)/2M for the test particle.
double qlbe_energy_transfer(double q, double p, double mass_test);

// Constant scattering amplitude on the nonzero transfer multiples
// q = +-1..+-max_multiple times dp.
std::vector<MomentumTransfer> constant_t_tilde(const HilbertSpace& grid,
                                               Complex amplitude,
                                               int max_multiple);

struct QLBEBuild {
  LindbladGenerator generator;
  double dropped_weight = 0.0;  // summed rate weight lost at the grid edge
  double total_weight = 0.0;    // summed rate weight of all transitions
};
// One jump operator per momentum transfer:
// sqrt(4 pi^2 n |t(q)|^2) exp(i q x/hbar) P_valid sqrt(S_MB(q, E(q, p))),
// diagonal pieces taken in the momentum basis; transitions whose target
// momentum leaves the unwrapped lattice are dropped from gain and loss
// consistently and their weight accumulated.
QLBEBuild qlbe_build(const QLBEParams& p);
Superoperator qlbe_generator(const QLBEParams& p);
// Classical rate matrix governing the momentum populations; columns sum to
// zero by construction.
Eigen::MatrixXd qlbe_population_rates(const QLBEParams& p);

}  // namespace qdyn
