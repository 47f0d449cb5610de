// SPDX-License-Identifier: Apache-2.0
//
// Lindblad generators, exact-exponential and adaptive-ODE propagation, and
// quantum-jump Monte Carlo unraveling with deterministic parallel streams.

#pragma once

#include "qdyn/hilbert.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace qdyn {

struct LindbladGenerator {
  Operator H;                        // Hermitian
  std::vector<Operator> lindblad_ops;
  const HilbertSpace& space() const { return H.space; }
};

// Checks Hermiticity ("invalid Hamiltonian") and shared spaces ("space mismatch").
LindbladGenerator make_generator(Operator H, std::vector<Operator> lindblad_ops);

// Dense d^2 x d^2 matrix of L[rho] = -(i/hbar)[H,rho]
//   + sum_j (L_j rho L_j^dag - 1/2 {L_j^dag L_j, rho}).
Superoperator generator_superop(const LindbladGenerator& gen);

// K = (i/hbar) H + 1/2 sum_j L_j^dag L_j, so that
// L[rho] = -K rho - rho K^dag + sum_j L_j rho L_j^dag.
Operator effective_K(const LindbladGenerator& gen);

// L[rho] evaluated by operator products; never materializes the d^2 matrix.
Operator apply_generator(const LindbladGenerator& gen, const Operator& rho);
// Adjoint (Heisenberg) action L'[X] = (i/hbar)[H,X] + sum L^dag X L - 1/2 {L^dag L, X}.
Operator apply_generator_adjoint(const LindbladGenerator& gen, const Operator& x);

DensityMatrix evolve_expm(const LindbladGenerator& gen, const DensityMatrix& rho0,
                          double t);
DensityMatrix evolve_ode(const LindbladGenerator& gen, const DensityMatrix& rho0,
                         double t, double rel_tol);
// Same integrator on an arbitrary (non-density) operator; used for
// cross-operator coherences where the evolved object is not a state.
Operator evolve_ode_operator(const LindbladGenerator& gen, const Operator& op0,
                             double t, double rel_tol);

struct JumpConfig {
  long long n_trajectories = 1;
  std::uint64_t master_seed = 0;
  double dt_max = 0.0;          // <= 0 picks t/64
  double norm_tolerance = 1e-28;
  int workers = 1;
  bool keep_records = true;
};

struct TrajectoryRecord {
  long long trajectory_id = 0;
  std::vector<double> jump_times;
  std::vector<int> channels;
};

struct JumpResult {
  DensityMatrix rho_avg;
  std::vector<TrajectoryRecord> records;   // empty when keep_records = false
  long long lost = 0;
  // Per-trajectory <psi|obs|psi> samples when an observable was requested.
  std::vector<double> observable_samples;
};

// Monte-Carlo unraveling: deterministic waiting-time sampling on a dyadic
// time lattice of precomputed no-jump propagators. Identical output for
// identical (master_seed, n_trajectories) regardless of worker count.
JumpResult unravel_jumps(const LindbladGenerator& gen, const Vector& psi0, double t,
                         const JumpConfig& config,
                         const std::optional<Operator>& observable = std::nullopt);

// SplitMix64: the per-trajectory stream splitting rule (seed_i = master_seed XOR i).
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() {  // in (0,1): never returns 0
    return (double(next() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  }
};

}  // namespace qdyn
