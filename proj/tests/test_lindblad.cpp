// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"
#include "qdyn/lindblad.hpp"
#include "qdyn/models.hpp"

#include <cmath>
#include <numeric>
#include <random>

using namespace qdyn;

namespace {

Matrix random_matrix(int d, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix m(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) m(i, j) = Complex(nd(gen), nd(gen));
  return m;
}

DensityMatrix random_density(const HilbertSpace& space, unsigned seed) {
  Matrix a = random_matrix(space.dim(), seed);
  Matrix m = a * a.adjoint();
  return make_density_normalized(Operator{space, m});
}

LindbladGenerator qubit_decay(double eta) {
  auto s = HilbertSpace::qubit();
  auto p = pauli_ops(s);
  Operator l{s, Matrix(std::sqrt(eta) * p.sigma_minus.matrix)};
  Operator h{s, Matrix::Zero(2, 2)};
  return make_generator(h, {l});
}

}  // namespace

TEST_CASE("generator construction validates its inputs") {
  auto s = HilbertSpace::qubit();
  Matrix not_herm(2, 2);
  not_herm << 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_WITH_AS(make_generator(Operator{s, not_herm}, {}),
                       "invalid Hamiltonian", Error);

  auto other = HilbertSpace::fock(3);
  Operator h{s, Matrix::Zero(2, 2)};
  Operator l{other, Matrix::Zero(3, 3)};
  CHECK_THROWS_WITH_AS(make_generator(h, {l}), "space mismatch", Error);
}

TEST_CASE("generator superoperator on reference cases") {
  auto s = HilbertSpace::qubit();
  Operator h{s, Matrix::Zero(2, 2)};
  Superoperator zero = generator_superop(make_generator(h, {}));
  CHECK(max_abs(zero.matrix) == 0.0);

  // Pure decay moves the excited population down.
  Superoperator dec = generator_superop(qubit_decay(1.0));
  Matrix excited = Matrix::Zero(2, 2);
  excited(1, 1) = 1.0;
  Matrix image = apply(dec, Operator{s, excited}).matrix;
  Matrix expect(2, 2);
  expect << 1.0, 0.0, 0.0, -1.0;
  CHECK(max_abs(image - expect) <= 1e-15);
}

TEST_CASE("generator preserves the trace") {
  DHOParams p;
  p.dim = 10;
  p.eta = 0.35;
  p.beta = 0.8;
  auto gen = dho_generator(p);
  std::mt19937 seeds(7);
  for (int k = 0; k < 50; ++k) {
    auto rho = random_density(gen.space(), seeds());
    CHECK(std::abs(apply_generator(gen, rho.op).matrix.trace()) <= 1e-13);
  }
}

TEST_CASE("effective K operator") {
  auto s = HilbertSpace::qubit();
  auto pl = pauli_ops(s);

  Operator h{s, Matrix(0.7 * pl.sigma_z.matrix)};
  Operator k_free = effective_K(make_generator(h, {}));
  CHECK(max_abs(k_free.matrix - Complex(0.0, 0.7) * pl.sigma_z.matrix) <= 1e-15);

  double eta = 0.9;
  Operator k_dec = effective_K(qubit_decay(eta));
  Matrix expect = Matrix::Zero(2, 2);
  expect(1, 1) = eta / 2.0;
  CHECK(max_abs(k_dec.matrix - expect) <= 1e-15);

  DHOParams p;
  p.dim = 14;
  p.eta = 0.2;
  p.beta = 1.3;
  auto gen = dho_generator(p);
  Matrix k = effective_K(gen).matrix;
  Matrix offdiag = k;
  offdiag.diagonal().setZero();
  CHECK(max_abs(offdiag) <= 1e-14);

  // L[rho] = -K rho - rho K^dag + sum_j L_j rho L_j^dag.
  auto rho = random_density(gen.space(), 123);
  Matrix lhs = apply_generator(gen, rho.op).matrix;
  Matrix rhs = -k * rho.op.matrix - rho.op.matrix * k.adjoint();
  for (const auto& l : gen.lindblad_ops)
    rhs += l.matrix * rho.op.matrix * l.matrix.adjoint();
  CHECK(max_abs(lhs - rhs) <= 1e-12);
}

TEST_CASE("adjoint generator satisfies the duality pairing") {
  DHOParams p;
  p.dim = 9;
  p.eta = 0.5;
  p.beta = 1.0;
  auto gen = dho_generator(p);
  std::mt19937 seeds(41);
  for (int k = 0; k < 10; ++k) {
    Operator x{gen.space(), random_matrix(9, seeds())};
    auto rho = random_density(gen.space(), seeds());
    Complex lhs = (x.matrix.adjoint() * apply_generator(gen, rho.op).matrix).trace();
    Complex rhs = (apply_generator_adjoint(gen, x).matrix.adjoint() *
                   rho.op.matrix).trace();
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }
}

TEST_CASE("exact exponential propagation") {
  auto gen = qubit_decay(1.0);
  Matrix excited = Matrix::Zero(2, 2);
  excited(1, 1) = 1.0;
  auto rho0 = make_density(Operator{gen.space(), excited});

  auto same = evolve_expm(gen, rho0, 0.0);
  CHECK(max_abs(same.op.matrix - rho0.op.matrix) == 0.0);

  auto rho1 = evolve_expm(gen, rho0, 1.0);
  CHECK(rho1.op.matrix(1, 1).real() ==
        doctest::Approx(0.36787944117144233).epsilon(1e-12));

  CHECK_THROWS_WITH_AS(evolve_expm(gen, rho0, -0.1), "negative time", Error);
}

TEST_CASE("semigroup law for the propagator") {
  DHOParams p;
  p.dim = 8;
  p.eta = 0.3;
  p.beta = 1.0;
  Superoperator l = generator_superop(dho_generator(p));
  double t = 0.7, s = 0.4;
  Matrix u_ts = matrix_exp((t + s) * l.matrix);
  Matrix u_t = matrix_exp(t * l.matrix);
  Matrix u_s = matrix_exp(s * l.matrix);
  CHECK(max_abs(u_ts - u_t * u_s) <= 1e-10);
}

TEST_CASE("propagator duality on random pairs") {
  DHOParams p;
  p.dim = 8;
  p.eta = 0.25;
  p.beta = 0.9;
  Superoperator l = generator_superop(dho_generator(p));
  Superoperator u{l.space, matrix_exp(0.8 * l.matrix)};
  Superoperator u_adj = adjoint_superop(u);
  std::mt19937 seeds(5150);
  for (int k = 0; k < 10; ++k) {
    Operator x{l.space, random_matrix(8, seeds())};
    auto rho = random_density(l.space, seeds());
    Complex lhs = (x.matrix.adjoint() * apply(u, rho.op).matrix).trace();
    Complex rhs = (apply(u_adj, x).matrix.adjoint() * rho.op.matrix).trace();
    CHECK(std::abs(lhs - rhs) <= 1e-10);
  }
}

TEST_CASE("propagator elements are completely positive") {
  std::vector<LindbladGenerator> gens;
  TwoLevelParams tl;
  tl.omega = 1.0;
  tl.eta = 0.8;
  tl.beta = std::log(3.0);
  gens.push_back(two_level_generator(tl));
  DHOParams p;
  p.dim = 8;
  p.eta = 0.3;
  p.beta = 1.1;
  gens.push_back(dho_generator(p));
  for (const auto& gen : gens) {
    Superoperator l = generator_superop(gen);
    for (double t : {0.01, 0.1, 1.0}) {
      Superoperator u{l.space, matrix_exp(t * l.matrix)};
      CHECK(min_hermitian_eigenvalue(choi_matrix(u).matrix) >= -1e-9);
    }
  }
}

TEST_CASE("adaptive integration matches the exact exponential") {
  auto s = HilbertSpace::qubit();
  Operator h{s, Matrix::Zero(2, 2)};
  auto gen0 = make_generator(h, {});
  auto rho0 = random_density(s, 77);
  auto unchanged = evolve_ode(gen0, rho0, 3.0, 1e-8);
  CHECK(max_abs(unchanged.op.matrix - rho0.op.matrix) <= 1e-14);

  CHECK_THROWS_WITH_AS(evolve_ode(gen0, rho0, 1.0, 1e-2),
                       "invalid argument: rel_tol must lie in (1e-14, 1e-3)", Error);

  // Cross-propagator comparison on a grid the dense exponential still handles.
  QBMParams qp;
  qp.mass = 1.0;
  qp.eta = 0.3;
  qp.beta = 20.0;
  qp.grid = HilbertSpace::grid1d(32, 1.0);
  auto gen = qbm_generator(qp);
  Vector psi = gaussian_packet(qp.grid, 0.0, 2.0 * qp.grid.dp(), 2.0);
  auto rho = make_density(Operator{qp.grid, Matrix(psi * psi.adjoint())});
  double t = 0.05;
  auto by_ode = evolve_ode(gen, rho, t, 1e-8);
  auto by_expm = evolve_expm(gen, rho, t);
  CHECK(trace_norm(by_ode.op.matrix - by_expm.op.matrix) <= 1e-7);
}

TEST_CASE("adaptive integration preserves the trace") {
  DHOParams p;
  p.dim = 15;
  p.eta = 0.4;
  p.beta = 1.0;
  auto gen = dho_generator(p);
  Vector alpha = coherent_vector(gen.space(), Complex(1.0, 0.3));
  auto rho0 = make_density_normalized(Operator{gen.space(),
                                               Matrix(alpha * alpha.adjoint())});
  auto rho_t = evolve_ode(gen, rho0, 3.0, 1e-10);
  CHECK(std::abs(rho_t.op.matrix.trace() - Complex(1.0, 0.0)) <= 1e-9);
}

TEST_CASE("jump unraveling of a closed system is unitary") {
  auto s = HilbertSpace::qubit();
  auto pl = pauli_ops(s);
  Operator h{s, Matrix(0.6 * pl.sigma_x.matrix)};
  auto gen = make_generator(h, {});
  Vector psi0(2);
  psi0 << 1.0, 0.0;
  JumpConfig cfg;
  cfg.n_trajectories = 32;
  cfg.master_seed = 9001;
  JumpResult res = unravel_jumps(gen, psi0, 1.3, cfg);
  CHECK(res.lost == 0);
  for (const auto& rec : res.records) CHECK(rec.jump_times.empty());
  Matrix u = matrix_exp(Complex(0.0, -1.3) * h.matrix);
  Vector psi_t = u * psi0;
  CHECK(max_abs(res.rho_avg.op.matrix - psi_t * psi_t.adjoint()) <= 1e-12);
}

TEST_CASE("jump waiting times follow the exponential law") {
  double eta = 1.0;
  auto gen = qubit_decay(eta);
  Vector psi0(2);
  psi0 << 0.0, 1.0;
  JumpConfig cfg;
  cfg.n_trajectories = 10000;
  cfg.master_seed = 24601;
  cfg.workers = 2;
  JumpResult res = unravel_jumps(gen, psi0, 12.0, cfg);
  CHECK(res.lost == 0);

  std::vector<double> first;
  for (const auto& rec : res.records)
    if (!rec.jump_times.empty()) first.push_back(rec.jump_times.front());
  REQUIRE(first.size() > 9900);
  double mean = std::accumulate(first.begin(), first.end(), 0.0) / first.size();
  double var = 0.0;
  for (double t : first) var += (t - mean) * (t - mean);
  var /= double(first.size() - 1);
  double se = std::sqrt(var / double(first.size()));
  CHECK(std::abs(mean - 1.0 / eta) <= 3.0 * se);
}

TEST_CASE("jump averages reproduce the oscillator number decay") {
  DHOParams p;
  p.dim = 12;
  p.eta = 0.4;
  p.zero_temperature = true;
  auto gen = dho_generator(p);
  Vector psi0 = Vector::Zero(12);
  psi0(3) = 1.0;
  double t = 2.0;
  JumpConfig cfg;
  cfg.n_trajectories = 10000;
  cfg.master_seed = 31415;
  cfg.workers = 2;
  cfg.keep_records = false;
  auto number = fock_ops(gen.space()).number;
  JumpResult res = unravel_jumps(gen, psi0, t, cfg, number);
  REQUIRE(res.observable_samples.size() == 10000);
  double mean = std::accumulate(res.observable_samples.begin(),
                                res.observable_samples.end(), 0.0) / 10000.0;
  double var = 0.0;
  for (double v : res.observable_samples) var += (v - mean) * (v - mean);
  var /= 9999.0;
  double se = std::sqrt(var / 10000.0);
  double target = dho_mean_number(p, 3.0, t);
  CHECK(std::abs(mean - target) <= 3.0 * se);
}

TEST_CASE("jump averages converge to the exact state") {
  TwoLevelParams tl;
  tl.omega = 1.0;
  tl.eta = 1.0;
  tl.beta = std::log(3.0);
  auto gen = two_level_generator(tl);
  Vector psi0(2);
  psi0 << 0.0, 1.0;
  Matrix excited = Matrix::Zero(2, 2);
  excited(1, 1) = 1.0;
  auto exact = evolve_expm(gen, make_density(Operator{gen.space(), excited}), 1.0);
  for (long long n : {1000LL, 10000LL}) {
    JumpConfig cfg;
    cfg.n_trajectories = n;
    cfg.master_seed = 112358;
    cfg.workers = 2;
    cfg.keep_records = false;
    JumpResult res = unravel_jumps(gen, psi0, 1.0, cfg);
    double dist = 0.5 * trace_norm(res.rho_avg.op.matrix - exact.op.matrix);
    CHECK(dist <= 4.0 / std::sqrt(double(n)));
  }
}

TEST_CASE("jump unraveling is deterministic across worker counts") {
  TwoLevelParams tl;
  tl.omega = 0.8;
  tl.eta = 0.7;
  tl.beta = 1.0;
  auto gen = two_level_generator(tl);
  Vector psi0(2);
  psi0 << std::sqrt(0.3), std::sqrt(0.7);
  JumpConfig a;
  a.n_trajectories = 500;
  a.master_seed = 777;
  a.workers = 1;
  JumpConfig b = a;
  b.workers = 4;
  auto pl = pauli_ops(gen.space());
  JumpResult ra = unravel_jumps(gen, psi0, 2.0, a, pl.sigma_z);
  JumpResult rb = unravel_jumps(gen, psi0, 2.0, b, pl.sigma_z);
  CHECK(max_abs(ra.rho_avg.op.matrix - rb.rho_avg.op.matrix) == 0.0);
  REQUIRE(ra.records.size() == rb.records.size());
  for (size_t i = 0; i < ra.records.size(); ++i) {
    CHECK(ra.records[i].jump_times == rb.records[i].jump_times);
    CHECK(ra.records[i].channels == rb.records[i].channels);
  }
  CHECK(ra.observable_samples == rb.observable_samples);
}

TEST_CASE("jump unraveling validates its inputs") {
  auto gen = qubit_decay(1.0);
  Vector bad(2);
  bad << 0.5, 0.5;
  JumpConfig cfg;
  cfg.n_trajectories = 4;
  CHECK_THROWS_WITH_AS(unravel_jumps(gen, bad, 1.0, cfg),
                       "invalid argument: psi0 must be normalized", Error);
  Vector good(2);
  good << 0.0, 1.0;
  CHECK_THROWS_WITH_AS(unravel_jumps(gen, good, -1.0, cfg), "negative time", Error);
  cfg.n_trajectories = 0;
  CHECK_THROWS_WITH_AS(unravel_jumps(gen, good, 1.0, cfg),
                       "invalid argument: n_trajectories must be >= 1", Error);
}
