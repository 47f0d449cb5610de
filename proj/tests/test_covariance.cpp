// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"
#include "qdyn/covariance.hpp"
#include "qdyn/models.hpp"

#include <cmath>
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

// Localized mixtures keep translated states away from the grid seam, where
// the non-periodic position operator breaks exact covariance. The width is
// a compromise: position tails must vanish at the seam, and momentum tails
// must vanish at the Nyquist edge (p_hat applied to the state leaks back
// into the seam cells at the size of the Nyquist amplitude).
DensityMatrix packet_mixture(const HilbertSpace& grid, double x0, double p0) {
  Vector a = gaussian_packet(grid, x0, p0, 2.0);
  Vector b = gaussian_packet(grid, -x0, -0.5 * p0, 2.2);
  Matrix m = 0.6 * (a * a.adjoint()) + 0.4 * (b * b.adjoint());
  return make_density_normalized(Operator{grid, m});
}

}  // namespace

TEST_CASE("representations are unitary and compose") {
  struct Case {
    UnitaryRep rep;
    std::vector<double> params;
  };
  std::vector<Case> cases;
  auto fock = HilbertSpace::fock(12);
  cases.push_back({u1_phase_rep(fock), {0.3, 1.7, M_PI}});
  auto qb = HilbertSpace::qubit();
  cases.push_back({so2_spin_rep(qb), {0.5, 2.0, M_PI}});
  auto grid = HilbertSpace::grid1d(16, 0.5);
  cases.push_back({translation_rep(grid), {0.5, 1.5, 3.0}});
  double dp = grid.dp();
  cases.push_back({boost_rep(grid), {dp, 2.0 * dp, 5.0 * dp}});

  for (const auto& c : cases) {
    int d = c.rep.space.dim();
    for (double g : c.params) {
      Matrix u = c.rep.map(g).matrix;
      CHECK(max_abs(u.adjoint() * u - Matrix::Identity(d, d)) <= 1e-10);
      for (double h : c.params) {
        Matrix lhs = c.rep.map(g).matrix * c.rep.map(h).matrix;
        Matrix rhs = c.rep.map(g + h).matrix;
        CHECK(max_abs(lhs - rhs) <= 1e-10);
      }
    }
  }
}

TEST_CASE("translations refuse off-lattice shifts") {
  auto grid = HilbertSpace::grid1d(16, 0.5);
  auto rep = translation_rep(grid);
  CHECK_THROWS_WITH_AS(rep.map(0.75), "off-lattice shift", Error);
  // On-lattice translation is an exact permutation.
  Matrix u = rep.map(0.5).matrix;
  for (int j = 0; j < 16; ++j)
    CHECK(std::abs(u((j + 1) % 16, j) - Complex(1.0, 0.0)) <= 1e-12);
}

TEST_CASE("generator covariance with the identity representation is exact") {
  DHOParams p;
  p.dim = 10;
  p.eta = 0.3;
  p.beta = 1.0;
  Superoperator l = generator_superop(dho_generator(p));
  UnitaryRep identity{GroupLabel::U1Phase, l.space, [&](double) {
    return Operator{l.space, Matrix::Identity(10, 10)};
  }};
  std::vector<DensityMatrix> samples{random_density(l.space, 1),
                                     random_density(l.space, 2)};
  CHECK(covariance_residual(l, identity, {0.1, 0.9}, samples) == 0.0);
}

TEST_CASE("damped oscillator is phase covariant") {
  DHOParams p;
  p.dim = 12;
  p.eta = 0.25;
  p.beta = 1.2;
  Superoperator l = generator_superop(dho_generator(p));
  auto rep = u1_phase_rep(l.space);
  std::vector<DensityMatrix> samples;
  for (unsigned k = 0; k < 5; ++k) samples.push_back(random_density(l.space, 10 + k));
  CHECK(covariance_residual(l, rep, {0.3, 1.7, M_PI}, samples) <= 1e-10);
}

TEST_CASE("rotation covariant qubit generator has SO(2) symmetry") {
  RotCovParams rp;
  rp.c_minus = 0.3;
  rp.c_zero = 0.2;
  rp.c_plus = 0.1;
  rp.hamiltonian_coeff = 0.7;
  Superoperator l = generator_superop(rotation_covariant_generator(rp));
  auto rep = so2_spin_rep(l.space);
  std::vector<DensityMatrix> samples;
  for (unsigned k = 0; k < 5; ++k) samples.push_back(random_density(l.space, 40 + k));
  CHECK(covariance_residual(l, rep, {0.5, 2.0, M_PI}, samples) <= 1e-12);
}

TEST_CASE("brownian motion is translation covariant in the bulk") {
  QBMParams p;
  p.mass = 1.0;
  p.eta = 0.3;
  p.beta = 20.0;
  p.grid = HilbertSpace::grid1d(64, 1.0);
  auto gen = qbm_generator(p);
  auto rep = translation_rep(p.grid);
  std::vector<DensityMatrix> samples{packet_mixture(p.grid, 2.0, 2.0 * p.grid.dp()),
                                     packet_mixture(p.grid, -1.0, p.grid.dp())};
  CHECK(covariance_residual(gen, rep, {1.0, 2.0, 4.0}, samples) <= 1e-10);
}

TEST_CASE("linear boltzmann equation is translation covariant") {
  QLBEParams p;
  p.beta = 2.0;
  p.grid = HilbertSpace::grid1d(16, 1.0);
  p.t_tilde = constant_t_tilde(p.grid, 0.05, 2);
  auto gen = qlbe_build(p).generator;
  auto rep = translation_rep(p.grid);
  std::vector<DensityMatrix> samples;
  for (unsigned k = 0; k < 3; ++k) samples.push_back(random_density(p.grid, 70 + k));
  CHECK(covariance_residual(gen, rep, {1.0, 5.0}, samples) <= 1e-10);
}

TEST_CASE("weyl relation on the momentum lattice") {
  auto grid = HilbertSpace::grid1d(32, 1.0);
  double dp = grid.dp();

  WeylResult zero = weyl_residual(grid, 0.0, 3.0 * dp);
  CHECK(zero.residual == 0.0);
  CHECK(zero.on_lattice);

  WeylResult on = weyl_residual(grid, 2.0, 3.0 * dp);
  CHECK(on.on_lattice);
  CHECK(on.warning.empty());
  CHECK(on.residual <= 1e-10);

  // Off-lattice shifts document the discretization limit instead of failing.
  WeylResult off = weyl_residual(grid, 0.5, 3.0 * dp);
  CHECK_FALSE(off.on_lattice);
  CHECK(off.warning == "off-lattice shift");
  CHECK(off.residual > 1e-3);
}

TEST_CASE("fock shift isometry and the generalized weyl relation") {
  auto fock = HilbertSpace::fock(20);
  Operator w = shift_isometry(fock, 1);
  Matrix wtw = w.matrix.adjoint() * w.matrix;
  CHECK(max_abs(wtw.topLeftCorner(19, 19) - Matrix::Identity(19, 19)) <= 1e-14);

  // P_1 = W W^dag is the identity with the vacuum removed.
  Matrix p1 = w.matrix * w.matrix.adjoint();
  Matrix expect = Matrix::Identity(20, 20);
  expect(0, 0) = 0.0;
  CHECK(max_abs(p1 - expect) <= 1e-14);

  CHECK(generalized_weyl_residual(fock, 1.3, 0) == 0.0);
  CHECK(generalized_weyl_residual(fock, 0.7, 1) <= 1e-10);
  CHECK(generalized_weyl_residual(fock, 2.1, 3) <= 1e-10);
  CHECK_THROWS_WITH_AS(generalized_weyl_residual(fock, 0.7, 10),
                       "truncation too small", Error);
}

TEST_CASE("position povm transforms covariantly") {
  auto grid = HilbertSpace::grid1d(32, 1.0);
  POVM povm = smeared_position_povm(grid, gaussian_weights(grid, 2.0));
  Region m = region_interval(10, 17, 32);
  auto tr = translation_rep(grid);

  CHECK(povm_covariance_residual(povm, tr, 0.0, m) == 0.0);
  CHECK(povm_covariance_residual(povm, tr, 4.0, m) <= 1e-10);

  // Position effects commute with boosts.
  auto bo = boost_rep(grid);
  CHECK(povm_covariance_residual(povm, bo, 3.0 * grid.dp(), m) <= 1e-10);

  CHECK_THROWS_WITH_AS(povm.effect_of(Region{{40}}), "region overflow", Error);
}

TEST_CASE("joint povm transforms covariantly in both arguments") {
  auto grid = HilbertSpace::grid1d(32, 1.0);
  JointPOVM jp = joint_xp_povm(grid, 2.0);
  RectRegion r{region_interval(12, 18, 32), region_interval(14, 20, 32)};
  CHECK(povm_covariance_residual(jp, translation_rep(grid), 3.0, r) <= 1e-10);
  CHECK(povm_covariance_residual(jp, boost_rep(grid), 2.0 * grid.dp(), r) <= 1e-10);
}
