// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"
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

}  // namespace

TEST_CASE("thermal occupation") {
  CHECK(thermal_occupation(1.0, 50.0) < 2e-22);
  CHECK(thermal_occupation(1.0, std::log(2.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(thermal_occupation(1.0, std::numeric_limits<double>::infinity()) == 0.0);

  // N_beta = (coth(beta hbar omega / 2) - 1) / 2.
  std::mt19937 gen(17);
  std::uniform_real_distribution<double> ud(0.1, 4.0);
  for (int k = 0; k < 20; ++k) {
    double omega = ud(gen), beta = ud(gen);
    double x = beta * omega / 2.0;
    double coth = std::cosh(x) / std::sinh(x);
    CHECK(std::abs(thermal_occupation(omega, beta) - 0.5 * (coth - 1.0)) <= 1e-14);
  }

  CHECK_THROWS_WITH_AS(thermal_occupation(-1.0, 2.0), "invalid temperature", Error);
  CHECK_THROWS_WITH_AS(thermal_occupation(1.0, 0.0), "invalid temperature", Error);
}

TEST_CASE("thermal and maxwell reference states") {
  auto fock = HilbertSpace::fock(20);
  double beta = 0.9;
  auto w = thermal_fock_state(fock, 1.0, beta);
  for (int n = 0; n + 1 < 20; ++n) {
    double ratio = w.op.matrix(n + 1, n + 1).real() / w.op.matrix(n, n).real();
    CHECK(ratio == doctest::Approx(std::exp(-beta)).epsilon(1e-12));
  }

  auto grid = HilbertSpace::grid1d(16, 1.0);
  auto mx = maxwell_momentum_state(grid, 2.0, 1.5);
  Matrix f = dft_matrix(grid);
  Matrix diag = f * mx.op.matrix * f.adjoint();
  RealVector p = momentum_lattice(grid);
  double z = 0.0;
  for (int k = 0; k < 16; ++k) z += std::exp(-1.5 * p(k) * p(k) / 4.0);
  for (int k = 0; k < 16; ++k) {
    double expect = std::exp(-1.5 * p(k) * p(k) / 4.0) / z;
    CHECK(std::abs(diag(k, k).real() - expect) <= 1e-14);
    diag(k, k) = 0.0;
  }
  CHECK(max_abs(diag) <= 1e-14);
}

TEST_CASE("coherent vectors and wave packets") {
  auto fock = HilbertSpace::fock(40);
  Complex alpha(1.0, -0.5);
  Vector v = coherent_vector(fock, alpha);
  CHECK(coherent_leakage(fock, alpha) < 1e-20);
  CHECK(std::abs(v.squaredNorm() - 1.0) <= 1e-12);
  auto ops = fock_ops(fock);
  Complex mean_a = v.adjoint() * (ops.a.matrix * v);
  CHECK(std::abs(mean_a - alpha) <= 1e-12);

  auto grid = HilbertSpace::grid1d(64, 1.0);
  Vector psi = gaussian_packet(grid, 3.0, 2.0 * grid.dp(), 2.5);
  CHECK(std::abs(psi.squaredNorm() - 1.0) <= 1e-12);
  auto g = grid_ops(grid);
  Complex mean_x = psi.adjoint() * (g.x_hat.matrix * psi);
  Complex mean_p = psi.adjoint() * (g.p_hat.matrix * psi);
  CHECK(std::abs(mean_x.real() - 3.0) <= 1e-6);
  CHECK(std::abs(mean_p.real() - 2.0 * grid.dp()) <= 1e-6);
}

TEST_CASE("damped oscillator amplitude oracle at zero frequency") {
  DHOParams p;
  p.omega = 0.0;
  p.eta = 2.0;
  p.zero_temperature = true;
  CHECK(dho_mean_amplitude(p, Complex(1.0, 0.0), std::log(2.0)) ==
        Complex(0.5, 0.0));

  // Numeric cross-check with a hand-built zero-frequency decay generator.
  auto fock = HilbertSpace::fock(25);
  auto ops = fock_ops(fock);
  Operator h{fock, Matrix::Zero(25, 25)};
  Operator l{fock, Matrix(std::sqrt(2.0) * ops.a.matrix)};
  auto gen = make_generator(h, {l});
  Vector alpha = coherent_vector(fock, Complex(1.0, 0.0));
  auto rho0 = make_density_normalized(Operator{fock, Matrix(alpha * alpha.adjoint())});
  auto rho_t = evolve_expm(gen, rho0, std::log(2.0));
  Complex mean_a = (ops.a.matrix * rho_t.op.matrix).trace();
  CHECK(std::abs(mean_a - Complex(0.5, 0.0)) <= 1e-8);
}

TEST_CASE("damped oscillator number oracle approaches the bath occupation") {
  DHOParams p;
  p.omega = 1.0;
  p.eta = 1.0;
  p.beta = std::log(2.0);  // N_beta = 1
  CHECK(dho_mean_number(p, 1.0, 1e4) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dho_mean_number(p, 5.0, 0.0) == 5.0);
}

TEST_CASE("cat coherence closed form") {
  CHECK(dho_cat_coherence(Complex(1.0, 0.0), Complex(-1.0, 0.0), 0.5, 0.0) == 1.0);
  double limit = dho_cat_coherence(Complex(1.0, 0.0), Complex(-1.0, 0.0), 1.0, 80.0);
  CHECK(limit == doctest::Approx(0.1353352832366127).epsilon(1e-14));
}

TEST_CASE("damped oscillator leaves the gibbs state stationary") {
  DHOParams p;
  p.dim = 30;
  p.omega = 1.0;
  p.eta = 0.2;
  p.beta = 1.0;
  auto gen = dho_generator(p);
  auto w = thermal_fock_state(gen.space(), p.omega, p.beta);
  CHECK(trace_norm(apply_generator(gen, w.op).matrix) <= 1e-8);
  CHECK_THROWS_WITH_AS([&] {
    DHOParams bad = p;
    bad.omega = 0.0;
    dho_generator(bad);
  }(), "invalid argument: rates", Error);
}

TEST_CASE("shift covariant family") {
  // Single one-photon channel collapses to the damped oscillator.
  ShiftCovParams sp;
  sp.eta_0 = 0.0;
  sp.eta_m = {0.3};
  sp.omega = 1.0;
  sp.beta = 1.2;
  sp.dim = 18;
  DHOParams dp;
  dp.omega = 1.0;
  dp.eta = 0.3;
  dp.beta = 1.2;
  dp.dim = 18;
  Matrix a = generator_superop(shift_covariant_generator(sp)).matrix;
  Matrix b = generator_superop(dho_generator(dp)).matrix;
  CHECK(max_abs(a - b) <= 1e-14);

  // Pure phase damping freezes the populations.
  ShiftCovParams ph;
  ph.eta_0 = 0.4;
  ph.eta_m = {};
  ph.omega = 1.0;
  ph.beta = 1.0;
  ph.dim = 10;
  auto gen = shift_covariant_generator(ph);
  auto rho0 = random_density(gen.space(), 2718);
  auto rho_t = evolve_expm(gen, rho0, 1.3);
  for (int n = 0; n < 10; ++n)
    CHECK(std::abs(rho_t.op.matrix(n, n) - rho0.op.matrix(n, n)) <= 1e-12);

  // Two ladder channels plus dephasing still share the Gibbs fixed point.
  ShiftCovParams full;
  full.eta_0 = 0.1;
  full.eta_m = {0.15, 0.05};
  full.omega = 1.0;
  full.beta = 1.0;
  full.dim = 50;
  auto gen_full = shift_covariant_generator(full);
  auto w = thermal_fock_state(gen_full.space(), full.omega, full.beta);
  CHECK(trace_norm(apply_generator(gen_full, w.op).matrix) <= 1e-7);

  ShiftCovParams shallow = full;
  shallow.dim = 4;
  CHECK_THROWS_WITH_AS(shift_covariant_generator(shallow),
                       "truncation too small", Error);
}

TEST_CASE("two level closed forms") {
  TwoLevelParams p;
  p.omega = 1.0;
  p.eta = 1.0;
  p.zero_temperature = true;
  auto s = HilbertSpace::qubit();
  Matrix excited = Matrix::Zero(2, 2);
  excited(1, 1) = 1.0;
  auto rho0 = make_density(Operator{s, excited});
  CHECK(two_level_oracles(p, rho0, 1.0).excited_population ==
        doctest::Approx(0.36787944117144233).epsilon(1e-15));

  TwoLevelParams warm;
  warm.omega = 1.0;
  warm.eta = 1.0;
  warm.beta = std::log(2.0);  // N_beta = 1
  CHECK(two_level_oracles(warm, rho0, 1e4).excited_population ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  // Exact 2x2 exponential agrees with both oracles on random inputs.
  auto gen = two_level_generator(warm);
  std::mt19937 seeds(4242);
  std::uniform_real_distribution<double> ut(0.05, 4.0);
  for (int k = 0; k < 10; ++k) {
    auto rho = random_density(s, seeds());
    double t = ut(seeds);
    auto num = evolve_expm(gen, rho, t);
    TwoLevelOracle ora = two_level_oracles(warm, rho, t);
    CHECK(std::abs(num.op.matrix(1, 1).real() - ora.excited_population) <= 1e-12);
    CHECK(std::abs(num.op.matrix(1, 0) - ora.coherence) <= 1e-12);
  }

  auto w = thermal_qubit_state(s, warm.omega, warm.beta);
  CHECK(trace_norm(apply_generator(gen, w.op).matrix) <= 1e-13);
}

TEST_CASE("rotation covariant generator and its reductions") {
  // Ladder-operator form of the same generator.
  RotCovParams p;
  p.c_minus = 0.3;
  p.c_zero = 0.2;
  p.c_plus = 0.1;
  p.hamiltonian_coeff = 0.7;
  auto s = HilbertSpace::qubit();
  auto pl = pauli_ops(s);
  Operator h{s, Matrix(p.hamiltonian_coeff * pl.sigma_z.matrix)};
  std::vector<Operator> ls;
  ls.push_back(Operator{s, Matrix(std::sqrt(2.0 * p.c_minus) * pl.sigma_minus.matrix)});
  ls.push_back(Operator{s, Matrix(std::sqrt(p.c_zero) * pl.sigma_z.matrix)});
  ls.push_back(Operator{s, Matrix(std::sqrt(2.0 * p.c_plus) * pl.sigma_plus.matrix)});
  Matrix direct = generator_superop(make_generator(h, ls)).matrix;
  Matrix tensor = generator_superop(rotation_covariant_generator(p)).matrix;
  CHECK(max_abs(tensor - direct) <= 1e-14);

  // Matching rates reduce to the two-level generator.
  TwoLevelParams tl;
  tl.omega = 1.4;
  tl.eta = 0.5;
  tl.beta = std::log(3.0);
  double nb = thermal_occupation(tl.omega, tl.beta);
  RotCovParams red;
  red.c_minus = 0.5 * tl.eta * (nb + 1.0);
  red.c_plus = 0.5 * tl.eta * nb;
  red.c_zero = 0.0;
  red.hamiltonian_coeff = 0.5 * tl.omega;
  Matrix rot = generator_superop(rotation_covariant_generator(red)).matrix;
  Matrix two = generator_superop(two_level_generator(tl)).matrix;
  CHECK(max_abs(rot - two) <= 1e-14);

  // Pure c_zero: populations frozen, coherence decays at rate 2 c_zero.
  RotCovParams deph;
  deph.c_zero = 0.4;
  auto gen = rotation_covariant_generator(deph);
  auto rho0 = random_density(s, 515);
  double t = 0.9;
  auto rho_t = evolve_expm(gen, rho0, t);
  CHECK(std::abs(rho_t.op.matrix(0, 0) - rho0.op.matrix(0, 0)) <= 1e-12);
  CHECK(std::abs(rho_t.op.matrix(1, 1) - rho0.op.matrix(1, 1)) <= 1e-12);
  Complex expect = rho0.op.matrix(1, 0) * std::exp(-2.0 * deph.c_zero * t);
  CHECK(std::abs(rho_t.op.matrix(1, 0) - expect) <= 1e-12);
}

TEST_CASE("brownian motion coefficients and the lindblad expansion") {
  QBMParams p;
  p.mass = 1.0;
  p.eta = 0.3;
  p.beta = 20.0;
  p.grid = HilbertSpace::grid1d(16, 1.0);
  CHECK(qbm_dpp(p) == doctest::Approx(0.015).epsilon(1e-15));
  CHECK(qbm_dxx(p) == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(qbm_thermal_length(p) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));

  Matrix lindblad_form = generator_superop(qbm_generator(p)).matrix;
  Matrix four_term = qbm_four_term_superop(p).matrix;
  CHECK(max_abs(lindblad_form - four_term) <= 1e-12);

  QBMParams coarse = p;
  coarse.beta = 1.0;  // thermal length 0.5 < 2 dx
  CHECK_THROWS_WITH_AS(qbm_generator(coarse), "thermal length unresolved", Error);
  coarse.include_friction = false;
  CHECK_NOTHROW(qbm_generator(coarse));
}

TEST_CASE("brownian motion momentum relaxation on the grid") {
  QBMParams p;
  p.mass = 1.0;
  p.eta = 1.0;
  p.beta = 20.0;
  p.grid = HilbertSpace::grid1d(32, 1.0);
  auto gen = qbm_generator(p);
  double p0 = 3.0 * p.grid.dp();
  Vector psi = gaussian_packet(p.grid, 0.0, p0, 2.0);
  auto rho0 = make_density(Operator{p.grid, Matrix(psi * psi.adjoint())});
  double t = std::log(2.0);
  auto rho_t = evolve_ode(gen, rho0, t, 1e-8);
  auto g = grid_ops(p.grid);
  double mean_p = (g.p_hat.matrix * rho_t.op.matrix).trace().real();
  CHECK(std::abs(mean_p - 0.5 * p0) / (0.5 * p0) <= 0.01);
}

TEST_CASE("brownian motion moment oracles") {
  QBMParams p;
  p.mass = 1.0;
  p.eta = 0.4;
  p.beta = 2.0;
  p.grid = HilbertSpace::grid1d(32, 1.0);
  Vector psi = gaussian_packet(p.grid, 1.0, 2.0 * p.grid.dp(), 2.0);
  auto rho0 = make_density(Operator{p.grid, Matrix(psi * psi.adjoint())});
  auto g = grid_ops(p.grid);
  double p_init = (g.p_hat.matrix * rho0.op.matrix).trace().real();
  double e_init = (g.p_hat.matrix * g.p_hat.matrix * rho0.op.matrix).trace().real() /
                  (2.0 * p.mass);

  QBMMoments at0 = qbm_moment_oracles(p, rho0, 0.0);
  CHECK(at0.mean_p == doctest::Approx(p_init).epsilon(1e-14));
  CHECK(at0.mean_energy == doctest::Approx(e_init).epsilon(1e-14));

  QBMMoments late = qbm_moment_oracles(p, rho0, 1e3);
  CHECK(std::abs(late.mean_p) <= 1e-14);
  CHECK(late.mean_energy == doctest::Approx(1.0 / (2.0 * p.beta)).epsilon(1e-12));

  for (double t : {0.3, 1.1, 2.7}) {
    QBMMoments m = qbm_moment_oracles(p, rho0, t);
    CHECK(std::abs(m.mean_p / p_init - std::exp(-p.eta * t)) <= 1e-14);
  }
}

TEST_CASE("frictionless exact solutions") {
  auto grid = HilbertSpace::grid1d(32, 1.0);
  Vector psi = gaussian_packet(grid, -2.0, 3.0 * grid.dp(), 2.5);
  Matrix rho0 = psi * psi.adjoint();
  Matrix f = dft_matrix(grid);

  // Pure momentum localization: momentum populations frozen.
  for (bool free_motion : {false, true}) {
    Matrix rho_t = qbm_exact_momentum(grid, 0.25, 0.0, 0.25, rho0, 1.7, free_motion);
    Matrix d0 = f * rho0 * f.adjoint();
    Matrix dt = f * rho_t * f.adjoint();
    for (int k = 0; k < 32; ++k)
      CHECK(std::abs(dt(k, k) - d0(k, k)) <= 1e-13);
  }

  // Pure position localization: multiplicative suppression of coherences.
  double dpp = 0.035, t = 1.3;
  Matrix rho_loc = qbm_exact_position(grid, 1.0, dpp, 0.0, rho0, t, false);
  RealVector x = position_lattice(grid);
  for (int i = 0; i < 32; i += 5)
    for (int j = 0; j < 32; j += 3) {
      double sep = x(i) - x(j);
      Complex expect = std::exp(-dpp * sep * sep * t) * rho0(i, j);
      CHECK(std::abs(rho_loc(i, j) - expect) <= 1e-14);
    }
}

TEST_CASE("frictionless exact solutions match the integrator") {
  QBMParams p;
  p.mass = 1.0;
  p.grid = HilbertSpace::grid1d(32, 1.0);
  p.include_friction = false;
  double dpp = 0.0125, dxx = 0.25;
  p.eta = 4.0 * std::sqrt(dpp * dxx);  // matches (dpp, dxx) exactly
  p.beta = p.eta * p.mass / dpp;
  REQUIRE(qbm_dpp(p) == doctest::Approx(dpp).epsilon(1e-12));
  REQUIRE(qbm_dxx(p) == doctest::Approx(dxx).epsilon(1e-12));

  // t is large enough that the momentum-transfer kernel width 2 sqrt(Dpp t)
  // resolves the momentum lattice spacing on this coarse grid.
  Vector psi = gaussian_packet(p.grid, -1.0, 2.0 * p.grid.dp(), 1.6);
  auto rho0 = make_density(Operator{p.grid, Matrix(psi * psi.adjoint())});
  double t = 2.0;
  auto gen = qbm_generator(p);
  auto ode = evolve_ode(gen, rho0, t, 1e-8);
  QBMExactForms forms = qbm_exact_solutions(p, rho0, t);
  CHECK(trace_norm(forms.momentum_form.matrix - ode.op.matrix) <= 1e-4);
  CHECK(trace_norm(forms.position_form.matrix - ode.op.matrix) <= 1e-4);

  QBMParams friction = p;
  friction.include_friction = true;
  CHECK_THROWS_WITH_AS(qbm_exact_solutions(friction, rho0, t),
                       "invalid argument: exact solutions are frictionless", Error);
}

TEST_CASE("maxwell boltzmann structure factor") {
  double q = 1.0, m = 1.0, beta = 2.0;
  double peak = dynamic_structure_factor_mb(q, -q * q / (2.0 * m), m, beta);
  CHECK(peak == doctest::Approx(0.56418958354775628).epsilon(1e-15));
  for (double e : {-2.0, -1.0, -0.3, 0.0, 0.4, 1.5})
    CHECK(dynamic_structure_factor_mb(q, e, m, beta) <= peak);

  CHECK(dynamic_structure_factor_mb(1.0, 0.7, 1.0, 2.0) ==
        doctest::Approx(0.13367217350176958).epsilon(1e-15));

  // Detailed balance S(q,E) = e^{-beta E} S(q,-E).
  double ratio = dynamic_structure_factor_mb(q, 0.7, m, beta) /
                 dynamic_structure_factor_mb(q, -0.7, m, beta);
  CHECK(ratio == doctest::Approx(0.24659696394160649).epsilon(1e-12));

  // A very cold gas cannot absorb energy.
  CHECK(dynamic_structure_factor_mb(1.0, 0.7, 1.0, 2000.0) < 1e-300);

  CHECK_THROWS_WITH_AS(dynamic_structure_factor_mb(0.0, 0.1, 1.0, 1.0),
                       "zero momentum transfer singularity", Error);
  CHECK_THROWS_WITH_AS(dynamic_structure_factor_mb(1.0, 0.1, 1.0, -2.0),
                       "invalid temperature", Error);

  CHECK(qlbe_energy_transfer(0.6, 1.1, 2.0) ==
        doctest::Approx(((1.1 + 0.6) * (1.1 + 0.6) - 1.1 * 1.1) / 4.0).epsilon(1e-15));
}

TEST_CASE("linear boltzmann generator structure") {
  QLBEParams p;
  p.mass_test = 1.0;
  p.mass_gas = 1.0;
  p.beta = 2.0;
  p.grid = HilbertSpace::grid1d(32, 1.0);
  p.t_tilde = constant_t_tilde(p.grid, 0.05, 2);
  CHECK(p.t_tilde.size() == 4);

  QLBEBuild build = qlbe_build(p);
  CHECK(build.total_weight > 0.0);

  // Trace preservation on random states despite the boundary drop.
  for (unsigned k = 0; k < 3; ++k) {
    auto rho = random_density(p.grid, 900 + k);
    CHECK(std::abs(apply_generator(build.generator, rho.op).matrix.trace()) <= 1e-12);
  }

  // The dynamics closes on momentum populations: diagonal states stay
  // diagonal and follow the classical rate matrix.
  Eigen::MatrixXd rates = qlbe_population_rates(p);
  for (int c = 0; c < 32; ++c) CHECK(std::abs(rates.col(c).sum()) <= 1e-12);

  Matrix f = dft_matrix(p.grid);
  std::mt19937 seeds(606);
  std::uniform_real_distribution<double> ud(0.1, 1.0);
  Eigen::VectorXd pops(32);
  for (int k = 0; k < 32; ++k) pops(k) = ud(seeds);
  pops /= pops.sum();
  Matrix rho_diag = f.adjoint() * Matrix(pops.cast<Complex>().asDiagonal()) * f;
  Matrix image = f * apply_generator(build.generator,
                                     Operator{p.grid, rho_diag}).matrix * f.adjoint();
  Eigen::VectorXd expect = rates * pops;
  for (int k = 0; k < 32; ++k) {
    CHECK(std::abs(image(k, k).real() - expect(k)) <= 1e-12);
    image(k, k) = 0.0;
  }
  CHECK(max_abs(image) <= 1e-12);

  // Gibbs stationarity, enabled by detailed balance of S_MB.
  auto gibbs = maxwell_momentum_state(p.grid, p.mass_test, p.beta);
  CHECK(trace_norm(apply_generator(build.generator, gibbs.op).matrix) <= 1e-3);

  // Near the lattice edge transitions are dropped and reported.
  QLBEParams wide = p;
  wide.t_tilde = constant_t_tilde(p.grid, 0.05, 15);
  QLBEBuild edge = qlbe_build(wide);
  CHECK(edge.dropped_weight > 0.0);
  CHECK(edge.dropped_weight < edge.total_weight);
}

TEST_CASE("linear boltzmann generator rejects bad transfers") {
  QLBEParams p;
  p.grid = HilbertSpace::grid1d(16, 1.0);
  p.beta = 1.0;
  p.t_tilde = {{0.37 * p.grid.dp(), 0.05}};
  CHECK_THROWS_WITH_AS(qlbe_build(p), "off-lattice momentum transfer", Error);
  p.t_tilde = {{0.0, 0.05}};
  CHECK_THROWS_WITH_AS(qlbe_build(p), "zero momentum transfer singularity", Error);
  p.t_tilde = {{p.grid.dp(), 0.05}};
  p.beta = -1.0;
  CHECK_THROWS_WITH_AS(qlbe_build(p), "invalid temperature", Error);
}
