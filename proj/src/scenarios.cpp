// SPDX-License-Identifier: Apache-2.0

#include "qdyn/scenarios.hpp"

#include "qdyn/covariance.hpp"
#include "qdyn/levy.hpp"
#include "qdyn/measurement.hpp"
#include "qdyn/models.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace qdyn {
namespace {

using nlohmann::json;
using Checks = std::vector<CriterionCheck>;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// CSV artifacts use UTF-8, '.' decimals, %.17g, and a header row.
struct Csv {
  std::string text;
  explicit Csv(const std::vector<std::string>& cols) {
    for (size_t i = 0; i < cols.size(); ++i) {
      if (i) text += ',';
      text += cols[i];
    }
    text += '\n';
  }
  void row(const std::vector<double>& vals) {
    for (size_t i = 0; i < vals.size(); ++i) {
      if (i) text += ',';
      text += fmt17(vals[i]);
    }
    text += '\n';
  }
};

struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;
  void add(std::string name, std::string content) {
    files.emplace_back(std::move(name), std::move(content));
  }
};

void push_check(Checks& c, const std::string& name, double value, double tol,
                const std::string& detail = "") {
  CriterionCheck k;
  k.name = name;
  k.value = value;
  k.tolerance = tol;
  k.pass = value <= tol;
  k.detail = detail;
  c.push_back(std::move(k));
}

void append_checks(Checks& dst, Checks src) {
  for (auto& k : src) dst.push_back(std::move(k));
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double n = double(xs.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double normal_draw(SplitMix64& rng) {
  double u1 = rng.uniform(), u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

DensityMatrix random_density(const HilbertSpace& space, SplitMix64& rng) {
  int d = space.dim();
  Matrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Complex(normal_draw(rng), normal_draw(rng));
  Matrix m = a * a.adjoint();
  return make_density_normalized(Operator{space, m});
}

// Mixture of two wave packets kept away from the grid edge, so that
// checks sensitive to the periodic seam see no support there. Widths are
// pinned to [1.9, 2.2] cells: wide enough that the momentum density dies
// before the Nyquist edge (p_hat acting on the state revives seam support
// at the size of the Nyquist amplitude), narrow enough that the position
// tails stay negligible at the window boundary after small shifts.
DensityMatrix localized_density(const HilbertSpace& space, SplitMix64& rng) {
  const GridGeometry& g = space.grid();
  double dp = space.dp();
  auto cell = [&](double lo, double hi) {
    return std::floor(lo + rng.uniform() * (hi - lo + 1.0));
  };
  Matrix m = Matrix::Zero(space.dim(), space.dim());
  double w = 0.35 + 0.3 * rng.uniform();
  for (int k = 0; k < 2; ++k) {
    double x0 = cell(-3, 3) * g.dx;
    double p0 = cell(-2, 2) * dp;
    double sx = (1.9 + 0.3 * rng.uniform()) * g.dx;
    Vector psi = gaussian_packet(space, x0, p0, sx);
    m += (k == 0 ? w : 1.0 - w) * (psi * psi.adjoint());
  }
  return make_density_normalized(Operator{space, m});
}

Complex expect(const Operator& obs, const DensityMatrix& rho) {
  return (obs.matrix * rho.op.matrix).trace();
}

// ---- damped harmonic oscillator: first and second moments ---------------

Checks eval_dho_moments(const json& prm, Artifacts* art) {
  DHOParams p;
  p.dim = prm.at("dim").get<int>();
  p.omega = prm.at("omega").get<double>();
  p.beta = prm.at("beta").get<double>();
  p.eta = prm.at("eta").get<double>();
  Complex alpha(prm.at("alpha_re").get<double>(), prm.at("alpha_im").get<double>());
  int n_times = prm.at("n_times").get<int>();
  double rel_tol = prm.at("rel_tol").get<double>();

  HilbertSpace space = HilbertSpace::fock(p.dim);
  FockOps ops = fock_ops(space);
  LindbladGenerator gen = dho_generator(p);

  Vector c = coherent_vector(space, alpha);
  Matrix m0 = c * c.adjoint();
  m0 /= m0.trace().real();
  DensityMatrix rho = make_density(Operator{space, m0});
  Complex a0 = expect(ops.a, rho);
  double n0 = expect(ops.number, rho).real();

  double t_final = 5.0 / p.eta;
  Csv csv_a({"t", "analytic", "numeric", "abs_error"});
  Csv csv_n({"t", "analytic", "numeric", "abs_error"});
  double err_a = 0.0, err_n = 0.0, leak = 0.0;
  double t_prev = 0.0;
  for (int k = 0; k < n_times; ++k) {
    double t = t_final * double(k) / double(n_times - 1);
    if (k > 0) rho = evolve_ode(gen, rho, t - t_prev, rel_tol);
    t_prev = t;
    Complex am = expect(ops.a, rho);
    double nm = expect(ops.number, rho).real();
    Complex aa = dho_mean_amplitude(p, a0, t);
    double na = dho_mean_number(p, n0, t);
    err_a = std::max(err_a, std::abs(am - aa));
    err_n = std::max(err_n, std::abs(nm - na));
    leak = std::max(leak, rho.op.matrix(p.dim - 1, p.dim - 1).real());
    csv_a.row({t, std::abs(aa), std::abs(am), std::abs(am - aa)});
    csv_n.row({t, na, nm, std::abs(nm - na)});
  }
  if (art) {
    art->add("dho_mean_amplitude.csv", csv_a.text);
    art->add("dho_mean_number.csv", csv_n.text);
  }
  Checks c_out;
  std::string pd = "dim=" + std::to_string(p.dim) + " eta=" + fmt_short(p.eta) +
                   " beta=" + fmt_short(p.beta) + " t<=" + fmt_short(t_final);
  push_check(c_out, "dho_mean_amplitude_error", err_a, 1e-6, pd);
  push_check(c_out, "dho_mean_number_error", err_n, 1e-6, pd);
  push_check(c_out, "dho_truncation_leakage", leak, 1e-6,
             "largest top-level Fock population along the trajectory");
  return c_out;
}

// ---- cat-state coherence suppression -------------------------------------

Checks eval_dho_cat(const json& prm, Artifacts* art) {
  DHOParams p;
  p.dim = prm.at("dim").get<int>();
  p.omega = prm.at("omega").get<double>();
  p.eta = prm.at("eta").get<double>();
  p.zero_temperature = true;
  double rel_tol = prm.at("rel_tol").get<double>();
  std::vector<double> alphas = prm.at("alphas").get<std::vector<double>>();
  std::vector<double> eta_t = prm.at("eta_t").get<std::vector<double>>();

  HilbertSpace space = HilbertSpace::fock(p.dim);
  LindbladGenerator gen = dho_generator(p);
  double err = 0.0, leak = 0.0;
  Checks c_out;
  for (double amp : alphas) {
    Complex al(amp, 0.0), be = -al;
    Vector ca = coherent_vector(space, al);
    Vector cb = coherent_vector(space, be);
    leak = std::max(leak, coherent_leakage(space, al));
    Operator x{space, ca * cb.adjoint()};
    Complex m0 = ca.dot(x.matrix * cb);
    Csv csv({"t", "analytic", "numeric", "abs_error"});
    double t_prev = 0.0;
    for (double et : eta_t) {
      double t = et / p.eta;
      if (t > t_prev) x = evolve_ode_operator(gen, x, t - t_prev, rel_tol);
      t_prev = t;
      Complex rot = std::exp(Complex(-p.eta * t / 2.0, -p.omega * t));
      Vector cat = coherent_vector(space, al * rot);
      Vector cbt = coherent_vector(space, be * rot);
      double ratio = std::abs(cat.dot(x.matrix * cbt) / m0);
      double oracle = dho_cat_coherence(al, be, p.eta, t);
      err = std::max(err, std::abs(ratio - oracle));
      csv.row({t, oracle, ratio, std::abs(ratio - oracle)});
    }
    if (art) art->add("cat_coherence_alpha_" + fmt_short(amp) + ".csv", csv.text);
  }
  push_check(c_out, "cat_coherence_error", err, 1e-4,
             "zero-temperature off-diagonal suppression, |alpha| up to " +
                 fmt_short(alphas.empty() ? 0.0 : alphas.back()));
  push_check(c_out, "cat_truncation_leakage", leak, 1e-6,
             "coherent-state weight beyond the Fock cutoff");
  return c_out;
}

// ---- two-level thermal relaxation ----------------------------------------

Checks eval_two_level(const json& prm, Artifacts* art) {
  double omega = prm.at("omega").get<double>();
  double eta = prm.at("eta").get<double>();
  std::vector<double> n_betas = prm.at("n_beta").get<std::vector<double>>();
  std::vector<double> times = prm.at("times").get<std::vector<double>>();

  HilbertSpace space = HilbertSpace::qubit();
  Matrix exc = Matrix::Zero(2, 2);
  exc(1, 1) = 1.0;
  Matrix plus = Matrix::Constant(2, 2, 0.5);
  double err_pe = 0.0, err_coh = 0.0, err_asym = 0.0;
  Csv csv({"t", "analytic", "numeric", "abs_error"});
  for (double nb : n_betas) {
    TwoLevelParams p;
    p.omega = omega;
    p.eta = eta;
    if (nb == 0.0) {
      p.zero_temperature = true;
    } else {
      p.beta = std::log(1.0 + 1.0 / nb) / omega;
    }
    LindbladGenerator gen = two_level_generator(p);
    for (const Matrix& init : {exc, plus}) {
      DensityMatrix rho0 = make_density(Operator{space, init});
      for (double t : times) {
        DensityMatrix rt = evolve_expm(gen, rho0, t);
        TwoLevelOracle o = two_level_oracles(p, rho0, t);
        double pe = rt.op.matrix(1, 1).real();
        err_pe = std::max(err_pe, std::abs(pe - o.excited_population));
        err_coh = std::max(err_coh, std::abs(rt.op.matrix(1, 0) - o.coherence));
        if (nb == 0.5 && init(0, 0) == 0.0)
          csv.row({t, o.excited_population, pe, std::abs(pe - o.excited_population)});
      }
    }
    double eta_bar = eta * (2.0 * nb + 1.0);
    DensityMatrix rf = evolve_expm(gen, make_density(Operator{space, exc}), 60.0 / eta_bar);
    double target = nb / (2.0 * nb + 1.0);
    err_asym = std::max(err_asym, std::abs(rf.op.matrix(1, 1).real() - target));
  }
  if (art) art->add("two_level_pe.csv", csv.text);
  Checks c_out;
  std::string pd = "N_beta in {" + [&] {
    std::string s;
    for (size_t i = 0; i < n_betas.size(); ++i) s += (i ? "," : "") + fmt_short(n_betas[i]);
    return s;
  }() + "}, eta=" + fmt_short(eta);
  push_check(c_out, "two_level_population_error", err_pe, 1e-12, pd);
  push_check(c_out, "two_level_coherence_error", err_coh, 1e-12, pd);
  push_check(c_out, "two_level_asymptote_error", err_asym, 1e-12,
             "late-time excited population against N_beta/(2 N_beta + 1)");
  return c_out;
}

// ---- rotation-covariant qubit family --------------------------------------

Checks eval_rotation_covariant(const json& prm, Artifacts*) {
  RotCovParams rp;
  rp.c_minus = prm.at("c_minus").get<double>();
  rp.c_zero = prm.at("c_zero").get<double>();
  rp.c_plus = prm.at("c_plus").get<double>();
  rp.hamiltonian_coeff = prm.at("hamiltonian_coeff").get<double>();
  std::uint64_t seed = prm.at("seed").get<std::uint64_t>();

  HilbertSpace space = HilbertSpace::qubit();
  PauliOps pl = pauli_ops(space);
  LindbladGenerator gen = rotation_covariant_generator(rp);
  Checks c_out;

  // The spherical-tensor form must match the generator assembled from the
  // ladder operators directly.
  std::vector<Operator> sig_ops;
  if (rp.c_minus > 0.0)
    sig_ops.push_back(Operator{space, std::sqrt(2.0 * rp.c_minus) * pl.sigma_minus.matrix});
  if (rp.c_zero > 0.0)
    sig_ops.push_back(Operator{space, std::sqrt(rp.c_zero) * pl.sigma_z.matrix});
  if (rp.c_plus > 0.0)
    sig_ops.push_back(Operator{space, std::sqrt(2.0 * rp.c_plus) * pl.sigma_plus.matrix});
  LindbladGenerator sig = make_generator(
      Operator{space, rp.hamiltonian_coeff * pl.sigma_z.matrix}, sig_ops);
  double d1 = max_abs(generator_superop(gen).matrix - generator_superop(sig).matrix);
  push_check(c_out, "rotcov_ladder_form_identity", d1, 1e-14,
             "spherical-tensor generator against the sigma ladder assembly");

  SplitMix64 rng(seed);
  std::vector<DensityMatrix> samples;
  for (int i = 0; i < 3; ++i) samples.push_back(random_density(space, rng));
  double r = covariance_residual(gen, so2_spin_rep(space), {0.5, 2.0, M_PI}, samples);
  push_check(c_out, "rotcov_so2_covariance", r, 1e-12,
             "rotation about z at angles 0.5, 2.0, pi");

  if (rp.c_plus < rp.c_minus) {
    RotCovParams rp2 = rp;
    rp2.c_zero = 0.0;
    TwoLevelParams tp;
    tp.omega = 2.0 * rp.hamiltonian_coeff;
    tp.eta = 2.0 * (rp.c_minus - rp.c_plus);
    if (rp.c_plus == 0.0) {
      tp.zero_temperature = true;
    } else {
      double nb = rp.c_plus / (rp.c_minus - rp.c_plus);
      tp.beta = std::log(1.0 + 1.0 / nb) / tp.omega;
    }
    double d2 = max_abs(generator_superop(rotation_covariant_generator(rp2)).matrix -
                        generator_superop(two_level_generator(tp)).matrix);
    push_check(c_out, "rotcov_two_level_reduction", d2, 1e-14,
               "c_zero = 0 member against the two-level generator");
  }

  {
    RotCovParams rp3;
    rp3.c_zero = rp.c_zero > 0.0 ? rp.c_zero : 0.2;
    LindbladGenerator gen3 = rotation_covariant_generator(rp3);
    DensityMatrix rho0 = make_density(Operator{space, Matrix::Constant(2, 2, 0.5)});
    double t = 0.7;
    DensityMatrix rt = evolve_expm(gen3, rho0, t);
    double want = 0.5 * std::exp(-2.0 * rp3.c_zero * t);
    push_check(c_out, "rotcov_dephasing_rate",
               std::abs(std::abs(rt.op.matrix(1, 0)) - want), 1e-12,
               "pure sigma_z channel coherence decay exp(-2 c_zero t)");
  }
  return c_out;
}

// ---- symmetry covariance audit --------------------------------------------

Checks eval_covariance(const json& prm, Artifacts*) {
  std::uint64_t seed = prm.at("seed").get<std::uint64_t>();
  int grid_n = prm.at("grid_n").get<int>();
  double dx = prm.at("dx").get<double>();
  int dho_dim = prm.at("dho_dim").get<int>();
  SplitMix64 rng(seed);
  Checks c_out;

  {
    DHOParams p;
    p.dim = dho_dim;
    p.eta = 0.2;
    p.beta = 1.0;
    HilbertSpace space = HilbertSpace::fock(p.dim);
    std::vector<DensityMatrix> samples;
    for (int i = 0; i < 3; ++i) samples.push_back(random_density(space, rng));
    double r = covariance_residual(dho_generator(p), u1_phase_rep(space),
                                   {0.5, 1.7, 3.9}, samples);
    push_check(c_out, "cov_dho_u1_phase", r, 1e-10,
               "damped oscillator under exp(i theta N)");
  }
  {
    TwoLevelParams p;
    p.beta = std::log(3.0);
    HilbertSpace space = HilbertSpace::qubit();
    std::vector<DensityMatrix> samples;
    for (int i = 0; i < 3; ++i) samples.push_back(random_density(space, rng));
    double r = covariance_residual(two_level_generator(p), so2_spin_rep(space),
                                   {0.5, 2.0, M_PI}, samples);
    push_check(c_out, "cov_two_level_so2", r, 1e-10,
               "two-level generator under rotations about z");
    RotCovParams rp{0.3, 0.2, 0.1, 0.7};
    double r2 = covariance_residual(rotation_covariant_generator(rp),
                                    so2_spin_rep(space), {0.5, 2.0, M_PI}, samples);
    push_check(c_out, "cov_rotation_so2", r2, 1e-10,
               "spherical-tensor generator under rotations about z");
  }
  {
    QBMParams p;
    p.mass = 1.0;
    p.eta = 0.3;
    p.beta = 20.0;
    p.grid = HilbertSpace::grid1d(grid_n, dx);
    std::vector<DensityMatrix> samples;
    for (int i = 0; i < 2; ++i) samples.push_back(localized_density(p.grid, rng));
    double r = covariance_residual(qbm_generator(p), translation_rep(p.grid),
                                   {1.0 * dx, 2.0 * dx, 4.0 * dx}, samples);
    push_check(c_out, "cov_qbm_translation", r, 1e-10,
               "Brownian motion with friction under lattice shifts (bulk-localized states)");
  }
  {
    QLBEParams p;
    p.beta = 2.0;
    p.grid = HilbertSpace::grid1d(grid_n, dx);
    p.t_tilde = constant_t_tilde(p.grid, std::sqrt(0.01) / (2.0 * M_PI), 2);
    QLBEBuild build = qlbe_build(p);
    std::vector<DensityMatrix> samples;
    for (int i = 0; i < 3; ++i) samples.push_back(random_density(p.grid, rng));
    double r = covariance_residual(build.generator, translation_rep(p.grid),
                                   {1.0 * dx, 5.0 * dx, 16.0 * dx}, samples);
    push_check(c_out, "cov_qlbe_translation", r, 1e-10,
               "linear Boltzmann generator under lattice shifts");
  }
  {
    HilbertSpace space = HilbertSpace::grid1d(32, dx);
    WeylResult w = weyl_residual(space, 2.0 * dx, 3.0 * space.dp());
    push_check(c_out, "weyl_on_lattice", w.residual, 1e-10,
               std::string("a=2dx, q=3dp, on_lattice=") + (w.on_lattice ? "yes" : "no"));
  }
  {
    HilbertSpace space = HilbertSpace::fock(20);
    double r = std::max(generalized_weyl_residual(space, 0.7, 1),
                        generalized_weyl_residual(space, 0.7, 3));
    push_check(c_out, "weyl_generalized_isometry", r, 1e-10,
               "phase against shift isometry below the truncation edge, m in {1,3}");
  }
  return c_out;
}

// ---- complete positivity audit --------------------------------------------

Checks eval_choi(const json& prm, Artifacts*) {
  int choi_n = prm.at("choi_grid_n").get<int>();
  Checks c_out;
  struct Entry {
    std::string name;
    Superoperator s;
    std::vector<double> times;
  };
  std::vector<Entry> entries;

  {
    DHOParams p;
    p.dim = 12;
    p.eta = 0.2;
    p.beta = 1.0;
    entries.push_back({"cp_dho", generator_superop(dho_generator(p)), {0.05, 0.5, 5.0}});
  }
  {
    ShiftCovParams p;
    p.eta_0 = 0.1;
    p.eta_m = {0.2, 0.1};
    p.beta = 1.0;
    p.dim = 12;
    entries.push_back({"cp_shift_covariant", generator_superop(shift_covariant_generator(p)),
                       {0.05, 0.5, 5.0}});
  }
  {
    TwoLevelParams p;
    p.beta = std::log(3.0);
    entries.push_back({"cp_two_level", generator_superop(two_level_generator(p)),
                       {0.01, 0.3, 3.0}});
  }
  {
    RotCovParams p{0.3, 0.2, 0.1, 0.7};
    entries.push_back({"cp_rotation_covariant",
                       generator_superop(rotation_covariant_generator(p)), {0.01, 0.5, 5.0}});
  }
  {
    QBMParams p;
    p.eta = 0.3;
    p.beta = 20.0;
    p.grid = HilbertSpace::grid1d(choi_n, 1.0);
    entries.push_back({"cp_qbm", generator_superop(qbm_generator(p)), {0.03, 0.3, 3.0}});
  }
  {
    QLBEParams p;
    p.beta = 2.0;
    p.grid = HilbertSpace::grid1d(choi_n, 1.0);
    p.t_tilde = constant_t_tilde(p.grid, std::sqrt(0.01) / (2.0 * M_PI), 2);
    entries.push_back({"cp_qlbe", qlbe_generator(p), {0.05, 0.5, 5.0}});
  }

  for (const Entry& e : entries) {
    double neg = 0.0;
    for (double t : e.times) {
      Superoperator prop{e.s.space, matrix_exp(e.s.matrix * t)};
      double mev = min_hermitian_eigenvalue(choi_matrix(prop).matrix);
      neg = std::max(neg, std::max(0.0, -mev));
    }
    push_check(c_out, e.name + "_choi_negativity", neg, 1e-9,
               "largest Choi eigenvalue deficit over three horizons");
  }

  {
    // Transpose map: positive but not completely positive; the Choi test
    // must reject it decisively.
    HilbertSpace space = HilbertSpace::qubit();
    Matrix s = Matrix::Zero(4, 4);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) s(i + 2 * j, j + 2 * i) = 1.0;
    double mev = min_hermitian_eigenvalue(choi_matrix(Superoperator{space, s}).matrix);
    CriterionCheck k;
    k.name = "cp_transpose_control_rejected";
    k.value = mev;
    k.tolerance = -1e-9;
    k.pass = mev <= -1e-9;
    k.detail = "control: transpose map Choi minimum eigenvalue must be negative";
    c_out.push_back(std::move(k));
  }
  return c_out;
}

// ---- stationary states ------------------------------------------------------

Checks eval_stationary(const json& prm, Artifacts*) {
  Checks c_out;
  {
    DHOParams p;
    p.dim = prm.at("dho_dim").get<int>();
    p.eta = prm.at("dho_eta").get<double>();
    p.beta = prm.at("dho_beta").get<double>();
    HilbertSpace space = HilbertSpace::fock(p.dim);
    DensityMatrix w = thermal_fock_state(space, p.omega, p.beta);
    double r = trace_norm(apply_generator(dho_generator(p), w.op).matrix);
    push_check(c_out, "stationary_dho_gibbs", r, 1e-8,
               "thermal Fock state, dim=" + std::to_string(p.dim));
  }
  {
    TwoLevelParams p;
    p.beta = std::log(3.0);
    HilbertSpace space = HilbertSpace::qubit();
    DensityMatrix w = thermal_qubit_state(space, p.omega, p.beta);
    double r = trace_norm(apply_generator(two_level_generator(p), w.op).matrix);
    push_check(c_out, "stationary_two_level_gibbs", r, 1e-13,
               "thermal qubit state at N_beta = 0.5");
  }
  {
    QLBEParams p;
    p.mass_test = prm.at("mass_test").get<double>();
    p.mass_gas = prm.at("mass_gas").get<double>();
    p.beta = prm.at("beta").get<double>();
    p.grid = HilbertSpace::grid1d(prm.at("grid_n").get<int>(), prm.at("dx").get<double>());
    double scale = prm.at("rate_scale").get<double>();
    p.t_tilde = constant_t_tilde(p.grid, std::sqrt(scale) / (2.0 * M_PI),
                                 prm.at("max_multiple").get<int>());
    QLBEBuild build = qlbe_build(p);
    DensityMatrix w = maxwell_momentum_state(p.grid, p.mass_test, p.beta);
    double r = trace_norm(apply_generator(build.generator, w.op).matrix);
    push_check(c_out, "stationary_qlbe_maxwell", r, 1e-3,
               "dropped rate weight " + fmt_short(build.dropped_weight) + " of " +
                   fmt_short(build.total_weight) + " at the grid edge");
  }
  return c_out;
}

// ---- quantum linear Boltzmann structure -------------------------------------

Checks eval_qlbe_structure(const json& prm, Artifacts* art) {
  QLBEParams p;
  p.mass_test = prm.at("mass_test").get<double>();
  p.mass_gas = prm.at("mass_gas").get<double>();
  p.beta = prm.at("beta").get<double>();
  p.grid = HilbertSpace::grid1d(prm.at("grid_n").get<int>(), prm.at("dx").get<double>());
  double scale = prm.at("rate_scale").get<double>();
  int max_multiple = prm.at("max_multiple").get<int>();
  p.t_tilde = constant_t_tilde(p.grid, std::sqrt(scale) / (2.0 * M_PI), max_multiple);
  std::uint64_t seed = prm.at("seed").get<std::uint64_t>();

  QLBEBuild build = qlbe_build(p);
  Checks c_out;

  SplitMix64 rng(seed);
  double tp = 0.0;
  for (int i = 0; i < 3; ++i) {
    DensityMatrix rho = random_density(p.grid, rng);
    tp = std::max(tp, std::abs(apply_generator(build.generator, rho.op).matrix.trace()));
  }
  DensityMatrix w = maxwell_momentum_state(p.grid, p.mass_test, p.beta);
  tp = std::max(tp, std::abs(apply_generator(build.generator, w.op).matrix.trace()));
  push_check(c_out, "qlbe_trace_preservation", tp, 1e-12,
             "dropped rate weight " + fmt_short(build.dropped_weight) + " of " +
                 fmt_short(build.total_weight));

  double db = 0.0;
  for (double q : {0.5, 1.0, 2.0, -1.3}) {
    for (double e : {0.1, 0.7, 1.3}) {
      double lhs = dynamic_structure_factor_mb(q, e, p.mass_gas, p.beta);
      double rhs = std::exp(-p.beta * e) * dynamic_structure_factor_mb(q, -e, p.mass_gas, p.beta);
      db = std::max(db, std::abs(lhs / rhs - 1.0));
    }
  }
  push_check(c_out, "qlbe_detailed_balance", db, 1e-12,
             "S(q,E) against exp(-beta E) S(q,-E), relative");

  Eigen::MatrixXd rates = qlbe_population_rates(p);
  double colsum = rates.colwise().sum().cwiseAbs().maxCoeff();
  push_check(c_out, "qlbe_population_column_sums", colsum, 1e-12,
             "classical momentum rate matrix conservation");

  if (art) {
    Csv csv({"p", "outflow_rate"});
    RealVector pl = momentum_lattice(p.grid);
    for (int k = 0; k < p.grid.dim(); ++k) csv.row({pl(k), -rates(k, k)});
    art->add("qlbe_population_outflow.csv", csv.text);
  }
  return c_out;
}

// ---- quantum Brownian motion: structure, fit, exact solutions ---------------

Checks eval_qbm_identity(const json& prm, Artifacts*) {
  QBMParams p;
  p.mass = prm.at("mass").get<double>();
  p.eta = prm.at("eta").get<double>();
  p.beta = prm.at("beta").get<double>();
  p.grid = HilbertSpace::grid1d(prm.at("identity_grid_n").get<int>(),
                                prm.at("dx").get<double>());
  double d = max_abs(generator_superop(qbm_generator(p)).matrix -
                     qbm_four_term_superop(p).matrix);
  Checks c_out;
  push_check(c_out, "qbm_four_term_identity", d, 1e-12,
             "Lindblad form against the literal four-term assembly, n=" +
                 std::to_string(p.grid.dim()));
  return c_out;
}

Checks eval_qbm_fit(const json& prm, Artifacts* art) {
  QBMParams p;
  p.mass = prm.at("mass").get<double>();
  p.eta = prm.at("eta").get<double>();
  p.beta = prm.at("beta").get<double>();
  p.grid = HilbertSpace::grid1d(prm.at("grid_n").get<int>(), prm.at("dx").get<double>());
  double sigma_x = prm.at("sigma_x").get<double>() * p.grid.grid().dx;
  double p0 = prm.at("p0_cells").get<double>() * p.grid.dp();
  double t_final = prm.at("t_final").get<double>();
  int n_times = prm.at("n_times").get<int>();
  double rel_tol = prm.at("rel_tol").get<double>();

  LindbladGenerator gen = qbm_generator(p);
  GridOps ops = grid_ops(p.grid);
  Operator h0{p.grid, (ops.p_hat.matrix * ops.p_hat.matrix) / (2.0 * p.mass)};
  Vector psi = gaussian_packet(p.grid, 0.0, p0, sigma_x);
  DensityMatrix rho0 = make_density(Operator{p.grid, psi * psi.adjoint()});
  DensityMatrix rho = rho0;

  Csv csv_p({"t", "analytic", "numeric", "abs_error"});
  Csv csv_e({"t", "analytic", "numeric", "abs_error"});
  std::vector<double> ts, lnp;
  double t_prev = 0.0;
  for (int k = 0; k < n_times; ++k) {
    double t = t_final * double(k) / double(n_times - 1);
    if (k > 0) rho = evolve_ode(gen, rho, t - t_prev, rel_tol);
    t_prev = t;
    double pm = expect(ops.p_hat, rho).real();
    double em = expect(h0, rho).real();
    QBMMoments o = qbm_moment_oracles(p, rho0, t);
    csv_p.row({t, o.mean_p, pm, std::abs(pm - o.mean_p)});
    csv_e.row({t, o.mean_energy, em, std::abs(em - o.mean_energy)});
    ts.push_back(t);
    lnp.push_back(std::log(pm));
  }
  if (art) {
    art->add("qbm_mean_p.csv", csv_p.text);
    art->add("qbm_mean_energy.csv", csv_e.text);
  }
  double eta_fit = -fit_slope(ts, lnp);
  Checks c_out;
  push_check(c_out, "qbm_friction_fit", std::abs(eta_fit - p.eta) / p.eta, 0.01,
             "eta_fit=" + fmt17(eta_fit) + " vs eta=" + fmt_short(p.eta) +
                 " from the log-mean-momentum slope");
  return c_out;
}

Checks eval_qbm_exact(const json& prm, Artifacts* art) {
  int n = prm.at("grid_n").get<int>();
  double dx = prm.at("dx").get<double>();
  double mass = prm.at("mass").get<double>();
  double dpp = prm.at("dpp").get<double>();
  double dxx = prm.at("dxx").get<double>();
  double rel_tol = prm.at("rel_tol").get<double>();
  std::vector<double> times = prm.at("times").get<std::vector<double>>();

  HilbertSpace space = HilbertSpace::grid1d(n, dx);
  QBMParams p;
  p.mass = mass;
  p.eta = 4.0 * std::sqrt(dpp * dxx) / space.hbar();
  p.beta = p.eta * mass / dpp;
  p.grid = space;
  p.include_friction = false;
  LindbladGenerator gen = qbm_generator(p);

  double sigma_x = prm.at("sigma_x").get<double>() * dx;
  double p0 = prm.at("p0_cells").get<double>() * space.dp();
  Vector psi = gaussian_packet(space, 0.0, p0, sigma_x);
  DensityMatrix rho0 = make_density(Operator{space, psi * psi.adjoint()});
  DensityMatrix rho = rho0;

  // Witness coherence: position pair symmetric about the origin whose
  // damping is near e^{-1} at the final time.
  int iw = n / 2 + 4, jw = n / 2 - 4;
  Csv csv({"t", "analytic", "numeric", "abs_error"});
  double err_m = 0.0, err_x = 0.0;
  double t_prev = 0.0;
  for (double t : times) {
    rho = evolve_ode(gen, rho, t - t_prev, rel_tol);
    t_prev = t;
    Matrix mm = qbm_exact_momentum(space, mass, dpp, dxx, rho0.op.matrix, t);
    Matrix mx = qbm_exact_position(space, mass, dpp, dxx, rho0.op.matrix, t);
    err_m = std::max(err_m, trace_norm(rho.op.matrix - mm));
    err_x = std::max(err_x, trace_norm(rho.op.matrix - mx));
    csv.row({t, std::abs(mx(iw, jw)), std::abs(rho.op.matrix(iw, jw)),
             std::abs(std::abs(rho.op.matrix(iw, jw)) - std::abs(mx(iw, jw)))});
  }
  if (art) art->add("qbm_exact_coherence.csv", csv.text);
  Checks c_out;
  std::string pd = "n=" + std::to_string(n) + " Dpp=" + fmt_short(dpp) +
                   " Dxx=" + fmt_short(dxx) + " t<=" + fmt_short(times.back());
  push_check(c_out, "qbm_exact_momentum_form", err_m, 1e-4, pd);
  push_check(c_out, "qbm_exact_position_form", err_x, 1e-4, pd);
  return c_out;
}

// ---- joint position-momentum POVM -------------------------------------------

Checks eval_povm(const json& prm, Artifacts* art) {
  int n = prm.at("grid_n").get<int>();
  double dx = prm.at("dx").get<double>();
  double sigma = prm.at("sigma_cells").get<double>() * dx;
  std::uint64_t seed = prm.at("seed").get<std::uint64_t>();
  HilbertSpace space = HilbertSpace::grid1d(n, dx);
  double hbar = space.hbar();

  JointPOVM jp = joint_xp_povm(space, sigma);
  Checks c_out;
  push_check(c_out, "povm_frame_defect", jp.norm_defect, 1e-6,
             "coherent-frame resolution of the identity, sigma=" + fmt_short(sigma));

  auto [vx, vp] = marginal_variances(jp);
  double product = vx * vp / (hbar * hbar / 4.0);
  push_check(c_out, "povm_variance_product", std::abs(product - 1.0), 0.02,
             "var_x=" + fmt_short(vx) + " var_p=" + fmt_short(vp) +
                 " against hbar^2/4");

  JointInstrument inst = joint_xp_instrument(space, sigma);
  RectRegion r1{region_interval(n / 2 - 6, n / 2 + 4, n), region_interval(n / 2 - 3, n / 2 + 5, n)};
  RectRegion r2{region_interval(n - 3, 4, n), region_interval(n - 8, 2, n)};
  SplitMix64 rng(seed);
  double err = 0.0;
  for (const RectRegion& r : {r1, r2}) {
    Operator effect = jp.effect_of(r);
    err = std::max(err, max_abs(instrument_adjoint_identity(inst, r).matrix - effect.matrix));
    for (int i = 0; i < 2; ++i) {
      DensityMatrix rho = random_density(space, rng);
      InstrumentOutcome out = apply_instrument(inst, rho, r);
      double dual = std::abs(out.unnormalized.matrix.trace().real() -
                             outcome_probability(rho, effect));
      err = std::max(err, dual);
    }
  }
  push_check(c_out, "povm_instrument_adjoint_consistency", err, 1e-10,
             "adjoint identity and outcome-probability duality");

  auto [mx, mp] = marginals(jp);
  Region band_x = region_interval(n / 2 - 5, n / 2 + 7, n);
  Region band_p = region_interval(2, 9, n);
  double merr = max_abs(jp.effect_of(RectRegion{band_x, region_all(n)}).matrix -
                        mx.effect_of(band_x).matrix);
  merr = std::max(merr, max_abs(jp.effect_of(RectRegion{region_all(n), band_p}).matrix -
                                mp.effect_of(band_p).matrix));
  push_check(c_out, "povm_marginal_consistency", merr, 1e-8,
             "joint effect over a full conjugate band against the smeared marginal");

  double cov = povm_covariance_residual(jp, translation_rep(space), 4.0 * dx, r1);
  cov = std::max(cov, povm_covariance_residual(jp, boost_rep(space), 3.0 * space.dp(), r1));
  POVM smeared = smeared_position_povm(space, gaussian_weights(space, sigma));
  cov = std::max(cov, povm_covariance_residual(smeared, translation_rep(space), 5.0 * dx,
                                               region_interval(10, 30, n)));
  cov = std::max(cov, povm_covariance_residual(smeared, boost_rep(space), 2.0 * space.dp(),
                                               region_interval(10, 30, n)));
  push_check(c_out, "povm_covariance", cov, 1e-10,
             "translation and boost covariance of joint and smeared position effects");

  if (art) {
    Csv csv({"offset_cells", "envelope", "position_weight"});
    RealVector hx = jp.envelope;
    RealVector h2(n);
    for (int m = 0; m < n; ++m) h2(m) = hx(m) * hx(m);
    h2 /= h2.sum();
    for (int m = 0; m < n; ++m) csv.row({double(m), hx(m), h2(m)});
    art->add("povm_envelope.csv", csv.text);
  }
  return c_out;
}

// ---- repeatable von Neumann instrument ---------------------------------------

Checks eval_instrument(const json& prm, Artifacts*) {
  int n = prm.at("grid_n").get<int>();
  int bins = prm.at("bins").get<int>();
  double dx = prm.at("dx").get<double>();
  std::uint64_t seed = prm.at("seed").get<std::uint64_t>();
  HilbertSpace space = HilbertSpace::grid1d(n, dx);
  int width = n / bins;

  std::vector<Operator> projs;
  for (int b = 0; b < bins; ++b) {
    Vector diag = Vector::Zero(n);
    for (int k = 0; k < width; ++k) diag(b * width + k) = 1.0;
    projs.push_back(Operator{space, Matrix(diag.asDiagonal())});
  }
  VonNeumannInstrument inst = von_neumann_instrument(space, projs);

  SplitMix64 rng(seed);
  double r_rep = 0.0, r_comp = 0.0, r_dual = 0.0;
  for (int i = 0; i < 3; ++i) {
    DensityMatrix rho = random_density(space, rng);
    for (int b = 0; b < bins; ++b) {
      Operator once = vn_apply(inst, rho.op, {b});
      Operator twice = vn_apply(inst, once, {b});
      r_rep = std::max(r_rep, max_abs(twice.matrix - once.matrix));
    }
    std::vector<int> m{1, 2, 3}, nn{2, 3, 4}, both{2, 3};
    Operator lhs = vn_apply(inst, vn_apply(inst, rho.op, nn), m);
    Operator rhs = vn_apply(inst, rho.op, both);
    r_comp = std::max(r_comp, max_abs(lhs.matrix - rhs.matrix));
    Matrix em = Matrix::Zero(n, n);
    for (int b : m) em += projs[b].matrix;
    r_dual = std::max(r_dual, std::abs(vn_apply(inst, rho.op, m).matrix.trace().real() -
                                       (rho.op.matrix * em).trace().real()));
  }
  Checks c_out;
  push_check(c_out, "vn_repeatability", r_rep, 1e-13,
             "second application of the same outcome set is idempotent");
  push_check(c_out, "vn_composition", r_comp, 1e-13,
             "sequential outcome sets compose through their intersection");
  push_check(c_out, "vn_duality", r_dual, 1e-13,
             "outcome trace against the summed projector expectation");
  return c_out;
}

// ---- Levy-Khintchine decoherence ---------------------------------------------

Checks eval_levy(const json& prm, Artifacts* art) {
  int n = prm.at("grid_n").get<int>();
  double dx = prm.at("dx").get<double>();
  double drift = prm.at("drift").get<double>();
  double gauss = prm.at("gaussian").get<double>();
  std::vector<double> times = prm.at("times").get<std::vector<double>>();
  double equiv_dpp = prm.at("equiv_dpp").get<double>();
  double equiv_t = prm.at("equiv_t").get<double>();

  std::vector<LevyJump> jumps;
  for (const auto& row : prm.at("jumps"))
    jumps.push_back(LevyJump{row.at(0).get<double>(), row.at(1).get<double>()});

  HilbertSpace space = HilbertSpace::grid1d(n, dx);
  double hbar = space.hbar();
  LevyTriplet t_gauss{0.0, 2.0 * equiv_dpp / (hbar * hbar), {}};
  LevyTriplet t_drift{drift, 0.0, {}};
  LevyTriplet t_jump{0.0, 0.0, jumps};
  LevyTriplet t_mixed{drift, gauss, jumps};
  std::vector<LevyTriplet> trips{t_gauss, t_drift, t_jump, t_mixed};

  RealVector xs = position_lattice(space);
  std::vector<double> off_lattice{-8.5, 3.3, 17.7};
  double err0 = 0.0, errmod = 0.0, errmul = 0.0, neg = 0.0;
  for (const LevyTriplet& trip : trips) {
    for (double t : times) {
      err0 = std::max(err0, std::abs(decoherence_factor(trip, t, 0.0) - 1.0));
      for (int i = 0; i < n; ++i)
        errmod = std::max(errmod, std::abs(decoherence_factor(trip, t, xs(i))) - 1.0);
      for (double x : off_lattice)
        errmod = std::max(errmod, std::abs(decoherence_factor(trip, t, x)) - 1.0);
      std::vector<double> pts(xs.data(), xs.data() + n);
      BochnerResult b = bochner_check(trip, t, pts);
      neg = std::max(neg, std::max(0.0, -b.min_eigenvalue));
    }
    for (auto [ta, tb] : {std::pair<double, double>{0.1, 0.4}, {0.5, 0.5}, {1.0, 2.0}}) {
      for (double x : {-8.5, 3.0, 17.0}) {
        Complex lhs = decoherence_factor(trip, ta + tb, x);
        Complex rhs = decoherence_factor(trip, ta, x) * decoherence_factor(trip, tb, x);
        errmul = std::max(errmul, std::abs(lhs - rhs));
      }
    }
  }
  Checks c_out;
  push_check(c_out, "levy_phi_at_zero", err0, 1e-14, "Phi(t,0) = 1 for all triplets");
  push_check(c_out, "levy_phi_modulus_bound", std::max(0.0, errmod), 1e-14,
             "|Phi| <= 1 on and off the lattice");
  push_check(c_out, "levy_phi_multiplicativity", errmul, 1e-14,
             "Phi(t+s,x) = Phi(t,x) Phi(s,x)");
  push_check(c_out, "levy_bochner_negativity", neg, 1e-10,
             "smallest eigenvalue deficit of the separation matrix");

  {
    // Gaussian triplet against the frictionless pure-dephasing closed form,
    // on a state confined to half the grid so the minimal-image separations
    // coincide with the raw ones.
    Vector psi = gaussian_packet(space, 0.0, 3.0 * space.dp(), 2.0 * dx);
    for (int i = 0; i < n; ++i)
      if (i < n / 4 || i >= 3 * n / 4) psi(i) = 0.0;
    psi /= psi.norm();
    DensityMatrix rho = make_density(Operator{space, psi * psi.adjoint()});
    DensityMatrix a = apply_decoherence(rho, t_gauss, equiv_t);
    Matrix b = qbm_exact_position(space, 1.0, equiv_dpp, 0.0, rho.op.matrix, equiv_t,
                                  /*free_motion=*/false);
    push_check(c_out, "levy_qbm_equivalence", max_abs(a.op.matrix - b), 1e-12,
               "Gaussian triplet against momentum-diffusion dephasing, D=2 Dpp/hbar^2");
  }

  if (art) {
    Csv csv({"t", "x", "re", "im", "abs"});
    for (double t : times)
      for (int i = 0; i < n; ++i) {
        Complex f = decoherence_factor(t_mixed, t, xs(i));
        csv.row({t, xs(i), f.real(), f.imag(), std::abs(f)});
      }
    art->add("levy_phi_surface.csv", csv.text);
  }
  return c_out;
}

// ---- quantum-jump Monte Carlo convergence -------------------------------------

Checks eval_jumps(const json& prm, Artifacts* art, int workers) {
  std::uint64_t seed = prm.at("seed").get<std::uint64_t>();
  std::vector<long long> counts = prm.at("counts").get<std::vector<long long>>();
  int blocks = prm.at("blocks").get<int>();

  struct Case {
    std::string name;
    LindbladGenerator gen;
    Vector psi0;
    double t;
    Operator obs;
    DensityMatrix exact;
  };
  std::vector<Case> cases;
  {
    TwoLevelParams p;
    p.eta = prm.at("qubit_eta").get<double>();
    double nb = prm.at("qubit_n_beta").get<double>();
    if (nb == 0.0)
      p.zero_temperature = true;
    else
      p.beta = std::log(1.0 + 1.0 / nb) / p.omega;
    HilbertSpace space = HilbertSpace::qubit();
    LindbladGenerator gen = two_level_generator(p);
    Vector psi0 = Vector::Zero(2);
    psi0(1) = 1.0;
    Matrix pe = Matrix::Zero(2, 2);
    pe(1, 1) = 1.0;
    double t = prm.at("qubit_t").get<double>();
    DensityMatrix exact =
        evolve_expm(gen, make_density(Operator{space, psi0 * psi0.adjoint()}), t);
    cases.push_back({"qubit", gen, psi0, t, Operator{space, pe}, exact});
  }
  {
    DHOParams p;
    p.dim = prm.at("dho_dim").get<int>();
    p.eta = prm.at("dho_eta").get<double>();
    p.beta = prm.at("dho_beta").get<double>();
    HilbertSpace space = HilbertSpace::fock(p.dim);
    LindbladGenerator gen = dho_generator(p);
    Vector psi0 = Vector::Zero(p.dim);
    psi0(prm.at("dho_initial_fock").get<int>()) = 1.0;
    double t = prm.at("dho_t").get<double>();
    DensityMatrix exact =
        evolve_expm(gen, make_density(Operator{space, psi0 * psi0.adjoint()}), t);
    cases.push_back({"oscillator", gen, psi0, t, fock_ops(space).number, exact});
  }

  Checks c_out;
  SplitMix64 seeder(seed);
  for (const Case& cs : cases) {
    std::vector<double> log_n, log_rms;
    Csv csv({"n", "rms_error"});
    long long lost_total = 0;
    for (long long n : counts) {
      double s2 = 0.0;
      for (int b = 0; b < blocks; ++b) {
        JumpConfig cfg;
        cfg.n_trajectories = n;
        cfg.master_seed = seeder.next();
        cfg.workers = workers;
        cfg.keep_records = (art && cs.name == "qubit" && n == counts.front() && b == 0);
        JumpResult res = unravel_jumps(cs.gen, cs.psi0, cs.t, cfg, cs.obs);
        lost_total += res.lost;
        double err = trace_norm(res.rho_avg.op.matrix - cs.exact.op.matrix);
        s2 += err * err;
        if (cfg.keep_records) {
          std::string lines;
          for (const TrajectoryRecord& rec : res.records) {
            json row;
            row["trajectory_id"] = rec.trajectory_id;
            row["jump_times"] = rec.jump_times;
            row["channels"] = rec.channels;
            lines += row.dump() + "\n";
          }
          art->add("trajectories_" + cs.name + ".jsonl", lines);
        }
        if (n == counts.back() && b == 0) {
          const std::vector<double>& sm = res.observable_samples;
          double mean = 0.0;
          for (double v : sm) mean += v;
          mean /= double(sm.size());
          double var = 0.0;
          for (double v : sm) var += (v - mean) * (v - mean);
          var /= double(sm.size() - 1);
          double se = std::sqrt(var / double(sm.size()));
          double target = (cs.obs.matrix * cs.exact.op.matrix).trace().real();
          push_check(c_out, "jump_" + cs.name + "_three_se_ratio",
                     std::abs(mean - target) / (3.0 * se), 1.0,
                     "mean=" + fmt17(mean) + " target=" + fmt17(target) +
                         " se=" + fmt17(se) + " n=" + std::to_string(n));
        }
      }
      double rms = std::sqrt(s2 / double(blocks));
      csv.row({double(n), rms});
      log_n.push_back(std::log10(double(n)));
      log_rms.push_back(std::log10(rms));
    }
    double slope = fit_slope(log_n, log_rms);
    push_check(c_out, "jump_" + cs.name + "_convergence_slope", std::abs(slope + 0.5),
               0.15, "fitted slope " + fmt17(slope) + " over n in {1e2,1e3,1e4}");
    push_check(c_out, "jump_" + cs.name + "_lost_trajectories", double(lost_total), 0.0,
               "trajectories abandoned by the norm floor");
    if (art) art->add("jump_convergence_" + cs.name + ".csv", csv.text);
  }
  return c_out;
}

// ---- scenario registry ---------------------------------------------------------

struct ScenarioInfo {
  const char* description;
  const char* defaults;
};

const std::map<std::string, ScenarioInfo>& registry() {
  static const std::map<std::string, ScenarioInfo> m = {
      {"dho_moments",
       {"Damped oscillator mean amplitude and occupation against closed-form decay",
        R"({"dim":40,"omega":1.0,"beta":1.0,"eta":0.2,"alpha_re":1.0,"alpha_im":0.0,"n_times":26,"rel_tol":1e-10})"}},
      {"dho_cat",
       {"Cat-state coherence suppression against the zero-temperature closed form",
        R"({"dim":40,"omega":1.0,"eta":0.4,"alphas":[0.5,1.0,1.5],"eta_t":[0.0,0.25,0.5,1.0,2.0,4.0],"rel_tol":1e-10})"}},
      {"two_level",
       {"Two-level thermal relaxation and coherence decay against exact solutions",
        R"({"omega":1.0,"eta":1.0,"n_beta":[0.0,0.5,2.0],"times":[0.1,0.5,1.0,2.0,5.0]})"}},
      {"rotation_covariant",
       {"Rotation-covariant qubit generator identities and two-level reduction",
        R"({"c_minus":0.3,"c_zero":0.2,"c_plus":0.1,"hamiltonian_coeff":0.7,"seed":20240817})"}},
      {"covariance_audit",
       {"Symmetry covariance residuals, Weyl relations, and Choi positivity",
        R"({"grid_n":64,"dx":1.0,"dho_dim":40,"choi_grid_n":16,"seed":20240817})"}},
      {"qlbe_gibbs",
       {"Stationarity of thermal states and linear Boltzmann structure checks",
        R"({"grid_n":64,"dx":1.0,"mass_test":1.0,"mass_gas":1.0,"beta":2.0,"rate_scale":0.01,"max_multiple":2,"dho_dim":40,"dho_eta":0.2,"dho_beta":1.0,"seed":20240817})"}},
      {"qbm_moments",
       {"Brownian-motion four-term identity and friction-rate recovery",
        R"({"grid_n":64,"dx":1.0,"mass":1.0,"eta":0.3,"beta":20.0,"sigma_x":3.0,"p0_cells":8,"t_final":4.0,"n_times":11,"identity_grid_n":16,"rel_tol":1e-10})"}},
      {"qbm_exact",
       {"Frictionless Brownian motion against exact characteristic-function solutions",
        R"({"grid_n":64,"dx":1.0,"mass":0.25,"dpp":0.0125,"dxx":0.25,"sigma_x":3.0,"p0_cells":4,"times":[1.0,2.0,3.0,4.0],"rel_tol":1e-10})"}},
      {"povm_joint",
       {"Joint position-momentum POVM frame, marginals, and instrument duality",
        R"({"grid_n":64,"dx":1.0,"sigma_cells":2.0,"seed":20240817})"}},
      {"instrument_repeat",
       {"Von Neumann instrument repeatability, composition, and duality",
        R"({"grid_n":32,"dx":1.0,"bins":8,"seed":20240817})"}},
      {"levy_surface",
       {"Levy-Khintchine decoherence-factor invariants and Bochner positivity",
        R"({"grid_n":64,"dx":1.0,"drift":0.3,"gaussian":0.25,"jumps":[[0.8,0.4],[-1.3,0.25],[2.1,0.15]],"times":[0.1,1.0,10.0],"equiv_dpp":0.25,"equiv_t":1.0})"}},
      {"jump_convergence",
       {"Quantum-jump Monte Carlo convergence rate and standard-error consistency",
        R"({"seed":20240817,"counts":[100,1000,10000],"blocks":5,"qubit_eta":1.0,"qubit_n_beta":0.5,"qubit_t":1.0,"dho_dim":20,"dho_eta":0.4,"dho_beta":1.0,"dho_t":2.0,"dho_initial_fock":3})"}},
  };
  return m;
}

json merged_params(const std::string& scenario, const json& user) {
  json p = json::parse(registry().at(scenario).defaults);
  if (user.is_object())
    for (auto it = user.begin(); it != user.end(); ++it) p[it.key()] = it.value();
  return p;
}

// ---- validation (no numerics) ---------------------------------------------------

void need_number(const json& p, const std::string& key, bool positive,
                 std::vector<std::string>& out) {
  if (!p.contains(key) || !p.at(key).is_number()) {
    out.push_back("params." + key + ": must be a number");
    return;
  }
  if (positive && !(p.at(key).get<double>() > 0.0))
    out.push_back("params." + key + ": must be positive (got " +
                  fmt_short(p.at(key).get<double>()) + ")");
}

void need_int_min(const json& p, const std::string& key, long long lo,
                  std::vector<std::string>& out) {
  if (!p.contains(key) || !p.at(key).is_number_integer()) {
    out.push_back("params." + key + ": must be an integer");
    return;
  }
  if (p.at(key).get<long long>() < lo)
    out.push_back("params." + key + ": must be >= " + std::to_string(lo));
}

void need_pow2(const json& p, const std::string& key, std::vector<std::string>& out) {
  if (!p.contains(key) || !p.at(key).is_number_integer()) {
    out.push_back("params." + key + ": must be an integer");
    return;
  }
  long long v = p.at(key).get<long long>();
  if (v < 4 || (v & (v - 1)) != 0)
    out.push_back("params." + key + ": must be a power of two >= 4");
}

void need_number_list(const json& p, const std::string& key, bool positive,
                      std::vector<std::string>& out) {
  if (!p.contains(key) || !p.at(key).is_array() || p.at(key).empty()) {
    out.push_back("params." + key + ": must be a nonempty array of numbers");
    return;
  }
  for (const auto& v : p.at(key)) {
    if (!v.is_number()) {
      out.push_back("params." + key + ": must contain only numbers");
      return;
    }
    if (positive && !(v.get<double>() > 0.0)) {
      out.push_back("params." + key + ": entries must be positive");
      return;
    }
  }
}

void validate_params(const std::string& scenario, const json& p,
                     std::vector<std::string>& out) {
  if (scenario == "dho_moments") {
    need_int_min(p, "dim", 2, out);
    need_number(p, "omega", true, out);
    need_number(p, "beta", true, out);
    need_number(p, "eta", true, out);
    need_int_min(p, "n_times", 2, out);
    need_number(p, "rel_tol", true, out);
  } else if (scenario == "dho_cat") {
    need_int_min(p, "dim", 2, out);
    need_number(p, "omega", true, out);
    need_number(p, "eta", true, out);
    need_number_list(p, "alphas", true, out);
    need_number_list(p, "eta_t", false, out);
    need_number(p, "rel_tol", true, out);
  } else if (scenario == "two_level") {
    need_number(p, "omega", true, out);
    need_number(p, "eta", true, out);
    need_number_list(p, "times", false, out);
    if (p.contains("n_beta") && p.at("n_beta").is_array()) {
      for (const auto& v : p.at("n_beta"))
        if (!v.is_number() || v.get<double>() < 0.0)
          out.push_back("params.n_beta: occupations must be >= 0");
    } else {
      out.push_back("params.n_beta: must be an array of occupations");
    }
  } else if (scenario == "rotation_covariant") {
    for (const char* k : {"c_minus", "c_zero", "c_plus"}) {
      if (!p.contains(k) || !p.at(k).is_number() || p.at(k).get<double>() < 0.0)
        out.push_back(std::string("params.") + k + ": rate must be >= 0");
    }
    need_number(p, "hamiltonian_coeff", false, out);
  } else if (scenario == "covariance_audit") {
    need_pow2(p, "grid_n", out);
    need_pow2(p, "choi_grid_n", out);
    need_number(p, "dx", true, out);
    need_int_min(p, "dho_dim", 4, out);
  } else if (scenario == "qlbe_gibbs" || scenario == "qlbe_structure") {
    need_pow2(p, "grid_n", out);
    need_number(p, "dx", true, out);
    need_number(p, "mass_test", true, out);
    need_number(p, "mass_gas", true, out);
    need_number(p, "beta", true, out);
    need_number(p, "rate_scale", true, out);
    need_int_min(p, "max_multiple", 1, out);
    need_int_min(p, "dho_dim", 2, out);
    need_number(p, "dho_eta", true, out);
    need_number(p, "dho_beta", true, out);
    if (p.contains("grid_n") && p.at("grid_n").is_number_integer() &&
        p.contains("max_multiple") && p.at("max_multiple").is_number_integer() &&
        p.at("max_multiple").get<long long>() >= p.at("grid_n").get<long long>() / 2)
      out.push_back("params.max_multiple: momentum transfer leaves the lattice");
    if (p.contains("transfers")) {
      if (!p.at("transfers").is_array()) {
        out.push_back("params.transfers: must be an array of [q, re, im] rows");
      } else if (p.contains("grid_n") && p.at("grid_n").is_number_integer() &&
                 p.contains("dx") && p.at("dx").is_number()) {
        double dp = 2.0 * M_PI / (p.at("grid_n").get<double>() * p.at("dx").get<double>());
        int i = 0;
        for (const auto& row : p.at("transfers")) {
          if (!row.is_array() || row.size() != 3 || !row.at(0).is_number()) {
            out.push_back("params.transfers[" + std::to_string(i) +
                          "]: must be [q, re, im]");
          } else {
            double q = row.at(0).get<double>();
            double cells = q / dp;
            if (q == 0.0)
              out.push_back("params.transfers[" + std::to_string(i) +
                            "]: zero momentum transfer singularity");
            else if (std::abs(cells - std::round(cells)) > 1e-9)
              out.push_back("params.transfers[" + std::to_string(i) +
                            "]: off-lattice momentum transfer (dp=" + fmt_short(dp) + ")");
          }
          ++i;
        }
      }
    }
  } else if (scenario == "qbm_moments") {
    need_pow2(p, "grid_n", out);
    need_pow2(p, "identity_grid_n", out);
    need_number(p, "dx", true, out);
    need_number(p, "mass", true, out);
    need_number(p, "eta", true, out);
    need_number(p, "beta", true, out);
    need_number(p, "sigma_x", true, out);
    need_number(p, "t_final", true, out);
    need_int_min(p, "n_times", 3, out);
    need_number(p, "rel_tol", true, out);
  } else if (scenario == "qbm_exact") {
    need_pow2(p, "grid_n", out);
    need_number(p, "dx", true, out);
    need_number(p, "mass", true, out);
    need_number(p, "dpp", true, out);
    need_number(p, "dxx", true, out);
    need_number(p, "sigma_x", true, out);
    need_number(p, "rel_tol", true, out);
    need_number_list(p, "times", true, out);
  } else if (scenario == "povm_joint") {
    need_pow2(p, "grid_n", out);
    need_number(p, "dx", true, out);
    need_number(p, "sigma_cells", true, out);
  } else if (scenario == "instrument_repeat") {
    need_pow2(p, "grid_n", out);
    need_number(p, "dx", true, out);
    need_int_min(p, "bins", 2, out);
    if (p.contains("grid_n") && p.at("grid_n").is_number_integer() &&
        p.contains("bins") && p.at("bins").is_number_integer()) {
      long long n = p.at("grid_n").get<long long>(), b = p.at("bins").get<long long>();
      if (b > 0 && n % b != 0)
        out.push_back("params.bins: must divide grid_n");
    }
  } else if (scenario == "levy_surface") {
    need_pow2(p, "grid_n", out);
    need_number(p, "dx", true, out);
    need_number(p, "drift", false, out);
    need_number_list(p, "times", true, out);
    need_number(p, "equiv_dpp", true, out);
    need_number(p, "equiv_t", true, out);
    if (!p.contains("gaussian") || !p.at("gaussian").is_number() ||
        p.at("gaussian").get<double>() < 0.0)
      out.push_back("params.gaussian: diffusion coefficient must be >= 0");
    if (!p.contains("jumps") || !p.at("jumps").is_array()) {
      out.push_back("params.jumps: must be an array of [q, weight] rows");
    } else {
      int i = 0;
      for (const auto& row : p.at("jumps")) {
        if (!row.is_array() || row.size() != 2 || !row.at(0).is_number() ||
            !row.at(1).is_number())
          out.push_back("params.jumps[" + std::to_string(i) + "]: must be [q, weight]");
        else if (row.at(1).get<double>() < 0.0)
          out.push_back("params.jumps[" + std::to_string(i) + "]: weight must be >= 0");
        ++i;
      }
    }
  } else if (scenario == "jump_convergence") {
    need_int_min(p, "blocks", 2, out);
    need_number(p, "qubit_eta", true, out);
    need_number(p, "qubit_t", true, out);
    need_int_min(p, "dho_dim", 2, out);
    need_number(p, "dho_eta", true, out);
    need_number(p, "dho_beta", true, out);
    need_number(p, "dho_t", true, out);
    need_int_min(p, "dho_initial_fock", 0, out);
    if (!p.contains("qubit_n_beta") || !p.at("qubit_n_beta").is_number() ||
        p.at("qubit_n_beta").get<double>() < 0.0)
      out.push_back("params.qubit_n_beta: must be >= 0");
    if (!p.contains("counts") || !p.at("counts").is_array() || p.at("counts").size() < 2) {
      out.push_back("params.counts: must list at least two trajectory counts");
    } else {
      long long prev = 0;
      for (const auto& v : p.at("counts")) {
        if (!v.is_number_integer() || v.get<long long>() < 1) {
          out.push_back("params.counts: entries must be positive integers");
          break;
        }
        if (v.get<long long>() <= prev) {
          out.push_back("params.counts: entries must be strictly increasing");
          break;
        }
        prev = v.get<long long>();
      }
    }
    if (p.contains("dho_dim") && p.at("dho_dim").is_number_integer() &&
        p.contains("dho_initial_fock") && p.at("dho_initial_fock").is_number_integer() &&
        p.at("dho_initial_fock").get<long long>() >= p.at("dho_dim").get<long long>())
      out.push_back("params.dho_initial_fock: must lie below dho_dim");
  }
  if (p.contains("seed") &&
      (!p.at("seed").is_number_integer() || p.at("seed").get<long long>() < 0))
    out.push_back("params.seed: must be a nonnegative integer");
}

Checks dispatch(const std::string& scenario, const json& p, Artifacts* art, int workers) {
  Checks c;
  if (scenario == "dho_moments") {
    c = eval_dho_moments(p, art);
  } else if (scenario == "dho_cat") {
    c = eval_dho_cat(p, art);
  } else if (scenario == "two_level") {
    c = eval_two_level(p, art);
  } else if (scenario == "rotation_covariant") {
    c = eval_rotation_covariant(p, art);
  } else if (scenario == "covariance_audit") {
    c = eval_covariance(p, art);
    append_checks(c, eval_choi(p, art));
  } else if (scenario == "qlbe_gibbs") {
    c = eval_stationary(p, art);
    append_checks(c, eval_qlbe_structure(p, art));
  } else if (scenario == "qbm_moments") {
    c = eval_qbm_identity(p, art);
    append_checks(c, eval_qbm_fit(p, art));
  } else if (scenario == "qbm_exact") {
    c = eval_qbm_exact(p, art);
  } else if (scenario == "povm_joint") {
    c = eval_povm(p, art);
  } else if (scenario == "instrument_repeat") {
    c = eval_instrument(p, art);
  } else if (scenario == "levy_surface") {
    c = eval_levy(p, art);
  } else if (scenario == "jump_convergence") {
    c = eval_jumps(p, art, workers);
  } else {
    throw Error("invalid argument: unknown scenario '" + scenario + "'");
  }
  return c;
}

json checks_to_json(const Checks& checks) {
  json rows = json::array();
  for (const CriterionCheck& k : checks) {
    json row;
    row["relation"] = k.name;
    row["params"] = k.detail;
    row["residual"] = k.value;
    row["tolerance"] = k.tolerance;
    row["pass"] = k.pass;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

bool ScenarioResult::all_pass() const {
  for (const CriterionCheck& k : checks)
    if (!k.pass) return false;
  return true;
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, info] : registry()) v.push_back(k);
    return v;
  }();
  return names;
}

std::string scenario_description(const std::string& name) {
  auto it = registry().find(name);
  if (it == registry().end())
    throw Error("invalid argument: unknown scenario '" + name + "'");
  return it->second.description;
}

std::string scenario_defaults_json(const std::string& name) {
  auto it = registry().find(name);
  if (it == registry().end())
    throw Error("invalid argument: unknown scenario '" + name + "'");
  return json::parse(it->second.defaults).dump();
}

std::string scenario_catalog_json() {
  json rows = json::array();
  for (const auto& [name, info] : registry()) {
    json row;
    row["name"] = name;
    row["description"] = info.description;
    row["defaults"] = json::parse(info.defaults);
    rows.push_back(row);
  }
  return rows.dump(2) + "\n";
}

std::vector<std::string> validate_config_text(const std::string& config_json) {
  std::vector<std::string> out;
  json cfg = json::parse(config_json, nullptr, false);
  if (cfg.is_discarded()) {
    out.push_back("config: not valid JSON");
    return out;
  }
  if (!cfg.is_object()) {
    out.push_back("config: must be a JSON object");
    return out;
  }
  if (!cfg.contains("scenario") || !cfg.at("scenario").is_string()) {
    out.push_back("scenario: required string field");
    return out;
  }
  std::string scenario = cfg.at("scenario").get<std::string>();
  if (registry().find(scenario) == registry().end()) {
    out.push_back("scenario: unknown scenario '" + scenario + "'");
    return out;
  }
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    if (it.key() != "scenario" && it.key() != "params")
      out.push_back(it.key() + ": unknown top-level field");
  }
  json user = cfg.value("params", json::object());
  if (!user.is_object()) {
    out.push_back("params: must be a JSON object");
    return out;
  }
  json defaults = json::parse(registry().at(scenario).defaults);
  for (auto it = user.begin(); it != user.end(); ++it) {
    if (!defaults.contains(it.key()) && it.key() != "transfers" && it.key() != "seed")
      out.push_back("params." + it.key() + ": unknown parameter for scenario '" +
                    scenario + "'");
  }
  validate_params(scenario, merged_params(scenario, user), out);
  return out;
}

ScenarioResult run_scenario_text(const std::string& config_json,
                                 const std::string& out_dir, int workers) {
  std::vector<std::string> diags = validate_config_text(config_json);
  if (!diags.empty()) {
    std::string msg = "invalid argument: " + diags.front();
    for (size_t i = 1; i < diags.size(); ++i) msg += "; " + diags[i];
    throw Error(msg);
  }
  json cfg = json::parse(config_json);
  std::string scenario = cfg.at("scenario").get<std::string>();
  json params = merged_params(scenario, cfg.value("params", json::object()));
  if (workers <= 0) workers = 1;

  ScenarioResult result;
  result.scenario = scenario;
  Artifacts art;
  auto start = std::chrono::steady_clock::now();
  result.checks = dispatch(scenario, params, &art, workers);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  art.add("checks.json", checks_to_json(result.checks).dump(2) + "\n");
  for (const auto& [name, text] : art.files) result.artifact_files.push_back(name);

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    for (const auto& [name, text] : art.files) {
      std::ofstream f(std::filesystem::path(out_dir) / name,
                      std::ios::binary | std::ios::trunc);
      f << text;
    }
    std::ofstream f(std::filesystem::path(out_dir) / "report.json",
                    std::ios::binary | std::ios::trunc);
    f << run_report_json(result, config_json);
  }
  return result;
}

std::string run_report_json(const ScenarioResult& result,
                            const std::string& config_json) {
  json r;
  r["schema"] = "qdyn-report-v1";
  r["scenario"] = result.scenario;
  char hash[32];
  std::snprintf(hash, sizeof hash, "fnv64:%016llx",
                static_cast<unsigned long long>(fnv64(config_json)));
  r["config_hash"] = hash;
  r["pass"] = result.all_pass();
  r["wall_seconds"] = result.wall_seconds;
  r["checks"] = checks_to_json(result.checks);
  r["artifacts"] = result.artifact_files;
  return r.dump(2) + "\n";
}

std::vector<CriterionCheck> evaluate_criterion(int k, int workers) {
  auto params_of = [](const char* name) { return json::parse(registry().at(name).defaults); };
  Checks c;
  switch (k) {
    case 1:
      c = eval_dho_moments(params_of("dho_moments"), nullptr);
      break;
    case 2:
      c = eval_dho_cat(params_of("dho_cat"), nullptr);
      break;
    case 3:
      c = eval_two_level(params_of("two_level"), nullptr);
      break;
    case 4:
      c = eval_covariance(params_of("covariance_audit"), nullptr);
      break;
    case 5:
      c = eval_stationary(params_of("qlbe_gibbs"), nullptr);
      break;
    case 6:
      c = eval_qbm_identity(params_of("qbm_moments"), nullptr);
      append_checks(c, eval_qbm_exact(params_of("qbm_exact"), nullptr));
      append_checks(c, eval_qbm_fit(params_of("qbm_moments"), nullptr));
      break;
    case 7:
      c = eval_qlbe_structure(params_of("qlbe_gibbs"), nullptr);
      break;
    case 8:
      c = eval_povm(params_of("povm_joint"), nullptr);
      append_checks(c, eval_instrument(params_of("instrument_repeat"), nullptr));
      break;
    case 9:
      c = eval_levy(params_of("levy_surface"), nullptr);
      break;
    case 10:
      c = eval_jumps(params_of("jump_convergence"), nullptr, workers);
      break;
    case 11:
      c = eval_choi(params_of("covariance_audit"), nullptr);
      break;
    default:
      throw Error("invalid argument: criterion out of range");
  }
  return c;
}

std::uint64_t fnv64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace qdyn
