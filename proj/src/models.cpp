// SPDX-License-Identifier: Apache-2.0

#include "qdyn/models.hpp"

#include <cmath>
#include <limits>

namespace qdyn {

namespace {

double occupation(double omega, double beta, bool zero_temperature, double hbar) {
  if (zero_temperature || std::isinf(beta)) return 0.0;
  return thermal_occupation(omega, beta, hbar);
}

int signed_index(int k, int n) { return k < n / 2 ? k : k - n; }
int wrap_index(int s, int n) { return ((s % n) + n) % n; }

Matrix to_momentum(const Matrix& f, const Matrix& rho_x) {
  return f * rho_x * f.adjoint();
}

Superoperator left_mult(const Operator& a) {
  Matrix id = Matrix::Identity(a.space.dim(), a.space.dim());
  return sandwich_superop(a, Operator{a.space, id});
}

Superoperator right_mult(const Operator& b) {
  Matrix id = Matrix::Identity(b.space.dim(), b.space.dim());
  return sandwich_superop(Operator{b.space, id}, b);
}

Superoperator commutator_superop(const Operator& a) {
  return add(left_mult(a), scale(-1.0, right_mult(a)));
}

Superoperator anticommutator_superop(const Operator& a) {
  return add(left_mult(a), right_mult(a));
}

}  // namespace

double thermal_occupation(double omega, double beta, double hbar) {
  double x = beta * hbar * omega;
  if (!(x > 0.0)) throw Error("invalid temperature");
  if (std::isinf(x)) return 0.0;
  return 1.0 / std::expm1(x);
}

DensityMatrix thermal_fock_state(const HilbertSpace& space, double omega,
                                 double beta, bool zero_temperature) {
  if (space.kind() != SpaceKind::Fock) throw Error("space mismatch");
  int d = space.dim();
  Matrix w = Matrix::Zero(d, d);
  if (zero_temperature || std::isinf(beta)) {
    w(0, 0) = 1.0;
    return make_density(Operator{space, w});
  }
  if (!(beta * space.hbar() * omega > 0.0)) throw Error("invalid temperature");
  double z = 0.0;
  for (int k = 0; k < d; ++k) z += std::exp(-beta * space.hbar() * omega * k);
  for (int k = 0; k < d; ++k)
    w(k, k) = std::exp(-beta * space.hbar() * omega * k) / z;
  return make_density(Operator{space, w});
}

DensityMatrix thermal_qubit_state(const HilbertSpace& space, double omega,
                                  double beta, bool zero_temperature) {
  if (space.kind() != SpaceKind::Qubit) throw Error("space mismatch");
  Matrix w = Matrix::Zero(2, 2);
  if (zero_temperature || std::isinf(beta)) {
    w(0, 0) = 1.0;
    return make_density(Operator{space, w});
  }
  if (!(beta * space.hbar() * omega > 0.0)) throw Error("invalid temperature");
  double g = std::exp(-beta * space.hbar() * omega);
  w(0, 0) = 1.0 / (1.0 + g);
  w(1, 1) = g / (1.0 + g);
  return make_density(Operator{space, w});
}

DensityMatrix maxwell_momentum_state(const HilbertSpace& space, double mass,
                                     double beta) {
  const GridGeometry& g = space.grid();
  if (!(mass > 0.0)) throw Error("invalid argument: mass");
  if (!(beta > 0.0) || std::isinf(beta)) throw Error("invalid temperature");
  RealVector p = momentum_lattice(space);
  Vector w(g.n_points);
  double z = 0.0;
  for (int k = 0; k < g.n_points; ++k) {
    double e = std::exp(-beta * p(k) * p(k) / (2.0 * mass));
    w(k) = e;
    z += e;
  }
  w /= z;
  Matrix f = dft_matrix(space);
  Matrix diag = w.asDiagonal();
  return make_density(Operator{space, f.adjoint() * diag * f});
}

Vector coherent_vector(const HilbertSpace& space, Complex alpha) {
  if (space.kind() != SpaceKind::Fock) throw Error("space mismatch");
  Vector c(space.dim());
  c(0) = std::exp(-0.5 * std::norm(alpha));
  for (int k = 1; k < space.dim(); ++k) c(k) = c(k - 1) * alpha / std::sqrt(double(k));
  return c;
}

double coherent_leakage(const HilbertSpace& space, Complex alpha) {
  return 1.0 - coherent_vector(space, alpha).squaredNorm();
}

Vector gaussian_packet(const HilbertSpace& space, double x0, double p0,
                       double sigma_x) {
  const GridGeometry& g = space.grid();
  if (!(sigma_x > 0.0)) throw Error("invalid argument: packet width");
  RealVector x = position_lattice(space);
  Vector psi(g.n_points);
  for (int j = 0; j < g.n_points; ++j) {
    double d = x(j) - x0;
    double ph = p0 * x(j) / space.hbar();
    psi(j) = std::exp(-d * d / (4.0 * sigma_x * sigma_x)) *
             Complex(std::cos(ph), std::sin(ph));
  }
  psi /= psi.norm();
  return psi;
}

LindbladGenerator dho_generator(const DHOParams& p) {
  if (!(p.omega > 0.0) || !(p.eta > 0.0)) throw Error("invalid argument: rates");
  HilbertSpace space = HilbertSpace::fock(p.dim);
  double nb = occupation(p.omega, p.beta, p.zero_temperature, space.hbar());
  FockOps ops = fock_ops(space);
  Operator h{space, space.hbar() * p.omega * ops.number.matrix};
  std::vector<Operator> ls;
  ls.push_back(Operator{space, std::sqrt(p.eta * (nb + 1.0)) * ops.a.matrix});
  if (nb > 0.0)
    ls.push_back(Operator{space, std::sqrt(p.eta * nb) * ops.a_dagger.matrix});
  return make_generator(h, ls);
}

Complex dho_mean_amplitude(const DHOParams& p, Complex a0, double t) {
  return a0 * std::exp(Complex(-0.5 * p.eta * t, -p.omega * t));
}

double dho_mean_number(const DHOParams& p, double n0, double t) {
  double nb = occupation(p.omega, p.beta, p.zero_temperature, 1.0);
  double decay = std::exp(-p.eta * t);
  return n0 * decay + nb * (1.0 - decay);
}

double dho_cat_coherence(Complex alpha, Complex beta_amp, double eta, double t) {
  double sep = std::norm(alpha - beta_amp);
  return std::exp(-0.5 * sep * (1.0 - std::exp(-eta * t)));
}

LindbladGenerator shift_covariant_generator(const ShiftCovParams& p) {
  int m_max = int(p.eta_m.size());
  if (2 * m_max >= p.dim) throw Error("truncation too small");
  HilbertSpace space = HilbertSpace::fock(p.dim);
  double nb = occupation(p.omega, p.beta, p.zero_temperature, space.hbar());
  FockOps ops = fock_ops(space);
  Operator h{space, space.hbar() * p.omega * ops.number.matrix};
  std::vector<Operator> ls;
  if (p.eta_0 > 0.0)
    ls.push_back(Operator{space, std::sqrt(2.0 * p.eta_0) * ops.number.matrix});
  Matrix am = Matrix::Identity(p.dim, p.dim);
  for (int m = 1; m <= m_max; ++m) {
    am = am * ops.a.matrix;  // a^m
    double eta_m = p.eta_m[m - 1];
    if (eta_m < 0.0) throw Error("invalid argument: rates");
    if (eta_m == 0.0) continue;
    ls.push_back(Operator{space, std::sqrt(eta_m * std::pow(nb + 1.0, m)) * am});
    if (nb > 0.0)
      ls.push_back(Operator{
          space, std::sqrt(eta_m * std::pow(nb, m)) * Matrix(am.adjoint())});
  }
  return make_generator(h, ls);
}

LindbladGenerator two_level_generator(const TwoLevelParams& p) {
  if (!(p.omega > 0.0) || !(p.eta > 0.0)) throw Error("invalid argument: rates");
  HilbertSpace space = HilbertSpace::qubit();
  double nb = occupation(p.omega, p.beta, p.zero_temperature, space.hbar());
  PauliOps ops = pauli_ops(space);
  Operator h{space, 0.5 * space.hbar() * p.omega * ops.sigma_z.matrix};
  std::vector<Operator> ls;
  ls.push_back(
      Operator{space, std::sqrt(p.eta * (nb + 1.0)) * ops.sigma_minus.matrix});
  if (nb > 0.0)
    ls.push_back(Operator{space, std::sqrt(p.eta * nb) * ops.sigma_plus.matrix});
  return make_generator(h, ls);
}

TwoLevelOracle two_level_oracles(const TwoLevelParams& p,
                                 const DensityMatrix& rho0, double t) {
  double nb = occupation(p.omega, p.beta, p.zero_temperature, 1.0);
  double eta_bar = p.eta * (2.0 * nb + 1.0);
  double decay = std::exp(-eta_bar * t);
  TwoLevelOracle out;
  double pe0 = rho0.op.matrix(1, 1).real();
  out.excited_population = pe0 * decay + nb / (2.0 * nb + 1.0) * (1.0 - decay);
  Complex c0 = rho0.op.matrix(1, 0);
  out.coherence = c0 * std::exp(Complex(-0.5 * eta_bar * t, -p.omega * t));
  return out;
}

LindbladGenerator rotation_covariant_generator(const RotCovParams& p) {
  if (p.c_minus < 0.0 || p.c_zero < 0.0 || p.c_plus < 0.0)
    throw Error("invalid argument: rates");
  HilbertSpace space = HilbertSpace::qubit();
  PauliOps ops = pauli_ops(space);
  const Complex i(0.0, 1.0);
  double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Matrix t_plus = -(ops.sigma_x.matrix + i * ops.sigma_y.matrix) * inv_sqrt2;
  Matrix t_zero = ops.sigma_z.matrix;
  Matrix t_minus = (ops.sigma_x.matrix - i * ops.sigma_y.matrix) * inv_sqrt2;
  Operator h{space, p.hamiltonian_coeff * ops.sigma_z.matrix};
  std::vector<Operator> ls;
  if (p.c_plus > 0.0) ls.push_back(Operator{space, std::sqrt(p.c_plus) * t_plus});
  if (p.c_zero > 0.0) ls.push_back(Operator{space, std::sqrt(p.c_zero) * t_zero});
  if (p.c_minus > 0.0)
    ls.push_back(Operator{space, std::sqrt(p.c_minus) * t_minus});
  return make_generator(h, ls);
}

double qbm_dpp(const QBMParams& p) { return p.eta * p.mass / p.beta; }

double qbm_dxx(const QBMParams& p) {
  double hbar = p.grid.hbar();
  return p.eta * p.beta * hbar * hbar / (16.0 * p.mass);
}

double qbm_thermal_length(const QBMParams& p) {
  double hbar = p.grid.hbar();
  return std::sqrt(p.beta * hbar * hbar / (4.0 * p.mass));
}

LindbladGenerator qbm_generator(const QBMParams& p) {
  const GridGeometry& g = p.grid.grid();
  if (!(p.mass > 0.0)) throw Error("invalid argument: mass");
  if (!(p.beta > 0.0) || std::isinf(p.beta)) throw Error("invalid temperature");
  if (p.eta < 0.0) throw Error("invalid argument: rates");
  double hbar = p.grid.hbar();
  GridOps ops = grid_ops(p.grid);
  Matrix h0 = ops.p_hat.matrix * ops.p_hat.matrix / (2.0 * p.mass);
  std::vector<Operator> ls;
  Matrix h = h0;
  if (p.include_friction) {
    double lam = qbm_thermal_length(p);
    if (lam < 2.0 * g.dx) throw Error("thermal length unresolved");
    h += (p.eta / 4.0) * (ops.x_hat.matrix * ops.p_hat.matrix +
                          ops.p_hat.matrix * ops.x_hat.matrix);
    if (p.eta > 0.0) {
      Matrix a = (ops.x_hat.matrix +
                  Complex(0.0, 1.0) * (lam * lam / hbar) * ops.p_hat.matrix) /
                 (std::sqrt(2.0) * lam);
      ls.push_back(Operator{p.grid, std::sqrt(p.eta) * a});
    }
  } else {
    double dpp = qbm_dpp(p);
    double dxx = qbm_dxx(p);
    if (dpp > 0.0)
      ls.push_back(Operator{p.grid, std::sqrt(2.0 * dpp) / hbar * ops.x_hat.matrix});
    if (dxx > 0.0)
      ls.push_back(Operator{p.grid, std::sqrt(2.0 * dxx) / hbar * ops.p_hat.matrix});
  }
  return make_generator(Operator{p.grid, h}, ls);
}

Superoperator qbm_four_term_superop(const QBMParams& p) {
  double hbar = p.grid.hbar();
  GridOps ops = grid_ops(p.grid);
  Operator h0{p.grid, Matrix(ops.p_hat.matrix * ops.p_hat.matrix / (2.0 * p.mass))};
  const Complex i(0.0, 1.0);
  Superoperator comm_x = commutator_superop(ops.x_hat);
  Superoperator comm_p = commutator_superop(ops.p_hat);
  Superoperator s = scale(-i / hbar, commutator_superop(h0));
  s = add(s, scale(-i / hbar * (p.eta / 2.0),
                   compose(comm_x, anticommutator_superop(ops.p_hat))));
  s = add(s, scale(-qbm_dpp(p) / (hbar * hbar), compose(comm_x, comm_x)));
  s = add(s, scale(-qbm_dxx(p) / (hbar * hbar), compose(comm_p, comm_p)));
  return s;
}

QBMMoments qbm_moment_oracles(const QBMParams& p, const DensityMatrix& rho0,
                              double t) {
  GridOps ops = grid_ops(p.grid);
  double p0 = (ops.p_hat.matrix * rho0.op.matrix).trace().real();
  double e0 = (ops.p_hat.matrix * ops.p_hat.matrix * rho0.op.matrix).trace().real() /
              (2.0 * p.mass);
  QBMMoments out;
  out.mean_p = p0 * std::exp(-p.eta * t);
  double decay2 = std::exp(-2.0 * p.eta * t);
  out.mean_energy = e0 * decay2 + (1.0 - decay2) / (2.0 * p.beta);
  return out;
}

Matrix qbm_exact_momentum(const HilbertSpace& space, double mass, double dpp,
                          double dxx, const Matrix& rho0, double t,
                          bool free_motion) {
  const GridGeometry& g = space.grid();
  int n = g.n_points;
  double hbar = space.hbar();
  double dp = space.dp();
  Matrix f = dft_matrix(space);
  Matrix rp = to_momentum(f, rho0);
  // Gaussian momentum-transfer kernel from the position-localization term.
  std::vector<double> w(2 * n - 1, 0.0);
  bool convolve = dpp * t > 0.0;
  if (convolve) {
    double var = 4.0 * dpp * t;
    for (int m = -(n - 1); m <= n - 1; ++m)
      w[m + n - 1] = dp * std::exp(-(m * dp) * (m * dp) / var) /
                     std::sqrt(M_PI * var);
  } else {
    w[n - 1] = 1.0;
  }
  Matrix out(n, n);
  for (int a = 0; a < n; ++a) {
    int sa = signed_index(a, n);
    for (int b = 0; b < n; ++b) {
      int sb = signed_index(b, n);
      double u = dp * (sa - sb);
      double v = dp * (sa + sb) / 2.0;
      Complex acc = 0.0;
      int lo = convolve ? -(n - 1) : 0;
      int hi = convolve ? n - 1 : 0;
      for (int m = lo; m <= hi; ++m) {
        int ka = sa - m, kb = sb - m;
        if (ka < -n / 2 || ka >= n / 2 || kb < -n / 2 || kb >= n / 2) continue;
        Complex term = w[m + n - 1] *
                       rp(wrap_index(ka, n), wrap_index(kb, n));
        if (free_motion) {
          double ph = (m * dp) * u * t / (2.0 * hbar * mass);
          term *= Complex(std::cos(ph), std::sin(ph));
        }
        acc += term;
      }
      double damp = dxx * u * u * t / (hbar * hbar);
      if (free_motion)
        damp += dpp * u * u * t * t * t / (12.0 * hbar * hbar * mass * mass);
      Complex pref = std::exp(-damp);
      if (free_motion) {
        double ph = -u * v * t / (hbar * mass);
        pref *= Complex(std::cos(ph), std::sin(ph));
      }
      out(a, b) = pref * acc;
    }
  }
  return f.adjoint() * out * f;
}

Matrix qbm_exact_position(const HilbertSpace& space, double mass, double dpp,
                          double dxx, const Matrix& rho0, double t,
                          bool free_motion) {
  const GridGeometry& g = space.grid();
  int n = g.n_points;
  double hbar = space.hbar();
  Matrix rs = rho0;
  if (free_motion) {
    Matrix f = dft_matrix(space);
    RealVector p = momentum_lattice(space);
    Vector phases(n);
    for (int k = 0; k < n; ++k) {
      double ph = -p(k) * p(k) * t / (2.0 * mass * hbar);
      phases(k) = Complex(std::cos(ph), std::sin(ph));
    }
    Matrix u_free = f.adjoint() * Matrix(phases.asDiagonal()) * f;
    rs = u_free * rho0 * u_free.adjoint();
  }
  double b_coeff = dxx;
  double factor = 1.0;
  double phase_coeff = 0.0;
  if (free_motion) {
    b_coeff += dpp * t * t / (3.0 * mass * mass);
    if (b_coeff > 0.0) {
      factor = 1.0 - (dpp * t * t / (4.0 * mass * mass)) / b_coeff;
      phase_coeff = dpp * t / (2.0 * mass * hbar * b_coeff);
    }
  }
  RealVector x = position_lattice(space);
  bool convolve = b_coeff * t > 0.0;
  std::vector<double> kg(2 * n - 1, 0.0);
  if (convolve) {
    double var = 4.0 * b_coeff * t;
    for (int m = -(n - 1); m <= n - 1; ++m) {
      double z = m * g.dx;
      kg[m + n - 1] = g.dx * std::exp(-z * z / var) / std::sqrt(M_PI * var);
    }
  } else {
    kg[n - 1] = 1.0;
  }
  Matrix out(n, n);
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      double sep = x(ix) - x(iy);
      Complex acc = 0.0;
      int lo = convolve ? -(n - 1) : 0;
      int hi = convolve ? n - 1 : 0;
      for (int m = lo; m <= hi; ++m) {
        int jx = ix - m, jy = iy - m;
        if (jx < 0 || jx >= n || jy < 0 || jy >= n) continue;
        Complex term = kg[m + n - 1] * rs(jx, jy);
        if (phase_coeff != 0.0) {
          double ph = phase_coeff * (m * g.dx) * sep;
          term *= Complex(std::cos(ph), std::sin(ph));
        }
        acc += term;
      }
      double damp = dpp * sep * sep * t * factor / (hbar * hbar);
      out(ix, iy) = std::exp(-damp) * acc;
    }
  }
  return out;
}

QBMExactForms qbm_exact_solutions(const QBMParams& p, const DensityMatrix& rho0,
                                  double t) {
  if (p.include_friction)
    throw Error("invalid argument: exact solutions are frictionless");
  require_same_space(p.grid, rho0.op.space);
  double dpp = qbm_dpp(p);
  double dxx = qbm_dxx(p);
  Matrix mp = qbm_exact_momentum(p.grid, p.mass, dpp, dxx, rho0.op.matrix, t, true);
  Matrix mx = qbm_exact_position(p.grid, p.mass, dpp, dxx, rho0.op.matrix, t, true);
  return QBMExactForms{Operator{p.grid, mp}, Operator{p.grid, mx}};
}

double dynamic_structure_factor_mb(double q, double energy, double mass_gas,
                                   double beta) {
  if (q == 0.0) throw Error("zero momentum transfer singularity");
  if (!(mass_gas > 0.0)) throw Error("invalid argument: mass");
  if (!(beta > 0.0) || std::isinf(beta)) throw Error("invalid temperature");
  double aq = std::abs(q);
  double arg = 2.0 * mass_gas * energy + q * q;
  double expo = -(beta / (8.0 * mass_gas)) * arg * arg / (q * q);
  return std::sqrt(beta * mass_gas / (2.0 * M_PI)) / aq * std::exp(expo);
}

double qlbe_energy_transfer(double q, double p, double mass_test) {
  return ((p + q) * (p + q) - p * p) / (2.0 * mass_test);
}

std::vector<MomentumTransfer> constant_t_tilde(const HilbertSpace& grid,
                                               Complex amplitude,
                                               int max_multiple) {
  double dp = grid.dp();
  std::vector<MomentumTransfer> out;
  for (int m = -max_multiple; m <= max_multiple; ++m) {
    if (m == 0) continue;
    out.push_back(MomentumTransfer{m * dp, amplitude});
  }
  return out;
}

QLBEBuild qlbe_build(const QLBEParams& p) {
  const GridGeometry& g = p.grid.grid();
  int n = g.n_points;
  if (!(p.mass_test > 0.0) || !(p.mass_gas > 0.0))
    throw Error("invalid argument: mass");
  if (!(p.beta > 0.0) || std::isinf(p.beta)) throw Error("invalid temperature");
  if (p.gas_density < 0.0) throw Error("invalid argument: gas density");
  double dp = p.grid.dp();
  Matrix f = dft_matrix(p.grid);
  RealVector plat = momentum_lattice(p.grid);
  GridOps ops = grid_ops(p.grid);
  Operator h{p.grid, Matrix(ops.p_hat.matrix * ops.p_hat.matrix / (2.0 * p.mass_test))};
  std::vector<Operator> ls;
  QLBEBuild out{LindbladGenerator{h, {}}, 0.0, 0.0};
  for (const MomentumTransfer& term : p.t_tilde) {
    double mq_real = term.q / dp;
    double mq_round = std::round(mq_real);
    if (std::abs(mq_real - mq_round) > 1e-9)
      throw Error("off-lattice momentum transfer");
    int mq = int(mq_round);
    if (mq == 0) throw Error("zero momentum transfer singularity");
    double rate = 4.0 * M_PI * M_PI * p.gas_density * std::norm(term.amplitude);
    Matrix lp = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k) {
      int s = signed_index(k, n);
      double sval = dynamic_structure_factor_mb(
          term.q, qlbe_energy_transfer(term.q, plat(k), p.mass_test),
          p.mass_gas, p.beta);
      double weight = rate * sval;
      out.total_weight += weight;
      int st = s + mq;
      if (st < -n / 2 || st >= n / 2) {
        out.dropped_weight += weight;
        continue;
      }
      lp(wrap_index(st, n), k) = std::sqrt(weight);
    }
    ls.push_back(Operator{p.grid, f.adjoint() * lp * f});
  }
  out.generator = make_generator(h, ls);
  return out;
}

Superoperator qlbe_generator(const QLBEParams& p) {
  return generator_superop(qlbe_build(p).generator);
}

Eigen::MatrixXd qlbe_population_rates(const QLBEParams& p) {
  const GridGeometry& g = p.grid.grid();
  int n = g.n_points;
  double dp = p.grid.dp();
  RealVector plat = momentum_lattice(p.grid);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
  for (const MomentumTransfer& term : p.t_tilde) {
    double mq_real = term.q / dp;
    double mq_round = std::round(mq_real);
    if (std::abs(mq_real - mq_round) > 1e-9)
      throw Error("off-lattice momentum transfer");
    int mq = int(mq_round);
    if (mq == 0) throw Error("zero momentum transfer singularity");
    double rate = 4.0 * M_PI * M_PI * p.gas_density * std::norm(term.amplitude);
    for (int k = 0; k < n; ++k) {
      int s = signed_index(k, n);
      int st = s + mq;
      if (st < -n / 2 || st >= n / 2) continue;
      double w = rate * dynamic_structure_factor_mb(
                            term.q,
                            qlbe_energy_transfer(term.q, plat(k), p.mass_test),
                            p.mass_gas, p.beta);
      r(wrap_index(st, n), k) += w;
      r(k, k) -= w;
    }
  }
  return r;
}

}  // namespace qdyn
