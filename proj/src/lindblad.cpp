// SPDX-License-Identifier: Apache-2.0

#include "qdyn/lindblad.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <atomic>
#include <bit>
#include <cmath>
#include <thread>

namespace qdyn {

namespace {

// Precomputed operator products for the hot evaluation paths.
struct CompiledGen {
  double hbar;
  Matrix H;
  std::vector<Matrix> L;
  std::vector<Matrix> Ldag;
  std::vector<Matrix> LdL;

  explicit CompiledGen(const LindbladGenerator& gen)
      : hbar(gen.space().hbar()), H(gen.H.matrix) {
    for (const Operator& l : gen.lindblad_ops) {
      L.push_back(l.matrix);
      Ldag.push_back(l.matrix.adjoint());
      LdL.push_back(Ldag.back() * L.back());
    }
  }

  Matrix apply(const Matrix& rho) const {
    Matrix out = Complex(0, -1.0 / hbar) * (H * rho - rho * H);
    for (size_t j = 0; j < L.size(); ++j) {
      out.noalias() += L[j] * rho * Ldag[j];
      out.noalias() -= 0.5 * (LdL[j] * rho);
      out.noalias() -= 0.5 * (rho * LdL[j]);
    }
    return out;
  }
};

}  // namespace

LindbladGenerator make_generator(Operator H, std::vector<Operator> lindblad_ops) {
  if (max_abs(H.matrix - H.matrix.adjoint()) > 1e-12)
    throw Error("invalid Hamiltonian");
  for (const Operator& l : lindblad_ops) require_same_space(H.space, l.space);
  return LindbladGenerator{std::move(H), std::move(lindblad_ops)};
}

Superoperator generator_superop(const LindbladGenerator& gen) {
  if (max_abs(gen.H.matrix - gen.H.matrix.adjoint()) > 1e-12)
    throw Error("invalid Hamiltonian");
  const HilbertSpace& sp = gen.space();
  int d = sp.dim();
  Matrix s = Matrix::Zero(d * d, d * d);
  // Accumulate coeff * (B^T (x) A), the superoperator of rho -> A rho B.
  auto accumulate = [&](Complex coeff, const Matrix& a, const Matrix& b) {
    for (int l = 0; l < d; ++l)
      for (int c = 0; c < d; ++c) {
        Complex w = coeff * b(l, c);
        if (w != Complex(0, 0)) s.block(c * d, l * d, d, d) += w * a;
      }
  };
  Matrix id = Matrix::Identity(d, d);
  Complex mi_over_h(0, -1.0 / sp.hbar());
  accumulate(mi_over_h, gen.H.matrix, id);
  accumulate(-mi_over_h, id, gen.H.matrix);
  for (const Operator& l : gen.lindblad_ops) {
    Matrix ld = l.matrix.adjoint();
    Matrix ldl = ld * l.matrix;
    accumulate(1.0, l.matrix, ld);
    accumulate(-0.5, ldl, id);
    accumulate(-0.5, id, ldl);
  }
  return Superoperator{sp, s};
}

Operator effective_K(const LindbladGenerator& gen) {
  const HilbertSpace& sp = gen.space();
  Matrix k = Complex(0, 1.0 / sp.hbar()) * gen.H.matrix;
  for (const Operator& l : gen.lindblad_ops)
    k += 0.5 * (l.matrix.adjoint() * l.matrix);
  return Operator{sp, k};
}

Operator apply_generator(const LindbladGenerator& gen, const Operator& rho) {
  require_same_space(gen.space(), rho.space);
  CompiledGen cg(gen);
  return Operator{rho.space, cg.apply(rho.matrix)};
}

Operator apply_generator_adjoint(const LindbladGenerator& gen, const Operator& x) {
  require_same_space(gen.space(), x.space);
  double hbar = gen.space().hbar();
  Matrix out = Complex(0, 1.0 / hbar) * (gen.H.matrix * x.matrix - x.matrix * gen.H.matrix);
  for (const Operator& l : gen.lindblad_ops) {
    Matrix ld = l.matrix.adjoint();
    Matrix ldl = ld * l.matrix;
    out += ld * x.matrix * l.matrix - 0.5 * (ldl * x.matrix + x.matrix * ldl);
  }
  return Operator{x.space, out};
}

DensityMatrix evolve_expm(const LindbladGenerator& gen, const DensityMatrix& rho0,
                          double t) {
  if (t < 0) throw Error("negative time");
  require_same_space(gen.space(), rho0.op.space);
  Superoperator s = generator_superop(gen);
  Matrix prop = matrix_exp(t * s.matrix);
  Operator out = devectorize(s.space, prop * vectorize(rho0.op));
  try {
    return make_density(out);
  } catch (const Error&) {
    throw Error("positivity loss");
  }
}

namespace {

// Dormand-Prince 5(4) embedded pair on the d x d matrix ODE dY/dt = L[Y].
// The generator maps Hermitian operators to Hermitian operators, so when the
// initial condition is a state the anti-Hermitian content of y is pure
// roundoff. The generator is non-normal and can amplify that noise
// transiently by many orders of magnitude, so for states we project it out
// after every step; the projection commutes with the exact flow.
Matrix dopri5(const CompiledGen& cg, Matrix y, double t, double rel_tol,
              bool keep_hermitian) {
  if (t == 0.0) return y;
  const double atol = rel_tol / 2, rtol = rel_tol / 2;
  double h = t / 16.0;
  double done = 0.0;
  const double h_min = t * 1e-14;
  Matrix k1 = cg.apply(y);
  while (done < t) {
    if (h < h_min) throw Error("stiffness failure");
    if (done + h > t) h = t - done;
    Matrix k2 = cg.apply(y + h * (1.0 / 5) * k1);
    Matrix k3 = cg.apply(y + h * ((3.0 / 40) * k1 + (9.0 / 40) * k2));
    Matrix k4 = cg.apply(y + h * ((44.0 / 45) * k1 - (56.0 / 15) * k2 + (32.0 / 9) * k3));
    Matrix k5 = cg.apply(y + h * ((19372.0 / 6561) * k1 - (25360.0 / 2187) * k2 +
                                  (64448.0 / 6561) * k3 - (212.0 / 729) * k4));
    Matrix k6 = cg.apply(y + h * ((9017.0 / 3168) * k1 - (355.0 / 33) * k2 +
                                  (46732.0 / 5247) * k3 + (49.0 / 176) * k4 -
                                  (5103.0 / 18656) * k5));
    Matrix y5 = y + h * ((35.0 / 384) * k1 + (500.0 / 1113) * k3 + (125.0 / 192) * k4 -
                         (2187.0 / 6784) * k5 + (11.0 / 84) * k6);
    if (keep_hermitian) y5 = 0.5 * (y5 + y5.adjoint()).eval();
    Matrix k7 = cg.apply(y5);
    Matrix err = h * ((35.0 / 384 - 5179.0 / 57600) * k1 +
                      (500.0 / 1113 - 7571.0 / 16695) * k3 +
                      (125.0 / 192 - 393.0 / 640) * k4 +
                      (-2187.0 / 6784 + 92097.0 / 339200) * k5 +
                      (11.0 / 84 - 187.0 / 2100) * k6 - (1.0 / 40) * k7);
    double scale_ref = std::max(max_abs(y), max_abs(y5));
    double err_norm = max_abs(err) / (atol + rtol * scale_ref);
    if (err_norm <= 1.0) {
      y = std::move(y5);
      k1 = std::move(k7);  // first-same-as-last
      done += h;
    }
    double factor = 0.9 * std::pow(std::max(err_norm, 1e-10), -0.2);
    h *= std::min(5.0, std::max(0.2, factor));
  }
  return y;
}

}  // namespace

namespace {

Operator evolve_ode_impl(const LindbladGenerator& gen, const Operator& op0, double t,
                         double rel_tol, bool keep_hermitian) {
  if (t < 0) throw Error("negative time");
  if (!(rel_tol > 1e-14 && rel_tol < 1e-3))
    throw Error("invalid argument: rel_tol must lie in (1e-14, 1e-3)");
  require_same_space(gen.space(), op0.space);
  CompiledGen cg(gen);
  return Operator{op0.space, dopri5(cg, op0.matrix, t, rel_tol, keep_hermitian)};
}

}  // namespace

Operator evolve_ode_operator(const LindbladGenerator& gen, const Operator& op0,
                             double t, double rel_tol) {
  return evolve_ode_impl(gen, op0, t, rel_tol, false);
}

DensityMatrix evolve_ode(const LindbladGenerator& gen, const DensityMatrix& rho0,
                         double t, double rel_tol) {
  Operator out = evolve_ode_impl(gen, rho0.op, t, rel_tol, true);
  try {
    return make_density(out);
  } catch (const Error&) {
    throw Error("positivity loss");
  }
}

namespace {

struct BucketAccum {
  Matrix rho_sum;
  long long lost = 0;
};

}  // namespace

JumpResult unravel_jumps(const LindbladGenerator& gen, const Vector& psi0, double t,
                         const JumpConfig& config,
                         const std::optional<Operator>& observable) {
  if (t < 0) throw Error("negative time");
  if (config.n_trajectories < 1)
    throw Error("invalid argument: n_trajectories must be >= 1");
  const HilbertSpace& sp = gen.space();
  int d = sp.dim();
  if (psi0.size() != d) throw Error("space mismatch");
  if (std::abs(psi0.norm() - 1.0) > 1e-10)
    throw Error("invalid argument: psi0 must be normalized");

  const long long n = config.n_trajectories;
  const int n_channels = int(gen.lindblad_ops.size());

  // Dyadic no-jump propagator ladder: dt divides t exactly, finest step dt/2^J.
  double dt_req = config.dt_max > 0 ? config.dt_max : t / 64.0;
  long long n_coarse = t > 0 ? (long long)std::ceil(t / dt_req - 1e-12) : 1;
  double dt = t > 0 ? t / double(n_coarse) : 0.0;
  constexpr int kJmax = 30;
  Matrix k_op = effective_K(gen).matrix;
  std::vector<Matrix> prop(kJmax + 1);
  if (t > 0) {
    prop[kJmax] = matrix_exp((-dt / double(1LL << kJmax)) * k_op);
    for (int j = kJmax - 1; j >= 0; --j) prop[j] = prop[j + 1] * prop[j + 1];
  }
  std::vector<Matrix> l_ops;
  for (const Operator& l : gen.lindblad_ops) l_ops.push_back(l.matrix);

  const long long total_units = t > 0 ? (n_coarse << kJmax) : 0;
  const double unit_time = t > 0 ? t / double(total_units) : 0.0;

  std::vector<TrajectoryRecord> records(config.keep_records ? size_t(n) : 0);
  std::vector<double> obs_samples(observable ? size_t(n) : 0);

  // Fixed bucket layout keeps the floating-point reduction order independent
  // of the worker count.
  const int n_buckets = 256;
  const long long bucket_size = (n + n_buckets - 1) / n_buckets;
  std::vector<BucketAccum> buckets(n_buckets);

  auto run_trajectory = [&](long long i, Matrix& rho_sum) -> bool {
    SplitMix64 rng(config.master_seed ^ std::uint64_t(i));
    Vector psi = psi0;
    TrajectoryRecord rec;
    rec.trajectory_id = i;
    long long tau = 0;
    double u = std::min(rng.uniform(), 1.0 - 1e-12);
    bool lost = false;
    while (tau < total_units) {
      long long remaining = total_units - tau;
      int j = std::max(0, kJmax + 1 - int(std::bit_width(std::uint64_t(remaining))));
      for (;;) {
        Vector trial = prop[j] * psi;
        if (trial.squaredNorm() >= u) {
          psi = std::move(trial);
          tau += 1LL << (kJmax - j);
          break;
        }
        if (j == kJmax) {
          // Jump localized to the finest lattice step.
          double w_total = 0.0;
          std::vector<double> w(n_channels);
          for (int c = 0; c < n_channels; ++c) {
            w[c] = (l_ops[c] * psi).squaredNorm();
            w_total += w[c];
          }
          if (psi.squaredNorm() < config.norm_tolerance || w_total < 1e-300) {
            lost = true;
            break;
          }
          double r = rng.uniform() * w_total;
          int chosen = n_channels - 1;
          double acc = 0.0;
          for (int c = 0; c < n_channels; ++c) {
            acc += w[c];
            if (r <= acc) {
              chosen = c;
              break;
            }
          }
          psi = (l_ops[chosen] * psi).eval();
          psi /= psi.norm();
          if (config.keep_records) {
            rec.jump_times.push_back(double(tau) * unit_time);
            rec.channels.push_back(chosen);
          }
          u = std::min(rng.uniform(), 1.0 - 1e-12);
          break;
        }
        ++j;
      }
      if (lost) break;
    }
    if (config.keep_records) records[size_t(i)] = std::move(rec);
    if (lost) return false;
    psi /= psi.norm();
    rho_sum.noalias() += psi * psi.adjoint();
    if (observable)
      obs_samples[size_t(i)] = (psi.adjoint() * observable->matrix * psi)(0, 0).real();
    return true;
  };

  std::atomic<int> next_bucket{0};
  auto worker_fn = [&]() {
    for (;;) {
      int b = next_bucket.fetch_add(1);
      if (b >= n_buckets) return;
      long long lo = b * bucket_size;
      long long hi = std::min(n, (b + 1) * bucket_size);
      if (lo >= hi) continue;
      buckets[b].rho_sum = Matrix::Zero(d, d);
      for (long long i = lo; i < hi; ++i)
        if (!run_trajectory(i, buckets[b].rho_sum)) ++buckets[b].lost;
    }
  };

  int workers = std::max(1, config.workers);
  if (workers == 1) {
    worker_fn();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker_fn);
    for (auto& th : pool) th.join();
  }

  long long lost = 0;
  Matrix rho_sum = Matrix::Zero(d, d);
  for (const BucketAccum& b : buckets) {
    if (b.rho_sum.size() != 0) rho_sum += b.rho_sum;
    lost += b.lost;
  }
  if (lost * 1000 > n) throw Error("trajectory lost");
  long long kept = n - lost;
  if (kept == 0) throw Error("trajectory lost");

  return JumpResult{make_density(Operator{sp, rho_sum / double(kept)}),
                    std::move(records), lost, std::move(obs_samples)};
}

}  // namespace qdyn
