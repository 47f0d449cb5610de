// SPDX-License-Identifier: Apache-2.0

#include "qdyn/measurement.hpp"

#include <algorithm>
#include <cmath>

namespace qdyn {

namespace {

int wrap(int i, int n) { return ((i % n) + n) % n; }

// Minimal-image separation in cells, in [-n/2, n/2].
int min_image_cells(int m, int n) {
  m = wrap(m, n);
  return m > n / 2 ? m - n : m;
}

void check_region(const Region& r, int n) {
  for (int c : r.cells)
    if (c < 0 || c >= n) throw Error("region overflow");
}

}  // namespace

Region region_interval(int first, int last_inclusive, int n) {
  // Walk forward from first to last_inclusive on the periodic lattice, so a
  // pair like (n - 3, 4) crosses the seam instead of collapsing to nothing.
  int span = wrap(last_inclusive - first, n);
  Region r;
  r.cells.reserve(span + 1);
  for (int i = 0; i <= span; ++i) r.cells.push_back(wrap(first + i, n));
  return r;
}

Region region_all(int n) {
  Region r;
  r.cells.resize(n);
  for (int i = 0; i < n; ++i) r.cells[i] = i;
  return r;
}

Region region_translate(const Region& r, int shift, int n) {
  Region out;
  out.cells.reserve(r.cells.size());
  for (int c : r.cells) out.cells.push_back(wrap(c + shift, n));
  return out;
}

RealVector gaussian_weights(const HilbertSpace& space, double sigma) {
  const GridGeometry& g = space.grid();
  int n = g.n_points;
  RealVector h(n);
  for (int m = 0; m < n; ++m) {
    double s = min_image_cells(m, n) * g.dx;
    h(m) = std::exp(-s * s / (2.0 * sigma * sigma));
  }
  return h / h.sum();
}

POVM smeared_position_povm(const HilbertSpace& space, const RealVector& h) {
  const GridGeometry& g = space.grid();
  int n = g.n_points;
  if (h.size() != n) throw Error("space mismatch");
  for (int i = 0; i < n; ++i)
    if (h(i) < 0) throw Error("invalid density");
  if (std::abs(h.sum() - 1.0) > 1e-10) throw Error("invalid density");
  RealVector hcopy = h;
  auto effect = [space, hcopy, n](const Region& m) -> Operator {
    check_region(m, n);
    Vector diag = Vector::Zero(n);
    for (int i = 0; i < n; ++i) {
      double v = 0.0;
      for (int k : m.cells) v += hcopy(wrap(i - k, n));
      diag(i) = v;
    }
    Matrix f = diag.asDiagonal();
    return Operator{space, f};
  };
  return POVM{space, n, 0.0, std::move(effect)};
}

POVM sharp_position_pvm(const HilbertSpace& space) {
  int n = space.grid().n_points;
  RealVector delta = RealVector::Zero(n);
  delta(0) = 1.0;
  return smeared_position_povm(space, delta);
}

namespace {

struct FrameData {
  HilbertSpace space;
  int n;
  RealVector env;       // normalized so env.squaredNorm() == 1
  RealVector p_lattice;

  // psi_{j0,k0}(i) = env[(i-j0) mod n] * exp(2 pi i k0 (i-j0)/n).
  Vector state(int j0, int k0) const {
    Vector psi(n);
    for (int i = 0; i < n; ++i) {
      double phase = 2.0 * M_PI * double(k0) * double(i - j0) / double(n);
      psi(i) = env(wrap(i - j0, n)) * Complex(std::cos(phase), std::sin(phase));
    }
    return psi;
  }

  Matrix effect_matrix(const RectRegion& r) const {
    check_region(r.x, n);
    check_region(r.p, n);
    // Phase sum over the momentum cells depends only on (i-l) mod n.
    Vector phase_sum = Vector::Zero(n);
    for (int m = 0; m < n; ++m) {
      Complex acc(0, 0);
      for (int k0 : r.p.cells) {
        double ph = 2.0 * M_PI * double(k0) * double(m) / double(n);
        acc += Complex(std::cos(ph), std::sin(ph));
      }
      phase_sum(m) = acc;
    }
    Matrix f = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) {
        double env_sum = 0.0;
        for (int j0 : r.x.cells)
          env_sum += env(wrap(i - j0, n)) * env(wrap(l - j0, n));
        f(i, l) = phase_sum(wrap(i - l, n)) * env_sum / double(n);
      }
    return f;
  }
};

FrameData make_frame(const HilbertSpace& space, double sigma) {
  const GridGeometry& g = space.grid();
  int n = g.n_points;
  if (!(sigma > 0)) throw Error("invalid argument: sigma must be positive");
  RealVector env(n);
  for (int m = 0; m < n; ++m) {
    double s = min_image_cells(m, n) * g.dx;
    env(m) = std::exp(-s * s / (4.0 * sigma * sigma));
  }
  env /= env.norm();
  return FrameData{space, n, env, momentum_lattice(space)};
}

}  // namespace

JointPOVM joint_xp_povm(const HilbertSpace& space, double sigma, double tolerance) {
  FrameData fd = make_frame(space, sigma);
  int n = fd.n;
  RectRegion total{region_all(n), region_all(n)};
  Matrix f_total = fd.effect_matrix(total);
  double defect = max_abs(f_total - Matrix::Identity(n, n));
  if (defect > tolerance) throw Error("frame incompleteness");
  auto effect = [fd](const RectRegion& r) -> Operator {
    return Operator{fd.space, fd.effect_matrix(r)};
  };
  return JointPOVM{space, sigma, fd.env, defect, std::move(effect)};
}

std::pair<POVM, POVM> marginals(const JointPOVM& jp) {
  const HilbertSpace space = jp.space;
  int n = space.grid().n_points;
  // Position marginal: smearing by the seed's position density env^2.
  RealVector hx(n);
  for (int m = 0; m < n; ++m) hx(m) = jp.envelope(m) * jp.envelope(m);
  hx /= hx.sum();
  POVM pos = smeared_position_povm(space, hx);

  // Momentum marginal: diagonal in the momentum basis, smearing by the seed's
  // momentum density |env_hat|^2 as a cyclic convolution over momentum cells.
  Matrix f = dft_matrix(space);
  Vector env_hat = f * jp.envelope.cast<Complex>();
  RealVector hp(n);
  for (int k = 0; k < n; ++k) hp(k) = std::norm(env_hat(k));
  hp /= hp.sum();
  auto mom_effect = [space, hp, f, n](const Region& reg) -> Operator {
    check_region(reg, n);
    Vector diag = Vector::Zero(n);
    for (int k = 0; k < n; ++k) {
      double v = 0.0;
      for (int k0 : reg.cells) v += hp(wrap(k - k0, n));
      diag(k) = v;
    }
    Matrix dm = diag.asDiagonal();
    Matrix m = f.adjoint() * dm * f;
    return Operator{space, m};
  };
  return {pos, POVM{space, n, 0.0, std::move(mom_effect)}};
}

std::pair<double, double> marginal_variances(const JointPOVM& jp) {
  const HilbertSpace& space = jp.space;
  const GridGeometry& g = space.grid();
  int n = g.n_points;
  double var_x = 0.0, mean_x = 0.0;
  RealVector hx(n);
  for (int m = 0; m < n; ++m) hx(m) = jp.envelope(m) * jp.envelope(m);
  hx /= hx.sum();
  for (int m = 0; m < n; ++m) {
    double s = min_image_cells(m, n) * g.dx;
    mean_x += hx(m) * s;
    var_x += hx(m) * s * s;
  }
  var_x -= mean_x * mean_x;

  Matrix f = dft_matrix(space);
  Vector env_hat = f * jp.envelope.cast<Complex>();
  RealVector p = momentum_lattice(space);
  double var_p = 0.0, mean_p = 0.0, norm = 0.0;
  for (int k = 0; k < n; ++k) {
    double w = std::norm(env_hat(k));
    norm += w;
    mean_p += w * p(k);
    var_p += w * p(k) * p(k);
  }
  mean_p /= norm;
  var_p = var_p / norm - mean_p * mean_p;
  return {var_x, var_p};
}

double outcome_probability(const DensityMatrix& rho, const Operator& effect) {
  require_same_space(rho.op.space, effect.space);
  double p = (rho.op.matrix * effect.matrix).trace().real();
  if (p < -1e-10 || p > 1.0 + 1e-10)
    throw Error("invalid argument: effect outside [0,1]");
  return std::clamp(p, 0.0, 1.0);
}

JointInstrument joint_xp_instrument(const HilbertSpace& space, double sigma,
                                    double tolerance) {
  return JointInstrument{joint_xp_povm(space, sigma, tolerance)};
}

InstrumentOutcome apply_instrument(const JointInstrument& inst,
                                   const DensityMatrix& rho, const RectRegion& r) {
  const JointPOVM& jp = inst.povm;
  int n = jp.space.grid().n_points;
  FrameData fd{jp.space, n, jp.envelope, momentum_lattice(jp.space)};
  check_region(r.x, n);
  check_region(r.p, n);
  Matrix out = Matrix::Zero(n, n);
  double prob = 0.0;
  for (int j0 : r.x.cells)
    for (int k0 : r.p.cells) {
      Vector psi = fd.state(j0, k0);
      Vector rho_psi = rho.op.matrix * psi;
      double a = (psi.adjoint() * rho_psi)(0, 0).real() / double(n);
      out.noalias() += a * (psi * psi.adjoint());
      prob += a;
    }
  if (prob <= 1e-12) throw Error("conditioning on null event");
  return InstrumentOutcome{Operator{jp.space, out}, prob,
                           make_density(Operator{jp.space, out / prob})};
}

Operator instrument_adjoint_identity(const JointInstrument& inst, const RectRegion& r) {
  const JointPOVM& jp = inst.povm;
  int n = jp.space.grid().n_points;
  FrameData fd{jp.space, n, jp.envelope, momentum_lattice(jp.space)};
  check_region(r.x, n);
  check_region(r.p, n);
  Matrix acc = Matrix::Zero(n, n);
  for (int j0 : r.x.cells)
    for (int k0 : r.p.cells) {
      Vector psi = fd.state(j0, k0);
      acc.noalias() += (psi * psi.adjoint()) / double(n);
    }
  return Operator{jp.space, acc};
}

VonNeumannInstrument von_neumann_instrument(const HilbertSpace& space,
                                            std::vector<Operator> projectors) {
  int d = space.dim();
  Matrix sum = Matrix::Zero(d, d);
  for (size_t i = 0; i < projectors.size(); ++i) {
    require_same_space(space, projectors[i].space);
    const Matrix& e = projectors[i].matrix;
    if (max_abs(e - e.adjoint()) > 1e-12) throw Error("invalid PVM");
    for (size_t j = 0; j < projectors.size(); ++j) {
      const Matrix& g = projectors[j].matrix;
      Matrix prod = e * g;
      Matrix expect = (i == j) ? e : Matrix::Zero(d, d);
      if (max_abs(prod - expect) > 1e-12) throw Error("invalid PVM");
    }
    sum += e;
  }
  if (max_abs(sum - Matrix::Identity(d, d)) > 1e-12) throw Error("invalid PVM");
  return VonNeumannInstrument{space, std::move(projectors)};
}

Operator vn_apply(const VonNeumannInstrument& inst, const Operator& rho,
                  const std::vector<int>& outcomes) {
  require_same_space(inst.space, rho.space);
  int d = inst.space.dim();
  Matrix out = Matrix::Zero(d, d);
  for (int i : outcomes) {
    if (i < 0 || i >= int(inst.projectors.size())) throw Error("region overflow");
    const Matrix& e = inst.projectors[size_t(i)].matrix;
    out += e * rho.matrix * e;
  }
  return Operator{inst.space, out};
}

}  // namespace qdyn
