// SPDX-License-Identifier: Apache-2.0

#include "qdyn/covariance.hpp"

#include <cmath>

namespace qdyn {

namespace {

// Lattice shift count for a length that must be an integer multiple of dx.
int lattice_cells(double a, double dx) {
  double m = a / dx;
  double r = std::round(m);
  if (std::abs(m - r) > 1e-9) throw Error("off-lattice shift");
  return int(r);
}

Matrix diagonal_phase(const RealVector& values, double scale) {
  Vector d(values.size());
  for (int i = 0; i < values.size(); ++i) {
    double ph = scale * values(i);
    d(i) = Complex(std::cos(ph), std::sin(ph));
  }
  Matrix m = d.asDiagonal();
  return m;
}

}  // namespace

UnitaryRep u1_phase_rep(const HilbertSpace& space) {
  if (space.kind() != SpaceKind::Fock) throw Error("space mismatch");
  return UnitaryRep{GroupLabel::U1Phase, space, [space](double theta) {
                      RealVector n(space.dim());
                      for (int k = 0; k < space.dim(); ++k) n(k) = double(k);
                      return Operator{space, diagonal_phase(n, theta)};
                    }};
}

UnitaryRep so2_spin_rep(const HilbertSpace& space) {
  if (space.kind() != SpaceKind::Qubit) throw Error("space mismatch");
  return UnitaryRep{GroupLabel::SO2Spin, space, [space](double phi) {
                      // exp((i/hbar) phi S_z), S_z = (hbar/2) sigma_z,
                      // basis {|0> ground, |1> excited}.
                      RealVector half(2);
                      half << -0.5, 0.5;
                      return Operator{space, diagonal_phase(half, phi)};
                    }};
}

UnitaryRep translation_rep(const HilbertSpace& space) {
  const GridGeometry& g = space.grid();
  return UnitaryRep{GroupLabel::Translation1d, space, [space, g](double a) {
                      int m = lattice_cells(a, g.dx);
                      int n = g.n_points;
                      // exp(-(i/hbar) a p_hat) permutes |x_j> -> |x_{j+m}>
                      // exactly; build the permutation directly.
                      Matrix u = Matrix::Zero(n, n);
                      for (int j = 0; j < n; ++j) u(((j + m) % n + n) % n, j) = 1.0;
                      return Operator{space, u};
                    }};
}

UnitaryRep boost_rep(const HilbertSpace& space) {
  space.grid();
  return UnitaryRep{GroupLabel::Boost1d, space, [space](double q) {
                      RealVector x = position_lattice(space);
                      return Operator{space, diagonal_phase(x, q / space.hbar())};
                    }};
}

double covariance_residual(const Superoperator& l, const UnitaryRep& rep,
                           const std::vector<double>& params,
                           const std::vector<DensityMatrix>& samples) {
  require_same_space(l.space, rep.space);
  double worst = 0.0;
  for (double g : params) {
    Operator u = rep.map(g);
    for (const DensityMatrix& rho : samples) {
      Matrix conj_in = u.matrix * rho.op.matrix * u.matrix.adjoint();
      Matrix lhs = apply(l, Operator{l.space, conj_in}).matrix;
      Matrix rhs_core = apply(l, rho.op).matrix;
      Matrix rhs = u.matrix * rhs_core * u.matrix.adjoint();
      worst = std::max(worst, trace_norm(lhs - rhs));
    }
  }
  return worst;
}

double covariance_residual(const LindbladGenerator& gen, const UnitaryRep& rep,
                           const std::vector<double>& params,
                           const std::vector<DensityMatrix>& samples) {
  require_same_space(gen.space(), rep.space);
  double worst = 0.0;
  for (double g : params) {
    Operator u = rep.map(g);
    for (const DensityMatrix& rho : samples) {
      Operator conj_in{gen.space(), u.matrix * rho.op.matrix * u.matrix.adjoint()};
      Matrix lhs = apply_generator(gen, conj_in).matrix;
      Matrix rhs = u.matrix * apply_generator(gen, rho.op).matrix * u.matrix.adjoint();
      worst = std::max(worst, trace_norm(lhs - rhs));
    }
  }
  return worst;
}

WeylResult weyl_residual(const HilbertSpace& space, double a, double q) {
  const GridGeometry& g = space.grid();
  double hbar = space.hbar();
  WeylResult res;
  double ma = a / g.dx;
  double mq = q / space.dp();
  if (std::abs(ma - std::round(ma)) > 1e-9 || std::abs(mq - std::round(mq)) > 1e-9) {
    res.on_lattice = false;
    res.warning = "off-lattice shift";
  }
  GridOps ops = grid_ops(space);
  Matrix ua = matrix_exp(Complex(0, a / hbar) * ops.p_hat.matrix);
  Matrix uq = matrix_exp(Complex(0, q / hbar) * ops.x_hat.matrix);
  double ph = q * a / hbar;
  Complex phase(std::cos(ph), std::sin(ph));
  res.residual = max_abs(ua * uq - phase * uq * ua);
  return res;
}

Operator shift_isometry(const HilbertSpace& space, int m) {
  if (space.kind() != SpaceKind::Fock) throw Error("space mismatch");
  if (m < 0 || m >= space.dim()) throw Error("invalid argument: shift power");
  int d = space.dim();
  Matrix w = Matrix::Zero(d, d);
  for (int k = 0; k + m < d; ++k) w(k + m, k) = 1.0;
  return Operator{space, w};
}

double generalized_weyl_residual(const HilbertSpace& space, double theta, int m) {
  if (space.kind() != SpaceKind::Fock) throw Error("space mismatch");
  if (m < 0 || 2 * m >= space.dim()) throw Error("truncation too small");
  int d = space.dim();
  Operator wm = shift_isometry(space, m);
  Operator u = u1_phase_rep(space).map(theta);
  double ph = theta * m;
  Complex phase(std::cos(ph), std::sin(ph));
  Matrix diff = u.matrix * wm.matrix - phase * wm.matrix * u.matrix;
  // Restrict to the subspace untouched by the truncation edge.
  Matrix proj = Matrix::Zero(d, d);
  for (int k = 0; k < d - m; ++k) proj(k, k) = 1.0;
  return max_abs(diff * proj);
}

double povm_covariance_residual(const POVM& povm, const UnitaryRep& rep,
                                double param, const Region& region) {
  require_same_space(povm.space, rep.space);
  int n = povm.n_cells;
  Operator u = rep.map(param);
  Matrix lhs = u.matrix.adjoint() * povm.effect_of(region).matrix * u.matrix;
  Region target = region;
  if (rep.label == GroupLabel::Translation1d) {
    int m = lattice_cells(param, povm.space.grid().dx);
    target = region_translate(region, -m, n);
  }
  // Boosts leave position regions untouched (invariance).
  Matrix rhs = povm.effect_of(target).matrix;
  return max_abs(lhs - rhs);
}

double povm_covariance_residual(const JointPOVM& jp, const UnitaryRep& rep,
                                double param, const RectRegion& region) {
  require_same_space(jp.space, rep.space);
  int n = jp.space.grid().n_points;
  Operator u = rep.map(param);
  Matrix lhs = u.matrix.adjoint() * jp.effect_of(region).matrix * u.matrix;
  RectRegion target = region;
  if (rep.label == GroupLabel::Translation1d) {
    int m = lattice_cells(param, jp.space.grid().dx);
    target.x = region_translate(region.x, -m, n);
  } else if (rep.label == GroupLabel::Boost1d) {
    double mq = param / jp.space.dp();
    if (std::abs(mq - std::round(mq)) > 1e-9) throw Error("off-lattice shift");
    target.p = region_translate(region.p, -int(std::round(mq)), n);
  }
  Matrix rhs = jp.effect_of(target).matrix;
  return max_abs(lhs - rhs);
}

}  // namespace qdyn
