// SPDX-License-Identifier: Apache-2.0

#include "qdyn/hilbert.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>

namespace qdyn {

namespace {
constexpr double kHermTol = 1e-12;
constexpr double kTraceTol = 1e-10;
constexpr double kEigenFloor = -1e-10;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

HilbertSpace HilbertSpace::fock(int dim, double hbar) {
  if (dim < 2) throw Error("invalid argument: fock dim must be >= 2");
  if (!(hbar > 0.0)) throw Error("invalid argument: hbar must be positive");
  return HilbertSpace(SpaceKind::Fock, dim, hbar, GridGeometry{});
}

HilbertSpace HilbertSpace::qubit(double hbar) {
  if (!(hbar > 0.0)) throw Error("invalid argument: hbar must be positive");
  return HilbertSpace(SpaceKind::Qubit, 2, hbar, GridGeometry{});
}

HilbertSpace HilbertSpace::grid1d(int n_points, double dx, double x_min, double hbar) {
  if (n_points < 4 || !is_power_of_two(n_points))
    throw Error("invalid argument: grid n_points must be a power of two >= 4");
  if (!(dx > 0.0)) throw Error("invalid argument: grid dx must be positive");
  if (!(hbar > 0.0)) throw Error("invalid argument: hbar must be positive");
  if (std::isnan(x_min)) x_min = -(n_points / 2) * dx;
  return HilbertSpace(SpaceKind::Grid1d, n_points, hbar,
                      GridGeometry{n_points, dx, x_min});
}

const GridGeometry& HilbertSpace::grid() const {
  if (kind_ != SpaceKind::Grid1d) throw Error("space mismatch");
  return geom_;
}

double HilbertSpace::dp() const {
  const GridGeometry& g = grid();
  return 2.0 * M_PI * hbar_ / (g.n_points * g.dx);
}

bool HilbertSpace::operator==(const HilbertSpace& other) const {
  if (kind_ != other.kind_ || dim_ != other.dim_ || hbar_ != other.hbar_) return false;
  if (kind_ == SpaceKind::Grid1d)
    return geom_.dx == other.geom_.dx && geom_.x_min == other.geom_.x_min;
  return true;
}

void require_same_space(const HilbertSpace& a, const HilbertSpace& b) {
  if (a != b) throw Error("space mismatch");
}

DensityMatrix make_density(const Operator& op) {
  const Matrix& m = op.matrix;
  if (m.rows() != op.space.dim() || m.cols() != op.space.dim())
    throw Error("invalid density");
  if (max_abs(m - m.adjoint()) > kHermTol) throw Error("invalid density");
  if (std::abs(m.trace() - Complex(1.0, 0.0)) > kTraceTol) throw Error("invalid density");
  if (min_hermitian_eigenvalue(m) < kEigenFloor) throw Error("invalid density");
  return DensityMatrix{op};
}

DensityMatrix make_density_normalized(const Operator& op) {
  Complex tr = op.matrix.trace();
  if (std::abs(tr) < 1e-300) throw Error("invalid density");
  Operator scaled{op.space, op.matrix / tr};
  return make_density(scaled);
}

FockOps fock_ops(const HilbertSpace& space) {
  if (space.kind() != SpaceKind::Fock) throw Error("space mismatch");
  int d = space.dim();
  Matrix a = Matrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(double(n));
  Matrix num = Matrix::Zero(d, d);
  for (int n = 0; n < d; ++n) num(n, n) = double(n);
  return FockOps{{space, a}, {space, a.adjoint()}, {space, num}};
}

PauliOps pauli_ops(const HilbertSpace& space) {
  if (space.kind() != SpaceKind::Qubit) throw Error("space mismatch");
  Matrix sx(2, 2), sy(2, 2), sz(2, 2), sp(2, 2), sm(2, 2);
  // Basis ordering {|0> ground, |1> excited}; sigma_y carries the swapped
  // ordering so that sigma_plus = (sx + i sy)/2 raises and [sx,sy] = 2i sz.
  sx << 0, 1, 1, 0;
  sy << 0, Complex(0, 1), Complex(0, -1), 0;
  sz << -1, 0, 0, 1;
  sp << 0, 0, 1, 0;  // |1><0|
  sm << 0, 1, 0, 0;  // |0><1|
  return PauliOps{{space, sx}, {space, sy}, {space, sz}, {space, sp}, {space, sm}};
}

Matrix dft_matrix(const HilbertSpace& space) {
  const GridGeometry& g = space.grid();
  int n = g.n_points;
  Matrix f(n, n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      double phase = -2.0 * M_PI * double(k) * double(j) / double(n);
      f(k, j) = Complex(std::cos(phase), std::sin(phase)) / std::sqrt(double(n));
    }
  return f;
}

RealVector momentum_lattice(const HilbertSpace& space) {
  const GridGeometry& g = space.grid();
  int n = g.n_points;
  double dp = space.dp();
  RealVector p(n);
  for (int k = 0; k < n; ++k) p(k) = dp * (k < n / 2 ? k : k - n);
  return p;
}

RealVector position_lattice(const HilbertSpace& space) {
  const GridGeometry& g = space.grid();
  RealVector x(g.n_points);
  for (int j = 0; j < g.n_points; ++j) x(j) = g.x_min + j * g.dx;
  return x;
}

GridOps grid_ops(const HilbertSpace& space) {
  RealVector x = position_lattice(space);
  RealVector p = momentum_lattice(space);
  Matrix xm = x.cast<Complex>().asDiagonal();
  Matrix f = dft_matrix(space);
  Matrix pm = f.adjoint() * p.cast<Complex>().asDiagonal() * f;
  // The spectral construction is Hermitian up to roundoff; symmetrize so the
  // documented bound ||p - p^dag|| <= 1e-12 is exact by construction.
  pm = 0.5 * (pm + pm.adjoint()).eval();
  return GridOps{{space, xm}, {space, pm}};
}

Vector vectorize(const Operator& op) {
  int d = op.space.dim();
  return Eigen::Map<const Vector>(op.matrix.data(), d * d);
}

Operator devectorize(const HilbertSpace& space, const Vector& v) {
  int d = space.dim();
  if (v.size() != d * d) throw Error("space mismatch");
  Matrix m = Eigen::Map<const Matrix>(v.data(), d, d);
  return Operator{space, m};
}

Operator apply(const Superoperator& s, const Operator& op) {
  require_same_space(s.space, op.space);
  return devectorize(s.space, s.matrix * vectorize(op));
}

Superoperator compose(const Superoperator& a, const Superoperator& b) {
  require_same_space(a.space, b.space);
  return Superoperator{a.space, a.matrix * b.matrix};
}

Superoperator add(const Superoperator& a, const Superoperator& b) {
  require_same_space(a.space, b.space);
  return Superoperator{a.space, a.matrix + b.matrix};
}

Superoperator scale(Complex c, const Superoperator& s) {
  return Superoperator{s.space, c * s.matrix};
}

Superoperator identity_superop(const HilbertSpace& space) {
  int d = space.dim();
  return Superoperator{space, Matrix::Identity(d * d, d * d)};
}

Superoperator sandwich_superop(const Operator& a, const Operator& b) {
  require_same_space(a.space, b.space);
  int d = a.space.dim();
  // vec(A rho B) = (B^T (x) A) vec(rho) for column-major vec.
  Matrix m(d * d, d * d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i)
      m.block(j * d, i * d, d, d) = b.matrix(i, j) * a.matrix;
  return Superoperator{a.space, m};
}

Superoperator adjoint_superop(const Superoperator& s) {
  return Superoperator{s.space, s.matrix.adjoint()};
}

Operator choi_matrix(const Superoperator& s) {
  int d = s.space.dim();
  Matrix c = Matrix::Zero(d * d, d * d);
  Matrix e = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      e(i, j) = 1.0;
      Operator out = apply(s, Operator{s.space, e});
      e(i, j) = 0.0;
      c.block(i * d, j * d, d, d) = out.matrix;
    }
  HilbertSpace aux = HilbertSpace::fock(d * d, s.space.hbar());
  return Operator{aux, c};
}

Matrix matrix_exp(const Matrix& m) { return m.exp(); }

double min_hermitian_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double trace_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

double max_abs(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

}  // namespace qdyn
