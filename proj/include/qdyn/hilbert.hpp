// SPDX-License-Identifier: Apache-2.0
//
// Finite-dimensional operator algebra: spaces (truncated Fock, qubit,
// periodic 1D grid), operators, density matrices, superoperators,
// vectorization, and complete-positivity diagnostics.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdyn {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Every domain error carries one of the documented message strings
// ("space mismatch", "negative time", ...) so callers can match on what().
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

enum class SpaceKind { Fock, Qubit, Grid1d };

struct GridGeometry {
  int n_points = 0;
  double dx = 0.0;
  double x_min = 0.0;
};

class HilbertSpace {
 public:
  static HilbertSpace fock(int dim, double hbar = 1.0);
  static HilbertSpace qubit(double hbar = 1.0);
  // n_points must be a power of two >= 4. If x_min is NaN the grid is
  // centered: x_min = -(n/2)*dx.
  static HilbertSpace grid1d(int n_points, double dx,
                             double x_min = std::numeric_limits<double>::quiet_NaN(),
                             double hbar = 1.0);

  SpaceKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double hbar() const { return hbar_; }
  const GridGeometry& grid() const;   // throws "space mismatch" off-grid
  double dp() const;                  // momentum lattice spacing 2*pi*hbar/(n*dx)

  bool operator==(const HilbertSpace& other) const;
  bool operator!=(const HilbertSpace& other) const { return !(*this == other); }

 private:
  HilbertSpace(SpaceKind kind, int dim, double hbar, GridGeometry geom)
      : kind_(kind), dim_(dim), hbar_(hbar), geom_(geom) {}
  SpaceKind kind_;
  int dim_;
  double hbar_;
  GridGeometry geom_;
};

struct Operator {
  HilbertSpace space;
  Matrix matrix;
};

// Validated on construction: Hermitian to 1e-12, unit trace to 1e-10,
// smallest eigenvalue >= -1e-10. Construction failure throws "invalid density".
struct DensityMatrix {
  Operator op;
};
DensityMatrix make_density(const Operator& op);
// Normalizes an unnormalized positive operator by its trace first.
DensityMatrix make_density_normalized(const Operator& op);

// Dense d^2 x d^2 matrix acting on column-major vectorized operators.
struct Superoperator {
  HilbertSpace space;
  Matrix matrix;
};

// --- constructions -------------------------------------------------------

struct FockOps {
  Operator a;
  Operator a_dagger;
  Operator number;
};
FockOps fock_ops(const HilbertSpace& space);

struct PauliOps {
  Operator sigma_x, sigma_y, sigma_z, sigma_plus, sigma_minus;
};
PauliOps pauli_ops(const HilbertSpace& space);

struct GridOps {
  Operator x_hat;
  Operator p_hat;
};
GridOps grid_ops(const HilbertSpace& space);

// Unitary DFT with kernel F[k,j] = exp(-2*pi*i*k*j/n)/sqrt(n); maps the
// position to the momentum basis. Momentum eigenvectors are plane waves
// exp(+i p_k x / hbar) up to per-column phases.
Matrix dft_matrix(const HilbertSpace& space);
// Wrapped momentum lattice: dp*k for k < n/2, dp*(k-n) otherwise.
RealVector momentum_lattice(const HilbertSpace& space);
RealVector position_lattice(const HilbertSpace& space);

// --- vectorization and superoperator algebra -----------------------------

Vector vectorize(const Operator& op);
Operator devectorize(const HilbertSpace& space, const Vector& v);
Operator apply(const Superoperator& s, const Operator& op);
Superoperator compose(const Superoperator& a, const Superoperator& b);
Superoperator add(const Superoperator& a, const Superoperator& b);
Superoperator scale(Complex c, const Superoperator& s);
Superoperator identity_superop(const HilbertSpace& space);
// Superoperator of rho -> A rho B.
Superoperator sandwich_superop(const Operator& a, const Operator& b);
// Adjoint map M' with Tr(X^dag M[rho]) = Tr((M'[X])^dag rho): matrix adjoint.
Superoperator adjoint_superop(const Superoperator& s);

// Choi matrix C = sum_{ij} |i><j| (x) S[|i><j|]; PSD iff S completely positive.
// Returned on an auxiliary fock(d^2) space.
Operator choi_matrix(const Superoperator& s);

// --- numeric helpers ------------------------------------------------------

Matrix matrix_exp(const Matrix& m);
double min_hermitian_eigenvalue(const Matrix& m);
double trace_norm(const Matrix& m);   // sum of singular values
double max_abs(const Matrix& m);
void require_same_space(const HilbertSpace& a, const HilbertSpace& b);

}  // namespace qdyn
