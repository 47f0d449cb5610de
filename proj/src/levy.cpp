// SPDX-License-Identifier: Apache-2.0

#include "qdyn/levy.hpp"

#include <cmath>

namespace qdyn {

namespace {

void validate_triplet(const LevyTriplet& trip) {
  if (trip.gaussian < 0.0) throw Error("invalid argument: Gaussian coefficient");
  for (const LevyJump& j : trip.jumps)
    if (j.weight < 0.0) throw Error("invalid argument: jump weight");
}

}  // namespace

Complex characteristic_exponent(const LevyTriplet& trip, double x, double hbar) {
  validate_triplet(trip);
  Complex psi(0.5 * trip.gaussian * x * x, trip.drift * x);
  for (const LevyJump& j : trip.jumps) {
    double ph = j.q * x / hbar;
    Complex bracket(std::cos(ph) - 1.0,
                    std::sin(ph) - j.q * x / (hbar * (1.0 + j.q * j.q)));
    psi -= j.weight * bracket;
  }
  return psi;
}

Complex decoherence_factor(const LevyTriplet& trip, double t, double x,
                           double hbar) {
  if (t < 0.0) throw Error("negative time");
  return std::exp(-t * characteristic_exponent(trip, x, hbar));
}

DensityMatrix apply_decoherence(const DensityMatrix& rho,
                                const LevyTriplet& trip, double t) {
  const HilbertSpace& space = rho.op.space;
  const GridGeometry& g = space.grid();
  if (t < 0.0) throw Error("negative time");
  int n = g.n_points;
  double hbar = space.hbar();
  // Phi at each minimal-image cell separation; negative offsets are defined
  // by conjugation so the output is Hermitian by construction.
  std::vector<Complex> factor(n);
  for (int m = 0; m <= n / 2; ++m) {
    if (2 * m == n) {
      // Both images +-L/2 are equally close; they are conjugates, so the
      // average is the real part.
      double s = m * g.dx;
      factor[m] = Complex(decoherence_factor(trip, t, s, hbar).real(), 0.0);
    } else {
      factor[m] = decoherence_factor(trip, t, m * g.dx, hbar);
    }
  }
  for (int m = n / 2 + 1; m < n; ++m) factor[m] = std::conj(factor[n - m]);
  Matrix out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int m = ((i - j) % n + n) % n;
      out(i, j) = factor[m] * rho.op.matrix(i, j);
    }
  if (min_hermitian_eigenvalue(out) < -1e-10)
    throw Error("non-PSD decoherence field");
  return make_density(Operator{space, out});
}

BochnerResult bochner_check(const LevyTriplet& trip, double t,
                            const std::vector<double>& points, double hbar) {
  int n = int(points.size());
  Matrix phi(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      phi(i, j) = decoherence_factor(trip, t, points[i] - points[j], hbar);
  BochnerResult out;
  out.min_eigenvalue = min_hermitian_eigenvalue(phi);
  out.pass = out.min_eigenvalue >= -1e-10;
  return out;
}

}  // namespace qdyn
