#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "pspi/fock.hpp"
#include "pspi/symbol.hpp"

namespace pspi {

/// Midpoint lattice for h = p^2/2 + V(q) with N interior position
/// integrations and step eps = T/(N+1).
///
/// The interior integrals are evaluated on the rotated contour
/// q_l = a_l + e^{i pi/4} y_l, where a_l interpolates linearly between the
/// endpoints and y_0 = y_{N+1} = 0. For V of degree <= 2 the integrand is
/// entire and decays along y, so the contour integral equals the real one,
/// and the trapezoid rule over `grid` (the y axis) converges geometrically.
struct LatticeConfig {
  int N = 0;
  double T = 1.0;
  GridSpec grid{8.0, 181};

  double step() const { return T / (N + 1); }
};

void validate(const LatticeConfig& cfg);

// V = h - p^2/2; throws UnsupportedSymbol unless h is p^2/2 plus a q-only
// polynomial.
PolynomialSymbol potential_of(const PolynomialSymbol& h);

/// Analytic p-integral of one slice:
///   (2 pi i eps)^{-1/2} exp{ i (q1-q0)^2 / (2 eps) - i eps V((q1+q0)/2) }
/// with the root branch e^{-i pi/4} / sqrt(2 pi eps).
cplx slice_kernel(double q1, double q0, double eps, const PolynomialSymbol& V);
cplx slice_kernel(cplx q1, cplx q0, double eps, const PolynomialSymbol& V);

struct QLatticeValue {
  cplx value;
  // max over slices of (boundary |psi|) / (max |psi|) on the contour grid
  double leak = 0.0;
};

inline constexpr double kLeakTolerance = 1e-6;

/// Finite-N lattice value of <q_end| e^{-iHT} |q_start>. Endpoints may be
/// complex. Throws DomainTooSmall when the contour grid is too coarse for
/// the step (spacing > 0.75 sqrt(eps)) or the leak certificate fails.
QLatticeValue propagator_q(const LatticeConfig& cfg, const PolynomialSymbol& V, cplx q_end, cplx q_start);

// Same lattice for many endpoint pairs (end, start). Pairs are processed
// in fixed-size column batches, so results do not depend on worker count.
std::vector<QLatticeValue> propagator_q_batch(const LatticeConfig& cfg, const PolynomialSymbol& V,
                                              std::span<const std::pair<cplx, cplx>> ends);

// K(g_end.node(i), g_start.node(j)) sampled on a product grid. `leak`
// receives the worst certificate value.
CMatrix lattice_kernel_matrix(const LatticeConfig& cfg, const PolynomialSymbol& V, const GridSpec& g_end,
                              const GridSpec& g_start, double* leak = nullptr);

struct LatticeFold {
  cplx folded;
  cplx direct;
  double rel_error;
};

/// Folds the lattice over T1 (N1 slices) with the lattice over T2 (N2
/// slices) through an intermediate position, integrated along
/// x = x_c + e^{i pi/4} s with x_c the stationary point of the free action,
/// and compares with the direct lattice over T1+T2 at N1+N2+1 interior
/// points (same step when T1/(N1+1) == T2/(N2+1)).
LatticeFold lattice_fold_q(const LatticeConfig& first, const LatticeConfig& second, const PolynomialSymbol& V,
                           double q_end, double q_start, const GridSpec& s_grid);

// (2 pi i T)^{-1/2} exp{ i (x-y)^2 / (2T) }
cplx free_kernel(cplx x, cplx y, double T);

/// Harmonic oscillator kernel in the branch-continuous form
///   e^{-iT/2} (pi (1 - e^{-2iT}))^{-1/2} exp{ i[(x^2+y^2) cos T - 2xy] / (2 sin T) },
/// which equals (2 pi i sin T)^{-1/2} exp{...} for 0 < T < pi. Throws
/// Caustic when |sin T| < 1e-6.
cplx mehler_kernel(double x, double y, double T);
// Complex time tau with Im tau <= 0 (damped evolution).
cplx mehler_kernel(cplx x, cplx y, cplx tau);

/// sum_{n<D} psi_n(x) psi_n(y) e^{-i(n+1/2) tau} over Hermite functions.
/// Converges geometrically only for Im tau < 0.
cplx mehler_spectral_sum(double x, double y, cplx tau, int D);

/// Kernel of the form c exp{ i (a x^2 + b x y + g y^2) }: the free and
/// harmonic propagators in either representation.
struct QuadraticKernel {
  cplx c;
  double a;
  double b;
  double g;

  cplx operator()(double x, double y) const;
  static QuadraticKernel free(double T);
  static QuadraticKernel mehler(double T);
  // Largest |d phase / dx| or |d phase / dy| on [-L, L]^2.
  double chirp(double L) const { return 2.0 * L * std::max(std::abs(a), std::abs(g)) + L * std::abs(b); }
};

/// Damped double Fourier integral
///   (2 pi)^{-1} int int e^{-i(k_end x - k_start y)} K(x,y) e^{-(x^2+y^2)/nu} dx dy
/// by trapezoid quadrature on grid x grid. Throws DomainTooSmall if the
/// damped integrand exceeds 1e-8 of its peak on the grid boundary.
cplx damped_fourier(const QuadraticKernel& K, double k_end, double k_start, double nu, const GridSpec& grid);
// Closed form of the same Gaussian integral over the whole plane.
cplx damped_fourier_exact(const QuadraticKernel& K, double k_end, double k_start, double nu);
// Grid for damped_fourier: boundary damping 1e-8 and at least 3.3 samples
// per period of the fastest phase plus the Fourier shift k_max.
GridSpec damped_fourier_grid(const QuadraticKernel& K, double nu, double k_max, double refine = 1.0);

/// Position-to-momentum kernel transform on sampled data:
///   <p''|U|p'> = (2 pi)^{-1} int int e^{-i(q'' p'' - q' p')} <q''|U|q'> dq'' dq',
/// with rows of Kq indexed by q'' on gq and columns by q' on gq. The
/// convergence factor e^{-(q''^2 + q'^2)/nu} is applied first
/// (nu = infinity disables it). Throws DomainTooSmall if the damped
/// kernel is not below 1e-8 of its peak on the boundary.
CMatrix to_p_representation(const CMatrix& Kq, const GridSpec& gq, const GridSpec& gp, double nu);

}  // namespace pspi
