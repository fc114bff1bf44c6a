#pragma once

#include "pspi/fock.hpp"
#include "pspi/symbol.hpp"

namespace pspi {

/// Phase-space label (p, q), hbar = 1. For coherent states these are the
/// expectation values of P and Q, not eigenvalues.
struct PhasePoint {
  double p = 0.0;
  double q = 0.0;

  bool operator==(const PhasePoint&) const = default;
};

inline constexpr double kPhasePointEnvelope = 50.0;

void validate(const PhasePoint& pt);

// z = (q + i p) / sqrt(2)
cplx complex_label(const PhasePoint& pt);

/// Number-basis coefficients of |p,q> = e^{-iqP} e^{ipQ} |0>:
///
///   c_n = e^{-ipq/2} e^{-|z|^2/2} z^n / sqrt(n!)
///
/// The e^{-ipq/2} phase is what this operator ordering adds relative to the
/// displacement operator e^{i(pQ - qP)}. Throws InsufficientDimension when
/// the truncation estimate is not below kTruncationTolerance.
FockVector coherent_vector(const PhasePoint& pt, int dim);

// Same coefficients without the truncation certificate.
CVector coherent_coefficients(const PhasePoint& pt, int dim);

// e^{-iqP} e^{ipQ} e_0 built from spectral exponentials of the truncated
// P and Q in a work space of dimension work_dim >= dim, cropped to dim.
FockVector coherent_vector_via_exponentials(const PhasePoint& pt, int dim, int work_dim);

/// <a|b> = exp{ i(p_a + p_b)(q_a - q_b)/2 - [(p_a - p_b)^2 + (q_a - q_b)^2]/4 }
cplx overlap(const PhasePoint& a, const PhasePoint& b);

struct FoldCheck {
  cplx lhs;
  cplx rhs;
  double error;
};

/// Reproducing property: 2-D trapezoid quadrature of
/// integral <a|x><x|b> dp dq / 2pi over grid x grid, compared to <a|b>.
FoldCheck fold_check(const PhasePoint& a, const PhasePoint& b, const GridSpec& grid);

struct Expectations {
  double p;
  double q;
};

Expectations expectation_pq(const PhasePoint& pt, int dim);

/// Anti-normal (Toeplitz) quantization by quadrature,
///   H = integral h(p,q) |p,q><p,q| dp dq / 2pi,
/// over grid x grid. The grid must push |h| |c_{D-1}|^2 below 1e-12 on its
/// boundary.
FockOperator quantize_antinormal(const PolynomialSymbol& h, int dim, const GridSpec& grid);

// h(p, q) rewritten through q = (z + zbar)/sqrt2, p = i(zbar - z)/sqrt2 as
// sum coeff * zbar^zbar_power * z^z_power.
struct ZMonomial {
  int zbar_power;
  int z_power;
  cplx coeff;
};
std::vector<ZMonomial> normal_symbol(const PolynomialSymbol& h);

/// Normal-ordered quantization: h rewritten in z, zbar with every zbar
/// (creation) left of every z (annihilation).
FockOperator quantize_normal(const PolynomialSymbol& h, int dim);

// Algebraic anti-normal ordering (every A left of every A^dagger). Exact
// in the leading block; used as the oracle for quantize_antinormal.
FockOperator quantize_antinormal_algebraic(const PolynomialSymbol& h, int dim);

// Max-norm defect of quantize_antinormal(1) from the identity on the
// leading (dim - 4) block: the self-calibration certificate for a grid.
double resolution_of_identity_defect(int dim, const GridSpec& grid);

// Smallest symmetric grid half-width that satisfies the envelope
// precondition of quantize_antinormal.
double antinormal_half_width(const PolynomialSymbol& h, int dim);

}  // namespace pspi
