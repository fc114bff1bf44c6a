#pragma once

#include <vector>

#include "pspi/coherent.hpp"
#include "pspi/fock.hpp"

namespace pspi {

/// int e^{i y^2 - y^2/nu} dy by trapezoid quadrature on |y| <= L with
/// e^{-L^2/nu} < 1e-12 and a spacing that resolves the complex Gaussian.
cplx fresnel_regularized(double nu);
// sqrt(pi / (1/nu - i))
cplx fresnel_closed_form(double nu);
// sqrt(pi) e^{i pi/4}
cplx fresnel_limit();

struct FresnelSweep {
  std::vector<double> nu;
  std::vector<cplx> values;
  // polynomial extrapolation in 1/nu to 1/nu = 0
  cplx extrapolated;
};
FresnelSweep fresnel_sweep(const std::vector<double>& nus);

struct AmbiguityPair {
  cplx value_p;
  cplx value_q;
  double rel_diff;
};

/// The two readings of the symmetric-action propagator for the harmonic
/// oscillator over T, with C = 1/(2 pi):
///
///   value_p = C int e^{ i(p'' q'' - p' q')/2} <p''|U|p'> dp'' dp'
///   value_q = C int e^{-i(p'' q'' - p' q')/2} <q''|U|q'> dq'' dq'
///
/// both damped by e^{-(x''^2 + x'^2)/nu_reg}; rel_diff = |value_p - value_q| / |value_q|.
/// `refine` multiplies the sampling density. At T = k pi the kernel is
/// e^{-ik pi/2} delta(x'' - (-1)^k x') and the double integral reduces to
/// one dimension. nu_reg <= 0 is rejected with RegularizationFailure.
AmbiguityPair ambiguity_pair(double T, double nu_reg, const PhasePoint& end, const PhasePoint& start,
                             double refine = 1.0);

// Closed forms of the damped integrals above (same nu_reg).
AmbiguityPair ambiguity_pair_exact(double T, double nu_reg, const PhasePoint& end, const PhasePoint& start);

}  // namespace pspi
