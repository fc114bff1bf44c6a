#include "pspi/demos.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pspi/error.hpp"
#include "pspi/lattice_q.hpp"

namespace pspi {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxDampedNodes = 20001;

void check_regulator(double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu))
    fail(ErrorKind::RegularizationFailure,
         "endpoint integrals are only conditionally convergent without damping; nu_reg must be positive and finite");
}

// At T = k pi: e^{-ik pi/2} (2pi)^{-1} int e^{-i kappa x - 2x^2/nu} dx.
cplx caustic_value(int k, double kappa, double nu, double refine, bool exact) {
  const cplx phase = std::polar(1.0, -0.5 * kPi * k);
  if (exact) return phase * std::sqrt(kPi * nu / 2.0) * std::exp(-nu * kappa * kappa / 8.0) / (2.0 * kPi);
  const double L = std::sqrt(0.5 * nu * std::log(1e8)) * 1.0000001;
  const GridSpec g = GridSpec::with_spacing(L, 2.0 * kPi / ((std::abs(kappa) + std::sqrt(240.0 / nu)) * refine));
  if (g.points() > kMaxDampedNodes) fail(ErrorKind::RegularizationFailure, "damped integrand needs too many nodes");
  return phase * quad_1d([&](double x) { return std::exp(cplx(-2.0 * x * x / nu, -kappa * x)); }, g) / (2.0 * kPi);
}

AmbiguityPair make_pair(cplx vp, cplx vq) { return {vp, vq, std::abs(vp - vq) / std::abs(vq)}; }

int caustic_index(double T) {
  if (std::abs(std::sin(T)) >= 1e-6) return -1;
  return static_cast<int>(std::lround(T / kPi));
}

}  // namespace

cplx fresnel_closed_form(double nu) {
  if (!(nu > 0.0)) fail(ErrorKind::InvalidConfig, "Fresnel damping nu must be positive");
  return std::sqrt(kPi / cplx(1.0 / nu, -1.0));
}

cplx fresnel_limit() { return std::sqrt(kPi) * std::polar(1.0, kPi / 4.0); }

cplx fresnel_regularized(double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) fail(ErrorKind::InvalidConfig, "Fresnel damping nu must be positive");
  const double L = std::sqrt(27.64 * nu);
  const double kmax = std::sqrt(120.0 * (1.0 + nu * nu) / nu);
  const GridSpec g = GridSpec::with_spacing(L, 2.0 * kPi / kmax);
  return quad_1d([&](double y) { return std::exp(cplx(-y * y / nu, y * y)); }, g);
}

FresnelSweep fresnel_sweep(const std::vector<double>& nus) {
  FresnelSweep out;
  out.nu = nus;
  std::vector<double> h;
  for (double nu : nus) {
    out.values.push_back(fresnel_regularized(nu));
    h.push_back(1.0 / nu);
  }
  out.extrapolated = richardson_limit(h, out.values);
  return out;
}

AmbiguityPair ambiguity_pair(double T, double nu_reg, const PhasePoint& end, const PhasePoint& start, double refine) {
  check_regulator(nu_reg);
  validate(end);
  validate(start);
  if (!(refine >= 1.0)) fail(ErrorKind::InvalidConfig, "grid refinement factor must be >= 1");
  if (const int k = caustic_index(T); k >= 0) {
    const double sigma = (k % 2 == 0) ? 1.0 : -1.0;
    const cplx vq = caustic_value(k, 0.5 * (end.p - sigma * start.p), nu_reg, refine, false);
    const cplx vp = caustic_value(k, -0.5 * (end.q - sigma * start.q), nu_reg, refine, false);
    return make_pair(vp, vq);
  }
  const QuadraticKernel K = QuadraticKernel::mehler(T);
  const double shift = 0.5 * std::max({std::abs(end.p), std::abs(start.p), std::abs(end.q), std::abs(start.q)});
  const GridSpec g = damped_fourier_grid(K, nu_reg, shift, refine);
  if (g.points() > kMaxDampedNodes)
    fail(ErrorKind::RegularizationFailure, "damped endpoint integrand needs " + std::to_string(g.points()) +
                                               " nodes per axis at nu_reg = " + std::to_string(nu_reg));
  // The harmonic kernel has the same form in p and q, so both readings
  // are damped Fourier integrals of the same kernel.
  const cplx vq = damped_fourier(K, 0.5 * end.p, 0.5 * start.p, nu_reg, g);
  const cplx vp = damped_fourier(K, -0.5 * end.q, -0.5 * start.q, nu_reg, g);
  return make_pair(vp, vq);
}

AmbiguityPair ambiguity_pair_exact(double T, double nu_reg, const PhasePoint& end, const PhasePoint& start) {
  check_regulator(nu_reg);
  if (const int k = caustic_index(T); k >= 0) {
    const double sigma = (k % 2 == 0) ? 1.0 : -1.0;
    return make_pair(caustic_value(k, -0.5 * (end.q - sigma * start.q), nu_reg, 1.0, true),
                     caustic_value(k, 0.5 * (end.p - sigma * start.p), nu_reg, 1.0, true));
  }
  const QuadraticKernel K = QuadraticKernel::mehler(T);
  return make_pair(damped_fourier_exact(K, -0.5 * end.q, -0.5 * start.q, nu_reg),
                   damped_fourier_exact(K, 0.5 * end.p, 0.5 * start.p, nu_reg));
}

}  // namespace pspi
