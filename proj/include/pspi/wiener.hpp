#pragma once

#include <cstdint>
#include <vector>

#include "pspi/coherent.hpp"

namespace pspi {

struct WienerConfig {
  double nu = 1.0;
  double T = 1.0;
  int n_steps = 256;
  std::size_t n_paths = 100000;
  std::uint64_t seed = 0;
  PhasePoint start;
  PhasePoint end;
};

void validate(const WienerConfig& cfg);

struct BridgePath {
  std::vector<double> times;
  std::vector<PhasePoint> pts;
};

/// Pinned 2-D Brownian path with per-coordinate variance nu*t, sampled
/// sequentially at n_steps + 1 uniform knots. The stream is a pure function of
/// (seed, path_index); pts.front() == start and pts.back() == end exactly.
BridgePath sample_bridge(const WienerConfig& cfg, std::size_t path_index);

// sum_k (p_{k+1} + p_k)(q_{k+1} - q_k) / 2
double stratonovich_pdq(const BridgePath& path);
double stratonovich_pdq(const std::vector<PhasePoint>& pts);
// sum_k p_k (q_{k+1} - q_k)
double ito_pdq(const BridgePath& path);

// Total mass of the pinned measure: the 2-D heat kernel
// (2 pi nu T)^{-1} exp{-|end - start|^2 / (2 nu T)}.
double bridge_mass(const WienerConfig& cfg);

struct WienerEstimate {
  cplx estimate;
  double std_error;
};

/// Monte-Carlo value of
///   2 pi e^{nu T/2} mass * E_bridge[ exp{ i sum p dq - i sum_k (T/n) h(midpoint_k) } ]
/// at fixed nu. Per-path samples are summed pairwise in index order, so the
/// result does not depend on the worker count.
WienerEstimate wiener_propagator(const WienerConfig& cfg, const PolynomialSymbol& h);

/// Exact value of wiener_propagator's expectation at h = 0 for the same
/// discretization: the Stratonovich sum is a quadratic form in the Gaussian
/// knots, integrated out knot by knot with 2x2 complex Gaussian messages.
cplx gaussian_oracle(const WienerConfig& cfg);

// Closed form of gaussian_oracle: with s = nu T / n, rho = ((2-s)/(2+s))^n,
//   e^{nu T/2} (2/(2+s))^n <end|start> exp{-rho |d|^2 / (2(1-rho))} / (1-rho).
cplx wiener_discrete_closed_form(const WienerConfig& cfg);

// n_steps -> infinity limit of gaussian_oracle, r = e^{-nu T}:
//   <end|start> exp{-r |d|^2 / (2(1-r))} / (1-r)
cplx wiener_continuum_value(double nu, double T, const PhasePoint& end, const PhasePoint& start);
// |wiener_continuum_value - <end|start>| without cancellation.
double wiener_continuum_deviation(double nu, double T, const PhasePoint& end, const PhasePoint& start);

}  // namespace pspi
