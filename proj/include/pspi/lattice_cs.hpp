#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pspi/coherent.hpp"

namespace pspi {

/// Product grid over phase space. Node k is (gp.node(k / Mq), gq.node(k % Mq)).
struct PhaseGrid {
  GridSpec gp;
  GridSpec gq;

  static PhaseGrid square(double half_width, int points) { return {GridSpec(half_width, points), GridSpec(half_width, points)}; }
  int size() const { return gp.points() * gq.points(); }
  PhasePoint node(int k) const { return {gp.node(k / gq.points()), gq.node(k % gq.points())}; }
  double weight(int k) const { return gp.weight(k / gq.points()) * gq.weight(k % gq.points()); }
};

inline constexpr double kCsBoundaryTolerance = 1e-10;

// Square grid with half-width (largest endpoint coordinate) + 10 and the
// given spacing (rounded down to an even interval count).
PhaseGrid covering_grid(const std::vector<PhasePoint>& ends, double spacing = 0.5);

/// One slice of the coherent-state lattice:
///
///   <next|prev> exp{ -i eps h( (p' + p + i q' - i q)/2, (q' + q - i p' + i p)/2 ) }
///
/// with (p', q') = next, h evaluated at the two complex arguments.
cplx cs_slice_kernel(const PhasePoint& next, const PhasePoint& prev, double eps, const PolynomialSymbol& h);

struct CsLatticeValue {
  cplx value;
  // Largest boundary-to-peak ratio seen: the endpoint kernels and every
  // intermediate vector on the grid.
  double boundary = 0.0;
};

/// N interior phase-space integrations with measure dp dq / 2pi, done as N
/// applications of the sampled transfer kernel. Throws DomainTooSmall when
/// the boundary ratio reaches kCsBoundaryTolerance.
CsLatticeValue propagator_cs(int N, double T, const PolynomialSymbol& h, const PhasePoint& end,
                             const PhasePoint& start, const PhaseGrid& grid);

struct CsFold {
  cplx folded;
  cplx direct;
  double error;
};

/// Lattice over T1 (N1 interior points) from start, folded over the grid
/// with the lattice over T2 (N2 interior points) into end, against the
/// direct lattice over T1 + T2 with N1 + N2 + 1 interior points.
CsFold cs_fold_check(const PolynomialSymbol& h, double T1, int N1, double T2, int N2, const PhasePoint& end,
                     const PhasePoint& start, const PhaseGrid& grid);

struct OrderingExperiment {
  std::vector<int> N;
  std::vector<cplx> lattice;
  cplx normal_oracle;
  cplx antinormal_oracle;
  std::vector<double> normal_error;
  std::vector<double> antinormal_error;
  // Fitted slope of log error against log eps for the selected ordering.
  std::optional<double> fitted_order;
  // "normal", "anti-normal" or "undetermined"
  std::string verdict;
  // |lattice(N_max) * e^{-iT} - other| / |other| when the selected
  // ordering is normal; e^{+iT} when it is anti-normal.
  double phase_gap = 0.0;
};

/// Runs the lattice for each N and compares against
/// <end| e^{-i H T} |start> for H = quantize_normal(h) and
/// H = quantize_antinormal_algebraic(h) in dimension D. The verdict names
/// the ordering whose error decreases with fitted order >= 0.9 (or stays
/// below 1e-12 at every N) and is the smaller at the largest N, provided
/// the other stays at least ten times larger there.
OrderingExperiment ordering_experiment(const PolynomialSymbol& h, double T, const PhasePoint& end,
                                       const PhasePoint& start, const std::vector<int>& N_list,
                                       const PhaseGrid& grid, int D);

}  // namespace pspi
