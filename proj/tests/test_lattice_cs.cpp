#include <cmath>

#include "pspi/lattice_cs.hpp"
#include "support.hpp"

using namespace pspi;

namespace {
const PolynomialSymbol kZero;
const PolynomialSymbol kHo = PolynomialSymbol::harmonic();
}  // namespace

TEST_CASE("slice kernel examples") {
  std::mt19937_64 rng(3);
  const PolynomialSymbol one = PolynomialSymbol::constant(1.0);
  for (int i = 0; i < 20; ++i) {
    const PhasePoint a = random_point(rng, 2.0), b = random_point(rng, 2.0);
    for (double eps : {0.0, 0.1, 3.0}) CHECK(cs_slice_kernel(a, b, eps, kZero) == overlap(a, b));
    CHECK(std::abs(cs_slice_kernel(a, b, 0.3, one) - overlap(a, b) * std::exp(-0.3 * kI)) <= 1e-15);
  }
  CHECK(cs_slice_kernel({0, 0}, {0, 0}, 0.1, kHo) == cplx(1.0));
}

TEST_CASE("slice kernel adjoint relation") {
  std::mt19937_64 rng(8);
  const PolynomialSymbol h = PolynomialSymbol::parse("q^3 - p*q + p^2/2");
  for (int i = 0; i < 50; ++i) {
    const PhasePoint a = random_point(rng, 2.0), b = random_point(rng, 2.0);
    const cplx lhs = cs_slice_kernel(a, b, 0.2, h);
    CHECK(std::abs(lhs - std::conj(cs_slice_kernel(b, a, -0.2, h))) <= 1e-13 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("slice kernel damping bound") {
  std::mt19937_64 rng(12);
  const PolynomialSymbol h = PolynomialSymbol::parse("q^3 - p*q + p^2/2");
  const double eps = 0.05;
  for (int i = 0; i < 50; ++i) {
    const PhasePoint a = random_point(rng, 2.0), b = random_point(rng, 2.0);
    const cplx pa = 0.5 * (a.p + b.p + kI * a.q - kI * b.q);
    const cplx qa = 0.5 * (a.q + b.q - kI * a.p + kI * b.p);
    const double d2 = (a.p - b.p) * (a.p - b.p) + (a.q - b.q) * (a.q - b.q);
    const double bound = std::exp(eps * std::abs(h(pa, qa).imag()) - 0.25 * d2);
    CHECK(std::abs(cs_slice_kernel(a, b, eps, h)) <= bound * (1.0 + 1e-12));
  }
}

TEST_CASE("N=0 is a single slice") {
  const PhasePoint end{0.5, -0.3}, start{-1.0, 0.7};
  const cplx v = propagator_cs(0, 0.8, kHo, end, start, covering_grid({end, start})).value;
  CHECK(v == cs_slice_kernel(end, start, 0.8, kHo));
}

TEST_CASE("h=0 reproduces the overlap at every N") {
  const PhaseGrid g = covering_grid({{0, 0}, {0, 2}});
  for (int N : {1, 2, 4, 8}) {
    const CsLatticeValue v = propagator_cs(N, 1.0, kZero, {0, 0}, {0, 2}, g);
    CHECK(std::abs(v.value - std::exp(-1.0)) <= 1e-6);
    CHECK(v.boundary < kCsBoundaryTolerance);
  }
  std::mt19937_64 rng(21);
  const PhaseGrid wide = covering_grid({{2, 2}});
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const PhasePoint a = random_point(rng, 2.0), b = random_point(rng, 2.0);
    for (int N : {1, 2, 4, 8}) worst = std::max(worst, std::abs(propagator_cs(N, 1.0, kZero, a, b, wide).value - overlap(a, b)));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("folds") {
  const PhaseGrid g = covering_grid({{0, 0}, {0, 2}});
  CHECK(cs_fold_check(kZero, 0.5, 2, 0.5, 2, {0, 0}, {0, 2}, g).error <= 1e-6);
  CHECK(cs_fold_check(kHo, 0.5, 16, 0.5, 16, {0, 0}, {0, 0}, covering_grid({{0, 0}})).error <= 5e-3);
  // the linear symbol drifts the packet, hence the wider window
  CHECK(cs_fold_check(PolynomialSymbol::q(), 0.5, 16, 0.5, 16, {0, 0}, {0, 0}, g).error <= 5e-3);
}

TEST_CASE("grid refinement does not move the value") {
  const PhasePoint end{1, 0}, start{0, 1};
  const cplx coarse = propagator_cs(2, 1.0, kHo, end, start, covering_grid({end, start}, 0.5)).value;
  const cplx fine = propagator_cs(2, 1.0, kHo, end, start, covering_grid({end, start}, 0.25)).value;
  CHECK(std::abs(coarse - fine) <= 1e-6);
}

TEST_CASE("narrow grid fails the boundary certificate") {
  CHECK_THROWS_KIND(propagator_cs(2, 1.0, kZero, {0, 0}, {0, 2}, PhaseGrid::square(3.0, 13)), ErrorKind::DomainTooSmall);
}

TEST_CASE("ordering experiment at the origin") {
  const OrderingExperiment e = ordering_experiment(kHo, 1.0, {0, 0}, {0, 0}, {4, 8, 16, 32}, covering_grid({{0, 0}}), 40);
  CHECK(e.verdict == "normal");
  for (double err : e.normal_error) CHECK(err <= 1e-12);
  CHECK(e.phase_gap <= 5e-2);
}

TEST_CASE("ordering experiment off the origin") {
  const PhasePoint end{0, 1}, start{1, 0};
  const OrderingExperiment e = ordering_experiment(kHo, 1.0, end, start, {4, 8, 16, 32}, covering_grid({end, start}), 40);
  MESSAGE("verdict " << e.verdict << ", order " << e.fitted_order.value_or(-1.0) << ", phase gap " << e.phase_gap);
  CHECK(e.verdict == "normal");
  REQUIRE(e.fitted_order.has_value());
  CHECK(*e.fitted_order >= 0.9);
  CHECK(e.phase_gap <= 5e-2);
  for (std::size_t i = 1; i < e.N.size(); ++i) CHECK(e.normal_error[i] < e.normal_error[i - 1]);
}
