#include <cmath>
#include <numbers>
#include <vector>

#include "pspi/lattice_q.hpp"
#include "pspi/parallel.hpp"
#include "support.hpp"

using namespace pspi;

namespace {
constexpr double kPi = std::numbers::pi;
const PolynomialSymbol kFree;
const PolynomialSymbol kHarmonicV = PolynomialSymbol::parse("q^2/2");

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST_CASE("slice kernel examples") {
  const cplx branch = std::polar(1.0, -kPi / 4) / std::sqrt(2 * kPi);
  CHECK(std::abs(slice_kernel(0.4, 0.4, 1.0, kFree) - branch) <= 1e-15);
  for (double dq : {0.0, 0.3, -2.0, 5.0})
    CHECK(std::abs(slice_kernel(dq, 0.1, 0.25, kFree)) == doctest::Approx(1.0 / std::sqrt(2 * kPi * 0.25)).epsilon(1e-14));
  const cplx free = slice_kernel(1.0, 1.0, 0.1, kFree);
  CHECK(std::abs(slice_kernel(1.0, 1.0, 0.1, kHarmonicV) - free * std::polar(1.0, -0.05)) <= 1e-14);
  CHECK_THROWS_KIND(slice_kernel(0.0, 0.0, 0.1, PolynomialSymbol::p()), ErrorKind::UnsupportedSymbol);
  CHECK_THROWS_KIND(potential_of(PolynomialSymbol::parse("p*q")), ErrorKind::UnsupportedSymbol);
  CHECK(potential_of(PolynomialSymbol::harmonic()) == kHarmonicV);
}

TEST_CASE("slice kernel is the damped p-integral in the limit") {
  // (1/2pi) int e^{i p dq - i eps p^2/2 - p^2/nu} dp, extrapolated in 1/nu
  const double eps = 0.5, dq = 0.7;
  std::vector<double> h;
  std::vector<cplx> v;
  for (double nu : {50.0, 100.0, 200.0, 400.0}) {
    const double L = std::sqrt(nu * 28.0);
    const GridSpec g = GridSpec::with_spacing(L, 2 * kPi / (3.0 * (eps * L + dq)));
    v.push_back(quad_1d([&](double p) { return std::exp(cplx(-p * p / nu, p * dq - 0.5 * eps * p * p)); }, g) / (2 * kPi));
    h.push_back(1.0 / nu);
  }
  CHECK(rel(richardson_limit(h, v), slice_kernel(dq, 0.0, eps, kFree)) <= 1e-6);
}

TEST_CASE("free lattice is exact at every N") {
  const cplx exact = free_kernel(0.7, -0.3, 1.0);
  for (int N : {0, 1, 8, 64}) {
    const QLatticeValue v = propagator_q({N, 1.0, GridSpec(8.0, 181)}, kFree, 0.7, -0.3);
    CHECK(rel(v.value, exact) <= 1e-6);
    CHECK(v.leak < kLeakTolerance);
  }
  const cplx a = propagator_q({1, 1.0}, kFree, 0.7, -0.3).value;
  const cplx b = propagator_q({64, 1.0}, kFree, 0.7, -0.3).value;
  CHECK(rel(a, b) <= 1e-6);
}

TEST_CASE("harmonic lattice converges to the Mehler kernel") {
  const cplx exact = mehler_kernel(0.0, 0.0, 1.0);
  std::vector<double> step, err;
  for (int N : {8, 16, 32, 64}) {
    const LatticeConfig cfg{N, 1.0};
    step.push_back(cfg.step());
    err.push_back(rel(propagator_q(cfg, kHarmonicV, 0.0, 0.0).value, exact));
  }
  REQUIRE(fitted_order(step, err).has_value());
  CHECK(*fitted_order(step, err) >= 0.9);
  CHECK(err.back() <= 1e-2);
  for (std::size_t i = 1; i < err.size(); ++i) CHECK(err[i] < err[i - 1]);
}

TEST_CASE("N = 0 is a single slice") {
  const cplx v = propagator_q({0, 0.1}, kHarmonicV, 0.4, -0.2).value;
  CHECK(std::abs(v - slice_kernel(0.4, -0.2, 0.1, kHarmonicV)) <= 1e-12 * std::abs(v));
}

TEST_CASE("certificates of the q-lattice") {
  // grid too coarse for the step
  CHECK_THROWS_KIND(propagator_q({64, 1.0, GridSpec(8.0, 41)}, kFree, 0.0, 0.0), ErrorKind::DomainTooSmall);
  // contour window too narrow for the harmonic spread
  CHECK_THROWS_KIND(propagator_q({16, 1.0, GridSpec(3.0, 101)}, kHarmonicV, 0.0, 0.0), ErrorKind::DomainTooSmall);
  // step sanity bound eps * max|V| <= 0.5
  CHECK_THROWS_KIND(propagator_q({4, 1.0}, PolynomialSymbol::parse("100*q^2"), 0.0, 0.0), ErrorKind::InvalidConfig);
  CHECK_THROWS_KIND(propagator_q({4, 1.0}, PolynomialSymbol::parse("q^3"), 0.0, 0.0), ErrorKind::UnsupportedSymbol);
  CHECK_THROWS_KIND(propagator_q({-1, 1.0}, kFree, 0.0, 0.0), ErrorKind::InvalidConfig);
  CHECK_THROWS_KIND(propagator_q({4, -1.0}, kFree, 0.0, 0.0), ErrorKind::InvalidConfig);
}

TEST_CASE("batch and single evaluations agree") {
  const LatticeConfig cfg{12, 0.8};
  std::vector<std::pair<cplx, cplx>> ends;
  for (int i = 0; i < 40; ++i) ends.push_back({0.1 * i - 2.0, 1.0 - 0.05 * i});
  const auto batch = propagator_q_batch(cfg, kHarmonicV, ends);
  for (std::size_t i = 0; i < ends.size(); i += 13)
    CHECK(std::abs(batch[i].value - propagator_q(cfg, kHarmonicV, ends[i].first, ends[i].second).value) <=
          1e-14 * std::abs(batch[i].value));
  // a pair's value depends only on its batch slot, never on the worker count
  const auto again = propagator_q_batch(cfg, kHarmonicV, ends);
  for (std::size_t i = 0; i < ends.size(); ++i) CHECK(again[i].value == batch[i].value);
}

TEST_CASE("lattice folds through the intermediate position") {
  const LatticeConfig half{32, 0.5};
  for (const PolynomialSymbol* V : {&kFree, &kHarmonicV}) {
    const LatticeFold f = lattice_fold_q(half, half, *V, 0.3, -0.2, GridSpec(8.0, 161));
    CHECK(f.rel_error <= 5e-3);
  }
}

namespace {
// norm of K psi0 on the packet grid, psi0 a unit Gaussian centred at q=1
struct PacketNorms {
  double n0, nT, leak;
};

PacketNorms evolve_packet(const PolynomialSymbol& V, int N, const GridSpec& g, const GridSpec& contour) {
  CVector psi0(g.points()), w(g.points());
  for (int k = 0; k < g.points(); ++k) {
    psi0(k) = std::exp(-0.5 * (g.node(k) - 1.0) * (g.node(k) - 1.0)) / std::pow(kPi, 0.25);
    w(k) = g.weight(k);
  }
  PacketNorms r{0.0, 0.0, 0.0};
  const CVector psiT = lattice_kernel_matrix({N, 1.0, contour}, V, g, g, &r.leak) * w.cwiseProduct(psi0);
  for (int k = 0; k < g.points(); ++k) {
    r.n0 += g.weight(k) * std::norm(psi0(k));
    r.nT += g.weight(k) * std::norm(psiT(k));
  }
  return r;
}
}  // namespace

TEST_CASE("unitarity proxy: free packet") {
  const PacketNorms r = evolve_packet(kFree, 64, GridSpec(6.0, 61), GridSpec(10.0, 221));
  CHECK(r.leak < kLeakTolerance);
  CHECK(std::abs(r.n0 - 1.0) <= 1e-10);
  CHECK(std::abs(r.nT - r.n0) <= 1e-3);
}

// The midpoint lattice loses norm at first order in 1/N for the oscillator
// (about 0.25/N), so 1e-3 at N=64 is out of reach. Kept as a known failure.
TEST_CASE("unitarity proxy: oscillator packet at N=64" * doctest::should_fail()) {
  const PacketNorms r = evolve_packet(kHarmonicV, 64, GridSpec(3.5, 41), GridSpec(10.0, 221));
  CHECK(std::abs(r.nT - r.n0) <= 1e-3);
}

TEST_CASE("unitarity proxy: oscillator norm defect is first order") {
  const GridSpec g(3.5, 41);
  const PacketNorms r32 = evolve_packet(kHarmonicV, 32, g, GridSpec(10.0, 161));
  const PacketNorms r64 = evolve_packet(kHarmonicV, 64, g, GridSpec(10.0, 221));
  CHECK(r32.leak < kLeakTolerance);
  CHECK(r64.leak < kLeakTolerance);
  const double d32 = r32.nT - r32.n0, d64 = r64.nT - r64.n0;
  MESSAGE("norm defect N=32 " << d32 << ", N=64 " << d64);
  CHECK(std::abs(d64) < std::abs(d32));
  CHECK(d32 / d64 == doctest::Approx(2.0).epsilon(0.1));
  // the 1/N extrapolation is conserved
  CHECK(std::abs(2.0 * d64 - d32) <= 1e-3);
}

TEST_CASE("Mehler kernel") {
  CHECK(std::abs(mehler_kernel(0.0, 0.0, kPi / 2) - 1.0 / std::sqrt(2 * kPi * kI)) <= 1e-15);
  CHECK_THROWS_KIND(mehler_kernel(0.0, 0.0, kPi), ErrorKind::Caustic);
  // real-time continuation matches the complex-time form
  CHECK(std::abs(mehler_kernel(1.0, 0.0, 1.0) - mehler_kernel(cplx(1.0), cplx(0.0), cplx(1.0))) <= 1e-15);
  // the Hermite sum converges only off the real axis
  for (cplx tau : {cplx(1.0, -0.5), cplx(2.5, -0.3), cplx(0.4, -1.0)})
    CHECK(std::abs(mehler_kernel(cplx(1.0), cplx(0.0), tau) - mehler_spectral_sum(1.0, 0.0, tau, 128)) <= 1e-8);
  // past the first caustic the branch picks up the Maslov phase e^{-i pi/2}
  const cplx past = mehler_kernel(0.0, 0.0, kPi + kPi / 2);
  CHECK(std::abs(past - std::polar(1.0, -kPi / 2) / std::sqrt(2 * kPi * kI)) <= 1e-14);
}

TEST_CASE("damped Fourier quadrature matches its closed form") {
  for (double T : {0.5, 1.0, 2.0}) {
    const QuadraticKernel K = QuadraticKernel::mehler(T);
    for (double nu : {4.0, 16.0}) {
      const GridSpec g = damped_fourier_grid(K, nu, 2.0);
      const cplx q = damped_fourier(K, 1.0, -0.5, nu, g);
      CHECK(std::abs(q - damped_fourier_exact(K, 1.0, -0.5, nu)) <= 1e-10 * std::abs(q));
    }
  }
  CHECK_THROWS_KIND(damped_fourier(QuadraticKernel::free(1.0), 0.0, 0.0, 100.0, GridSpec(2.0, 41)), ErrorKind::DomainTooSmall);
}

TEST_CASE("harmonic p-representation is the Mehler form in p") {
  const QuadraticKernel K = QuadraticKernel::mehler(1.0);
  for (auto [pe, ps] : {std::pair{1.0, 0.5}, std::pair{0.0, 0.0}, std::pair{-1.5, 0.7}}) {
    std::vector<double> h;
    std::vector<cplx> v;
    for (double nu : {16.0, 32.0, 64.0, 128.0}) {
      v.push_back(damped_fourier(K, pe, ps, nu, damped_fourier_grid(K, nu, 2.0)));
      h.push_back(1.0 / nu);
    }
    CHECK(rel(richardson_limit(h, v), mehler_kernel(pe, ps, 1.0)) <= 2e-2);
  }
}

TEST_CASE("sampled transform agrees with the direct damped integral") {
  const GridSpec gq(10.0, 301), gp(1.0, 5);
  const QuadraticKernel K = QuadraticKernel::mehler(1.0);
  CMatrix Kq(gq.points(), gq.points());
  for (int i = 0; i < gq.points(); ++i)
    for (int j = 0; j < gq.points(); ++j) Kq(i, j) = K(gq.node(i), gq.node(j));
  const CMatrix Kp = to_p_representation(Kq, gq, gp, 4.0);
  for (int a = 0; a < gp.points(); ++a)
    for (int b = 0; b < gp.points(); ++b)
      CHECK(std::abs(Kp(a, b) - damped_fourier_exact(K, gp.node(a), gp.node(b), 4.0)) <= 1e-9);
}

TEST_CASE("free p-representation is diagonal with phase e^{-ip^2/2}") {
  const GridSpec gq(12.0, 481), gp(2.0, 9);
  CMatrix Kq(gq.points(), gq.points());
  for (int i = 0; i < gq.points(); ++i)
    for (int j = 0; j < gq.points(); ++j) Kq(i, j) = free_kernel(gq.node(i), gq.node(j), 1.0);
  // the convergence factor biases the phase by O(1/nu); remove it by
  // extrapolating the unit-modulus diagonal in 1/nu
  const std::vector<double> nus{4.0, 6.0, 7.5};
  std::vector<CMatrix> Kp;
  std::vector<double> h;
  for (double nu : nus) {
    Kp.push_back(to_p_representation(Kq, gq, gp, nu));
    h.push_back(1.0 / nu);
  }
  for (int a = 0; a < gp.points(); ++a) {
    const double p = gp.node(a);
    std::vector<cplx> d;
    for (const auto& M : Kp) d.push_back(M(a, a) / std::abs(M(a, a)));
    CHECK(std::abs(richardson_limit(h, d) - std::polar(1.0, -0.5 * p * p)) <= 2e-2);
  }
}

TEST_CASE("identity kernel transforms to a damped delta in p") {
  const GridSpec gq(8.0, 321), gp(1.0, 11);
  const CMatrix Kq = CMatrix::Identity(gq.points(), gq.points()) / gq.spacing();
  const double nu = 6.0;
  const CMatrix Kp = to_p_representation(Kq, gq, gp, nu);
  for (int a = 0; a < gp.points(); ++a)
    for (int b = 0; b < gp.points(); ++b) {
      const double dp = gp.node(a) - gp.node(b);
      const double expect = std::sqrt(kPi * nu / 2) * std::exp(-nu * dp * dp / 8) / (2 * kPi);
      CHECK(std::abs(Kp(a, b) - expect) <= 1e-8);
    }
  CHECK_THROWS_KIND(to_p_representation(Kq, gq, gp, 1e6), ErrorKind::DomainTooSmall);
}
