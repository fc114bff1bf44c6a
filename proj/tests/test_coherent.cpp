#include <cmath>

#include <Eigen/Eigenvalues>

#include "pspi/coherent.hpp"
#include "support.hpp"

using namespace pspi;

TEST_CASE("coherent vector at the origin is the ground state") {
  for (int D : {1, 4, 32}) {
    const CVector c = coherent_coefficients({0, 0}, D);
    CHECK(c(0) == cplx(1.0));
    CHECK(c.norm() == 1.0);
  }
  // the certified version needs the last four slots to be empty
  CHECK(coherent_vector({0, 0}, 5)[0] == cplx(1.0));
  CHECK_THROWS_KIND(coherent_vector({0, 0}, 4), ErrorKind::InsufficientDimension);
}

TEST_CASE("coherent vector examples") {
  CHECK(std::abs(coherent_vector({1.5, -0.5}, 64).norm() - 1.0) <= 1e-10);
  const cplx ip = coherent_vector({0, 0}, 64).coeffs().dot(coherent_vector({0, 2}, 64).coeffs());
  CHECK(std::abs(ip - std::exp(-1.0)) <= 1e-9);
}

TEST_CASE("closed form matches the operator exponentials") {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const PhasePoint pt = random_point(rng, 2.0);
    const CVector a = coherent_vector(pt, 96).coeffs();
    const CVector b = coherent_vector_via_exponentials(pt, 96, 256).coeffs();
    worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("overlap examples") {
  CHECK(overlap({0.3, -1.2}, {0.3, -1.2}) == cplx(1.0, 0.0));
  CHECK(std::abs(overlap({2, 0}, {0, 2}) - std::exp(cplx(-2.0, -2.0))) <= 1e-15);
  CHECK(std::abs(overlap({1, 0}, {0, 0}) - std::exp(-0.25)) <= 1e-15);
}

TEST_CASE("overlap symmetry and bound") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const PhasePoint a = random_point(rng, 3.0), b = random_point(rng, 3.0);
    CHECK(overlap(a, b) == std::conj(overlap(b, a)));
    CHECK(std::abs(overlap(a, b)) < 1.0);
  }
}

TEST_CASE("Gram matrices are positive semidefinite") {
  std::mt19937_64 rng(17);
  for (int set = 0; set < 10; ++set) {
    std::vector<PhasePoint> pts;
    for (int i = 0; i < 8; ++i) pts.push_back(random_point(rng, 2.0));
    CMatrix G(8, 8);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) G(i, j) = overlap(pts[i], pts[j]);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(G);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
  }
}

TEST_CASE("Fock inner products reproduce the overlap kernel") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 20; ++i) {
    const PhasePoint a = random_point(rng, 2.0), b = random_point(rng, 2.0);
    const FockVector va = coherent_vector(a, 96), vb = coherent_vector(b, 96);
    CHECK(std::abs(va.coeffs().dot(vb.coeffs()) - overlap(a, b)) <= 1e-9);
  }
}

TEST_CASE("fold check") {
  const GridSpec g(10.0, 201);
  CHECK(fold_check({0, 0}, {0, 0}, g).error <= 1e-8);
  const FoldCheck f = fold_check({0, 0}, {0, 2}, g);
  CHECK(f.error <= 1e-8);
  CHECK(std::abs(f.rhs - std::exp(-1.0)) <= 1e-15);
  CHECK_THROWS_KIND(fold_check({0, 0}, {0, 2}, GridSpec(10.0, 2)), ErrorKind::DomainTooSmall);
  CHECK_THROWS_KIND(fold_check({0, 0}, {0, 5}, GridSpec(10.0, 201)), ErrorKind::DomainTooSmall);
}

TEST_CASE("labels are expectation values") {
  const Expectations e0 = expectation_pq({0, 0}, 32);
  CHECK(std::abs(e0.p) <= 1e-15);
  CHECK(std::abs(e0.q) <= 1e-15);
  const Expectations e = expectation_pq({1.5, -0.5}, 64);
  CHECK(std::abs(e.p - 1.5) <= 1e-8);
  CHECK(std::abs(e.q + 0.5) <= 1e-8);
  CHECK_THROWS_KIND(expectation_pq({3, 3}, 16), ErrorKind::InsufficientDimension);
  CHECK_THROWS_KIND(coherent_vector({3, 3}, 16), ErrorKind::InsufficientDimension);
}

TEST_CASE("anti-normal quantization by quadrature") {
  const int D = 24;
  const auto block = [&](const CMatrix& m) { return m.topLeftCorner(D - 4, D - 4); };
  const PolynomialSymbol one = PolynomialSymbol::constant(1.0);
  const PolynomialSymbol ho = PolynomialSymbol::harmonic();
  const PolynomialSymbol q = PolynomialSymbol::q();

  const GridSpec g1 = GridSpec::with_spacing(antinormal_half_width(one, D), 0.5);
  CHECK(max_abs(block(quantize_antinormal(one, D, g1).entries()) - CMatrix::Identity(D - 4, D - 4)) <= 1e-8);

  const GridSpec g2 = GridSpec::with_spacing(antinormal_half_width(ho, D), 0.5);
  CMatrix diag = CMatrix::Zero(D - 4, D - 4);
  for (int n = 0; n < D - 4; ++n) diag(n, n) = n + 1.0;
  const CMatrix Hanti = quantize_antinormal(ho, D, g2).entries();
  CHECK(max_abs(block(Hanti) - diag) <= 1e-7);

  const GridSpec g3 = GridSpec::with_spacing(antinormal_half_width(q, D), 0.5);
  CHECK(max_abs(block(quantize_antinormal(q, D, g3).entries()) - block(canonical_operators(D).Q.entries())) <= 1e-8);

  // ordering gap A A^dagger - A^dagger A = 1
  const CMatrix gap = block(Hanti - quantize_normal(ho, D).entries());
  CHECK(max_abs(gap - CMatrix::Identity(D - 4, D - 4)) <= 1e-7);
  CHECK(resolution_of_identity_defect(D, g1) <= 1e-8);
}

TEST_CASE("anti-normal quantization refuses a narrow grid") {
  CHECK_THROWS_KIND(quantize_antinormal(PolynomialSymbol::harmonic(), 24, GridSpec(4.0, 33)), ErrorKind::DomainTooSmall);
}

TEST_CASE("quadrature agrees with algebraic anti-normal ordering") {
  const int D = 20;
  const PolynomialSymbol h = PolynomialSymbol::parse("q^3 - 2*p*q + p^4/4");
  const GridSpec g = GridSpec::with_spacing(antinormal_half_width(h, D), 0.5);
  const CMatrix a = quantize_antinormal(h, D, g).entries().topLeftCorner(D - 4, D - 4);
  const CMatrix b = quantize_antinormal_algebraic(h, D).entries().topLeftCorner(D - 4, D - 4);
  CHECK(max_abs(a - b) <= 1e-7);
}

TEST_CASE("normal-ordered quantization") {
  const int D = 16;
  CHECK(max_abs(quantize_normal(PolynomialSymbol::constant(1.0), D).entries() - CMatrix::Identity(D, D)) <= 1e-15);
  const CMatrix n = quantize_normal(PolynomialSymbol::harmonic(), D).entries();
  for (int k = 0; k < D; ++k) CHECK(std::abs(n(k, k) - double(k)) <= 1e-13);
  CHECK(max_abs(quantize_normal(PolynomialSymbol::q(), D).entries() - canonical_operators(D).Q.entries()) <= 1e-15);
  CHECK_THROWS_KIND(quantize_normal(PolynomialSymbol::parse("q^9"), D), ErrorKind::UnsupportedSymbol);
}
