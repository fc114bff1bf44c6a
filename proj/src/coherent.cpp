#include "pspi/coherent.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "pspi/error.hpp"
#include "pspi/parallel.hpp"

namespace pspi {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Polynomial in (zbar, z): key (j, k) is the coefficient of zbar^j z^k.
using ZPoly = std::map<std::pair<int, int>, cplx>;

ZPoly zmul(const ZPoly& a, const ZPoly& b) {
  ZPoly r;
  for (const auto& [ka, ca] : a)
    for (const auto& [kb, cb] : b) r[{ka.first + kb.first, ka.second + kb.second}] += ca * cb;
  return r;
}

// q = (z + zbar)/sqrt2, p = i(zbar - z)/sqrt2
ZPoly to_zpoly(const PolynomialSymbol& h) {
  const double r = 1.0 / std::sqrt(2.0);
  const ZPoly zq{{{1, 0}, r}, {{0, 1}, r}};
  const ZPoly zp{{{1, 0}, kI * r}, {{0, 1}, -kI * r}};
  ZPoly out;
  for (const auto& [key, c] : h.terms()) {
    ZPoly term{{{0, 0}, c}};
    for (int a = 0; a < key.first; ++a) term = zmul(term, zp);
    for (int b = 0; b < key.second; ++b) term = zmul(term, zq);
    for (const auto& [k, v] : term) out[k] += v;
  }
  return out;
}

CMatrix matrix_power(const CMatrix& m, int k) {
  CMatrix r = CMatrix::Identity(m.rows(), m.cols());
  for (int i = 0; i < k; ++i) r = r * m;
  return r;
}

void check_degree(const PolynomialSymbol& h) {
  if (h.degree() > kMaxSymbolDegree)
    fail(ErrorKind::UnsupportedSymbol,
         "symbol degree " + std::to_string(h.degree()) + " exceeds envelope " + std::to_string(kMaxSymbolDegree));
}

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

// |h| |c_{D-1}|^2 at pt, computed in log space.
double envelope_at(const PolynomialSymbol& h, int dim, const PhasePoint& pt) {
  const double r2 = 0.5 * (pt.p * pt.p + pt.q * pt.q);
  const int n = dim - 1;
  const double log_c2 = -r2 + (n > 0 ? n * std::log(r2) : 0.0) - log_factorial(n);
  return std::abs(h(pt.p, pt.q)) * std::exp(log_c2);
}

double boundary_envelope(const PolynomialSymbol& h, int dim, const GridSpec& g) {
  double worst = 0.0;
  const double L = g.half_width();
  for (int k = 0; k < g.points(); ++k) {
    const double x = g.node(k);
    for (const PhasePoint pt : {PhasePoint{x, L}, PhasePoint{x, -L}, PhasePoint{L, x}, PhasePoint{-L, x}})
      worst = std::max(worst, envelope_at(h, dim, pt));
  }
  return worst;
}

}  // namespace

std::vector<ZMonomial> normal_symbol(const PolynomialSymbol& h) {
  std::vector<ZMonomial> out;
  for (const auto& [key, c] : to_zpoly(h))
    if (c != cplx(0.0)) out.push_back({key.first, key.second, c});
  return out;
}

void validate(const PhasePoint& pt) {
  if (!std::isfinite(pt.p) || !std::isfinite(pt.q))
    fail(ErrorKind::InvalidConfig, "phase point must be finite");
  if (std::abs(pt.p) > kPhasePointEnvelope || std::abs(pt.q) > kPhasePointEnvelope)
    fail(ErrorKind::InvalidConfig, "phase point outside |p|,|q| <= 50");
}

cplx complex_label(const PhasePoint& pt) { return cplx(pt.q, pt.p) / std::sqrt(2.0); }

CVector coherent_coefficients(const PhasePoint& pt, int dim) {
  if (dim < 1) fail(ErrorKind::InvalidDimension, "coherent vector needs dim >= 1");
  const cplx z = complex_label(pt);
  CVector c(dim);
  c(0) = std::exp(cplx(-0.5 * std::norm(z), -0.5 * pt.p * pt.q));
  for (int n = 1; n < dim; ++n) c(n) = c(n - 1) * z / std::sqrt(static_cast<double>(n));
  return c;
}

FockVector coherent_vector(const PhasePoint& pt, int dim) {
  validate(pt);
  FockVector v(coherent_coefficients(pt, dim));
  const double est = truncation_estimate(v);
  if (est >= kTruncationTolerance)
    fail(ErrorKind::InsufficientDimension, "coherent state at (p,q)=(" + std::to_string(pt.p) + "," +
                                               std::to_string(pt.q) + ") needs more than D=" + std::to_string(dim) +
                                               " (truncation estimate " + std::to_string(est) + ")");
  return v;
}

FockVector coherent_vector_via_exponentials(const PhasePoint& pt, int dim, int work_dim) {
  if (work_dim < dim) fail(ErrorKind::InvalidDimension, "work dimension must be >= dim");
  const auto ops = canonical_operators(work_dim);
  const FockOperator shift_q = spectral_propagator(ops.P, pt.q);    // e^{-iqP}
  const FockOperator boost_p = spectral_propagator(ops.Q, -pt.p);   // e^{+ipQ}
  const CVector full = shift_q.entries() * (boost_p.entries() * FockVector::basis(work_dim, 0).coeffs());
  return FockVector(full.head(dim));
}

cplx overlap(const PhasePoint& a, const PhasePoint& b) {
  const double dp = a.p - b.p;
  const double dq = a.q - b.q;
  return std::exp(cplx(-0.25 * (dp * dp + dq * dq), 0.5 * (a.p + b.p) * dq));
}

FoldCheck fold_check(const PhasePoint& a, const PhasePoint& b, const GridSpec& grid) {
  validate(a);
  validate(b);
  const double reach = std::max({std::abs(a.p), std::abs(a.q), std::abs(b.p), std::abs(b.q)}) + 8.0;
  if (grid.half_width() < reach)
    fail(ErrorKind::DomainTooSmall, "fold grid half-width " + std::to_string(grid.half_width()) +
                                        " does not cover the Gaussian support (need " + std::to_string(reach) + ")");
  if (grid.spacing() > 1.0)
    fail(ErrorKind::DomainTooSmall, "fold grid spacing " + std::to_string(grid.spacing()) + " cannot resolve the kernel");
  const auto m = static_cast<std::size_t>(grid.points());
  std::vector<cplx> samples(m * m);
  parallel_for(m, [&](std::size_t i) {
    const double p = grid.node(static_cast<int>(i));
    for (std::size_t j = 0; j < m; ++j) {
      const PhasePoint x{p, grid.node(static_cast<int>(j))};
      samples[i * m + j] = overlap(a, x) * overlap(x, b);
    }
  });
  const cplx lhs = quad_2d(samples, grid, grid) / kTwoPi;
  const cplx rhs = overlap(a, b);
  return {lhs, rhs, std::abs(lhs - rhs)};
}

Expectations expectation_pq(const PhasePoint& pt, int dim) {
  const FockVector v = coherent_vector(pt, dim);
  const auto ops = canonical_operators(dim);
  return {ops.P.matrix_element(v, v).real(), ops.Q.matrix_element(v, v).real()};
}

double antinormal_half_width(const PolynomialSymbol& h, int dim) {
  for (double L = 4.0; L <= 2.0 * kPhasePointEnvelope; L += 0.5) {
    const GridSpec edge(L, 401);
    if (boundary_envelope(h, dim, edge) < 1e-12) return L;
  }
  fail(ErrorKind::DomainTooSmall, "no grid within the operating envelope satisfies the anti-normal envelope bound");
}

FockOperator quantize_antinormal(const PolynomialSymbol& h, int dim, const GridSpec& grid) {
  check_degree(h);
  if (dim < 1) fail(ErrorKind::InvalidDimension, "quantization needs dim >= 1");
  const double env = boundary_envelope(h, dim, grid);
  if (env >= 1e-12)
    fail(ErrorKind::DomainTooSmall, "anti-normal grid boundary envelope " + std::to_string(env) + " >= 1e-12");

  const int m = grid.points();
  const auto nodes = static_cast<Eigen::Index>(m) * m;
  CMatrix coeffs(dim, nodes);
  Eigen::VectorXd weights(nodes);
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t i) {
    const int ii = static_cast<int>(i);
    for (int j = 0; j < m; ++j) {
      const Eigen::Index col = static_cast<Eigen::Index>(ii) * m + j;
      const PhasePoint x{grid.node(ii), grid.node(j)};
      coeffs.col(col) = coherent_coefficients(x, dim);
      weights(col) = h(x.p, x.q) * grid.weight(ii) * grid.weight(j) / kTwoPi;
    }
  });
  const CMatrix raw = coeffs * weights.asDiagonal() * coeffs.adjoint();
  if (max_abs(raw - raw.adjoint()) > 1e-9)
    fail(ErrorKind::NotHermitian, "anti-normal quadrature produced a non-Hermitian matrix");
  return FockOperator(0.5 * (raw + raw.adjoint()));
}

FockOperator quantize_normal(const PolynomialSymbol& h, int dim) {
  check_degree(h);
  if (dim < 1) fail(ErrorKind::InvalidDimension, "quantization needs dim >= 1");
  const CMatrix a = annihilation(dim);
  const CMatrix ad = a.adjoint();
  CMatrix out = CMatrix::Zero(dim, dim);
  for (const auto& [key, c] : to_zpoly(h)) out += c * (matrix_power(ad, key.first) * matrix_power(a, key.second));
  return FockOperator(std::move(out));
}

FockOperator quantize_antinormal_algebraic(const PolynomialSymbol& h, int dim) {
  check_degree(h);
  if (dim < 1) fail(ErrorKind::InvalidDimension, "quantization needs dim >= 1");
  // A^k A^dagger^j leaks out of the truncated space through the top j
  // levels; build in a padded space and crop.
  const int work = dim + h.degree();
  const CMatrix a = annihilation(work);
  const CMatrix ad = a.adjoint();
  CMatrix out = CMatrix::Zero(work, work);
  for (const auto& [key, c] : to_zpoly(h)) out += c * (matrix_power(a, key.second) * matrix_power(ad, key.first));
  return FockOperator(out.topLeftCorner(dim, dim));
}

double resolution_of_identity_defect(int dim, const GridSpec& grid) {
  const FockOperator one = quantize_antinormal(PolynomialSymbol::constant(1.0), dim, grid);
  const int lead = std::max(1, dim - 4);
  return max_abs(one.entries().topLeftCorner(lead, lead) - CMatrix::Identity(lead, lead));
}

}  // namespace pspi
