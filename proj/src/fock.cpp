#include "pspi/fock.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "pspi/error.hpp"
#include "pspi/parallel.hpp"

namespace pspi {

GridSpec::GridSpec(double half_width, int points) : half_width_(half_width), points_(points) {
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    fail(ErrorKind::InvalidConfig, "grid half-width must be positive and finite");
  if (points < 2) fail(ErrorKind::InvalidConfig, "grid needs at least 2 points");
}

double GridSpec::node(int k) const {
  const int m1 = points_ - 1;
  return half_width_ * static_cast<double>(2 * k - m1) / static_cast<double>(m1);
}

double GridSpec::weight(int k) const {
  const double h = spacing();
  return (k == 0 || k == points_ - 1) ? 0.5 * h : h;
}

std::vector<double> GridSpec::nodes() const {
  std::vector<double> out(static_cast<std::size_t>(points_));
  for (int k = 0; k < points_; ++k) out[static_cast<std::size_t>(k)] = node(k);
  return out;
}

std::vector<double> GridSpec::weights() const {
  std::vector<double> out(static_cast<std::size_t>(points_));
  for (int k = 0; k < points_; ++k) out[static_cast<std::size_t>(k)] = weight(k);
  return out;
}

GridSpec GridSpec::with_spacing(double half_width, double max_spacing) {
  int intervals = static_cast<int>(std::ceil(2.0 * half_width / max_spacing - 1e-12));
  intervals = std::max(intervals, 2);
  if (intervals % 2) ++intervals;
  return GridSpec(half_width, intervals + 1);
}

FockVector::FockVector(CVector coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.size() < 1) fail(ErrorKind::InvalidDimension, "Fock vector needs dim >= 1");
  if (!coeffs_.allFinite()) fail(ErrorKind::InvalidConfig, "Fock vector has non-finite entries");
}

FockVector FockVector::basis(int dim, int n) {
  CVector c = CVector::Zero(dim);
  c(n) = 1.0;
  return FockVector(std::move(c));
}

FockOperator::FockOperator(CMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 1 || entries_.rows() != entries_.cols())
    fail(ErrorKind::InvalidDimension, "Fock operator must be square with dim >= 1");
}

FockVector FockOperator::apply(const FockVector& v) const {
  return FockVector(entries_ * v.coeffs());
}

cplx FockOperator::matrix_element(const FockVector& a, const FockVector& b) const {
  return a.coeffs().dot(entries_ * b.coeffs());
}

double FockOperator::hermiticity_defect() const { return max_abs(entries_ - entries_.adjoint()); }

FockOperator FockOperator::identity(int dim) { return FockOperator(CMatrix::Identity(dim, dim)); }

CMatrix annihilation(int dim) {
  CMatrix a = CMatrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

CMatrix creation(int dim) { return annihilation(dim).adjoint(); }

CanonicalOperators canonical_operators(int dim) {
  if (dim < 2) fail(ErrorKind::InvalidDimension, "canonical operators need D >= 2, got " + std::to_string(dim));
  const CMatrix a = annihilation(dim);
  const CMatrix ad = a.adjoint();
  const double r = 1.0 / std::sqrt(2.0);
  CMatrix q = (a + ad) * r;
  CMatrix p = (a - ad) * (r / kI);
  return {FockOperator(std::move(q)), FockOperator(std::move(p)), FockOperator(a)};
}

FockOperator spectral_propagator(const FockOperator& H, double T) {
  if (H.hermiticity_defect() > 1e-10)
    fail(ErrorKind::NotHermitian, "spectral_propagator requires a Hermitian generator");
  const CMatrix herm = 0.5 * (H.entries() + H.entries().adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(herm);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  CVector phases(ev.size());
  for (Eigen::Index k = 0; k < ev.size(); ++k) phases(k) = std::exp(-kI * (ev(k) * T));
  const CMatrix& v = eig.eigenvectors();
  return FockOperator(v * phases.asDiagonal() * v.adjoint());
}

double truncation_estimate(const FockVector& v) {
  double worst = 0.0;
  for (int n = std::max(0, v.dim() - 4); n < v.dim(); ++n) worst = std::max(worst, std::abs(v[n]));
  return worst;
}

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

cplx quad_1d(std::span<const cplx> samples, const GridSpec& g) {
  const auto m = static_cast<std::size_t>(g.points());
  if (samples.size() != m) fail(ErrorKind::InvalidConfig, "quad_1d: sample count does not match grid");
  std::vector<cplx> terms(samples.begin(), samples.end());
  terms.front() *= 0.5;
  terms.back() *= 0.5;
  const cplx s = pairwise_sum(std::span<const cplx>(terms));
  return s * (2.0 * g.half_width()) / static_cast<double>(g.points() - 1);
}

cplx quad_2d(std::span<const cplx> samples, const GridSpec& g1, const GridSpec& g2) {
  const auto m1 = static_cast<std::size_t>(g1.points());
  const auto m2 = static_cast<std::size_t>(g2.points());
  if (samples.size() != m1 * m2) fail(ErrorKind::InvalidConfig, "quad_2d: sample count does not match grid");
  std::vector<cplx> terms(samples.begin(), samples.end());
  for (std::size_t i = 0; i < m1; ++i) {
    const double wi = (i == 0 || i + 1 == m1) ? 0.5 : 1.0;
    for (std::size_t j = 0; j < m2; ++j) {
      const double wj = (j == 0 || j + 1 == m2) ? 0.5 : 1.0;
      terms[i * m2 + j] *= wi * wj;
    }
  }
  return pairwise_sum(std::span<const cplx>(terms)) * (g1.spacing() * g2.spacing());
}

cplx richardson_limit(std::span<const double> h, std::span<const cplx> values) {
  if (h.size() != values.size() || h.empty()) fail(ErrorKind::InvalidConfig, "richardson_limit needs matching, non-empty inputs");
  std::vector<cplx> t(values.begin(), values.end());
  const std::size_t n = t.size();
  for (std::size_t m = 1; m < n; ++m)
    for (std::size_t i = 0; i + m < n; ++i) t[i] = (h[i + m] * t[i] - h[i] * t[i + 1]) / (h[i + m] - h[i]);
  return t[0];
}

std::optional<double> fitted_order(std::span<const double> step, std::span<const double> error) {
  if (step.size() != error.size() || step.size() < 2)
    fail(ErrorKind::InvalidConfig, "fitted_order needs at least two matching (step, error) pairs");
  if (std::all_of(error.begin(), error.end(), [](double e) { return e < 1e-10; })) return std::nullopt;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(step.size());
  for (std::size_t k = 0; k < step.size(); ++k) {
    const double x = std::log(step[k]);
    const double y = std::log(std::max(error[k], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace pspi
