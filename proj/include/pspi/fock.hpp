#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace pspi {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr cplx kI{0.0, 1.0};

/// Uniform symmetric grid on [-L, L] with M >= 2 nodes. Node k sits at
/// L * (2k - (M-1)) / (M-1), so node(M-1-k) == -node(k) bit-for-bit.
class GridSpec {
 public:
  GridSpec(double half_width, int points);

  double half_width() const { return half_width_; }
  int points() const { return points_; }
  double spacing() const { return 2.0 * half_width_ / (points_ - 1); }
  double node(int k) const;
  // Trapezoid weight for node k.
  double weight(int k) const;
  std::vector<double> nodes() const;
  std::vector<double> weights() const;

  // Smallest odd node count with spacing <= max_spacing.
  static GridSpec with_spacing(double half_width, double max_spacing);

 private:
  double half_width_;
  int points_;
};

/// Coefficients in the truncated number basis, n = 0..dim-1.
class FockVector {
 public:
  explicit FockVector(CVector coeffs);

  int dim() const { return static_cast<int>(coeffs_.size()); }
  const CVector& coeffs() const { return coeffs_; }
  cplx operator[](int n) const { return coeffs_(n); }
  double norm() const { return coeffs_.norm(); }

  static FockVector basis(int dim, int n);

 private:
  CVector coeffs_;
};

class FockOperator {
 public:
  explicit FockOperator(CMatrix entries);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const CMatrix& entries() const { return entries_; }
  cplx operator()(int m, int n) const { return entries_(m, n); }

  FockVector apply(const FockVector& v) const;
  // <a|M|b>
  cplx matrix_element(const FockVector& a, const FockVector& b) const;
  double hermiticity_defect() const;

  static FockOperator identity(int dim);

 private:
  CMatrix entries_;
};

struct CanonicalOperators {
  FockOperator Q;
  FockOperator P;
  FockOperator A;
};

CanonicalOperators canonical_operators(int dim);

// Truncated ladder matrices: annihilation(dim)(n-1, n) = sqrt(n).
CMatrix annihilation(int dim);
CMatrix creation(int dim);

/// e^{-iHT} by Hermitian eigendecomposition. H must be Hermitian to 1e-10.
FockOperator spectral_propagator(const FockOperator& H, double T);

// Largest |c_n| with n >= dim - 4. Operator-level results are trusted only
// when this is below kTruncationTolerance for every vector involved.
double truncation_estimate(const FockVector& v);
inline constexpr double kTruncationTolerance = 1e-8;

double max_abs(const CMatrix& m);

/// Trapezoid rule over g; samples[k] is f(g.node(k)).
cplx quad_1d(std::span<const cplx> samples, const GridSpec& g);

template <typename F>
cplx quad_1d(F&& f, const GridSpec& g) {
  std::vector<cplx> samples(static_cast<std::size_t>(g.points()));
  for (int k = 0; k < g.points(); ++k) samples[static_cast<std::size_t>(k)] = f(g.node(k));
  return quad_1d(std::span<const cplx>(samples), g);
}

// Tensor-product trapezoid rule; samples are row-major with the first
// grid as the slow index.
cplx quad_2d(std::span<const cplx> samples, const GridSpec& g1, const GridSpec& g2);

// Value at h = 0 of the polynomial through (h[k], values[k]) (Neville).
cplx richardson_limit(std::span<const double> h, std::span<const cplx> values);

// Least-squares slope of log(error) against log(step). Empty when every
// error is below 1e-10 (a flat, already-exact sequence has no order).
std::optional<double> fitted_order(std::span<const double> step, std::span<const double> error);

}  // namespace pspi
