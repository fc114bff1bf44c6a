#include "pspi/lattice_cs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pspi/error.hpp"
#include "pspi/parallel.hpp"

namespace pspi {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Dense transfer matrices up to 2^26 entries (1 GiB); beyond that rows are
// evaluated on the fly with the same per-entry code.
constexpr std::size_t kDenseEntryLimit = std::size_t{1} << 26;

// Sampled transfer kernel over one slice of length eps. The symbol enters
// through its (zbar, z) expansion: the printed complex arguments are
// exactly p = i(zbar' - z)/sqrt2, q = (zbar' + z)/sqrt2.
class Transfer {
 public:
  Transfer(const PhaseGrid& grid, double eps, const PolynomialSymbol& h)
      : grid_(grid), eps_(eps), h_(h), terms_(normal_symbol(h)), n_(static_cast<std::size_t>(grid.size())) {
    int top = 0;
    for (const auto& t : terms_) top = std::max({top, t.zbar_power, t.z_power});
    stride_ = static_cast<std::size_t>(top) + 1;
    nodes_.resize(n_);
    weights_.resize(n_);
    zbar_pow_.resize(n_ * stride_);
    z_pow_.resize(n_ * stride_);
    for (std::size_t k = 0; k < n_; ++k) {
      nodes_[k] = grid.node(static_cast<int>(k));
      weights_[k] = grid.weight(static_cast<int>(k)) / kTwoPi;
      const cplx z = complex_label(nodes_[k]);
      cplx a = 1.0;
      cplx b = 1.0;
      for (std::size_t j = 0; j < stride_; ++j) {
        zbar_pow_[k * stride_ + j] = a;
        z_pow_[k * stride_ + j] = b;
        a *= std::conj(z);
        b *= z;
      }
    }
    if (n_ * n_ <= kDenseEntryLimit) {
      dense_.resize(n_ * n_);
      parallel_for(n_, [&](std::size_t i) {
        for (std::size_t j = 0; j < n_; ++j) dense_[i * n_ + j] = kernel(i, j);
      });
    }
  }

  std::size_t size() const { return n_; }
  double weight(std::size_t k) const { return weights_[k]; }
  const PhasePoint& node(std::size_t k) const { return nodes_[k]; }

  // K(node i, node j), no weights.
  cplx kernel(std::size_t i, std::size_t j) const {
    cplx s = 0.0;
    for (const auto& t : terms_)
      s += t.coeff * zbar_pow_[i * stride_ + static_cast<std::size_t>(t.zbar_power)] *
           z_pow_[j * stride_ + static_cast<std::size_t>(t.z_power)];
    return overlap(nodes_[i], nodes_[j]) * std::exp(-kI * eps_ * s);
  }

  // K(node k, start) and K(end, node k)
  cplx from_point(std::size_t k, const PhasePoint& start) const { return cs_slice_kernel(nodes_[k], start, eps_, h_); }
  cplx to_point(const PhasePoint& end, std::size_t k) const { return cs_slice_kernel(end, nodes_[k], eps_, h_); }

  cplx entry(std::size_t i, std::size_t j) const { return dense_.empty() ? kernel(i, j) : dense_[i * n_ + j]; }

  // out_i = sum_j K(i,j) w_j v_j
  CVector apply(const CVector& v) const {
    CVector out(static_cast<Eigen::Index>(n_));
    parallel_for(n_, [&](std::size_t i) {
      std::vector<cplx> t(n_);
      for (std::size_t j = 0; j < n_; ++j) t[j] = entry(i, j) * (weights_[j] * v(static_cast<Eigen::Index>(j)));
      out(static_cast<Eigen::Index>(i)) = pairwise_sum(std::span<const cplx>(t));
    });
    return out;
  }

  // out_j = sum_i v_i w_i K(i,j)
  CVector apply_left(const CVector& v) const {
    CVector out(static_cast<Eigen::Index>(n_));
    parallel_for(n_, [&](std::size_t j) {
      std::vector<cplx> t(n_);
      for (std::size_t i = 0; i < n_; ++i) t[i] = v(static_cast<Eigen::Index>(i)) * weights_[i] * entry(i, j);
      out(static_cast<Eigen::Index>(j)) = pairwise_sum(std::span<const cplx>(t));
    });
    return out;
  }

 private:
  PhaseGrid grid_;
  double eps_;
  PolynomialSymbol h_;
  std::vector<ZMonomial> terms_;
  std::size_t n_;
  std::size_t stride_ = 1;
  std::vector<PhasePoint> nodes_;
  std::vector<double> weights_;
  std::vector<cplx> zbar_pow_;
  std::vector<cplx> z_pow_;
  std::vector<cplx> dense_;
};

double boundary_ratio(const CVector& v, const PhaseGrid& grid) {
  const int mp = grid.gp.points();
  const int mq = grid.gq.points();
  double edge = 0.0;
  for (int k = 0; k < grid.size(); ++k) {
    const int ip = k / mq;
    const int iq = k % mq;
    if (ip == 0 || ip == mp - 1 || iq == 0 || iq == mq - 1) edge = std::max(edge, std::abs(v(k)));
  }
  const double peak = v.cwiseAbs().maxCoeff();
  return peak > 0.0 ? edge / peak : 0.0;
}

void check_boundary(double ratio) {
  if (ratio >= kCsBoundaryTolerance)
    fail(ErrorKind::DomainTooSmall, "coherent-state lattice boundary ratio " + std::to_string(ratio) +
                                        " >= 1e-10; widen the phase grid");
}

void check_time(double T, int N) {
  if (!(T >= 0.0) || !std::isfinite(T)) fail(ErrorKind::InvalidConfig, "lattice time T must be >= 0");
  if (N < 0) fail(ErrorKind::InvalidConfig, "lattice slice count N must be >= 0");
}

// Lattice value from start to every grid node with `interior` interior
// points, as a vector over nodes.
CVector forward(const Transfer& tr, int interior, const PhasePoint& start, const PhaseGrid& grid, double& worst) {
  CVector psi(static_cast<Eigen::Index>(tr.size()));
  for (std::size_t k = 0; k < tr.size(); ++k) psi(static_cast<Eigen::Index>(k)) = tr.from_point(k, start);
  worst = std::max(worst, boundary_ratio(psi, grid));
  for (int l = 0; l < interior; ++l) {
    psi = tr.apply(psi);
    worst = std::max(worst, boundary_ratio(psi, grid));
  }
  return psi;
}

}  // namespace

PhaseGrid covering_grid(const std::vector<PhasePoint>& ends, double spacing) {
  double reach = 0.0;
  for (const auto& e : ends) reach = std::max({reach, std::abs(e.p), std::abs(e.q)});
  const GridSpec g = GridSpec::with_spacing(reach + 10.0, spacing);
  return {g, g};
}

cplx cs_slice_kernel(const PhasePoint& next, const PhasePoint& prev, double eps, const PolynomialSymbol& h) {
  const cplx parg = 0.5 * cplx(next.p + prev.p, next.q - prev.q);
  const cplx qarg = 0.5 * cplx(next.q + prev.q, prev.p - next.p);
  return overlap(next, prev) * std::exp(-kI * eps * h(parg, qarg));
}

CsLatticeValue propagator_cs(int N, double T, const PolynomialSymbol& h, const PhasePoint& end,
                             const PhasePoint& start, const PhaseGrid& grid) {
  check_time(T, N);
  validate(end);
  validate(start);
  if (N == 0) return {cs_slice_kernel(end, start, T, h), 0.0};
  const Transfer tr(grid, T / (N + 1), h);
  double worst = 0.0;
  const CVector psi = forward(tr, N - 1, start, grid, worst);
  CVector last(static_cast<Eigen::Index>(tr.size()));
  std::vector<cplx> terms(tr.size());
  for (std::size_t k = 0; k < tr.size(); ++k) {
    last(static_cast<Eigen::Index>(k)) = tr.to_point(end, k);
    terms[k] = last(static_cast<Eigen::Index>(k)) * tr.weight(k) * psi(static_cast<Eigen::Index>(k));
  }
  worst = std::max(worst, boundary_ratio(last, grid));
  check_boundary(worst);
  return {pairwise_sum(std::span<const cplx>(terms)), worst};
}

CsFold cs_fold_check(const PolynomialSymbol& h, double T1, int N1, double T2, int N2, const PhasePoint& end,
                     const PhasePoint& start, const PhaseGrid& grid) {
  check_time(T1, N1);
  check_time(T2, N2);
  validate(end);
  validate(start);
  double worst = 0.0;
  const Transfer first(grid, T1 / (N1 + 1), h);
  const CVector psi = forward(first, N1, start, grid, worst);

  const Transfer second(grid, T2 / (N2 + 1), h);
  CVector phi(static_cast<Eigen::Index>(second.size()));
  for (std::size_t k = 0; k < second.size(); ++k) phi(static_cast<Eigen::Index>(k)) = second.to_point(end, k);
  worst = std::max(worst, boundary_ratio(phi, grid));
  for (int l = 0; l < N2; ++l) {
    phi = second.apply_left(phi);
    worst = std::max(worst, boundary_ratio(phi, grid));
  }
  check_boundary(worst);

  std::vector<cplx> terms(first.size());
  for (std::size_t k = 0; k < terms.size(); ++k)
    terms[k] = phi(static_cast<Eigen::Index>(k)) * first.weight(k) * psi(static_cast<Eigen::Index>(k));
  const cplx folded = pairwise_sum(std::span<const cplx>(terms));
  const cplx direct = propagator_cs(N1 + N2 + 1, T1 + T2, h, end, start, grid).value;
  return {folded, direct, std::abs(folded - direct)};
}

OrderingExperiment ordering_experiment(const PolynomialSymbol& h, double T, const PhasePoint& end,
                                       const PhasePoint& start, const std::vector<int>& N_list,
                                       const PhaseGrid& grid, int D) {
  if (N_list.size() < 2) fail(ErrorKind::InvalidConfig, "ordering experiment needs at least two slice counts");
  OrderingExperiment ex;
  ex.N = N_list;
  std::sort(ex.N.begin(), ex.N.end());

  const FockVector ve = coherent_vector(end, D);
  const FockVector vs = coherent_vector(start, D);
  const auto element = [&](const FockOperator& H) {
    return spectral_propagator(H, T).matrix_element(ve, vs);
  };
  ex.normal_oracle = element(quantize_normal(h, D));
  ex.antinormal_oracle = element(quantize_antinormal_algebraic(h, D));

  std::vector<double> steps;
  for (int n : ex.N) {
    const cplx v = propagator_cs(n, T, h, end, start, grid).value;
    ex.lattice.push_back(v);
    ex.normal_error.push_back(std::abs(v - ex.normal_oracle) / std::abs(ex.normal_oracle));
    ex.antinormal_error.push_back(std::abs(v - ex.antinormal_oracle) / std::abs(ex.antinormal_oracle));
    steps.push_back(T / (n + 1));
  }

  const auto order_n = fitted_order(steps, ex.normal_error);
  const auto order_a = fitted_order(steps, ex.antinormal_error);
  const double en = ex.normal_error.back();
  const double ea = ex.antinormal_error.back();
  const cplx last = ex.lattice.back();
  // exact agreement at every N has no slope to fit but is still convergence
  const auto converged = [](const std::optional<double>& order, const std::vector<double>& err) {
    return (order && *order >= 0.9) || *std::max_element(err.begin(), err.end()) <= 1e-12;
  };
  ex.verdict = "undetermined";
  if (en < ea) {
    ex.fitted_order = order_n;
    ex.phase_gap = std::abs(last * std::exp(-kI * T) - ex.antinormal_oracle) / std::abs(ex.antinormal_oracle);
    if (converged(order_n, ex.normal_error) && ea >= 10.0 * en) ex.verdict = "normal";
  } else {
    ex.fitted_order = order_a;
    ex.phase_gap = std::abs(last * std::exp(kI * T) - ex.normal_oracle) / std::abs(ex.normal_oracle);
    if (converged(order_a, ex.antinormal_error) && en >= 10.0 * ea) ex.verdict = "anti-normal";
  }
  return ex;
}

}  // namespace pspi
