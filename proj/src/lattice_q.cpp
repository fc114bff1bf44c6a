#include "pspi/lattice_q.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pspi/error.hpp"
#include "pspi/parallel.hpp"

namespace pspi {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kBatchColumns = 32;
const cplx kOmega = std::polar(1.0, kPi / 4.0);

// c0 + c1 q + c2 q^2
struct Quadratic {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;

  cplx value(cplx q) const { return c0 + q * (c1 + c2 * q); }
  cplx slope(cplx q) const { return c1 + 2.0 * c2 * q; }
};

Quadratic contour_potential(const PolynomialSymbol& V) {
  if (V.depends_on_p()) fail(ErrorKind::UnsupportedSymbol, "the q-lattice needs h = p^2/2 + V(q)");
  if (V.degree() > 2)
    fail(ErrorKind::UnsupportedSymbol, "the rotated-contour q-lattice supports potentials of degree <= 2, got " +
                                           V.to_string());
  const auto c = V.q_coefficients();
  Quadratic out;
  if (c.size() > 0) out.c0 = c[0];
  if (c.size() > 1) out.c1 = c[1];
  if (c.size() > 2) out.c2 = c[2];
  return out;
}

void check_step(const LatticeConfig& cfg, const PolynomialSymbol& V, std::span<const std::pair<cplx, cplx>> ends) {
  const double eps = cfg.step();
  if (cfg.grid.spacing() > 0.75 * std::sqrt(eps))
    fail(ErrorKind::DomainTooSmall, "contour grid spacing " + std::to_string(cfg.grid.spacing()) +
                                        " does not resolve the slice width sqrt(eps) = " + std::to_string(std::sqrt(eps)));
  if (V.is_zero()) return;
  double lo = 0.0;
  double hi = 0.0;
  bool first = true;
  for (const auto& [e, s] : ends) {
    const double a = std::min(e.real(), s.real());
    const double b = std::max(e.real(), s.real());
    lo = first ? a : std::min(lo, a);
    hi = first ? b : std::max(hi, b);
    first = false;
  }
  lo -= 2.0 * std::sqrt(cfg.T);
  hi += 2.0 * std::sqrt(cfg.T);
  double vmax = 0.0;
  for (int k = 0; k <= 200; ++k) vmax = std::max(vmax, std::abs(V(0.0, lo + (hi - lo) * k / 200.0)));
  if (eps * vmax > 0.5)
    fail(ErrorKind::InvalidConfig, "step too large: eps * max|V| = " + std::to_string(eps * vmax) + " > 0.5");
}

void lattice_batch(const LatticeConfig& cfg, const Quadratic& v, const Eigen::MatrixXd& base,
                   std::span<const std::pair<cplx, cplx>> ends, std::span<QLatticeValue> out) {
  const int m = cfg.grid.points();
  const auto cols = static_cast<Eigen::Index>(ends.size());
  const double eps = cfg.step();
  const int n = cfg.N;
  const double norm = 1.0 / std::sqrt(2.0 * kPi * eps);
  const cplx last_norm = std::polar(norm, -kPi / 4.0);
  const std::vector<double> y = cfg.grid.nodes();
  const std::vector<double> w = cfg.grid.weights();

  auto centre = [&](Eigen::Index p, int l) {
    const auto& [e, s] = ends[static_cast<std::size_t>(p)];
    return s + (e - s) * ((l + 0.5) / (n + 1));
  };

  CMatrix psi(m, cols);
  std::vector<double> leak(static_cast<std::size_t>(cols), 0.0);
  auto track_leak = [&] {
    for (Eigen::Index p = 0; p < cols; ++p) {
      const double peak = psi.col(p).cwiseAbs().maxCoeff();
      const double edge = std::max(std::abs(psi(0, p)), std::abs(psi(m - 1, p)));
      leak[static_cast<std::size_t>(p)] = std::max(leak[static_cast<std::size_t>(p)], peak > 0.0 ? edge / peak : 0.0);
    }
  };

  // Slice 0: y_0 = 0 to y_1.
  for (Eigen::Index p = 0; p < cols; ++p) {
    const cplx c = centre(p, 0);
    for (int i = 0; i < m; ++i) {
      const double yi = y[static_cast<std::size_t>(i)];
      const cplx u = kOmega * (0.5 * yi);
      psi(i, p) = norm * std::exp(-yi * yi / (2.0 * eps) - kI * eps * (v.value(c) + v.slope(c) * u + v.c2 * u * u));
    }
  }
  track_leak();

  CMatrix scale(m, cols);
  Eigen::MatrixXd re(m, cols);
  Eigen::MatrixXd im(m, cols);
  for (int l = 1; l < n; ++l) {
    for (Eigen::Index p = 0; p < cols; ++p) {
      const cplx c = centre(p, l);
      const cplx g = -kI * eps * v.slope(c) * kOmega * 0.5;
      for (int i = 0; i < m; ++i) scale(i, p) = std::exp(g * y[static_cast<std::size_t>(i)]);
      const cplx head = norm * std::exp(-kI * eps * v.value(c));
      scale.col(p) *= std::sqrt(head);
    }
    const CMatrix x = scale.cwiseProduct(psi);
    re = base * x.real();
    im = base * x.imag();
    psi = scale.cwiseProduct(re.cast<cplx>() + kI * im.cast<cplx>());
    track_leak();
  }

  // Slice N: y_N to y_{N+1} = 0, then the contour-independent free phase.
  std::vector<cplx> terms(static_cast<std::size_t>(m));
  for (Eigen::Index p = 0; p < cols; ++p) {
    const auto& [e, s] = ends[static_cast<std::size_t>(p)];
    const cplx c = centre(p, n);
    for (int j = 0; j < m; ++j) {
      const double yj = y[static_cast<std::size_t>(j)];
      const cplx u = kOmega * (0.5 * yj);
      terms[static_cast<std::size_t>(j)] =
          w[static_cast<std::size_t>(j)] * psi(j, p) *
          std::exp(-yj * yj / (2.0 * eps) - kI * eps * (v.value(c) + v.slope(c) * u + v.c2 * u * u));
    }
    const cplx sum = pairwise_sum(std::span<const cplx>(terms));
    out[static_cast<std::size_t>(p)] = {last_norm * sum * std::exp(kI * (e - s) * (e - s) / (2.0 * cfg.T)),
                                        leak[static_cast<std::size_t>(p)]};
  }
}

}  // namespace

void validate(const LatticeConfig& cfg) {
  if (cfg.N < 0) fail(ErrorKind::InvalidConfig, "lattice slice count N must be >= 0");
  if (!(cfg.T > 0.0) || !std::isfinite(cfg.T)) fail(ErrorKind::InvalidConfig, "lattice time T must be positive");
}

PolynomialSymbol potential_of(const PolynomialSymbol& h) {
  const PolynomialSymbol V = h - PolynomialSymbol::p() * PolynomialSymbol::p() * 0.5;
  if (V.depends_on_p())
    fail(ErrorKind::UnsupportedSymbol, "symbol " + h.to_string() + " is not of the form p^2/2 + V(q)");
  return V;
}

cplx slice_kernel(cplx q1, cplx q0, double eps, const PolynomialSymbol& V) {
  if (!(eps > 0.0)) fail(ErrorKind::InvalidConfig, "slice step must be positive");
  if (V.depends_on_p()) fail(ErrorKind::UnsupportedSymbol, "the q-lattice needs h = p^2/2 + V(q)");
  const cplx d = q1 - q0;
  const cplx mid = 0.5 * (q1 + q0);
  return std::polar(1.0 / std::sqrt(2.0 * kPi * eps), -kPi / 4.0) *
         std::exp(kI * d * d / (2.0 * eps) - kI * eps * V(cplx(0.0), mid));
}

cplx slice_kernel(double q1, double q0, double eps, const PolynomialSymbol& V) {
  return slice_kernel(cplx(q1), cplx(q0), eps, V);
}

std::vector<QLatticeValue> propagator_q_batch(const LatticeConfig& cfg, const PolynomialSymbol& V,
                                              std::span<const std::pair<cplx, cplx>> ends) {
  validate(cfg);
  const Quadratic v = contour_potential(V);
  std::vector<QLatticeValue> out(ends.size());
  if (ends.empty()) return out;
  if (cfg.N == 0) {
    for (std::size_t k = 0; k < ends.size(); ++k) out[k] = {slice_kernel(ends[k].first, ends[k].second, cfg.T, V), 0.0};
    return out;
  }
  check_step(cfg, V, ends);

  // Endpoint-independent part of the interior slice: the kinetic Gaussian,
  // the curvature of V along the contour, and the quadrature weight.
  const int m = cfg.grid.points();
  const double eps = cfg.step();
  const std::vector<double> y = cfg.grid.nodes();
  const std::vector<double> w = cfg.grid.weights();
  Eigen::MatrixXd base(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double d = y[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(j)];
      const double s = y[static_cast<std::size_t>(i)] + y[static_cast<std::size_t>(j)];
      base(i, j) = std::exp(-d * d / (2.0 * eps) + eps * v.c2 * s * s / 4.0) * w[static_cast<std::size_t>(j)];
    }

  const std::size_t batches = (ends.size() + kBatchColumns - 1) / kBatchColumns;
  parallel_for(batches, [&](std::size_t b) {
    const std::size_t lo = b * kBatchColumns;
    const std::size_t len = std::min(kBatchColumns, ends.size() - lo);
    lattice_batch(cfg, v, base, ends.subspan(lo, len), std::span<QLatticeValue>(out).subspan(lo, len));
  });

  double worst = 0.0;
  for (const auto& r : out) worst = std::max(worst, r.leak);
  if (worst >= kLeakTolerance)
    fail(ErrorKind::DomainTooSmall, "q-lattice boundary leak " + std::to_string(worst) + " >= 1e-6 on contour grid L=" +
                                        std::to_string(cfg.grid.half_width()));
  return out;
}

QLatticeValue propagator_q(const LatticeConfig& cfg, const PolynomialSymbol& V, cplx q_end, cplx q_start) {
  const std::pair<cplx, cplx> one{q_end, q_start};
  return propagator_q_batch(cfg, V, std::span<const std::pair<cplx, cplx>>(&one, 1)).front();
}

CMatrix lattice_kernel_matrix(const LatticeConfig& cfg, const PolynomialSymbol& V, const GridSpec& g_end,
                              const GridSpec& g_start, double* leak) {
  std::vector<std::pair<cplx, cplx>> ends;
  ends.reserve(static_cast<std::size_t>(g_end.points()) * static_cast<std::size_t>(g_start.points()));
  for (int i = 0; i < g_end.points(); ++i)
    for (int j = 0; j < g_start.points(); ++j) ends.emplace_back(g_end.node(i), g_start.node(j));
  const auto vals = propagator_q_batch(cfg, V, ends);
  CMatrix K(g_end.points(), g_start.points());
  double worst = 0.0;
  for (int i = 0; i < g_end.points(); ++i)
    for (int j = 0; j < g_start.points(); ++j) {
      const auto& r = vals[static_cast<std::size_t>(i) * g_start.points() + j];
      K(i, j) = r.value;
      worst = std::max(worst, r.leak);
    }
  if (leak) *leak = worst;
  return K;
}

LatticeFold lattice_fold_q(const LatticeConfig& first, const LatticeConfig& second, const PolynomialSymbol& V,
                           double q_end, double q_start, const GridSpec& s_grid) {
  validate(first);
  validate(second);
  const double T = first.T + second.T;
  const double xc = (q_start * second.T + q_end * first.T) / T;
  const int m = s_grid.points();
  std::vector<std::pair<cplx, cplx>> legs1;
  std::vector<std::pair<cplx, cplx>> legs2;
  for (int k = 0; k < m; ++k) {
    const cplx x = xc + kOmega * s_grid.node(k);
    legs1.emplace_back(x, q_start);
    legs2.emplace_back(q_end, x);
  }
  const auto k1 = propagator_q_batch(first, V, legs1);
  const auto k2 = propagator_q_batch(second, V, legs2);
  std::vector<cplx> integrand(static_cast<std::size_t>(m));
  double peak = 0.0;
  for (std::size_t k = 0; k < integrand.size(); ++k) {
    integrand[k] = k2[k].value * k1[k].value;
    peak = std::max(peak, std::abs(integrand[k]));
  }
  const double edge = std::max(std::abs(integrand.front()), std::abs(integrand.back()));
  if (edge > 1e-8 * peak)
    fail(ErrorKind::DomainTooSmall, "fold contour grid does not contain the intermediate integrand");
  const cplx folded = kOmega * quad_1d(std::span<const cplx>(integrand), s_grid);

  LatticeConfig joint = first;
  joint.T = T;
  joint.N = first.N + second.N + 1;
  const cplx direct = propagator_q(joint, V, q_end, q_start).value;
  return {folded, direct, std::abs(folded - direct) / std::abs(direct)};
}

cplx free_kernel(cplx x, cplx y, double T) {
  if (!(T > 0.0)) fail(ErrorKind::InvalidConfig, "free kernel needs T > 0");
  const cplx d = x - y;
  return std::polar(1.0 / std::sqrt(2.0 * kPi * T), -kPi / 4.0) * std::exp(kI * d * d / (2.0 * T));
}

cplx mehler_kernel(cplx x, cplx y, cplx tau) {
  const cplx s = std::sin(tau);
  if (std::abs(s) < 1e-6)
    fail(ErrorKind::Caustic, "harmonic kernel is singular at T = " + std::to_string(tau.real()) + " (sin T ~ 0)");
  const cplx pref = std::exp(-0.5 * kI * tau) / std::sqrt(kPi * (1.0 - std::exp(-2.0 * kI * tau)));
  return pref * std::exp(kI * ((x * x + y * y) * std::cos(tau) - 2.0 * x * y) / (2.0 * s));
}

cplx mehler_kernel(double x, double y, double T) { return mehler_kernel(cplx(x), cplx(y), cplx(T)); }

cplx mehler_spectral_sum(double x, double y, cplx tau, int D) {
  if (D < 1) fail(ErrorKind::InvalidDimension, "spectral sum needs D >= 1");
  std::vector<cplx> terms(static_cast<std::size_t>(D));
  double hx0 = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
  double hy0 = std::pow(kPi, -0.25) * std::exp(-0.5 * y * y);
  double hx1 = std::sqrt(2.0) * x * hx0;
  double hy1 = std::sqrt(2.0) * y * hy0;
  for (int n = 0; n < D; ++n) {
    const double hx = n == 0 ? hx0 : hx1;
    const double hy = n == 0 ? hy0 : hy1;
    terms[static_cast<std::size_t>(n)] = hx * hy * std::exp(-kI * tau * (n + 0.5));
    if (n >= 1) {
      const double k = n;
      const double nx = std::sqrt(2.0 / (k + 1.0)) * x * hx1 - std::sqrt(k / (k + 1.0)) * hx0;
      const double ny = std::sqrt(2.0 / (k + 1.0)) * y * hy1 - std::sqrt(k / (k + 1.0)) * hy0;
      hx0 = hx1;
      hy0 = hy1;
      hx1 = nx;
      hy1 = ny;
    }
  }
  return pairwise_sum(std::span<const cplx>(terms));
}

cplx QuadraticKernel::operator()(double x, double y) const {
  return c * std::exp(kI * (a * x * x + b * x * y + g * y * y));
}

QuadraticKernel QuadraticKernel::free(double T) {
  return {free_kernel(0.0, 0.0, T), 1.0 / (2.0 * T), -1.0 / T, 1.0 / (2.0 * T)};
}

QuadraticKernel QuadraticKernel::mehler(double T) {
  const cplx c = mehler_kernel(0.0, 0.0, T);
  const double s = std::sin(T);
  const double ct = std::cos(T) / (2.0 * s);
  return {c, ct, -1.0 / s, ct};
}

cplx damped_fourier(const QuadraticKernel& K, double k_end, double k_start, double nu, const GridSpec& grid) {
  if (!(nu > 0.0)) fail(ErrorKind::InvalidConfig, "damping parameter must be positive");
  const double L = grid.half_width();
  if (std::exp(-L * L / nu) > 1e-8)
    fail(ErrorKind::DomainTooSmall, "damped integrand is not below 1e-8 at |x| = " + std::to_string(L) +
                                        " for nu = " + std::to_string(nu));
  const int m = grid.points();
  const double dy = grid.spacing();
  const std::vector<double> x = grid.nodes();
  const std::vector<double> w = grid.weights();
  std::vector<cplx> fy(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const double yj = x[static_cast<std::size_t>(j)];
    fy[static_cast<std::size_t>(j)] =
        w[static_cast<std::size_t>(j)] * std::exp(cplx(-yj * yj / nu, K.g * yj * yj + k_start * yj));
  }
  std::vector<cplx> rows(static_cast<std::size_t>(m));
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t i) {
    const double xi = x[i];
    const cplx fx = w[i] * std::exp(cplx(-xi * xi / nu, K.a * xi * xi - k_end * xi));
    // e^{i b x y_j} by recurrence in j, re-anchored every 64 steps.
    const cplx step = std::polar(1.0, K.b * xi * dy);
    std::vector<cplx> terms(static_cast<std::size_t>(m));
    cplx phase;
    for (int j = 0; j < m; ++j) {
      if (j % 64 == 0) phase = std::polar(1.0, K.b * xi * x[static_cast<std::size_t>(j)]);
      else phase *= step;
      terms[static_cast<std::size_t>(j)] = fy[static_cast<std::size_t>(j)] * phase;
    }
    rows[i] = fx * pairwise_sum(std::span<const cplx>(terms));
  });
  return K.c * pairwise_sum(std::span<const cplx>(rows)) / (2.0 * kPi);
}

cplx damped_fourier_exact(const QuadraticKernel& K, double k_end, double k_start, double nu) {
  if (!(nu > 0.0)) fail(ErrorKind::InvalidConfig, "damping parameter must be positive");
  // exp(-v^T A v / 2 + J^T v)
  const cplx a11 = 2.0 / nu - 2.0 * kI * K.a;
  const cplx a22 = 2.0 / nu - 2.0 * kI * K.g;
  const cplx a12 = -kI * K.b;
  const cplx j1 = -kI * k_end;
  const cplx j2 = kI * k_start;
  const cplx det = a11 * a22 - a12 * a12;
  const cplx mean = 0.5 * (a11 + a22);
  const cplx disc = std::sqrt(mean * mean - det);
  const cplx root_det = std::sqrt(mean + disc) * std::sqrt(mean - disc);
  const cplx quad = (a22 * j1 * j1 - 2.0 * a12 * j1 * j2 + a11 * j2 * j2) / det;
  return K.c / root_det * std::exp(0.5 * quad);
}

GridSpec damped_fourier_grid(const QuadraticKernel& K, double nu, double k_max, double refine) {
  if (!(nu > 0.0)) fail(ErrorKind::InvalidConfig, "damping parameter must be positive");
  const double L = std::sqrt(nu * std::log(1e8)) * 1.0000001;
  const double kfast = K.chirp(L) + k_max + 0.5 + std::sqrt(60.0 / nu);
  return GridSpec::with_spacing(L, 0.6 * kPi / (kfast * refine));
}

CMatrix to_p_representation(const CMatrix& Kq, const GridSpec& gq, const GridSpec& gp, double nu) {
  const int m = gq.points();
  if (Kq.rows() != m || Kq.cols() != m) fail(ErrorKind::InvalidDimension, "kernel samples do not match the grid");
  if (!(nu > 0.0)) fail(ErrorKind::InvalidConfig, "damping parameter must be positive");
  const std::vector<double> x = gq.nodes();
  const std::vector<double> w = gq.weights();
  CMatrix damped(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double xi = x[static_cast<std::size_t>(i)];
      const double xj = x[static_cast<std::size_t>(j)];
      damped(i, j) = Kq(i, j) * std::exp(-(xi * xi + xj * xj) / nu);
    }
  double edge = 0.0;
  for (int k = 0; k < m; ++k)
    edge = std::max({edge, std::abs(damped(0, k)), std::abs(damped(m - 1, k)), std::abs(damped(k, 0)),
                     std::abs(damped(k, m - 1))});
  const double peak = damped.cwiseAbs().maxCoeff();
  if (edge > 1e-8 * peak)
    fail(ErrorKind::DomainTooSmall, "kernel does not decay below 1e-8 of its peak on the q grid boundary (ratio " +
                                        std::to_string(peak > 0.0 ? edge / peak : 0.0) + ")");
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) damped(i, j) *= w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)];
  CMatrix E(gp.points(), m);
  for (int a = 0; a < gp.points(); ++a)
    for (int i = 0; i < m; ++i) E(a, i) = std::polar(1.0, -gp.node(a) * x[static_cast<std::size_t>(i)]);
  return E * damped * E.adjoint() / (2.0 * kPi);
}

}  // namespace pspi
