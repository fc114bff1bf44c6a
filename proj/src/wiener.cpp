#include "pspi/wiener.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "pspi/error.hpp"
#include "pspi/parallel.hpp"

namespace pspi {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;

void fill_bridge(const WienerConfig& cfg, std::size_t path_index, std::vector<PhasePoint>& pts) {
  const auto n = static_cast<std::size_t>(cfg.n_steps);
  pts.resize(n + 1);
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(path_index), static_cast<std::uint32_t>(path_index >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> gauss;
  const double s = cfg.nu * cfg.T / cfg.n_steps;
  pts[0] = cfg.start;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double left = static_cast<double>(n - k);
    const double sd = std::sqrt(s * (left - 1.0) / left);
    const PhasePoint& x = pts[k];
    const double gp = gauss(rng);
    const double gq = gauss(rng);
    pts[k + 1] = {x.p + (cfg.end.p - x.p) / left + sd * gp, x.q + (cfg.end.q - x.q) / left + sd * gq};
  }
  pts[n] = cfg.end;
}

cplx log_det_sqrt(const Mat2& a) {
  // Principal roots of the eigenvalues; Re a > 0 keeps both in the right
  // half-plane, so this is the analytic continuation from real a.
  const cplx m = 0.5 * (a(0, 0) + a(1, 1));
  const cplx det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  const cplx disc = std::sqrt(m * m - det);
  return 0.5 * (std::log(m + disc) + std::log(m - disc));
}

}  // namespace

void validate(const WienerConfig& cfg) {
  if (!(cfg.nu > 0.0) || !std::isfinite(cfg.nu)) fail(ErrorKind::InvalidConfig, "diffusion constant nu must be positive");
  if (!(cfg.T > 0.0) || !std::isfinite(cfg.T)) fail(ErrorKind::InvalidConfig, "Wiener time T must be positive");
  if (cfg.n_steps < 2) fail(ErrorKind::InvalidConfig, "n_steps must be >= 2");
  if (cfg.n_paths < 2) fail(ErrorKind::InvalidConfig, "n_paths must be >= 2");
  validate(cfg.start);
  validate(cfg.end);
}

BridgePath sample_bridge(const WienerConfig& cfg, std::size_t path_index) {
  validate(cfg);
  BridgePath out;
  fill_bridge(cfg, path_index, out.pts);
  out.times.resize(out.pts.size());
  for (std::size_t k = 0; k < out.times.size(); ++k) out.times[k] = cfg.T * static_cast<double>(k) / cfg.n_steps;
  return out;
}

double stratonovich_pdq(const std::vector<PhasePoint>& pts) {
  std::vector<double> terms(pts.size() > 0 ? pts.size() - 1 : 0);
  for (std::size_t k = 0; k < terms.size(); ++k)
    terms[k] = 0.5 * (pts[k + 1].p + pts[k].p) * (pts[k + 1].q - pts[k].q);
  return pairwise_sum(std::span<const double>(terms));
}

double stratonovich_pdq(const BridgePath& path) { return stratonovich_pdq(path.pts); }

double ito_pdq(const BridgePath& path) {
  const auto& pts = path.pts;
  std::vector<double> terms(pts.size() > 0 ? pts.size() - 1 : 0);
  for (std::size_t k = 0; k < terms.size(); ++k) terms[k] = pts[k].p * (pts[k + 1].q - pts[k].q);
  return pairwise_sum(std::span<const double>(terms));
}

double bridge_mass(const WienerConfig& cfg) {
  const double dp = cfg.end.p - cfg.start.p;
  const double dq = cfg.end.q - cfg.start.q;
  const double v = cfg.nu * cfg.T;
  return std::exp(-(dp * dp + dq * dq) / (2.0 * v)) / (kTwoPi * v);
}

WienerEstimate wiener_propagator(const WienerConfig& cfg, const PolynomialSymbol& h) {
  validate(cfg);
  const double dt = cfg.T / cfg.n_steps;
  const bool free = h.is_zero();
  std::vector<cplx> samples(cfg.n_paths);
  const std::size_t chunk = 256;
  const std::size_t chunks = (cfg.n_paths + chunk - 1) / chunk;
  parallel_for(chunks, [&](std::size_t c) {
    std::vector<PhasePoint> pts;
    std::vector<double> hterms(static_cast<std::size_t>(cfg.n_steps));
    for (std::size_t i = c * chunk; i < std::min(cfg.n_paths, (c + 1) * chunk); ++i) {
      fill_bridge(cfg, i, pts);
      double phase = stratonovich_pdq(pts);
      if (!free) {
        for (std::size_t k = 0; k < hterms.size(); ++k)
          hterms[k] = h(0.5 * (pts[k].p + pts[k + 1].p), 0.5 * (pts[k].q + pts[k + 1].q));
        phase -= dt * pairwise_sum(std::span<const double>(hterms));
      }
      samples[i] = std::polar(1.0, phase);
    }
  });
  const double n = static_cast<double>(cfg.n_paths);
  const cplx mean = pairwise_sum(std::span<const cplx>(samples)) / n;
  std::vector<double> dev(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) dev[i] = std::norm(samples[i] - mean);
  const double var = pairwise_sum(std::span<const double>(dev)) / (n - 1.0);
  const double scale = kTwoPi * std::exp(0.5 * cfg.nu * cfg.T) * bridge_mass(cfg);
  return {scale * mean, scale * std::sqrt(var / n)};
}

cplx gaussian_oracle(const WienerConfig& cfg) {
  validate(cfg);
  const double s = cfg.nu * cfg.T / cfg.n_steps;
  // Step factor (2 pi s)^{-1} exp{-|y-x|^2/(2s) + i(p_y + p_x)(q_y - q_x)/2}.
  // E carries p q as a symmetric form; G couples x to y.
  Mat2 E;
  E << 0.0, 0.5, 0.5, 0.0;
  const Mat2 I = Mat2::Identity();
  Mat2 G;
  G << 1.0 / s, 0.5 * kI, -0.5 * kI, 1.0 / s;
  const Vec2 x0(cfg.start.p, cfg.start.q);
  const Vec2 xn(cfg.end.p, cfg.end.q);

  // Message on the first interior knot: exp{c + b.x - x.A.x/2}.
  Mat2 A = I / s - kI * E;
  Vec2 b = G.transpose() * x0;
  cplx c = -x0.squaredNorm() / (2.0 * s) - 0.5 * kI * cfg.start.p * cfg.start.q - std::log(kTwoPi * s);
  for (int k = 1; k < cfg.n_steps; ++k) {
    const Mat2 Ahat = A + I / s + kI * E;
    const Mat2 inv = Ahat.inverse();
    c += -std::log(s) - log_det_sqrt(Ahat) + 0.5 * (b.transpose() * inv * b)(0);
    b = G.transpose() * inv * b;
    A = I / s - kI * E - G.transpose() * inv * G;
  }
  const cplx log_value = c + (b.transpose() * xn)(0) - 0.5 * (xn.transpose() * A * xn)(0);
  return std::exp(log_value + std::log(kTwoPi) + 0.5 * cfg.nu * cfg.T);
}

cplx wiener_discrete_closed_form(const WienerConfig& cfg) {
  validate(cfg);
  const int n = cfg.n_steps;
  const double s = cfg.nu * cfg.T / n;
  const double rho = std::pow((2.0 - s) / (2.0 + s), n);
  const double dp = cfg.end.p - cfg.start.p;
  const double dq = cfg.end.q - cfg.start.q;
  const double d2 = dp * dp + dq * dq;
  const double log_mag = 0.5 * cfg.nu * cfg.T + n * std::log(2.0 / (2.0 + s)) - std::log1p(-rho) -
                         rho * d2 / (2.0 * (1.0 - rho));
  return overlap(cfg.end, cfg.start) * std::exp(log_mag);
}

cplx wiener_continuum_value(double nu, double T, const PhasePoint& end, const PhasePoint& start) {
  const double r = std::exp(-nu * T);
  const double dp = end.p - start.p;
  const double dq = end.q - start.q;
  return overlap(end, start) * std::exp(-r * (dp * dp + dq * dq) / (2.0 * (1.0 - r))) / (1.0 - r);
}

double wiener_continuum_deviation(double nu, double T, const PhasePoint& end, const PhasePoint& start) {
  const double r = std::exp(-nu * T);
  const double dp = end.p - start.p;
  const double dq = end.q - start.q;
  const double g = -std::log1p(-r) - r * (dp * dp + dq * dq) / (2.0 * (1.0 - r));
  return std::abs(overlap(end, start)) * std::abs(std::expm1(g));
}

}  // namespace pspi
