#include "pspi/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "pspi/coherent.hpp"
#include "pspi/demos.hpp"
#include "pspi/error.hpp"
#include "pspi/lattice_cs.hpp"
#include "pspi/lattice_q.hpp"
#include "pspi/wiener.hpp"

namespace pspi {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& msg) { fail(ErrorKind::InvalidConfig, msg); }

// Copies config into out, filling defaults and checking types as it goes.
class Schema {
 public:
  Schema(const json& in, json& out) : in_(in), out_(out) {}

  double real(const std::string& key, double def) {
    const json& v = take(key, def);
    if (!v.is_number()) bad("'" + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) bad("'" + key + "' must be finite");
    out_[key] = x;
    return x;
  }

  double positive(const std::string& key, double def) {
    const double x = real(key, def);
    if (!(x > 0.0)) bad("'" + key + "' must be positive");
    return x;
  }

  long long integer(const std::string& key, long long def, long long lo) {
    const json& v = take(key, def);
    if (!v.is_number_integer()) bad("'" + key + "' must be an integer");
    const long long x = v.get<long long>();
    if (x < lo) bad("'" + key + "' must be >= " + std::to_string(lo));
    out_[key] = x;
    return x;
  }

  std::string text(const std::string& key, const std::string& def) {
    const json& v = take(key, def);
    if (!v.is_string()) bad("'" + key + "' must be a string");
    out_[key] = v;
    return v.get<std::string>();
  }

  PolynomialSymbol symbol(const std::string& key, const std::string& def) {
    const std::string s = text(key, def);
    PolynomialSymbol h;
    try {
      h = PolynomialSymbol::parse(s);
    } catch (const Error& e) {
      bad("'" + key + "': " + e.what());
    }
    if (h.degree() > kMaxSymbolDegree) bad("'" + key + "' has degree above " + std::to_string(kMaxSymbolDegree));
    // the echo stores the canonical term list, so equivalent spellings hash alike
    out_[key] = h.to_string();
    return h;
  }

  std::vector<double> reals(const std::string& key, const std::vector<double>& def, bool must_be_positive) {
    const json& v = take(key, def);
    if (!v.is_array() || v.empty()) bad("'" + key + "' must be a non-empty array");
    std::vector<double> xs;
    for (const auto& e : v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) bad("'" + key + "' entries must be finite numbers");
      if (must_be_positive && !(e.get<double>() > 0.0)) bad("'" + key + "' entries must be positive");
      xs.push_back(e.get<double>());
    }
    out_[key] = xs;
    return xs;
  }

  std::vector<int> integers(const std::string& key, const std::vector<int>& def, int lo) {
    const json& v = take(key, def);
    if (!v.is_array() || v.empty()) bad("'" + key + "' must be a non-empty array");
    std::vector<int> xs;
    for (const auto& e : v) {
      if (!e.is_number_integer() || e.get<long long>() < lo || e.get<long long>() > 100000)
        bad("'" + key + "' entries must be integers in [" + std::to_string(lo) + ", 100000]");
      xs.push_back(e.get<int>());
    }
    if (std::set<int>(xs.begin(), xs.end()).size() != xs.size()) bad("'" + key + "' entries must be distinct");
    out_[key] = xs;
    return xs;
  }

  std::pair<PhasePoint, PhasePoint> endpoints(const std::string& key, const json& def) {
    const json& v = take(key, def);
    if (!v.is_array() || v.size() != 2) bad("'" + key + "' must be [[p,q],[p,q]] (start, end)");
    const PhasePoint start = point(v[0], key);
    const PhasePoint end = point(v[1], key);
    out_[key] = json::array({{start.p, start.q}, {end.p, end.q}});
    return {start, end};
  }

  std::optional<GridSpec> grid(const std::string& key) {
    if (!in_.contains(key)) {
      seen_.insert(key);
      out_[key] = nullptr;
      return std::nullopt;
    }
    const json& v = take(key, nullptr);
    if (v.is_null()) {
      out_[key] = nullptr;
      return std::nullopt;
    }
    if (!v.is_object() || !v.contains("L") || !v.contains("M") || v.size() != 2)
      bad("'" + key + "' must be {\"L\": half_width, \"M\": points}");
    if (!v["L"].is_number() || !(v["L"].get<double>() > 0.0) || !std::isfinite(v["L"].get<double>()))
      bad("'" + key + ".L' must be a positive number");
    if (!v["M"].is_number_integer() || v["M"].get<long long>() < 2 || v["M"].get<long long>() > 100001)
      bad("'" + key + ".M' must be an integer in [2, 100001]");
    const GridSpec g(v["L"].get<double>(), v["M"].get<int>());
    out_[key] = {{"L", g.half_width()}, {"M", g.points()}};
    return g;
  }

  void mark(const std::string& key) { seen_.insert(key); }

  void finish() const {
    for (const auto& [k, _] : in_.items())
      if (!seen_.count(k)) bad("unknown config key '" + k + "'");
  }

  static PhasePoint point(const json& v, const std::string& key) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      bad("'" + key + "' points must be [p, q] number pairs");
    const PhasePoint pt{v[0].get<double>(), v[1].get<double>()};
    try {
      validate(pt);
    } catch (const Error& e) {
      bad("'" + key + "': " + e.what());
    }
    return pt;
  }

 private:
  template <typename D>
  const json& take(const std::string& key, const D& def) {
    seen_.insert(key);
    if (in_.contains(key)) return in_[key];
    defaults_.push_back(json(def));
    return defaults_.back();
  }

  const json& in_;
  json& out_;
  std::set<std::string> seen_{"construction", "seed"};
  std::vector<json> defaults_;
};

json normalize_impl(const json& in, std::optional<std::uint64_t> seed_override) {
  if (!in.is_object()) bad("config must be a JSON object");
  if (!in.contains("construction") || !in["construction"].is_string()) bad("config needs a 'construction' string");
  const std::string c = in["construction"].get<std::string>();
  json out = {{"construction", c}};

  std::uint64_t seed = 0;
  if (in.contains("seed")) {
    if (!in["seed"].is_number_unsigned() && !(in["seed"].is_number_integer() && in["seed"].get<long long>() >= 0))
      bad("'seed' must be a non-negative integer");
    seed = in["seed"].get<std::uint64_t>();
  }
  if (seed_override) seed = *seed_override;
  out["seed"] = seed;

  Schema s(in, out);
  if (c == "overlap") {
    const json& pairs = in.contains("pairs") ? in["pairs"] : json::array({{{0, 0}, {0, 2}}, {{2, 0}, {0, 2}}, {{1, 0}, {0, 0}}});
    if (!pairs.is_array() || pairs.empty()) bad("'pairs' must be a non-empty array");
    json echo = json::array();
    for (const auto& pr : pairs) {
      if (!pr.is_array() || pr.size() != 2) bad("'pairs' entries must be [[p,q],[p,q]]");
      const PhasePoint a = Schema::point(pr[0], "pairs");
      const PhasePoint b = Schema::point(pr[1], "pairs");
      echo.push_back({{a.p, a.q}, {b.p, b.q}});
    }
    s.mark("pairs");
    out["pairs"] = echo;
    s.integer("D", 96, 2);
    if (!s.grid("grid")) out["grid"] = {{"L", 10.0}, {"M", 201}};
  } else if (c == "quantize") {
    s.symbol("h", "(p^2+q^2)/2");
    s.integer("D", 48, 5);
    s.text("ordering", "anti-normal");
    if (out["ordering"] != "anti-normal" && out["ordering"] != "normal")
      bad("'ordering' must be \"anti-normal\" or \"normal\"");
    s.grid("grid");
  } else if (c == "lattice_q") {
    s.symbol("V", "q^2/2");
    s.integers("N_list", {8, 16, 32, 64}, 0);
    s.positive("T", 1.0);
    if (s.reals("endpoints_q", {0.0, 0.0}, false).size() != 2) bad("'endpoints_q' must be [q_start, q_end]");
    if (!s.grid("grid")) out["grid"] = {{"L", 8.0}, {"M", 181}};
  } else if (c == "lattice_cs") {
    s.symbol("h", "(p^2+q^2)/2");
    s.integers("N_list", {4, 8, 16, 32}, 0);
    s.positive("T", 1.0);
    s.endpoints("endpoints", json::array({{1.0, 0.0}, {0.0, 1.0}}));
    s.grid("grid");
    s.integer("D", 40, 8);
  } else if (c == "wiener") {
    s.symbol("h", "0");
    s.reals("nu_list", {4.0, 16.0, 64.0}, true);
    s.positive("T", 1.0);
    s.integer("n_steps", 256, 2);
    s.integer("n_paths", 100000, 2);
    s.endpoints("endpoints", json::array({{0.0, 0.0}, {0.0, 2.0}}));
    s.integer("D", 64, 8);
  } else if (c == "demo_fresnel") {
    s.reals("nu_list", {10.0, 100.0, 1000.0}, true);
  } else if (c == "demo_ambiguity") {
    s.positive("T", 1.0);
    s.reals("nu_list", {16.0, 32.0, 64.0, 128.0}, true);
    s.endpoints("endpoints", json::array({{0.0, 0.0}, {2.0, 0.0}}));
    s.positive("refine", 1.0);
  } else {
    bad("unknown construction '" + c + "'");
  }
  s.finish();
  return out;
}

GridSpec grid_of(const json& g) { return GridSpec(g["L"].get<double>(), g["M"].get<int>()); }

PhasePoint point_of(const json& v) { return {v[0].get<double>(), v[1].get<double>()}; }

void run_overlap(const json& cfg, ConvergenceReport& r) {
  const int D = cfg["D"].get<int>();
  const GridSpec g = grid_of(cfg["grid"]);
  r.parameter_name = "pair";
  double worst_trunc = 0.0;
  double worst_fold = 0.0;
  int idx = 0;
  for (const auto& pr : cfg["pairs"]) {
    const PhasePoint a = point_of(pr[0]);
    const PhasePoint b = point_of(pr[1]);
    const FockVector va = coherent_vector(a, D);
    const FockVector vb = coherent_vector(b, D);
    worst_trunc = std::max({worst_trunc, truncation_estimate(va), truncation_estimate(vb)});
    r.add_row(idx++, va.coeffs().dot(vb.coeffs()), overlap(a, b));
    worst_fold = std::max(worst_fold, fold_check(a, b, g).error);
  }
  r.add_certificate("truncation_estimate", worst_trunc, worst_trunc < kTruncationTolerance);
  r.add_certificate("fold_error", worst_fold, worst_fold <= 1e-8);
}

void run_quantize(const json& cfg, ConvergenceReport& r) {
  const PolynomialSymbol h = PolynomialSymbol::parse(cfg["h"].get<std::string>());
  const int D = cfg["D"].get<int>();
  r.parameter_name = "n";
  const FockOperator oracle = quantize_antinormal_algebraic(h, D);
  const bool normal = cfg["ordering"] == "normal";
  if (normal) {
    const FockOperator H = quantize_normal(h, D);
    for (int n = 0; n < D - 4; ++n) r.add_row(n, H(n, n), oracle(n, n));
    r.extras["oracle"] = "anti-normal diagonal (the rows show the ordering gap)";
    return;
  }
  const GridSpec g = cfg["grid"].is_null()
                         ? GridSpec::with_spacing(antinormal_half_width(h, D), 0.5)
                         : grid_of(cfg["grid"]);
  const FockOperator H = quantize_antinormal(h, D, g);
  double block = 0.0;
  for (int m = 0; m < D - 4; ++m)
    for (int n = 0; n < D - 4; ++n) block = std::max(block, std::abs(H(m, n) - oracle(m, n)));
  for (int n = 0; n < D - 4; ++n) r.add_row(n, H(n, n), oracle(n, n));
  const double identity = resolution_of_identity_defect(D, g);
  r.add_certificate("resolution_of_identity_defect", identity, identity <= 1e-8);
  r.add_certificate("leading_block_error", block, block <= 1e-7);
  r.extras["grid"] = {{"L", g.half_width()}, {"M", g.points()}};
}

void run_lattice_q(const json& cfg, ConvergenceReport& r) {
  const PolynomialSymbol V = PolynomialSymbol::parse(cfg["V"].get<std::string>());
  const bool free = V.is_zero();
  if (!free && !(V == PolynomialSymbol::q() * PolynomialSymbol::q() * 0.5))
    bad("lattice_q has closed-form oracles only for V = 0 and V = q^2/2");
  const double T = cfg["T"].get<double>();
  const double q0 = cfg["endpoints_q"][0].get<double>();
  const double q1 = cfg["endpoints_q"][1].get<double>();
  const cplx oracle = free ? free_kernel(q1, q0, T) : mehler_kernel(q1, q0, T);
  r.parameter_name = "N";
  std::vector<double> eps, err;
  double leak = 0.0;
  for (int N : cfg["N_list"].get<std::vector<int>>()) {
    const LatticeConfig lc{N, T, grid_of(cfg["grid"])};
    const QLatticeValue v = propagator_q(lc, V, q1, q0);
    r.add_row(N, v.value, oracle);
    leak = std::max(leak, v.leak);
    eps.push_back(lc.step());
    err.push_back(std::abs(v.value - oracle) / std::abs(oracle));
  }
  r.fitted_order = fitted_order(eps, err);
  r.add_certificate("leak", leak, leak < kLeakTolerance);
  r.extras["relative_error"] = err;
}

void run_lattice_cs(const json& cfg, ConvergenceReport& r) {
  const PolynomialSymbol h = PolynomialSymbol::parse(cfg["h"].get<std::string>());
  const double T = cfg["T"].get<double>();
  const PhasePoint start = point_of(cfg["endpoints"][0]);
  const PhasePoint end = point_of(cfg["endpoints"][1]);
  const PhaseGrid grid = cfg["grid"].is_null() ? covering_grid({start, end})
                                               : PhaseGrid{grid_of(cfg["grid"]), grid_of(cfg["grid"])};
  const auto N_list = cfg["N_list"].get<std::vector<int>>();
  r.parameter_name = "N";
  r.extras["grid"] = {{"L", grid.gp.half_width()}, {"M", grid.gp.points()}};
  if (h.is_zero()) {
    const cplx oracle = overlap(end, start);
    double boundary = 0.0;
    for (int N : N_list) {
      const CsLatticeValue v = propagator_cs(N, T, h, end, start, grid);
      r.add_row(N, v.value, oracle);
      boundary = std::max(boundary, v.boundary);
    }
    // exact at every N: there is no order to fit
    r.fitted_order = std::nullopt;
    r.add_certificate("boundary", boundary, boundary < kCsBoundaryTolerance);
    return;
  }
  const OrderingExperiment ex = ordering_experiment(h, T, end, start, N_list, grid, cfg["D"].get<int>());
  const bool anti = ex.verdict == "anti-normal";
  for (std::size_t i = 0; i < ex.N.size(); ++i) r.add_row(ex.N[i], ex.lattice[i], anti ? ex.antinormal_oracle : ex.normal_oracle);
  r.fitted_order = ex.fitted_order;
  r.extras["verdict"] = ex.verdict;
  r.extras["normal_oracle"] = {ex.normal_oracle.real(), ex.normal_oracle.imag()};
  r.extras["antinormal_oracle"] = {ex.antinormal_oracle.real(), ex.antinormal_oracle.imag()};
  r.extras["normal_error"] = ex.normal_error;
  r.extras["antinormal_error"] = ex.antinormal_error;
  r.extras["phase_gap"] = ex.phase_gap;
  r.add_certificate("definite_verdict", ex.verdict == "undetermined" ? 0.0 : 1.0, ex.verdict != "undetermined");
}

void run_wiener(const json& cfg, ConvergenceReport& r) {
  const PolynomialSymbol h = PolynomialSymbol::parse(cfg["h"].get<std::string>());
  WienerConfig wc;
  wc.T = cfg["T"].get<double>();
  wc.n_steps = cfg["n_steps"].get<int>();
  wc.n_paths = cfg["n_paths"].get<std::size_t>();
  wc.seed = cfg["seed"].get<std::uint64_t>();
  wc.start = point_of(cfg["endpoints"][0]);
  wc.end = point_of(cfg["endpoints"][1]);
  r.parameter_name = "nu";
  cplx spectral;
  if (!h.is_zero()) {
    const int D = cfg["D"].get<int>();
    const FockOperator U = spectral_propagator(quantize_antinormal_algebraic(h, D), wc.T);
    spectral = U.matrix_element(coherent_vector(wc.end, D), coherent_vector(wc.start, D));
    r.extras["oracle"] = "anti-normal spectral propagator";
  } else {
    r.extras["oracle"] = "exact Gaussian expectation at the same n_steps";
  }
  json z = json::array(), cont = json::array(), dev = json::array();
  std::vector<double> inv_nu, deviation;
  for (double nu : cfg["nu_list"].get<std::vector<double>>()) {
    wc.nu = nu;
    const WienerEstimate est = wiener_propagator(wc, h);
    const cplx oracle = h.is_zero() ? gaussian_oracle(wc) : spectral;
    r.add_row(nu, est.estimate, oracle, est.std_error);
    z.push_back(std::abs(est.estimate - oracle) / est.std_error);
    if (h.is_zero()) {
      const cplx c = wiener_continuum_value(nu, wc.T, wc.end, wc.start);
      cont.push_back({c.real(), c.imag()});
      const double d = wiener_continuum_deviation(nu, wc.T, wc.end, wc.start);
      dev.push_back(d);
      inv_nu.push_back(1.0 / nu);
      deviation.push_back(d);
    }
  }
  r.extras["z_score"] = z;
  if (h.is_zero()) {
    r.extras["continuum_value"] = cont;
    r.extras["continuum_deviation"] = dev;
    r.fitted_order = fitted_order(inv_nu, deviation);
  }
}

void run_fresnel(const json& cfg, ConvergenceReport& r) {
  const FresnelSweep sw = fresnel_sweep(cfg["nu_list"].get<std::vector<double>>());
  r.parameter_name = "nu";
  double worst = 0.0;
  for (std::size_t i = 0; i < sw.nu.size(); ++i) {
    const cplx exact = fresnel_closed_form(sw.nu[i]);
    r.add_row(sw.nu[i], sw.values[i], exact);
    worst = std::max(worst, std::abs(sw.values[i] - exact));
  }
  const double limit_error = std::abs(sw.extrapolated - fresnel_limit());
  r.extras["extrapolated"] = {sw.extrapolated.real(), sw.extrapolated.imag()};
  r.extras["limit"] = {fresnel_limit().real(), fresnel_limit().imag()};
  r.add_certificate("quadrature_error", worst, worst <= 1e-10);
  r.add_certificate("limit_error", limit_error, limit_error <= 1e-3);
}

void run_ambiguity(const json& cfg, ConvergenceReport& r) {
  const double T = cfg["T"].get<double>();
  const PhasePoint start = point_of(cfg["endpoints"][0]);
  const PhasePoint end = point_of(cfg["endpoints"][1]);
  const double refine = cfg["refine"].get<double>();
  auto nus = cfg["nu_list"].get<std::vector<double>>();
  std::sort(nus.begin(), nus.end());
  r.parameter_name = "nu";
  r.extras["columns"] = "estimate = p-representation reading, oracle = q-representation reading";
  json rel = json::array();
  double min_rel = 1e300, drift = 0.0, prev = 0.0;
  for (std::size_t i = 0; i < nus.size(); ++i) {
    const AmbiguityPair a = ambiguity_pair(T, nus[i], end, start, refine);
    r.add_row(nus[i], a.value_p, a.value_q);
    rel.push_back(a.rel_diff);
    min_rel = std::min(min_rel, a.rel_diff);
    if (i > 0) drift = std::max(drift, std::abs(a.rel_diff - prev) / prev);
    prev = a.rel_diff;
  }
  r.extras["rel_diff"] = rel;
  r.add_certificate("min_rel_diff", min_rel, min_rel > 0.1);
  r.add_certificate("rel_diff_drift", drift, drift <= 0.05);
}

}  // namespace

nlohmann::json normalize_config(const nlohmann::json& config, std::optional<std::uint64_t> seed) {
  return normalize_impl(config, seed);
}

ConvergenceReport run_experiment(const nlohmann::json& config, std::optional<std::uint64_t> seed) {
  const json cfg = normalize_impl(config, seed);
  ConvergenceReport r;
  r.construction = cfg["construction"].get<std::string>();
  r.config = cfg;
  r.config_digest = config_digest(cfg);
  r.seed = cfg["seed"].get<std::uint64_t>();
  if (r.construction == "overlap") run_overlap(cfg, r);
  else if (r.construction == "quantize") run_quantize(cfg, r);
  else if (r.construction == "lattice_q") run_lattice_q(cfg, r);
  else if (r.construction == "lattice_cs") run_lattice_cs(cfg, r);
  else if (r.construction == "wiener") run_wiener(cfg, r);
  else if (r.construction == "demo_fresnel") run_fresnel(cfg, r);
  else run_ambiguity(cfg, r);
  return r;
}

std::string construction_for_command(std::string_view command) {
  std::string s(command);
  std::replace(s.begin(), s.end(), '-', '_');
  return s;
}

}  // namespace pspi
