// One PASS/FAIL line per acceptance criterion. `acceptance --calibrate` refits the two
// frozen constants of the cutting pipeline on seeds disjoint from the checked ones.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "kdvlab/bridge.hpp"
#include "kdvlab/flows.hpp"
#include "kdvlab/greens.hpp"
#include "kdvlab/spectral.hpp"
#include "kdvlab/squeeze.hpp"

using namespace kdvlab;

namespace {

// Fitted by `acceptance --calibrate` and frozen.
constexpr double kGoodWindowC = 1.07; // ||phi_k u||_{Hdot^{-1/2}} <= C M^{1/2} m^{-1/2} N^{-1/2}
constexpr double kExteriorC = 2.7e-3; // ||(1 - chi*) q(t)||_{H^{-1}} <= C (N/L)^{1/2}

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

PeriodicField random_field(const TorusGrid& g, std::mt19937_64& rng, int jmin, int jmax, double amp, double decay) {
  std::normal_distribution<double> nd;
  std::vector<cplx> c(g.K + 1);
  for (int j = std::max(jmin, 0); j <= std::min(jmax, g.K); ++j) {
    const double s = amp / std::pow(std::max(j, 1), decay);
    c[j] = j == 0 ? cplx(s * nd(rng), 0.0) : cplx(s * nd(rng), s * nd(rng));
  }
  return PeriodicField(g, c);
}

PeriodicField smooth_data(const TorusGrid& g, double amp) {
  return PeriodicField::from_function(g, [&](double x) {
    const double y = 2 * kPi * x / g.length;
    return amp * (std::cos(y) + 0.5 * std::sin(2 * y + 0.3) + 0.2 * std::cos(3 * y - 1.0));
  });
}

double max_abs_diff(const PeriodicField& a, const PeriodicField& b) {
  const auto sa = a.samples(4 * a.grid().n), sb = b.samples(4 * b.grid().n);
  double m = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i) m = std::max(m, std::abs(sa[i] - sb[i]));
  return m;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]) / x.size();
    my += std::log(y[i]) / y.size();
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

// 1. Free Green's function.
Outcome free_green() {
  Outcome o;
  const double kappa = 2.0;
  const auto g1 = TorusGrid::make(1.0, 16);
  const auto gr = green_diagonal(assemble_resolvent(PeriodicField(g1), kappa)).g;
  double worst = 0.0;
  for (double v : gr.samples()) worst = std::max(worst, std::abs(v - 1.0 / (std::tanh(1.0) * 4.0)));
  o.pass = worst <= 1e-10;
  double sweep = 0.0;
  for (double l : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    const auto g = green_diagonal(assemble_resolvent(PeriodicField(TorusGrid::make(l, 16)), kappa)).g;
    const double gap = std::abs(g.coeff(0).real() - 1.0 / (2 * kappa));
    sweep = std::max(sweep, gap / std::exp(-kappa * l));
    o.pass = o.pass && gap <= std::exp(-kappa * l);
  }
  o.detail = fmt("|g - coth(1)/4| = %.2e; max over l of |g - 1/(2k)| e^{k l} = %.3f", worst, sweep);
  return o;
}

// 2. Series against the direct solve.
Outcome series_vs_direct() {
  Outcome o;
  std::mt19937_64 rng(2);
  const auto g = TorusGrid::make(3.0, 32);
  int used = 0;
  double worst = 0.0, hs_lo = 1.0, hs_hi = 0.0;
  while (used < 20) {
    auto q = random_field(g, rng, 1, 32, 0.1, 1.0);
    auto ctx = assemble_resolvent(q, 1.0);
    // Rescale into the band 0.25 <= ||B||_HS <= 0.5, where the l_max = 12 tail is far above rounding.
    const double target = 0.25 + 0.25 * std::uniform_real_distribution<double>()(rng);
    q = (target / hs_norm(ctx)) * q;
    ctx = assemble_resolvent(q, 1.0);
    const double hs = hs_norm(ctx);
    if (hs > 0.5) continue;
    ++used;
    hs_lo = std::min(hs_lo, hs);
    hs_hi = std::max(hs_hi, hs);
    const auto direct = green_diagonal(ctx).g;
    const auto s = green_diagonal_series(q, 1.0, 12);
    const double d = max_abs_diff(s.g, direct);
    worst = std::max(worst, d / s.tail_bound);
    o.pass = o.pass && s.certified && d <= s.tail_bound;
  }
  o.detail = fmt("20 fields, ||B||_HS in [%.2f, %.2f]; max |g_series - g_direct| / tail = %.3f", hs_lo, hs_hi, worst);
  return o;
}

// 3. Expansion of alpha in 1/kappa.
Outcome alpha_expansion() {
  const auto g = TorusGrid::make(4.0, 16);
  const auto q = smooth_data(g, 0.1);
  const auto inv = polynomial_invariants(q);
  std::vector<double> ks{4, 8, 16, 32}, r;
  for (double k : ks) r.push_back(std::abs(alpha_of(q, k, 64) - inv.P / (4 * k * k * k) + inv.H / (16 * std::pow(k, 5))));
  const double s = -slope(ks, r);
  Outcome o;
  o.pass = s >= 6.5 && s <= 7.5;
  o.detail = fmt("remainders %.2e %.2e %.2e %.2e; slope %.3f (want [6.5, 7.5])", r[0], r[1], r[2], r[3], s);
  return o;
}

// 4. First variation of alpha.
Outcome variational() {
  Outcome o;
  std::mt19937_64 rng(4);
  const auto g = TorusGrid::make(2.0, 16);
  const double kappa = 1.2;
  double worst = 0.0, order_lo = 1e9, order_hi = 0.0;
  for (int t = 0; t < 5; ++t) {
    const auto q = random_field(g, rng, 0, 16, 0.5, 1.0);
    const auto v = random_field(g, rng, 0, 16, 1.0, 1.0);
    std::vector<cplx> c0(g.K + 1);
    c0[0] = free_green_constant(kappa, g.length);
    const double exact = pairing(PeriodicField(g, c0) - green_of(q, kappa), v);
    std::vector<double> eps{4e-4, 2e-4, 1e-4}, err;
    for (double e : eps)
      err.push_back(rel((alpha_of(q + e * v, kappa) - alpha_of(q - e * v, kappa)) / (2 * e), exact));
    const double order = slope(eps, err);
    worst = std::max(worst, err.back());
    order_lo = std::min(order_lo, order);
    order_hi = std::max(order_hi, order);
    o.pass = o.pass && err.back() <= 1e-6 && order > 1.8 && order < 2.2;
  }
  o.detail = fmt("max relative error at eps=1e-4: %.2e; observed order in [%.3f, %.3f]", worst, order_lo, order_hi);
  return o;
}

// 5. Conservation laws.
Outcome conservation() {
  Outcome o;
  const auto g = TorusGrid::make(8.0, 32);
  const auto q0 = smooth_data(g, 0.2);
  FlowSpec s;
  s.T = 1.0;
  s.dt = 1e-4;
  s.save_every = 0.1;
  s.probes = {2.0, 4.0};
  const auto kdv = monitors(evolve(q0, s), s.probes);
  const double worst_kdv = std::max({kdv.M, kdv.P, kdv.H, kdv.alpha[0], kdv.alpha[1]});
  FlowSpec h = s;
  h.hamiltonian = HamiltonianSpec::hkappa(4.0);
  h.probes = {2.0, 3.0};
  const auto hk = monitors(evolve(q0, h), h.probes);
  const double worst_hk = std::max(hk.alpha[0], hk.alpha[1]);
  o.pass = worst_kdv <= 1e-6 && worst_hk <= 1e-6 && kdv.failures.empty() && hk.failures.empty();
  o.detail = fmt("KdV drift M %.1e P %.1e H %.1e a(2) %.1e a(4) %.1e; H_4 drift a(2) %.1e a(3) %.1e", kdv.M, kdv.P,
                 kdv.H, kdv.alpha[0], kdv.alpha[1], hk.alpha[0], hk.alpha[1]);
  return o;
}

// 6. One-soliton.
Outcome soliton() {
  const double k0 = 1.0, T = 1.0, L = 40.0;
  const auto g = TorusGrid::make(L, 128);
  const auto sol = [&](double x) {
    x -= L * std::round(x / L);
    const double c = std::cosh(k0 * x);
    return -2.0 * k0 * k0 / (c * c);
  };
  const auto q0 = PeriodicField::from_function(g, sol);
  const auto exact = PeriodicField::from_function(g, [&](double x) { return sol(x - 4 * k0 * k0 * T); });
  FlowSpec s;
  s.T = T;
  s.dt = 2.5e-4;
  const double err = (evolve(q0, s).states.back() - exact).l2_norm();
  Outcome o;
  o.pass = err <= 1e-6;
  o.detail = fmt("L^2 distance to the translate by 4 k0^2 T: %.2e", err);
  return o;
}

// 7. Band truncation rate.
Outcome truncation_rate() {
  const double l = 8.0, A = 0.1, kappa = 1.0;
  const auto g = TorusGrid::make(l, 128);
  std::vector<double> ratios;
  std::string rows;
  for (double m : {0.5, 0.25, 0.125}) {
    const double M = 1.0 / m;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> phase(0.0, 2 * kPi);
    std::vector<cplx> c(g.K + 1);
    for (int j = 1; j <= g.K; ++j) {
      const double p = g.mode(j);
      if (p >= 2 * m && p <= M) c[j] = std::polar(std::sqrt(p), phase(rng));
    }
    PeriodicField u(g, c);
    u = (A / sobolev_norm(u, -0.5, true)) * u;
    FlowSpec a;
    a.T = 1.0;
    a.dt = 0.05;
    a.save_every = 0.1;
    a.hamiltonian = HamiltonianSpec::hkappa(kappa);
    FlowSpec b = a;
    b.hamiltonian = HamiltonianSpec::truncated(kappa, m, M);
    const double sup = compare_flows(u, u, a, b, -1.0).sup();
    const double rate = std::sqrt(m) + 1.0 / std::sqrt(M);
    ratios.push_back(sup / (rate * A));
    rows += fmt(" (%g,%g): %.2e", m, M, sup);
  }
  double fit = 0.0;
  for (double r : ratios) fit += std::log(r) / ratios.size();
  fit = std::exp(fit);
  Outcome o;
  double spread = 1.0;
  for (double r : ratios) {
    spread = std::max({spread, r / fit, fit / r});
    o.pass = o.pass && r <= 4 * fit && r >= fit / 4;
  }
  o.detail = "sup errors" + rows + fmt("; fitted C = %.3e, worst factor %.2f (want <= 4)", fit, spread);
  return o;
}

// 8. KdV as the limit of the H_kappa flows.
Outcome kappa_limit() {
  const auto g = TorusGrid::make(8.0, 32);
  const auto q0 = smooth_data(g, 0.2);
  const auto d = kappa_sweep(q0, {2.0, 4.0, 8.0, 16.0}, 1.0, 1e-3, 0.1);
  Outcome o;
  for (std::size_t i = 1; i < d.size(); ++i) o.pass = o.pass && d[i] < d[i - 1];
  o.detail = fmt("sup_t ||KdV - H_k|| at k = 2,4,8,16: %.2e %.2e %.2e %.2e", d[0], d[1], d[2], d[3]);
  return o;
}

// Desk-scale joint scaling of (N, M/m, L/N) for the cutting pipeline.
struct SweepPoint {
  double m, M;
  int N;
  double L;
  int K, Kb;
};
const std::vector<SweepPoint> kSweep{
    {0.25, 1.0, 32, 16.0, 96, 32}, {0.125, 1.0, 48, 36.0, 256, 72}, {0.0625, 2.0, 64, 64.0, 256, 85}};
constexpr double kKappa = 1.0, kT = 0.5, kDt = 0.025, kSave = 0.125, kPacket = 0.1;

// Random band data (m, M], equal energy per mode in Hdot^{-1/2}, unit norm.
PeriodicField band_input(const SweepPoint& p, std::mt19937_64& rng) {
  const auto g = TorusGrid::make(p.L, p.K);
  std::normal_distribution<double> nd;
  std::vector<cplx> c(g.K + 1);
  for (int j = 1; j <= g.K; ++j) {
    const double k = g.mode(j);
    if (k > p.m && k <= p.M) c[j] = std::sqrt(k) * cplx(nd(rng), nd(rng));
  }
  PeriodicField u(g, c);
  return (1.0 / sobolev_norm(u, -0.5, true)) * u;
}

// Wave packet prototype z, periodized on the circle, normalized, then band-projected.
PeriodicField packet_input(const SweepPoint& p, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  const double sigma = 2.0 + ud(rng), f0 = 0.4 + 0.2 * ud(rng), c = 2 * ud(rng) - 1, phi = 2 * kPi * ud(rng);
  const auto g = TorusGrid::make(p.L, p.K);
  auto z = PeriodicField::from_function(g, [&](double x) {
    x -= p.L * std::round(x / p.L);
    const double y = (x - c) / sigma;
    return std::abs(y) < 1 ? std::exp(-1 / (1 - y * y)) * std::cos(2 * kPi * f0 * x + phi) : 0.0;
  });
  auto c0 = z.half();
  c0[0] = 0.0;
  z = PeriodicField(g, std::move(c0));
  z = (kPacket / sobolev_norm(z, -0.5, true)) * z;
  return band_project(z, p.m, p.M);
}

// ceil(0.9 N)-th smallest window ratio.
double window_quantile(const PeriodicField& u, const SweepPoint& p) {
  const auto t = localized_norms(u, build_partition(u.grid(), p.N));
  const double scale = std::sqrt(p.M / p.m / p.N);
  std::vector<double> r;
  for (const auto& w : t) r.push_back(w.hm12 / scale);
  std::sort(r.begin(), r.end());
  return r[static_cast<std::size_t>(std::ceil(0.9 * p.N)) - 1];
}

LocalComparison run_local(const PeriodicField& u, const SweepPoint& p) {
  const auto plan = select_cut(u, build_partition(u.grid(), p.N));
  return compare_local(u, plan, kKappa, p.m, p.M, kT, kDt, kSave, p.Kb);
}

// Packet runs are shared by the cutting and finite-speed criteria.
const LocalComparison& packet_run(unsigned seed, std::size_t point) {
  static std::map<std::pair<unsigned, std::size_t>, LocalComparison> cache;
  const auto key = std::make_pair(seed, point);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, run_local(packet_input(kSweep[point], seed), kSweep[point])).first;
  return it->second;
}

double exterior_ratio(const LocalComparison& lc, const SweepPoint& p) {
  return *std::max_element(lc.exterior.begin(), lc.exterior.end()) / std::sqrt(p.N / p.L);
}

// 9. Cutting pipeline.
Outcome cutting() {
  Outcome o;
  double worst_mean = 0.0, worst_h1 = 0.0, worst_q = 0.0, min_frac = 1.0;
  int short_inputs = 0;
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    const auto& p = kSweep[i % kSweep.size()];
    const auto u = band_input(p, rng);
    const auto plan = select_cut(u, build_partition(u.grid(), p.N));
    const auto q0 = unwrap(u, plan);
    double l1 = 0.0;
    for (double v : u.samples()) l1 += std::abs(v) * u.grid().spacing();
    const double mean = std::abs(q0.box_length() * q0.embedded().mean_coeff()) / l1;
    const double h1 = sobolev_norm(q0, -1.0, false).value / sobolev_norm(u, -0.5, true);
    const auto t = localized_norms(u, plan.partition);
    const double bound = kGoodWindowC * std::sqrt(p.M / p.m / p.N);
    int good = 0;
    for (const auto& w : t) good += w.hm12 <= bound;
    const double frac = double(good) / p.N;
    worst_mean = std::max(worst_mean, mean);
    worst_h1 = std::max(worst_h1, h1);
    worst_q = std::max(worst_q, window_quantile(u, p));
    min_frac = std::min(min_frac, frac);
    short_inputs += frac < 0.9;
    o.pass = o.pass && mean <= 1e-12 && h1 <= 2.0 && frac >= 0.9;
  }
  o.detail = fmt("100 inputs: max |int q0|/||u||_L1 %.1e, max ||q0||_H-1/A %.3f, min good fraction %.3f, %d inputs "
                 "below 0.9 (C = %.3g, worst 0.9-quantile %.3g)",
                 worst_mean, worst_h1, min_frac, short_inputs, kGoodWindowC, worst_q);

  std::string trend;
  for (unsigned seed : {1u, 2u, 3u}) {
    double prev = INFINITY;
    trend += fmt("; packet %u:", seed);
    for (std::size_t k = 0; k < kSweep.size(); ++k) {
      const auto& lc = packet_run(seed, k);
      const double sup = *std::max_element(lc.error.begin(), lc.error.end());
      trend += fmt(" %.2e", sup);
      o.pass = o.pass && sup < prev;
      prev = sup;
    }
  }
  o.detail += "; sup_t error along the sweep" + trend;
  return o;
}

// 10. Finite speed across the sweep.
Outcome finite_speed() {
  Outcome o;
  double worst = 0.0;
  std::string rows;
  for (unsigned seed : {1u, 2u, 3u}) {
    rows += fmt("; packet %u:", seed);
    for (std::size_t k = 0; k < kSweep.size(); ++k) {
      const double r = exterior_ratio(packet_run(seed, k), kSweep[k]);
      rows += fmt(" %.2e", r);
      worst = std::max(worst, r);
      o.pass = o.pass && r <= kExteriorC;
    }
  }
  o.detail = fmt("max_t exterior / (N/L)^{1/2}: worst %.3e vs C = %.3g", worst, kExteriorC) + rows;
  return o;
}

// 11. Linear oracle for the escape search and the area.
Outcome linear_oracle_check() {
  Outcome o;
  std::string rows;
  for (auto flow : {HamiltonianSpec::kdv(), HamiltonianSpec::hkappa(2.0)}) {
    flow.linear = true;
    ScenarioConfig c;
    c.L = 8.0;
    c.K = 32;
    c.m = 0.25;
    c.M = 2.0;
    c.z = {Prototype::Kind::Bump, 0.3, 0.5, 1.5, {}};
    c.l = {Prototype::Kind::Bump, 1.0, -0.7, 1.2, {}};
    c.alpha = 0.1;
    c.r = 0.5;
    c.R = 1.0;
    c.T = 0.5;
    c.flow = flow;
    c.seed = 11;
    const auto s = build_scenario(c);
    const auto res = escape_search(s, {});
    const double oracle = linear_oracle(s);
    const auto area = image_area(s);
    const double gap = (oracle - res.value) / s.R;
    const double ar = area.area / area.disk_area;
    rows += fmt("; %s: oracle %.6f, found %.6f (gap %.1e R), area/piR^2 %.4f +- %.4f", to_string(flow.kind).c_str(),
                oracle, res.value, gap, ar, area.refinement_error / area.disk_area);
    o.pass = o.pass && gap <= 1e-3 && res.value <= oracle + 1e-12 && std::abs(ar - 1.0) <= 0.05;
  }
  o.detail = rows.substr(2);
  return o;
}

// 12. Property suites.
double gauss3(double x, double c, double s) {
  const double u = (x - c) / s;
  return -std::exp(-u * u / 2) * (u * u * u - 3.0 * u) / (s * s * s);
}

Outcome property_suites() {
  Outcome o;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  double plan = 0.0, bern = 0.0, per = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto g = TorusGrid::make(0.5 + 4 * ud(rng), 32);
    const auto f = random_field(g, rng, 0, 32, 1.0, 0.5);
    double q = 0.0;
    for (double v : f.samples()) q += v * v;
    plan = std::max(plan, rel(std::sqrt(q * g.spacing()), f.l2_norm()));
  }
  const auto gb = TorusGrid::make(2.0, 64);
  for (int t = 0; t < 1000; ++t) {
    const auto f = random_field(gb, rng, 1, 64, 1.0, 2 * ud(rng));
    const double s = 2 * ud(rng) - 1, sigma = 0.05 + 1.95 * ud(rng);
    const double N = std::ldexp(1.0, static_cast<int>(ud(rng) * 6) - 1);
    const double C = std::pow(2.0, sigma);
    const auto lo = lp_project(f, MultiplierSpec::low(N));
    const auto hi = lp_project(f, MultiplierSpec::high(N));
    const double lo_ratio = sobolev_norm(lo, s, true) / (C * std::pow(N, sigma) * sobolev_norm(lo, s - sigma, true));
    const double hi_ratio = sobolev_norm(hi, s, true) / (C * std::pow(N, -sigma) * sobolev_norm(hi, s + sigma, true));
    if (std::isfinite(lo_ratio)) bern = std::max(bern, lo_ratio);
    if (std::isfinite(hi_ratio)) bern = std::max(bern, hi_ratio);
  }
  const auto box = TorusGrid::make(8.0, 128);
  for (int t = 0; t < 1000; ++t) {
    std::vector<std::array<double, 3>> parts;
    for (int i = 0; i < 3; ++i) parts.push_back({ud(rng) - 0.5, 0.15 + 0.1 * ud(rng), 2 * ud(rng) - 1});
    const auto f = LineField::from_function(
        box,
        [&](double x) {
          double v = 0.0;
          for (auto& p : parts) v += p[2] * gauss3(x, p[0], p[1]);
          return v;
        },
        {-3.0, 3.0});
    const auto p = periodize(f, 6.5);
    for (int k = -2; k <= 2; ++k) per = std::max(per, rel(sobolev_norm(p, k, true), sobolev_norm(f.embedded(), k, true)));
  }
  o.pass = plan <= 1e-10 && bern <= 1.0 + 1e-12 && per <= 1e-10;
  o.detail = fmt("1000 fields each: Plancherel rel %.1e, worst Bernstein ratio %.4f, periodized Hdot^k rel %.1e", plan,
                 bern, per);
  return o;
}

void calibrate() {
  double q = 0.0;
  std::mt19937_64 rng(90001);
  for (int i = 0; i < 60; ++i) {
    const auto& p = kSweep[i % kSweep.size()];
    q = std::max(q, window_quantile(band_input(p, rng), p));
  }
  std::printf("good-window constant: max 0.9-quantile over 60 calibration inputs = %.6g\n", q);
  double e = 0.0;
  for (unsigned seed : {101u, 102u, 103u})
    for (const auto& p : kSweep) e = std::max(e, exterior_ratio(run_local(packet_input(p, seed), p), p));
  std::printf("exterior constant: max over 3 calibration packets = %.6g\n", e);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1 && std::strcmp(argv[1], "--calibrate") == 0) {
    calibrate();
    return 0;
  }
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"free Green's function", free_green},
      {"series against direct solve", series_vs_direct},
      {"alpha expansion remainder", alpha_expansion},
      {"first variation of alpha", variational},
      {"conservation", conservation},
      {"one-soliton", soliton},
      {"band truncation rate", truncation_rate},
      {"kappa limit", kappa_limit},
      {"cutting pipeline", cutting},
      {"finite speed", finite_speed},
      {"linear escape oracle and area", linear_oracle_check},
      {"property suites", property_suites},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<int>(i) + 1 != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2zu  %s: %s  [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
