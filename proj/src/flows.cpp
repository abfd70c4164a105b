#include "kdvlab/flows.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "kdvlab/error.hpp"
#include "kdvlab/greens.hpp"

namespace kdvlab {
namespace {

using Half = std::vector<cplx>;

bool is_hkappa(const HamiltonianSpec& h) { return h.kind != FlowKind::KdV; }

double band_weight(const HamiltonianSpec& h, double p) {
  return h.kind == FlowKind::HkappaTrunc ? h.band(p) : 1.0;
}

Half axpy(const Half& x, double a, const Half& y) {
  Half r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + a * y[i];
  return r;
}

Half scale(const Half& e, const Half& x) {
  Half r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = e[i] * x[i];
  return r;
}

MonitorRecord record_of(const PeriodicField& q, const HamiltonianSpec& h, const std::vector<double>& probes,
                        int probe_cutoff) {
  MonitorRecord r;
  const auto inv = polynomial_invariants(q);
  r.M = inv.M;
  r.P = inv.P;
  r.H = inv.H;
  try {
    r.hamiltonian = hamiltonian_value(q, h);
  } catch (const CertificationError&) {
    r.hamiltonian = std::numeric_limits<double>::quiet_NaN();
  }
  for (double k : probes) {
    try {
      r.alpha.push_back(alpha_of(q, k, probe_cutoff > 0 ? probe_cutoff : 2 * q.K()));
    } catch (const CertificationError&) {
      r.alpha.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  return r;
}

double drift(const std::vector<double>& x, double floor_scale) {
  double d = 0.0;
  for (double v : x) d = std::max(d, std::abs(v - x.front()));
  const double s = std::max(std::abs(x.front()), floor_scale);
  return s > 0.0 ? d / s : d;
}

double cubic_term(const PeriodicField& q) {
  const int n = dealiased_size(q.K());
  double cube = 0.0;
  for (double v : q.samples(n)) cube += v * v * v;
  return cube * q.length() / n;
}

}  // namespace

HamiltonianSpec HamiltonianSpec::kdv() { return HamiltonianSpec{}; }

HamiltonianSpec HamiltonianSpec::hkappa(double kappa) {
  require(std::isfinite(kappa) && kappa >= 1.0, "kappa must be at least 1");
  HamiltonianSpec h;
  h.kind = FlowKind::Hkappa;
  h.kappa = kappa;
  return h;
}

HamiltonianSpec HamiltonianSpec::truncated(double kappa, double m, double M) {
  HamiltonianSpec h = hkappa(kappa);
  h.kind = FlowKind::HkappaTrunc;
  h.band = MultiplierSpec::band(m, M);
  return h;
}

std::string to_string(FlowKind kind) {
  switch (kind) {
    case FlowKind::KdV: return "kdv";
    case FlowKind::Hkappa: return "hkappa";
    case FlowKind::HkappaTrunc: return "hkappa-trunc";
  }
  return "unknown";
}

SmallnessBudget SmallnessBudget::calibrate(const TorusGrid& grid, const std::vector<double>& kappas, unsigned seed,
                                           int trials) {
  require(!kappas.empty(), "calibration needs at least one kappa");
  double peak = 0.0;
  for (double k : kappas) {
    require(k >= 1.0, "kappa must be at least 1");
    for (int j = 0; j <= grid.K; ++j) {
      const double p = grid.mode(j);
      peak = std::max(peak, (1.0 + p * p) * pair_response(k, grid.length, p));
    }
    // p -> infinity limit of (1+p^2) S(p).
    peak = std::max(peak, free_green_constant(k, grid.length) / (2.0 * kPi * kPi));
  }
  SmallnessBudget b;
  b.delta0 = 0.5 / std::sqrt(peak);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.05, 1.0);
  auto draw = [&](double radius) {
    std::vector<cplx> c(grid.K + 1);
    for (int j = 1; j <= grid.K; ++j) c[j] = cplx(nd(rng), nd(rng)) / static_cast<double>(j);
    PeriodicField f(grid, c);
    return (radius / sobolev_norm(f, -1.0, false)) * f;
  };
  for (double k : kappas) {
    for (int t = 0; t < trials; ++t) {
      const auto q = draw(ud(rng) * b.delta0);
      const auto p = draw(ud(rng) * b.delta0);
      const double num = sobolev_norm(green_of(q, k) - green_of(p, k), 1.0, false);
      b.C_lip = std::max(b.C_lip, num / sobolev_norm(q - p, -1.0, false));
    }
  }
  return b;
}

bool SmallnessBudget::admits(const PeriodicField& q) const { return sobolev_norm(q, -1.0, false) <= delta0; }

std::vector<cplx> linear_symbol(const TorusGrid& grid, const HamiltonianSpec& h) {
  std::vector<cplx> L(grid.K + 1);
  for (int j = 0; j <= grid.K; ++j) {
    const double p = grid.mode(j);
    const cplx d(0.0, 2.0 * kPi * p);
    if (h.kind == FlowKind::KdV) {
      L[j] = -d * d * d;
    } else {
      // Transport plus the exact linearization of 16 k^5 g'(q).
      const double k = h.kappa, w = band_weight(h, p);
      L[j] = d * (4.0 * k * k - 16.0 * std::pow(k, 5) * w * w * pair_response(k, grid.length, p));
    }
  }
  return L;
}

PeriodicField nonlinear_part(const PeriodicField& q, const HamiltonianSpec& h) {
  if (h.linear) return PeriodicField(q.grid());
  if (h.kind == FlowKind::KdV) return 3.0 * derivative(multiply(q, q), 1);
  const double c = 16.0 * std::pow(h.kappa, 5);
  if (h.kind == FlowKind::Hkappa)
    return c * derivative(green_nonlinear(assemble_resolvent(q, h.kappa, h.basis_cutoff)), 1);
  const auto pq = lp_project(q, h.band);
  return c * lp_project(derivative(green_nonlinear(assemble_resolvent(pq, h.kappa, h.basis_cutoff)), 1), h.band);
}

PeriodicField rhs(const PeriodicField& q, const HamiltonianSpec& h) {
  const auto L = linear_symbol(q.grid(), h);
  std::vector<cplx> c(q.K() + 1);
  for (int j = 0; j <= q.K(); ++j) c[j] = L[j] * q.half()[j];
  return PeriodicField(q.grid(), std::move(c)) + nonlinear_part(q, h);
}

double hamiltonian_value(const PeriodicField& q, const HamiltonianSpec& h) {
  const auto inv = polynomial_invariants(q);
  if (h.kind == FlowKind::KdV) return h.linear ? inv.H - cubic_term(q) : inv.H;
  const double k = h.kappa;
  const auto arg = h.kind == FlowKind::HkappaTrunc ? lp_project(q, h.band) : q;
  double a;
  if (h.linear) {
    // Quadratic part of alpha only.
    double s = 0.5 * std::norm(arg.half()[0]) * pair_response(k, q.length(), 0.0);
    for (int j = 1; j <= q.K(); ++j) s += std::norm(arg.half()[j]) * pair_response(k, q.length(), q.grid().mode(j));
    a = q.length() * s;
  } else {
    a = alpha_of(arg, k, h.basis_cutoff);
  }
  return -16.0 * std::pow(k, 5) * a + 4.0 * k * k * inv.P;
}

double default_dt(const FlowSpec& spec) {
  double dt = 1e-3;
  if (is_hkappa(spec.hamiltonian) && spec.budget && spec.budget->C_lip > 0.0)
    dt = std::min(dt, 0.5 / (16.0 * std::pow(spec.hamiltonian.kappa, 5) * spec.budget->C_lip));
  return dt;
}

PeriodicField step(const PeriodicField& q, const HamiltonianSpec& h, double dt) {
  const auto L = linear_symbol(q.grid(), h);
  const int n = q.K() + 1;
  Half E(n), E2(n);
  for (int j = 0; j < n; ++j) {
    E[j] = std::exp(0.5 * dt * L[j]);
    E2[j] = E[j] * E[j];
  }
  auto N = [&](const Half& x) { return nonlinear_part(PeriodicField(q.grid(), x), h).half(); };
  const Half& u = q.half();
  const Half k1 = N(u);
  const Half k2 = N(scale(E, axpy(u, 0.5 * dt, k1)));
  const Half Eu = scale(E, u);
  const Half k3 = N(axpy(Eu, 0.5 * dt, k2));
  const Half E2u = scale(E2, u);
  const Half k4 = N(axpy(E2u, dt, scale(E, k3)));
  Half out(n);
  for (int j = 0; j < n; ++j)
    out[j] = E2u[j] + dt / 6.0 * (E2[j] * k1[j] + 2.0 * E[j] * (k2[j] + k3[j]) + k4[j]);
  return PeriodicField(q.grid(), std::move(out));
}

Trajectory evolve(const PeriodicField& q0, const FlowSpec& spec) {
  require(std::isfinite(spec.T) && spec.T >= 0.0, "T must be nonnegative");
  const double dt_req = spec.dt > 0.0 ? spec.dt : default_dt(spec);
  require(std::isfinite(dt_req) && dt_req > 0.0, "dt must be positive");
  require(spec.T == 0.0 || dt_req <= spec.T, "dt must not exceed T");
  const auto& h = spec.hamiltonian;
  const bool guarded = is_hkappa(h) && spec.budget.has_value();
  if (guarded && !spec.budget->admits(q0)) {
    std::ostringstream msg;
    msg << "initial H^-1 norm " << sobolev_norm(q0, -1.0, false) << " exceeds delta0 " << spec.budget->delta0;
    throw PreconditionError(msg.str());
  }

  const int steps = spec.T == 0.0 ? 0 : static_cast<int>(std::ceil(spec.T / dt_req - 1e-9));
  const double dt = steps ? spec.T / steps : dt_req;
  const int stride = spec.save_every > 0.0 ? std::max(1, static_cast<int>(std::lround(spec.save_every / dt))) : steps;

  Trajectory tr;
  tr.probes = spec.probes;
  tr.probe_cutoff = spec.probe_cutoff;
  tr.hamiltonian = h;
  tr.dt = dt;
  auto save = [&](double t, const PeriodicField& q) {
    tr.times.push_back(t);
    tr.states.push_back(q);
    tr.monitors.push_back(record_of(q, h, spec.probes, spec.probe_cutoff));
  };
  PeriodicField q = q0;
  save(0.0, q);
  for (int i = 1; i <= steps; ++i) {
    const double before = q.l2_norm();
    q = step(q, h, dt);
    const double after = q.l2_norm();
    if (!std::isfinite(after) || after > 2.0 * before + std::numeric_limits<double>::min()) {
      std::ostringstream msg;
      msg << "blow-up guard: L2 norm went from " << before << " to " << after << " at t=" << i * dt;
      throw CertificationError(msg.str());
    }
    if (guarded && !spec.budget->admits(q)) {
      std::ostringstream msg;
      msg << "smallness budget exceeded at t=" << i * dt << ": H^-1 norm " << sobolev_norm(q, -1.0, false);
      throw CertificationError(msg.str());
    }
    if (i % stride == 0 || i == steps) save(i * dt, q);
  }
  return tr;
}

ConservationReport monitors(const Trajectory& traj, const std::vector<double>& probes) {
  require(!probes.empty(), "at least one probe is required");
  require(!traj.states.empty(), "empty trajectory");
  std::vector<MonitorRecord> recs;
  if (probes == traj.probes) {
    recs = traj.monitors;
  } else {
    for (const auto& q : traj.states) recs.push_back(record_of(q, traj.hamiltonian, probes, traj.probe_cutoff));
  }
  const auto& q0 = traj.states.front();
  ConservationReport r;
  auto column = [&](auto get) {
    std::vector<double> v;
    for (const auto& m : recs) v.push_back(get(m));
    return v;
  };
  r.M = drift(column([](const MonitorRecord& m) { return m.M; }), std::sqrt(q0.length()) * q0.l2_norm());
  r.P = drift(column([](const MonitorRecord& m) { return m.P; }), 0.0);
  r.H = drift(column([](const MonitorRecord& m) { return m.H; }), 0.0);
  r.hamiltonian = drift(column([](const MonitorRecord& m) { return m.hamiltonian; }), 0.0);
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto a = column([&](const MonitorRecord& m) { return m.alpha[i]; });
    if (std::any_of(a.begin(), a.end(), [](double v) { return std::isnan(v); })) {
      std::ostringstream msg;
      msg << "alpha(" << probes[i] << ") uncertified along the trajectory";
      r.failures.push_back(msg.str());
      r.alpha.push_back(std::numeric_limits<double>::quiet_NaN());
    } else {
      r.alpha.push_back(drift(a, 0.0));
    }
  }
  return r;
}

double ErrorCurve::sup() const {
  double s = 0.0;
  for (double v : values) s = std::max(s, v);
  return s;
}

ErrorCurve compare_trajectories(const Trajectory& u, const Trajectory& v, double s) {
  require(u.times.size() == v.times.size(), "trajectories have different output grids");
  ErrorCurve c;
  for (std::size_t i = 0; i < u.times.size(); ++i) {
    require(std::abs(u.times[i] - v.times[i]) <= 1e-12 * std::max(1.0, u.times[i]), "output times differ");
    require(u.states[i].grid() == v.states[i].grid(), "trajectories live on different grids");
    c.times.push_back(u.times[i]);
    c.values.push_back(sobolev_norm(u.states[i] - v.states[i], s, false));
  }
  return c;
}

ErrorCurve compare_flows(const PeriodicField& q0u, const PeriodicField& q0v, const FlowSpec& a, const FlowSpec& b,
                         double s) {
  require(q0u.grid() == q0v.grid(), "initial data live on different grids");
  return compare_trajectories(evolve(q0u, a), evolve(q0v, b), s);
}

std::vector<double> kappa_sweep(const PeriodicField& q0, const std::vector<double>& kappas, double T, double dt,
                                double save_every) {
  FlowSpec base;
  base.T = T;
  base.dt = dt;
  base.save_every = save_every;
  const auto ref = evolve(q0, base);
  std::vector<double> out;
  for (double k : kappas) {
    FlowSpec s = base;
    s.hamiltonian = HamiltonianSpec::hkappa(k);
    out.push_back(compare_trajectories(ref, evolve(q0, s), -1.0).sup());
  }
  return out;
}

ModulusTable time_equicontinuity(const Trajectory& traj) {
  require(traj.states.size() >= 3, "need at least three saved states");
  const std::size_t n = traj.states.size();
  ModulusTable t;
  double running = 0.0;
  for (std::size_t lag = 1; lag < n; ++lag) {
    double m = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i)
      m = std::max(m, sobolev_norm(traj.states[i + lag] - traj.states[i], -1.0, false));
    running = std::max(running, m);
    t.deltas.push_back(traj.times[lag] - traj.times[0]);
    t.values.push_back(running);
  }
  return t;
}

double fit_growth_rate(const Trajectory& traj) {
  std::vector<double> t, y;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const double v = sobolev_norm(traj.states[i], -0.5, true);
    if (v <= 0.0) return 0.0;
    t.push_back(traj.times[i]);
    y.push_back(std::log(v));
  }
  if (t.size() < 2) return 0.0;
  double mt = 0.0, my = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    mt += t[i];
    my += y[i];
  }
  mt /= t.size();
  my /= t.size();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    num += (t[i] - mt) * (y[i] - my);
    den += (t[i] - mt) * (t[i] - mt);
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace kdvlab
