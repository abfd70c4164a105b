#include "kdvlab/bridge.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kdvlab/error.hpp"
#include "kdvlab/greens.hpp"

namespace kdvlab {

namespace {

double wrap(double y, double L) { return y - L * std::round(y / L); }

PeriodicField drop_mean(PeriodicField f) {
  std::vector<cplx> c = f.half();
  c[0] = 0.0;
  return PeriodicField(f.grid(), std::move(c));
}

int fine_size(const TorusGrid& g) { return 4 * g.n; }

// sin^2 ramp: r(t) + r(1 - t) = 1.
double ramp(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double s = std::sin(0.5 * kPi * t);
  return s * s;
}

double max_abs(const std::vector<double>& s) {
  double m = 0.0;
  for (double v : s) m = std::max(m, std::abs(v));
  return m;
}

// Fourier coefficients i = 0..Kout on the circle of length r L of (sum_j a_j phi(x - c_j)) u(x),
// exact for band-limited u: coefficient = (1/rL) sum_m u_m sum_j a_j e^{-2 pi i z c_j} Phi(z), z = i/(rL) - m/L.
std::vector<cplx> windowed_coefficients(const PeriodicField& u, const PartitionFamily& p, int r, int Kout,
                                        const std::vector<double>& centers, const std::vector<double>& weights) {
  const double P = r * u.length();
  const int K = u.K();
  const int dmax = Kout + r * K;
  std::vector<cplx> X(2 * dmax + 1);
  for (int d = -dmax; d <= dmax; ++d) {
    const double z = d / P;
    const double F = p.transform(z);
    if (F == 0.0) continue;
    cplx s = 0.0;
    for (std::size_t j = 0; j < centers.size(); ++j) s += weights[j] * std::polar(1.0, -2.0 * kPi * z * centers[j]);
    X[d + dmax] = s * F;
  }
  std::vector<cplx> out(Kout + 1);
  for (int i = 0; i <= Kout; ++i) {
    cplx s = 0.0;
    for (int m = -K; m <= K; ++m) s += u.coeff(m) * X[i - r * m + dmax];
    out[i] = s / P;
  }
  return out;
}

}  // namespace

double PartitionFamily::transform(double xi) const {
  const double w = width();
  const double y = xi * w;
  if (y == 0.0) return w;
  const double den = 1.0 - y * y;
  // Both numerator factors vanish at |y| = 1.
  if (std::abs(den) < 1e-9) return -0.25 * kPi * w * (std::abs(y) - 1.0);
  return w * std::sin(kPi * y) / (kPi * y) * std::cos(0.5 * kPi * y) / den;
}

double PartitionFamily::center(int k) const {
  const double w = width();
  return wrap(-L() / 2 + 0.75 * w + k * w, L());
}

double PartitionFamily::phi(double x) const {
  const double w = width();
  return ramp((0.75 * w - std::abs(x)) / (0.5 * w));
}

double PartitionFamily::window(int k, double x) const { return phi(wrap(x - center(((k % N) + N) % N), L())); }

PartitionFamily build_partition(const TorusGrid& grid, int N) {
  require(N >= 8, "partition needs at least 8 windows");
  require(grid.n >= 16 * N, "each window needs at least 16 grid samples");
  return PartitionFamily{grid, N};
}

std::vector<WindowNorms> localized_norms(const PeriodicField& u, const PartitionFamily& p) {
  require(u.length() == p.L(), "field and partition live on different circles");
  std::vector<WindowNorms> out(p.N);
  for (int k = 0; k < p.N; ++k) {
    const PeriodicField prod(u.grid(), windowed_coefficients(u, p, 1, u.K(), {p.center(k)}, {1.0}));
    const auto centered = drop_mean(prod);
    out[k].hm12 = sobolev_norm(centered, -0.5, true);
    out[k].hm12_raw = sobolev_norm(prod, -0.5, false);
    out[k].hm1 = sobolev_norm(centered, -1.0, true);
    out[k].integral = p.L() * prod.mean_coeff();
  }
  return out;
}

double CutPlan::correction(double x) const {
  const auto& p = partition;
  switch (cut_case) {
    case CutCase::Single: return p.window(first, x);
    case CutCase::PairLeft: return p.window(first, x) + coefficient * p.window(first + 1, x);
    case CutCase::PairRight: return coefficient * p.window(first, x) + p.window(first + 1, x);
  }
  return 0.0;
}

double CutPlan::chi0_circle(double x) const {
  double s = 0.0;
  for (int k = 0; k < partition.N; ++k) s += weights[k] * partition.window(k, x);
  return s;
}

double CutPlan::chi0_line(double x) const {
  const int N = partition.N;
  const double w = partition.width();
  const int j0 = static_cast<int>(std::floor((x - line_origin) / w + 0.5));
  double s = 0.0;
  for (int j = std::max(0, j0 - 1); j <= std::min(N - 2, j0 + 1); ++j)
    s += weights[(cut + 1 + j) % N] * partition.phi(x - line_origin - j * w);
  return s;
}

Interval CutPlan::chi_star_support() const {
  const double w = partition.width();
  return {support.a - w / 5, support.b + w / 5};
}

double CutPlan::chi_star(double x) const {
  const double w = partition.width();
  if (x < support.a) return ramp((x - support.a + w / 5) / (w / 5));
  if (x > support.b) return ramp((support.b + w / 5 - x) / (w / 5));
  return 1.0;
}

CutPlan select_cut(const PeriodicField& u, const PartitionFamily& p, const CutPolicy& policy) {
  require(policy.fraction > 0.0 && policy.fraction <= 1.0, "window fraction must lie in (0, 1]");
  const int N = p.N;
  const double w = p.width();
  CutPlan plan;
  plan.partition = p;
  plan.table = localized_norms(u, p);

  double mean12 = 0.0, mean1 = 0.0;
  for (const auto& t : plan.table) {
    mean12 += t.hm12 / N;
    mean1 += t.hm1 / N;
  }
  std::vector<double> score(N, 0.0);
  for (int k = 0; k < N; ++k) {
    if (mean12 > 0.0) score[k] += plan.table[k].hm12 / mean12;
    if (mean1 > 0.0) score[k] += plan.table[k].hm1 / mean1;
  }
  std::vector<int> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return score[a] < score[b]; });
  const int kept = static_cast<int>(std::ceil(policy.fraction * N - 1e-9));
  std::vector<bool> ok(N, false);
  for (int r = 0; r < kept; ++r) {
    const int k = order[r];
    const double gap = std::abs(p.center(k)) - 0.75 * w;
    ok[k] = gap > policy.exclusion * w;
  }
  for (int k = 0; k < N; ++k)
    if (ok[k]) plan.admissible.push_back(k);
  if (plan.admissible.empty()) throw PreconditionError("no admissible window for the cut");

  const double tol = policy.zero_tol * u.l2_norm() * std::sqrt(w);
  int best = -1;
  for (int k : plan.admissible)
    if (std::abs(plan.table[k].integral) <= tol && (best < 0 || score[k] < score[best])) best = k;

  plan.weights.assign(N, 1.0);
  if (best >= 0) {
    plan.cut_case = CutCase::Single;
    plan.first = plan.cut = best;
    plan.coefficient = 0.0;
  } else {
    for (int k = 0; k < N; ++k)
      if (ok[k] && ok[(k + 1) % N] && (best < 0 || score[k] + score[(k + 1) % N] < score[best] + score[(best + 1) % N]))
        best = k;
    if (best < 0) throw PreconditionError("no admissible pair of neighbouring windows for the cut");
    const int next = (best + 1) % N;
    const double I1 = plan.table[best].integral, I2 = plan.table[next].integral;
    plan.first = best;
    if (std::abs(I1) <= std::abs(I2)) {
      plan.cut_case = CutCase::PairLeft;
      plan.coefficient = -I1 / I2;
      plan.cut = best;
      plan.weights[next] = 1.0 - plan.coefficient;
    } else {
      plan.cut_case = CutCase::PairRight;
      plan.coefficient = -I2 / I1;
      plan.cut = next;
      plan.weights[best] = 1.0 - plan.coefficient;
    }
  }
  plan.weights[plan.cut] = 0.0;

  const double L = p.L();
  double origin = p.center((plan.cut + 1) % N);
  double lo = origin - 0.75 * w;
  if (lo > 0.0) origin -= L;
  if (origin + (N - 2) * w + 0.75 * w < 0.0) origin += L;
  plan.line_origin = origin;
  plan.support = {origin - 0.75 * w, origin + (N - 2) * w + 0.75 * w};
  return plan;
}

TorusGrid unwrap_box(const TorusGrid& circle) {
  return TorusGrid::make(3.0 * circle.length, 3 * circle.K, 3 * circle.n);
}

LineField unwrap(const PeriodicField& u, const CutPlan& plan) {
  require(u.length() == plan.partition.L(), "field and cut plan live on different circles");
  const TorusGrid box = unwrap_box(u.grid());
  const auto cs = plan.chi_star_support();
  require(cs.a >= -0.375 * box.length && cs.b <= 0.375 * box.length, "unwrapped support leaves the box margin");
  require(plan.table.size() == static_cast<std::size_t>(plan.partition.N), "cut plan has no norm table");
  const int N = plan.partition.N;
  const double w = plan.partition.width();
  std::vector<double> centers, weights;
  for (int j = 0; j < N - 1; ++j) {
    centers.push_back(plan.line_origin + j * w);
    weights.push_back(plan.weights[(plan.cut + 1 + j) % N]);
  }
  auto c = windowed_coefficients(u, plan.partition, 3, box.K, centers, weights);
  return LineField::unchecked(PeriodicField(box, std::move(c)), plan.support);
}

LocalComparison compare_local(const PeriodicField& u0, const CutPlan& plan, double kappa, double m, double M,
                              double T, double dt, double save_every, int basis_cutoff) {
  const auto q0 = unwrap(u0, plan);
  FlowSpec a;
  a.hamiltonian = HamiltonianSpec::truncated(kappa, m, M);
  a.hamiltonian.basis_cutoff = basis_cutoff;
  a.T = T;
  a.dt = dt;
  a.save_every = save_every;
  FlowSpec b = a;
  b.hamiltonian = HamiltonianSpec::hkappa(kappa);
  b.hamiltonian.basis_cutoff = 3 * basis_cutoff;
  const auto tu = evolve(u0, a);
  const auto tq = evolve(q0.embedded(), b);
  require(tu.times.size() == tq.times.size(), "circle and line runs disagree on save times");
  const auto chi = [&](double x) { return plan.chi_star(x); };
  const auto support = plan.chi_star_support();
  LocalComparison out;
  out.times = tu.times;
  for (std::size_t i = 0; i < tu.times.size(); ++i) {
    const auto& q = tq.states[i];
    const auto inner = multiply(q, chi, fine_size(q.grid()));
    const auto back = periodize(LineField::unchecked(inner, support), u0.grid());
    out.error.push_back(sobolev_norm(tu.states[i] - back, -1.0, false));
    out.exterior.push_back(sobolev_norm(q - inner, -1.0, false));
  }
  return out;
}

ErrorCurve finite_speed_probe(const LineField& q0, double kappa, double T, double margin, double dt,
                              double save_every) {
  require(margin >= 10.0 * kappa * kappa * T, "margin must be at least 10 kappa^2 T");
  const Interval s = q0.support();
  const double half = q0.box_length() / 2;
  require(s.a - 2 * margin >= -half && s.b + 2 * margin <= half, "box too small for the requested margin");
  const auto chi_ext = [&](double x) {
    if (x < s.a - margin) return 1.0 - smooth_step((x - s.a + 2 * margin) / margin);
    if (x > s.b + margin) return 1.0 - smooth_step((s.b + 2 * margin - x) / margin);
    return 0.0;
  };
  FlowSpec f;
  f.hamiltonian = HamiltonianSpec::hkappa(kappa);
  f.T = T;
  f.dt = dt;
  f.save_every = save_every;
  const auto tr = evolve(q0.embedded(), f);
  ErrorCurve out;
  out.times = tr.times;
  for (const auto& q : tr.states)
    out.values.push_back(sobolev_norm(multiply(q, chi_ext, fine_size(q.grid())), -1.0, false));
  return out;
}

SmoothingBound localized_smoothing_check(const PeriodicField& q, const std::function<double(double)>& chi,
                                         double kappa) {
  const auto gp = green_prime(green_diagonal(assemble_resolvent(q, kappa)));
  const auto cf = PeriodicField::from_function(TorusGrid::make(q.length(), 4 * q.K()), chi);
  const auto dchi = derivative(cf, 1);
  SmoothingBound out;
  out.lhs = multiply(gp, chi, fine_size(q.grid())).l2_norm();
  out.rhs = sobolev_norm(multiply(q, chi, fine_size(q.grid())), -1.0, false) + dchi.l2_norm() +
            max_abs(dchi.samples());
  return out;
}

SmoothingBound localized_smoothing_check(const LineField& q, const std::function<double(double)>& chi, double kappa) {
  return localized_smoothing_check(q.embedded(), chi, kappa);
}

}  // namespace kdvlab
