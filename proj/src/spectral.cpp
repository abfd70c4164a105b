#include "kdvlab/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "fft.hpp"
#include "kdvlab/error.hpp"
#include "kdvlab/report.hpp"

namespace kdvlab {
namespace {

constexpr double kMeanZeroTol = 1e-12;

void check_same_grid(const PeriodicField& a, const PeriodicField& b, const char* who) {
  if (a.length() != b.length() || a.K() != b.K())
    throw PreconditionError(std::string(who) + ": grid mismatch");
}

int pow2_at_least(int m) { return static_cast<int>(std::bit_ceil(static_cast<unsigned>(std::max(m, 1)))); }

}  // namespace

int dealiased_size(int K) { return pow2_at_least(3 * K + 1); }

TorusGrid TorusGrid::make(double length, int K, int n) {
  require(std::isfinite(length) && length > 0.0, "grid length must be positive");
  require(K >= 0, "mode cutoff must be nonnegative");
  if (n == 0) n = dealiased_size(K);
  require(n >= 2 * K + 1, "sample count must be at least 2K+1");
  return TorusGrid{length, K, n};
}

PeriodicField::PeriodicField(const TorusGrid& grid) : grid_(grid), c_(grid.K + 1) {}

PeriodicField::PeriodicField(const TorusGrid& grid, std::vector<cplx> half) : grid_(grid), c_(std::move(half)) {
  require(static_cast<int>(c_.size()) == grid.K + 1, "coefficient count does not match grid");
  for (const cplx& c : c_)
    require(std::isfinite(c.real()) && std::isfinite(c.imag()), "non-finite coefficient");
  c_[0] = c_[0].real();
}

PeriodicField PeriodicField::from_samples(const TorusGrid& grid, const std::vector<double>& samples) {
  require(static_cast<int>(samples.size()) == grid.n, "sample count does not match grid");
  for (double s : samples) require(std::isfinite(s), "non-finite sample");
  auto spec = detail::analyze(samples);
  spec.resize(grid.K + 1);
  return PeriodicField(grid, std::move(spec));
}

PeriodicField PeriodicField::from_full_coeffs(const TorusGrid& grid, const std::vector<cplx>& full) {
  const int K = grid.K;
  require(static_cast<int>(full.size()) == 2 * K + 1, "coefficient count does not match grid");
  std::vector<cplx> half(K + 1);
  for (int j = 0; j <= K; ++j) half[j] = 0.5 * (full[K + j] + std::conj(full[K - j]));
  return PeriodicField(grid, std::move(half));
}

PeriodicField PeriodicField::from_function(const TorusGrid& grid, const std::function<double(double)>& f) {
  std::vector<double> s(grid.n);
  for (int m = 0; m < grid.n; ++m) s[m] = f(centered_coordinate(grid, m));
  return from_samples(grid, s);
}

cplx PeriodicField::coeff(int j) const {
  if (j > grid_.K || j < -grid_.K) return {};
  return j >= 0 ? c_[j] : std::conj(c_[-j]);
}

std::vector<double> PeriodicField::samples() const { return detail::synthesize(c_, grid_.n); }

std::vector<double> PeriodicField::samples(int n) const { return detail::synthesize(c_, n); }

double PeriodicField::operator()(double x) const {
  double v = c_[0].real();
  const cplx step = std::polar(1.0, 2.0 * kPi * x / grid_.length);
  cplx z = 1.0;
  for (int j = 1; j <= grid_.K; ++j) {
    z = j % 64 == 0 ? std::polar(1.0, 2.0 * kPi * j * x / grid_.length) : z * step;
    v += 2.0 * (c_[j] * z).real();
  }
  return v;
}

double PeriodicField::l2_norm() const {
  double s = std::norm(c_[0]);
  for (int j = 1; j <= grid_.K; ++j) s += 2.0 * std::norm(c_[j]);
  return std::sqrt(grid_.length * s);
}

bool PeriodicField::is_mean_zero() const { return std::abs(c_[0]) <= kMeanZeroTol * l2_norm(); }

PeriodicField PeriodicField::regrid(const TorusGrid& grid) const {
  require(grid.length == grid_.length, "regrid: length mismatch");
  std::vector<cplx> half(grid.K + 1);
  for (int j = 0; j <= std::min(grid.K, grid_.K); ++j) half[j] = c_[j];
  return PeriodicField(grid, std::move(half));
}

PeriodicField& PeriodicField::operator+=(const PeriodicField& o) {
  check_same_grid(*this, o, "add");
  for (std::size_t j = 0; j < c_.size(); ++j) c_[j] += o.c_[j];
  return *this;
}

PeriodicField& PeriodicField::operator-=(const PeriodicField& o) {
  check_same_grid(*this, o, "subtract");
  for (std::size_t j = 0; j < c_.size(); ++j) c_[j] -= o.c_[j];
  return *this;
}

PeriodicField& PeriodicField::operator*=(double a) {
  for (cplx& c : c_) c *= a;
  return *this;
}

PeriodicField operator+(PeriodicField a, const PeriodicField& b) { return a += b; }
PeriodicField operator-(PeriodicField a, const PeriodicField& b) { return a -= b; }
PeriodicField operator*(double s, PeriodicField a) { return a *= s; }

PeriodicField multiply(const PeriodicField& a, const PeriodicField& b) {
  require(a.length() == b.length(), "multiply: length mismatch");
  const int n = pow2_at_least(2 * a.K() + b.K() + 1);
  auto sa = a.samples(n);
  auto sb = b.samples(n);
  for (int m = 0; m < n; ++m) sa[m] *= sb[m];
  auto spec = detail::analyze(sa);
  spec.resize(a.K() + 1);
  return PeriodicField(a.grid(), std::move(spec));
}

PeriodicField multiply(const PeriodicField& a, const std::function<double(double)>& chi, int n_fine) {
  if (n_fine == 0) n_fine = 4 * dealiased_size(a.K());
  require(n_fine >= 2 * a.K() + 1, "multiply: fine grid too coarse");
  auto s = a.samples(n_fine);
  const TorusGrid fine{a.length(), a.K(), n_fine};
  for (int m = 0; m < n_fine; ++m) s[m] *= chi(centered_coordinate(fine, m));
  auto spec = detail::analyze(s);
  spec.resize(a.K() + 1);
  return PeriodicField(a.grid(), std::move(spec));
}

double centered_coordinate(const TorusGrid& grid, int m) {
  const double x = m * grid.spacing();
  return 2 * m >= grid.n ? x - grid.length : x;
}

LineField LineField::from_samples(const TorusGrid& box_grid, const std::vector<double>& samples, Interval support) {
  const double box = box_grid.length;
  require(support.a < support.b, "line support must be a nonempty interval");
  require(support.a >= -box / 2 + box / 8 - 1e-12 * box && support.b <= box / 2 - box / 8 + 1e-12 * box,
          "line support must keep a margin of box/8 inside the box");
  require(static_cast<int>(samples.size()) == box_grid.n, "sample count does not match box grid");
  double scale = 0.0;
  for (double s : samples) scale = std::max(scale, std::abs(s));
  const double slack = 1e-12 * box;
  for (int m = 0; m < box_grid.n; ++m) {
    const double y = centered_coordinate(box_grid, m);
    if ((y < support.a - slack || y > support.b + slack) && std::abs(samples[m]) > 1e-12 * scale)
      throw PreconditionError("line field does not vanish outside its support");
  }
  LineField out;
  out.f_ = PeriodicField::from_samples(box_grid, samples);
  out.support_ = support;
  return out;
}

LineField LineField::from_function(const TorusGrid& box_grid, const std::function<double(double)>& f,
                                   Interval support) {
  std::vector<double> s(box_grid.n);
  for (int m = 0; m < box_grid.n; ++m) s[m] = f(centered_coordinate(box_grid, m));
  return from_samples(box_grid, s, support);
}

LineField LineField::unchecked(PeriodicField embedded, Interval support) {
  LineField out;
  out.f_ = std::move(embedded);
  out.support_ = support;
  return out;
}

MultiplierSpec MultiplierSpec::low(double N) {
  require(is_dyadic(N), "multiplier threshold must be dyadic");
  return {MultiplierKind::Low, N, N};
}

MultiplierSpec MultiplierSpec::high(double N) {
  require(is_dyadic(N), "multiplier threshold must be dyadic");
  return {MultiplierKind::High, N, N};
}

MultiplierSpec MultiplierSpec::band(double N, double M) {
  require(is_dyadic(N) && is_dyadic(M), "multiplier thresholds must be dyadic");
  require(N < M, "band requires N < M");
  return {MultiplierKind::Band, N, M};
}

double MultiplierSpec::operator()(double xi) const {
  switch (kind) {
    case MultiplierKind::Low: return lp_bump(xi / N);
    case MultiplierKind::High: return 1.0 - lp_bump(xi / N);
    case MultiplierKind::Band: return lp_bump(xi / M) - lp_bump(xi / N);
  }
  return 0.0;
}

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return 1.0 / (1.0 + std::exp(1.0 / t - 1.0 / (1.0 - t)));
}

double lp_bump(double xi) { return smooth_step(2.0 - std::abs(xi)); }

bool is_dyadic(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) return false;
  int e = 0;
  return std::frexp(x, &e) == 0.5;
}

double sobolev_norm(const PeriodicField& f, double s, bool homogeneous) {
  if (homogeneous && s < 0.0 && !f.is_mean_zero())
    throw PreconditionError("negative homogeneous norm of a field with nonzero mean");
  const auto& c = f.half();
  double sum = homogeneous ? 0.0 : std::norm(c[0]);
  for (int j = 1; j <= f.K(); ++j) {
    const double k = f.grid().mode(j);
    const double w = homogeneous ? std::pow(k * k, s) : std::pow(1.0 + k * k, s);
    sum += 2.0 * w * std::norm(c[j]);
  }
  return std::sqrt(f.length() * sum);
}

LineNorm sobolev_norm(const LineField& f, double s, bool homogeneous, int refinements) {
  require(refinements >= 0, "refinement count must be nonnegative");
  LineNorm out;
  double L = f.box_length();
  for (int r = 0; r <= refinements; ++r, L *= 2.0)
    out.refinements.push_back(sobolev_norm(periodize(f, L), s, homogeneous));
  out.value = out.refinements.back();
  out.previous = out.refinements.size() > 1 ? out.refinements[out.refinements.size() - 2] : out.value;
  return out;
}

PeriodicField lp_project(const PeriodicField& f, const MultiplierSpec& spec) {
  std::vector<cplx> c = f.half();
  for (int j = 0; j <= f.K(); ++j) c[j] *= spec(f.grid().mode(j));
  return PeriodicField(f.grid(), std::move(c));
}

PeriodicField periodize(const LineField& f, double L) {
  const double box = f.box_length();
  const int K = static_cast<int>(std::ceil(f.embedded().K() * L / box - 1e-9));
  return periodize(f, TorusGrid::make(L, K));
}

PeriodicField periodize(const LineField& f, const TorusGrid& target) {
  const double L = target.length;
  require(f.support().length() < L, "support does not fit in one period");
  const TorusGrid& g = f.embedded().grid();
  const auto s = f.embedded().samples();
  std::vector<cplx> c(target.K + 1);
  const double h = g.spacing();
  for (int m = 0; m < g.n; ++m) {
    if (s[m] == 0.0) continue;
    const double y = centered_coordinate(g, m);
    const cplx step = std::polar(1.0, -2.0 * kPi * y / L);
    cplx z = 1.0;
    for (int j = 0; j <= target.K; ++j) {
      if (j % 64 == 0) z = std::polar(1.0, -2.0 * kPi * j * y / L);
      c[j] += s[m] * z;
      z *= step;
    }
  }
  for (cplx& v : c) v *= h / L;
  return PeriodicField(target, std::move(c));
}

PeriodicField derivative(const PeriodicField& f, int order) {
  if (order < 0 && !f.is_mean_zero()) throw PreconditionError("antiderivative of a field with nonzero mean");
  std::vector<cplx> c = f.half();
  if (order != 0) c[0] = 0.0;
  for (int j = 1; j <= f.K(); ++j) c[j] *= std::pow(cplx(0.0, 2.0 * kPi * f.grid().mode(j)), order);
  return PeriodicField(f.grid(), std::move(c));
}

double pairing(const PeriodicField& l, const PeriodicField& q) {
  check_same_grid(l, q, "pairing");
  const auto& a = l.half();
  const auto& b = q.half();
  double s = a[0].real() * b[0].real();
  for (int j = 1; j <= l.K(); ++j) s += 2.0 * (std::conj(a[j]) * b[j]).real();
  return l.length() * s;
}

double symplectic_form(const PeriodicField& u, const PeriodicField& v) {
  require(u.is_mean_zero() && v.is_mean_zero(), "symplectic form needs mean-zero arguments");
  return pairing(u, derivative(v, -1));
}

double tail_mass(const PeriodicField& f, double lambda) {
  require(lambda > 0.0, "tail threshold must be positive");
  double s = 0.0;
  for (int j = 1; j <= f.K(); ++j) {
    const double k = f.grid().mode(j);
    if (k >= lambda) s += 2.0 * std::norm(f.half()[j]) / (1.0 + k * k);
  }
  return f.length() * s;
}

PeriodicField translate(const PeriodicField& f, double h) {
  std::vector<cplx> c = f.half();
  for (int j = 1; j <= f.K(); ++j) c[j] *= std::polar(1.0, 2.0 * kPi * f.grid().mode(j) * h);
  return PeriodicField(f.grid(), std::move(c));
}

PeriodicField rescale(const PeriodicField& q, double lambda) {
  require(lambda > 0.0 && std::isfinite(lambda), "rescale factor must be positive");
  TorusGrid g = q.grid();
  g.length /= lambda;
  std::vector<cplx> c = q.half();
  for (cplx& v : c) v *= lambda * lambda;
  return PeriodicField(g, std::move(c));
}

LineField rescale(const LineField& q, double lambda) {
  const Interval s = q.support();
  return LineField::unchecked(rescale(q.embedded(), lambda), Interval{s.a / lambda, s.b / lambda});
}

void write_field(std::ostream& os, const PeriodicField& f) {
  os << format_double(f.length()) << ' ' << f.K() << '\n';
  for (int j = -f.K(); j <= f.K(); ++j) {
    const cplx c = f.coeff(j);
    os << j << ' ' << format_double(c.real()) << ' ' << format_double(c.imag()) << '\n';
  }
}

PeriodicField read_field(std::istream& is) {
  std::string line;
  double length = 0.0;
  int K = -1;
  if (!std::getline(is, line)) throw PreconditionError("field file: missing header");
  {
    std::istringstream hs(line);
    if (!(hs >> length >> K)) throw PreconditionError("field file: malformed header");
  }
  const TorusGrid grid = TorusGrid::make(length, K);
  std::vector<cplx> full(2 * K + 1);
  std::vector<bool> seen(2 * K + 1, false);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    long j = 0;
    double re = 0.0, im = 0.0;
    if (!(ls >> j >> re >> im)) throw PreconditionError("field file: malformed line '" + line + "'");
    if (j < -K || j > K) throw PreconditionError("field file: mode index out of range");
    full[j + K] = {re, im};
    seen[j + K] = true;
  }
  for (bool b : seen)
    if (!b) throw PreconditionError("field file: missing modes");
  return PeriodicField::from_full_coeffs(grid, full);
}

}  // namespace kdvlab
