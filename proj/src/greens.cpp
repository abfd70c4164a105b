#include "kdvlab/greens.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <variant>

#include "kdvlab/error.hpp"

namespace kdvlab {

struct ResolventContext::Factor {
  std::variant<Eigen::LLT<Eigen::MatrixXcd>, Eigen::PartialPivLU<Eigen::MatrixXcd>> f;
};

namespace {

struct Basis {
  int Kr;
  double length;
  double kappa;
  Eigen::VectorXd omega;
};

Basis make_basis(double length, double kappa, int Kr) {
  Basis b{Kr, length, kappa, Eigen::VectorXd(2 * Kr + 1)};
  for (int i = 0; i <= 2 * Kr; ++i) {
    const double k = (i - Kr) / length;
    b.omega(i) = 4.0 * kPi * kPi * k * k + kappa * kappa;
  }
  return b;
}

Eigen::MatrixXcd build_B(const PeriodicField& q, const Basis& b) {
  const int n = 2 * b.Kr + 1;
  Eigen::MatrixXcd B(n, n);
  Eigen::VectorXd rs = b.omega.cwiseSqrt().cwiseInverse();
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) B(r, c) = q.coeff(r - c) * (rs(r) * rs(c));
  return B;
}

// (1/l) sum_{k-j=p} X[k,j] / sqrt(w(k) w(j)) for p = 0..K.
std::vector<cplx> diagonal_sums(const Eigen::MatrixXcd& X, const Basis& b, int K) {
  const int n = 2 * b.Kr + 1;
  std::vector<cplx> out(K + 1);
  for (int p = 0; p <= K && p < n; ++p) {
    cplx s = 0.0;
    for (int i = p; i < n; ++i) s += X(i, i - p) / std::sqrt(b.omega(i) * b.omega(i - p));
    out[p] = s / b.length;
  }
  return out;
}

double truncated_response(const Basis& b, int p) {
  const int n = 2 * b.Kr + 1;
  double s = 0.0;
  for (int i = p; i < n; ++i) s += 1.0 / (b.omega(i) * b.omega(i - p));
  return s / b.length;
}

// Exact minus truncated linear response, per mode p = 0..K.
std::vector<double> response_defect(const Basis& b, int K) {
  std::vector<double> d(K + 1);
  for (int p = 0; p <= K; ++p) d[p] = pair_response(b.kappa, b.length, p / b.length) - truncated_response(b, p);
  return d;
}

Basis basis_of(const ResolventContext& ctx) { return Basis{ctx.Kr, ctx.q.length(), ctx.kappa, ctx.omega}; }

// Adds the exact-lattice correction to the linear term and the free constant.
PeriodicField finish_green(std::vector<cplx> gh, const PeriodicField& q, const Basis& b, bool linear_included) {
  if (linear_included) {
    const auto d = response_defect(b, q.K());
    for (int p = 0; p <= q.K(); ++p) gh[p] -= d[p] * q.half()[p];
  }
  gh[0] += free_green_constant(b.kappa, b.length);
  return PeriodicField(q.grid(), std::move(gh));
}

double alpha_defect(const PeriodicField& q, const Basis& b) {
  const auto d = response_defect(b, q.K());
  double s = 0.5 * std::norm(q.half()[0]) * d[0];
  for (int p = 1; p <= q.K(); ++p) s += std::norm(q.half()[p]) * d[p];
  return q.length() * s;
}

}  // namespace

double free_green_constant(double kappa, double length) {
  const double e = std::exp(-kappa * length);
  return (1.0 + e) / (1.0 - e) / (2.0 * kappa);
}

double pair_response(double kappa, double length, double p) {
  const double e = std::exp(-kappa * length);
  const double coth = (1.0 + e) / (1.0 - e);
  double s = coth / (kappa * (4.0 * kappa * kappa + 4.0 * kPi * kPi * p * p));
  if (p == 0.0) {
    const double inv_sinh2 = 4.0 * e / ((1.0 - e) * (1.0 - e));
    s += length * inv_sinh2 / (8.0 * kappa * kappa);
  }
  return s;
}

ResolventContext assemble_resolvent(const PeriodicField& q, double kappa, int basis_cutoff) {
  require(std::isfinite(kappa) && kappa >= 1.0, "kappa must be at least 1");
  require(basis_cutoff >= 0, "basis cutoff must be nonnegative");
  ResolventContext ctx;
  ctx.kappa = kappa;
  ctx.q = q;
  ctx.Kr = basis_cutoff == 0 ? q.K() : basis_cutoff;
  const Basis b = make_basis(q.length(), kappa, ctx.Kr);
  ctx.omega = b.omega;
  ctx.B = build_B(q, b);
  const int n = 2 * ctx.Kr + 1;
  Eigen::MatrixXcd IB = Eigen::MatrixXcd::Identity(n, n) + ctx.B;
  auto factor = std::make_shared<ResolventContext::Factor>();
  Eigen::LLT<Eigen::MatrixXcd> llt(IB);
  if (llt.info() == Eigen::Success) {
    factor->f = std::move(llt);
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(IB, Eigen::EigenvaluesOnly);
    const double smin = es.eigenvalues().cwiseAbs().minCoeff();
    if (smin < 1e-13) {
      std::ostringstream msg;
      msg << "singular I+B: smallest singular value " << smin;
      throw CertificationError(msg.str());
    }
    factor->f = Eigen::PartialPivLU<Eigen::MatrixXcd>(IB);
  }
  ctx.factor_ = std::move(factor);
  return ctx;
}

Eigen::MatrixXcd ResolventContext::solve(const Eigen::MatrixXcd& X) const {
  return std::visit([&](const auto& f) -> Eigen::MatrixXcd { return f.solve(X); }, factor_->f);
}

Eigen::MatrixXcd ResolventContext::A() const {
  const Eigen::VectorXd s = omega.cwiseSqrt();
  const int n = static_cast<int>(omega.size());
  Eigen::MatrixXcd IB = Eigen::MatrixXcd::Identity(n, n) + B;
  return s.asDiagonal() * IB * s.asDiagonal();
}

double ResolventContext::min_abs_eigenvalue() const {
  const int n = static_cast<int>(omega.size());
  Eigen::MatrixXcd IB = Eigen::MatrixXcd::Identity(n, n) + B;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(IB, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().minCoeff();
}

double hs_norm(const ResolventContext& ctx) { return ctx.B.norm(); }

GreenResult green_diagonal(const ResolventContext& ctx) {
  const Basis b = basis_of(ctx);
  const Eigen::MatrixXcd Y = ctx.solve(ctx.B);
  auto gh = diagonal_sums(Y, b, ctx.q.K());
  for (cplx& v : gh) v = -v;
  GreenResult r;
  r.g = finish_green(std::move(gh), ctx.q, b, true);
  r.kappa = ctx.kappa;
  return r;
}

PeriodicField green_nonlinear(const ResolventContext& ctx) {
  const Basis b = basis_of(ctx);
  // (I+B)^{-1}B^2 = B - (I+B)^{-1}B.
  const Eigen::MatrixXcd Y = ctx.B - ctx.solve(ctx.B);
  return PeriodicField(ctx.q.grid(), diagonal_sums(Y, b, ctx.q.K()));
}

GreenResult green_diagonal_series(const PeriodicField& q, double kappa, int l_max, int basis_cutoff) {
  require(std::isfinite(kappa) && kappa >= 1.0, "kappa must be at least 1");
  require(l_max >= 0, "series order must be nonnegative");
  const int Kr = basis_cutoff == 0 ? q.K() : basis_cutoff;
  const Basis b = make_basis(q.length(), kappa, Kr);
  const Eigen::MatrixXcd B = build_B(q, b);
  std::vector<cplx> gh(q.K() + 1);
  Eigen::MatrixXcd T = B;
  for (int l = 1; l <= l_max; ++l) {
    const auto d = diagonal_sums(T, b, q.K());
    const double sign = l % 2 ? -1.0 : 1.0;
    for (int p = 0; p <= q.K(); ++p) gh[p] += sign * d[p];
    if (l < l_max) T = (B * T).eval();
  }
  GreenResult r;
  r.g = finish_green(std::move(gh), q, b, l_max >= 1);
  r.kappa = kappa;
  r.method = GreenMethod::Series;
  r.l_max = l_max;
  const double hs = B.norm();
  r.certified = hs < 1.0;
  r.tail_bound = r.certified ? std::pow(hs, l_max + 1) / (1.0 - hs) * free_green_constant(kappa, q.length())
                             : std::numeric_limits<double>::infinity();
  return r;
}

PeriodicField green_prime(const GreenResult& result) { return derivative(result.g, 1); }

AlphaResult alpha(const ResolventContext& ctx) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ctx.B, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& lam = es.eigenvalues();
  if (lam.minCoeff() <= -1.0) {
    std::ostringstream msg;
    msg << "log-determinant branch failure: eigenvalue of I+B equals " << 1.0 + lam.minCoeff();
    throw CertificationError(msg.str());
  }
  double v = 0.0;
  for (int i = 0; i < lam.size(); ++i) v += lam(i) - std::log1p(lam(i));
  AlphaResult r;
  r.value = v + alpha_defect(ctx.q, basis_of(ctx));
  r.kappa = ctx.kappa;
  r.hs_norm = hs_norm(ctx);
  return r;
}

AlphaResult alpha_series(const ResolventContext& ctx, int l_max) {
  require(l_max >= 1, "series order must be at least 1");
  AlphaResult r;
  r.kappa = ctx.kappa;
  r.series = true;
  r.l_max = l_max;
  r.hs_norm = hs_norm(ctx);
  double v = 0.0;
  Eigen::MatrixXcd T = ctx.B;
  for (int l = 2; l <= l_max; ++l) {
    T = (ctx.B * T).eval();
    v += (l % 2 ? -1.0 : 1.0) / l * T.trace().real();
  }
  if (l_max >= 2) v += alpha_defect(ctx.q, basis_of(ctx));
  r.value = v;
  const double hs = r.hs_norm;
  r.certified = hs < 1.0;
  r.tail_bound = r.certified ? std::pow(hs, l_max + 1) / ((l_max + 1) * (1.0 - hs))
                             : std::numeric_limits<double>::infinity();
  return r;
}

PolynomialInvariants polynomial_invariants(const PeriodicField& q) {
  PolynomialInvariants out;
  const auto& c = q.half();
  const double l = q.length();
  out.M = l * c[0].real();
  double p = std::norm(c[0]), d = 0.0;
  for (int j = 1; j <= q.K(); ++j) {
    const double k = 2.0 * kPi * q.grid().mode(j);
    p += 2.0 * std::norm(c[j]);
    d += 2.0 * k * k * std::norm(c[j]);
  }
  const int n = dealiased_size(q.K());
  const auto s = q.samples(n);
  double cube = 0.0;
  for (double v : s) cube += v * v * v;
  out.P = 0.5 * l * p;
  out.H = 0.5 * l * d + cube * l / n;
  return out;
}

PeriodicField green_of(const PeriodicField& q, double kappa, int basis_cutoff) {
  return green_diagonal(assemble_resolvent(q, kappa, basis_cutoff)).g;
}

double alpha_of(const PeriodicField& q, double kappa, int basis_cutoff) {
  return alpha(assemble_resolvent(q, kappa, basis_cutoff)).value;
}

}  // namespace kdvlab
