#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>

#include "kdvlab/spectral.hpp"

namespace kdvlab {

// L + kappa^2 = -d^2/dx^2 + q + kappa^2 on the circle, in the Fourier basis
// e^{2 pi i k x}/sqrt(l), |j| <= Kr. Everything is stored in the normalized form
// A = D^{1/2} (I + B) D^{1/2}, D = diag(4 pi^2 k^2 + kappa^2).
class ResolventContext {
 public:
  double kappa = 1.0;
  PeriodicField q;
  int Kr = 0;                // basis cutoff
  Eigen::VectorXd omega;     // index i <-> mode j = i - Kr
  Eigen::MatrixXcd B;

  // (I+B)^{-1} X
  Eigen::MatrixXcd solve(const Eigen::MatrixXcd& X) const;
  Eigen::MatrixXcd A() const;
  double min_abs_eigenvalue() const;  // of I+B

 private:
  friend ResolventContext assemble_resolvent(const PeriodicField&, double, int);
  struct Factor;
  std::shared_ptr<const Factor> factor_;
};

// basis_cutoff = 0 uses the field's K.
ResolventContext assemble_resolvent(const PeriodicField& q, double kappa, int basis_cutoff = 0);

enum class GreenMethod { Direct, Series };

struct GreenResult {
  PeriodicField g;
  double kappa = 1.0;
  GreenMethod method = GreenMethod::Direct;
  int l_max = 0;
  double tail_bound = 0.0;
  bool certified = true;
};

struct AlphaResult {
  double value = 0.0;
  double kappa = 1.0;
  bool series = false;
  int l_max = 0;
  double hs_norm = 0.0;
  double tail_bound = 0.0;
  bool certified = true;
};

struct PolynomialInvariants {
  double M = 0.0;
  double P = 0.0;
  double H = 0.0;
};

// coth(kappa l / 2) / (2 kappa): diagonal of the free resolvent on the circle.
double free_green_constant(double kappa, double length);
// (1/l) sum_k 1/(w(k) w(k-p)) over the full lattice, in closed form; the
// linear response g = -S(p) q^(p) + O(q^2).
double pair_response(double kappa, double length, double p);

double hs_norm(const ResolventContext& ctx);
GreenResult green_diagonal(const ResolventContext& ctx);
GreenResult green_diagonal_series(const PeriodicField& q, double kappa, int l_max, int basis_cutoff = 0);
PeriodicField green_prime(const GreenResult& result);
AlphaResult alpha(const ResolventContext& ctx);
AlphaResult alpha_series(const ResolventContext& ctx, int l_max);
PolynomialInvariants polynomial_invariants(const PeriodicField& q);

// Convenience wrappers.
PeriodicField green_of(const PeriodicField& q, double kappa, int basis_cutoff = 0);
double alpha_of(const PeriodicField& q, double kappa, int basis_cutoff = 0);

// Nonlinear part of g: g(q) - c - (linear response), i.e. the l >= 2 terms.
PeriodicField green_nonlinear(const ResolventContext& ctx);

}  // namespace kdvlab
