#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <numbers>
#include <vector>

namespace kdvlab {

using cplx = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;

// Mode lattice (1/length)*{-K..K} on the circle of the given length, sampled
// at n equispaced points x_m = m*length/n.
struct TorusGrid {
  double length = 1.0;
  int K = 0;
  int n = 1;

  // n = 0 picks the smallest power of two >= 3K+1.
  static TorusGrid make(double length, int K, int n = 0);

  double mode(int j) const { return j / length; }
  double spacing() const { return length / n; }
  bool operator==(const TorusGrid&) const = default;
};

int dealiased_size(int K);

// Real function on the circle, stored as f^(j/l) for j = 0..K; negative modes
// follow from Hermitian symmetry.
class PeriodicField {
 public:
  PeriodicField() = default;
  explicit PeriodicField(const TorusGrid& grid);
  PeriodicField(const TorusGrid& grid, std::vector<cplx> half);

  static PeriodicField from_samples(const TorusGrid& grid, const std::vector<double>& samples);
  // Full coefficient list indexed j = -K..K; projected onto the real fields.
  static PeriodicField from_full_coeffs(const TorusGrid& grid, const std::vector<cplx>& full);
  static PeriodicField from_function(const TorusGrid& grid, const std::function<double(double)>& f);

  const TorusGrid& grid() const { return grid_; }
  double length() const { return grid_.length; }
  int K() const { return grid_.K; }
  cplx coeff(int j) const;
  const std::vector<cplx>& half() const { return c_; }
  std::vector<double> samples() const;
  std::vector<double> samples(int n) const;
  double operator()(double x) const;
  double mean_coeff() const { return c_.empty() ? 0.0 : c_[0].real(); }
  double l2_norm() const;
  bool is_mean_zero() const;

  // Same function on another grid of the same length (modes truncated or
  // zero-filled).
  PeriodicField regrid(const TorusGrid& grid) const;

  PeriodicField& operator+=(const PeriodicField& o);
  PeriodicField& operator-=(const PeriodicField& o);
  PeriodicField& operator*=(double a);

 private:
  TorusGrid grid_;
  std::vector<cplx> c_;
};

PeriodicField operator+(PeriodicField a, const PeriodicField& b);
PeriodicField operator-(PeriodicField a, const PeriodicField& b);
PeriodicField operator*(double s, PeriodicField a);

// Dealiased product, truncated to the grid of a.
PeriodicField multiply(const PeriodicField& a, const PeriodicField& b);
// Product with a smooth function sampled on n_fine points (n_fine = 0 picks
// 4x the dealiased size).
PeriodicField multiply(const PeriodicField& a, const std::function<double(double)>& chi, int n_fine = 0);

struct Interval {
  double a = 0.0;
  double b = 0.0;
  double length() const { return b - a; }
};

// Compactly supported function on the line, carried by a box [-box/2, box/2)
// identified with the circle of length box.
class LineField {
 public:
  LineField() = default;
  // Checks the samples vanish outside support and the margin box/8.
  static LineField from_samples(const TorusGrid& box_grid, const std::vector<double>& samples, Interval support);
  static LineField from_function(const TorusGrid& box_grid, const std::function<double(double)>& f,
                                 Interval support);
  // Wraps an evolved state without re-checking the support.
  static LineField unchecked(PeriodicField embedded, Interval support);

  double box_length() const { return f_.length(); }
  const PeriodicField& embedded() const { return f_; }
  Interval support() const { return support_; }
  bool mean_zero() const { return f_.is_mean_zero(); }

 private:
  PeriodicField f_;
  Interval support_;
};

// Coordinate in [-l/2, l/2) of sample m.
double centered_coordinate(const TorusGrid& grid, int m);

enum class MultiplierKind { Low, High, Band };

struct MultiplierSpec {
  MultiplierKind kind = MultiplierKind::Low;
  double N = 1.0;  // threshold, or lower threshold of a band
  double M = 1.0;  // upper threshold of a band

  static MultiplierSpec low(double N);
  static MultiplierSpec high(double N);
  static MultiplierSpec band(double N, double M);

  double operator()(double xi) const;
};

// Smooth step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t);
// Even bump equal to 1 on [-1,1], 0 outside [-2,2].
double lp_bump(double xi);
bool is_dyadic(double x);

double sobolev_norm(const PeriodicField& f, double s, bool homogeneous);

struct LineNorm {
  double value = 0.0;     // finest refinement
  double previous = 0.0;  // one refinement coarser
  std::vector<double> refinements;  // box, 2*box, 4*box, ...
};
LineNorm sobolev_norm(const LineField& f, double s, bool homogeneous, int refinements = 2);

PeriodicField lp_project(const PeriodicField& f, const MultiplierSpec& spec);
PeriodicField periodize(const LineField& f, double L);
PeriodicField periodize(const LineField& f, const TorusGrid& target);
PeriodicField derivative(const PeriodicField& f, int order);
double pairing(const PeriodicField& l, const PeriodicField& q);
double symplectic_form(const PeriodicField& u, const PeriodicField& v);
double tail_mass(const PeriodicField& f, double lambda);
PeriodicField translate(const PeriodicField& f, double h);
PeriodicField rescale(const PeriodicField& q, double lambda);
LineField rescale(const LineField& q, double lambda);

void write_field(std::ostream& os, const PeriodicField& f);
PeriodicField read_field(std::istream& is);

}  // namespace kdvlab
