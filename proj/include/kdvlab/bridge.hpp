#pragma once

#include <functional>
#include <vector>

#include "kdvlab/flows.hpp"
#include "kdvlab/spectral.hpp"

namespace kdvlab {

// Partition of unity on the circle of length L by N translates of one bump.
struct PartitionFamily {
  TorusGrid grid;
  int N = 0;

  double L() const { return grid.length; }
  double width() const { return grid.length / N; }
  // Center of window k in [-L/2, L/2).
  double center(int k) const;
  // Base bump with sin^2 ramps: 1 on [-w/4, w/4], 0 outside [-3w/4, 3w/4], phi(x) + phi(x - w) = 1.
  double phi(double x) const;
  // int phi(x) e^{2 pi i xi x} dx in closed form (raised-cosine spectrum).
  double transform(double xi) const;
  // Periodized translate of phi centered at center(k), at any real x.
  double window(int k, double x) const;
};

PartitionFamily build_partition(const TorusGrid& grid, int N);

struct WindowNorms {
  double hm12 = 0.0;      // Hdot^{-1/2} of the window product with its mean removed
  double hm12_raw = 0.0;  // H^{-1/2} of the raw window product
  double hm1 = 0.0;       // Hdot^{-1}, mean removed
  double integral = 0.0;  // int phi_k u
};

std::vector<WindowNorms> localized_norms(const PeriodicField& u, const PartitionFamily& p);

enum class CutCase { Single, PairLeft, PairRight };

struct CutPolicy {
  double fraction = 0.9;   // share of windows kept by rank
  double exclusion = 10.0; // minimum distance from the origin, in window widths
  double zero_tol = 1e-10; // |int| <= zero_tol ||u||_{L^2} w^{1/2} counts as zero
};

struct CutPlan {
  PartitionFamily partition;
  CutCase cut_case = CutCase::Single;
  int first = -1;          // k0, or k1 of the pair (k1, k1+1)
  double coefficient = 0.0;
  int cut = -1;            // window whose weight in chi0 is zero
  std::vector<double> weights;  // chi0 = sum_k weights[k] phi_k on the circle
  std::vector<WindowNorms> table;
  std::vector<int> admissible;
  double line_origin = 0.0;  // line center of window cut+1
  Interval support;          // of chi0 on the line

  // Correction function on the circle: chi0 = 1 - correction, int correction*u = 0.
  double correction(double x) const;
  double chi0_circle(double x) const;
  double chi0_line(double x) const;
  // 1 on supp chi0, 0 beyond w/5.
  double chi_star(double x) const;
  Interval chi_star_support() const;
};

CutPlan select_cut(const PeriodicField& u, const PartitionFamily& p, const CutPolicy& policy = {});

// Box of length 3L on the same sample spacing, so that every circle mode is a box mode
// and periodization of box fields is exact.
TorusGrid unwrap_box(const TorusGrid& circle);
LineField unwrap(const PeriodicField& u, const CutPlan& plan);

struct LocalComparison {
  std::vector<double> times;
  std::vector<double> error;     // ||u(t) - periodize(chi* q(t), L)||_{H^{-1}}
  std::vector<double> exterior;  // ||(1 - chi*) q(t)||_{H^{-1}} on the line
};

// basis_cutoff is the resolvent basis on the circle (0 = field K); the box uses three times it,
// so both nonlinearities see the same frequency range.
LocalComparison compare_local(const PeriodicField& u0, const CutPlan& plan, double kappa, double m, double M,
                              double T, double dt, double save_every = 0.0, int basis_cutoff = 0);

// ||chi_ext q(t)||_{H^{-1}} with chi_ext = 0 within margin of supp q0 and 1 beyond 2*margin.
ErrorCurve finite_speed_probe(const LineField& q0, double kappa, double T, double margin, double dt,
                              double save_every = 0.0);

struct SmoothingBound {
  double lhs = 0.0;  // ||chi g'(q)||_{L^2}
  double rhs = 0.0;  // ||chi q||_{H^{-1}} + ||chi'||_{L^2} + ||chi'||_{L^inf}
  double ratio() const { return rhs > 0.0 ? lhs / rhs : 0.0; }
};

SmoothingBound localized_smoothing_check(const PeriodicField& q, const std::function<double(double)>& chi,
                                         double kappa);
SmoothingBound localized_smoothing_check(const LineField& q, const std::function<double(double)>& chi, double kappa);

}  // namespace kdvlab
