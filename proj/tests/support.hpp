#pragma once

#include <cmath>
#include <random>

#include "kdvlab/spectral.hpp"

namespace testsupport {

using kdvlab::cplx;
using kdvlab::kPi;

// Random real field with modes j in [jmin, jmax], coefficient size ~ amp/j^decay.
inline kdvlab::PeriodicField random_field(const kdvlab::TorusGrid& g, std::mt19937_64& rng, int jmin, int jmax,
                                          double amp = 1.0, double decay = 0.0) {
  std::normal_distribution<double> nd;
  std::vector<cplx> c(g.K + 1);
  for (int j = std::max(jmin, 0); j <= std::min(jmax, g.K); ++j) {
    const double s = amp / std::pow(std::max(j, 1), decay);
    c[j] = j == 0 ? cplx(s * nd(rng), 0.0) : cplx(s * nd(rng), s * nd(rng));
  }
  return kdvlab::PeriodicField(g, c);
}

inline kdvlab::PeriodicField cos_mode(const kdvlab::TorusGrid& g, int j, double amp = 1.0) {
  std::vector<cplx> c(g.K + 1);
  c[j] = amp / 2;
  return kdvlab::PeriodicField(g, c);
}

inline kdvlab::PeriodicField sin_mode(const kdvlab::TorusGrid& g, int j, double amp = 1.0) {
  std::vector<cplx> c(g.K + 1);
  c[j] = cplx(0.0, -amp / 2);
  return kdvlab::PeriodicField(g, c);
}

// Compactly supported C-infinity bump on [-w, w].
inline double bump(double x, double w = 1.0) {
  const double t = x / w;
  if (std::abs(t) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - t * t));
}

inline double soliton(double x, double k0) {
  const double c = std::cosh(k0 * x);
  return -2.0 * k0 * k0 / (c * c);
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testsupport
