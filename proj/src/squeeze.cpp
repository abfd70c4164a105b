#include "kdvlab/squeeze.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "kdvlab/error.hpp"

namespace kdvlab {

namespace {

using nlohmann::json;

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

std::vector<int> band_modes(const TorusGrid& g, double m, double M) {
  std::vector<int> out;
  for (int j = 1; j <= g.K; ++j) {
    const double k = g.mode(j);
    if (k > m * (1 + 1e-12) && k <= M * (1 + 1e-12)) out.push_back(j);
  }
  return out;
}

// Coefficient of the unit Hdot^{-1/2} vectors cos and sin at mode j.
double unit_coefficient(const TorusGrid& g, int j) { return std::sqrt(g.mode(j) / (2.0 * g.length)); }

PeriodicField from_coordinates(const TorusGrid& g, const std::vector<int>& modes, const std::vector<double>& x) {
  std::vector<cplx> c(g.K + 1);
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const double a = unit_coefficient(g, modes[i]);
    c[modes[i]] = cplx(a * x[2 * i], a * x[2 * i + 1]);
  }
  return PeriodicField(g, std::move(c));
}

void normalize(std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  s = std::sqrt(s);
  for (double& v : x) v /= s;
}

PeriodicField evolve_to(const SqueezeScenario& s, const PeriodicField& q0, const std::optional<SmallnessBudget>& b) {
  if (s.flow.linear) return linear_propagate(q0, s.flow, s.T);
  FlowSpec f;
  f.hamiltonian = s.flow;
  f.T = s.T;
  f.dt = s.dt;
  f.budget = b;
  if (s.T == 0.0) return q0;
  return evolve(q0, f).states.back();
}

PeriodicField hilbert(const PeriodicField& f) {
  std::vector<cplx> c = f.half();
  c[0] = 0.0;
  for (std::size_t j = 1; j < c.size(); ++j) c[j] *= cplx(0.0, -1.0);
  return PeriodicField(f.grid(), std::move(c));
}

using Point = std::array<double, 2>;

bool inside(const std::vector<Point>& poly, double x, double y) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if ((a[1] > y) != (b[1] > y) && x < (b[0] - a[0]) * (y - a[1]) / (b[1] - a[1]) + a[0]) in = !in;
  }
  return in;
}

double occupancy(const std::vector<std::vector<Point>>& polys, Point lo, double side, int G) {
  const double h = side / G;
  std::vector<char> cell(static_cast<std::size_t>(G) * G, 0);
  for (const auto& poly : polys) {
    double x0 = poly[0][0], x1 = x0, y0 = poly[0][1], y1 = y0;
    for (const auto& p : poly) {
      x0 = std::min(x0, p[0]);
      x1 = std::max(x1, p[0]);
      y0 = std::min(y0, p[1]);
      y1 = std::max(y1, p[1]);
    }
    const int i0 = std::max(0, static_cast<int>(std::floor((x0 - lo[0]) / h - 0.5)));
    const int i1 = std::min(G - 1, static_cast<int>(std::ceil((x1 - lo[0]) / h - 0.5)));
    const int j0 = std::max(0, static_cast<int>(std::floor((y0 - lo[1]) / h - 0.5)));
    const int j1 = std::min(G - 1, static_cast<int>(std::ceil((y1 - lo[1]) / h - 0.5)));
    for (int i = i0; i <= i1; ++i)
      for (int j = j0; j <= j1; ++j) {
        char& c = cell[static_cast<std::size_t>(i) * G + j];
        if (!c && inside(poly, lo[0] + (i + 0.5) * h, lo[1] + (j + 0.5) * h)) c = 1;
      }
  }
  const auto n = std::count(cell.begin(), cell.end(), 1);
  return static_cast<double>(n) * h * h;
}

double hull_area(std::vector<Point> p) {
  if (p.size() < 3) return 0.0;
  std::sort(p.begin(), p.end());
  auto cross = [](const Point& o, const Point& a, const Point& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  std::vector<Point> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  double a = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const auto& u = h[i];
    const auto& v = h[(i + 1) % h.size()];
    a += u[0] * v[1] - u[1] * v[0];
  }
  return 0.5 * std::abs(a);
}

}  // namespace

Prototype prototype_from_json(const json& j) {
  Prototype p;
  const auto kind = get_or<std::string>(j, "kind", "zero");
  if (kind == "zero") {
    p.kind = Prototype::Kind::Zero;
  } else if (kind == "bump") {
    p.kind = Prototype::Kind::Bump;
    p.amplitude = get_or(j, "amplitude", 1.0);
    p.center = get_or(j, "center", 0.0);
    p.width = get_or(j, "width", 1.0);
    require(p.width > 0.0, "bump width must be positive");
  } else if (kind == "modes") {
    p.kind = Prototype::Kind::Modes;
    for (const auto& m : j.at("modes")) {
      require(m.is_array() && m.size() == 3, "modes entries are [j, re, im]");
      p.modes.push_back({m[0].get<int>(), m[1].get<double>(), m[2].get<double>()});
    }
  } else {
    throw PreconditionError("unknown prototype kind '" + kind + "'");
  }
  return p;
}

HamiltonianSpec hamiltonian_from_json(const json& j) {
  try {
    const auto kind = get_or<std::string>(j, "kind", "kdv");
    HamiltonianSpec h;
    if (kind == "kdv") {
      h = HamiltonianSpec::kdv();
    } else if (kind == "hkappa") {
      h = HamiltonianSpec::hkappa(j.at("kappa").get<double>());
    } else if (kind == "hkappa-trunc" || kind == "hkappa_trunc") {
      h = HamiltonianSpec::truncated(j.at("kappa").get<double>(), j.at("m").get<double>(), j.at("M").get<double>());
    } else {
      throw PreconditionError("unknown flow kind '" + kind + "'");
    }
    h.linear = get_or(j, "linear", false);
    h.basis_cutoff = get_or(j, "basis_cutoff", 0);
    return h;
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("flow config: ") + e.what());
  }
}

json to_json(const HamiltonianSpec& h) {
  json j{{"kind", to_string(h.kind)}, {"linear", h.linear}, {"basis_cutoff", h.basis_cutoff}};
  if (h.kind != FlowKind::KdV) j["kappa"] = h.kappa;
  if (h.kind == FlowKind::HkappaTrunc) {
    j["m"] = h.band.N;
    j["M"] = h.band.M;
  }
  return j;
}

ScenarioConfig scenario_config_from_json(const json& j) {
  try {
    ScenarioConfig c;
    const json none = json::object();
    const auto& grid = j.contains("grid") ? j.at("grid") : none;
    const auto& band = j.contains("band") ? j.at("band") : none;
    const auto& sc = j.contains("scenario") ? j.at("scenario") : none;
    const auto& flow = j.contains("flow") ? j.at("flow") : none;
    c.L = get_or(grid, "L", c.L);
    c.K = get_or(grid, "K", c.K);
    c.m = get_or(band, "m", c.m);
    c.M = get_or(band, "M", c.M);
    if (sc.contains("z")) c.z = prototype_from_json(sc.at("z"));
    if (sc.contains("l")) c.l = prototype_from_json(sc.at("l"));
    c.alpha = get_or(sc, "alpha", c.alpha);
    c.r = get_or(sc, "r", c.r);
    c.R = get_or(sc, "R", c.R);
    c.T = get_or(sc, "T", c.T);
    c.dt = get_or(flow, "dt", c.dt);
    c.flow = hamiltonian_from_json(flow);
    c.seed = get_or(j, "seed", c.seed);
    return c;
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("scenario config: ") + e.what());
  }
}

PeriodicField realize(const Prototype& p, const TorusGrid& grid) {
  switch (p.kind) {
    case Prototype::Kind::Zero: return PeriodicField(grid);
    case Prototype::Kind::Bump: {
      const double L = grid.length;
      return PeriodicField::from_function(grid, [&](double x) {
        double s = 0.0;
        const int r0 = static_cast<int>(std::floor((p.center - p.width - x) / L));
        const int r1 = static_cast<int>(std::ceil((p.center + p.width - x) / L));
        for (int r = r0; r <= r1; ++r) {
          const double y = (x + r * L - p.center) / p.width;
          if (std::abs(y) < 1.0) s += p.amplitude * std::exp(-1.0 / (1.0 - y * y));
        }
        return s;
      });
    }
    case Prototype::Kind::Modes: {
      std::vector<cplx> c(grid.K + 1);
      for (const auto& m : p.modes) {
        require(m.j >= 0 && m.j <= grid.K, "prototype mode outside the grid");
        c[m.j] += cplx(m.re, m.j == 0 ? 0.0 : m.im);
      }
      return PeriodicField(grid, std::move(c));
    }
  }
  return PeriodicField(grid);
}

PeriodicField band_project(const PeriodicField& f, double m, double M) {
  std::vector<cplx> c(f.K() + 1);
  for (int j : band_modes(f.grid(), m, M)) c[j] = f.half()[j];
  return PeriodicField(f.grid(), std::move(c));
}

SqueezeScenario build_scenario(const ScenarioConfig& c) {
  require(c.R > 0.0 && c.r > 0.0 && c.r < c.R, "radii must satisfy 0 < r < R");
  require(c.m > 0.0 && c.m < c.M, "band must satisfy 0 < m < M");
  require(std::isfinite(c.T) && c.T >= 0.0, "horizon must be nonnegative");
  require(c.dt > 0.0, "dt must be positive");
  const auto g = TorusGrid::make(c.L, c.K);
  require(!band_modes(g, c.m, c.M).empty(), "band contains no grid modes");
  SqueezeScenario s;
  const auto z0 = realize(c.z, g);
  s.z = band_project(z0, c.m, c.M);
  s.z_band_error = (s.z - z0).l2_norm();
  if (c.z.kind != Prototype::Kind::Zero && z0.l2_norm() > 0.0 && s.z.l2_norm() <= 1e-14 * z0.l2_norm())
    throw PreconditionError("band-projected center is numerically zero");
  const auto l0 = realize(c.l, g);
  const auto lp = band_project(l0, c.m, c.M);
  const double n = sobolev_norm(lp, 0.5, true);
  if (!(n > 1e-14 * std::max(l0.l2_norm(), 1e-300))) throw PreconditionError("band-projected l is numerically zero");
  s.l_scale = 1.0 / n;
  s.l = s.l_scale * lp;
  s.alpha = c.alpha;
  s.r = c.r;
  s.R = c.R;
  s.T = c.T;
  s.dt = c.dt;
  s.flow = c.flow;
  s.m = c.m;
  s.M = c.M;
  s.seed = c.seed;
  return s;
}

json to_json(const SqueezeScenario& s) {
  return {{"L", s.L()},           {"K", s.z.K()},         {"m", s.m},
          {"M", s.M},             {"alpha", s.alpha},     {"r", s.r},
          {"R", s.R},             {"T", s.T},             {"dt", s.dt},
          {"flow", to_json(s.flow)}, {"l_scale", s.l_scale}, {"z_band_error", s.z_band_error},
          {"seed", s.seed}};
}

PeriodicField linear_propagate(const PeriodicField& f, const HamiltonianSpec& h, double t) {
  const auto L = linear_symbol(f.grid(), h);
  std::vector<cplx> c = f.half();
  for (std::size_t j = 0; j < c.size(); ++j) c[j] *= std::exp(t * L[j]);
  return PeriodicField(f.grid(), std::move(c));
}

PeriodicField flow_map(const SqueezeScenario& s, const PeriodicField& q0) { return evolve_to(s, q0, std::nullopt); }

double escape_objective(const SqueezeScenario& s, const PeriodicField& q0) {
  return std::abs(pairing(s.l, flow_map(s, q0)) - s.alpha);
}

std::vector<PeriodicField> sample_ball(const SqueezeScenario& s, int count, unsigned seed, double radius_factor) {
  require(count >= 1, "sample count must be positive");
  require(radius_factor >= 0.0 && radius_factor <= 1.0, "radius factor must lie in [0, 1]");
  const auto& g = s.z.grid();
  const auto modes = band_modes(g, s.m, s.M);
  const int D = 2 * static_cast<int>(modes.size());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  std::vector<PeriodicField> out;
  for (int i = 0; i < count; ++i) {
    std::vector<double> x(D);
    for (double& v : x) v = nd(rng);
    normalize(x);
    const double rho = radius_factor * s.R * std::pow(ud(rng), 1.0 / D);
    out.push_back(s.z + rho * from_coordinates(g, modes, x));
  }
  return out;
}

EscapeResult escape_search(const SqueezeScenario& s, const EscapeBudget& budget) {
  require(budget.starts >= 1, "escape search needs at least one start");
  require(budget.evaluations >= 0, "evaluation budget must be nonnegative");
  const auto& g = s.z.grid();
  const auto modes = band_modes(g, s.m, s.M);
  const int D = 2 * static_cast<int>(modes.size());
  const double rho = s.R * (1.0 - 1e-12);
  EscapeResult res;
  std::string last_error;
  auto eval = [&](const std::vector<double>& x) {
    try {
      const auto qT = evolve_to(s, s.z + rho * from_coordinates(g, modes, x), budget.smallness);
      return std::abs(pairing(s.l, qT) - s.alpha);
    } catch (const std::exception& e) {
      ++res.aborted;
      last_error = e.what();
      return -std::numeric_limits<double>::infinity();
    }
  };

  std::mt19937_64 rng(s.seed);
  std::normal_distribution<double> nd;
  std::vector<double> best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < budget.starts; ++i) {
    std::vector<double> x(D);
    for (double& v : x) v = nd(rng);
    normalize(x);
    const double v = eval(x);
    res.start_values.push_back(v);
    if (v > best_value) {
      best_value = v;
      best = x;
    }
  }
  if (best.empty()) {
    std::ostringstream msg;
    msg << "escape search: all " << budget.starts << " starting evolutions aborted; last error: " << last_error;
    throw CertificationError(msg.str());
  }

  // Each coordinate is tried at +-h, then at the vertex of the parabola through the three values.
  int used = 0;
  double h = budget.initial_step;
  auto moved = [&](int c, double t) {
    auto x = best;
    x[c] += t;
    normalize(x);
    return x;
  };
  while (used < budget.evaluations && h >= budget.final_step) {
    for (int c = 0; c < D && used < budget.evaluations; ++c) {
      const double f0 = best_value;
      std::array<double, 2> f{};
      std::array<std::vector<double>, 2> x;
      for (int i = 0; i < 2 && used < budget.evaluations; ++i) {
        x[i] = moved(c, i == 0 ? h : -h);
        f[i] = eval(x[i]);
        ++used;
      }
      if (used >= budget.evaluations && x[1].empty()) f[1] = -std::numeric_limits<double>::infinity();
      int pick = f[0] >= f[1] ? 0 : 1;
      double top = f[pick];
      std::vector<double> cand = x[pick];
      const double curv = f[0] + f[1] - 2.0 * f0;
      if (std::isfinite(f[0]) && std::isfinite(f[1]) && curv < 0.0 && used < budget.evaluations) {
        const double t = std::clamp(-0.5 * h * (f[0] - f[1]) / curv, -2.0 * h, 2.0 * h);
        if (std::abs(std::abs(t) - h) > 1e-3 * h) {
          auto xv = moved(c, t);
          const double fv = eval(xv);
          ++used;
          if (fv > top) {
            top = fv;
            cand = std::move(xv);
          }
        }
      }
      if (top > best_value) {
        best_value = top;
        best = std::move(cand);
      }
    }
    h *= 0.5;
  }
  res.witness = s.z + rho * from_coordinates(g, modes, best);
  res.value = best_value;
  res.exceeds_r = best_value > s.r;
  res.evaluations = budget.starts + used;
  return res;
}

double linear_oracle(const SqueezeScenario& s) {
  require(s.flow.linear, "the closed-form escape value needs a linear flow");
  const auto back = linear_propagate(s.l, s.flow, -s.T);
  return std::abs(pairing(back, s.z) - s.alpha) + s.R * sobolev_norm(back, 0.5, true);
}

AreaResult image_area(const SqueezeScenario& s, const AreaOptions& o) {
  require(o.grid >= 4 && o.grid % 2 == 0, "occupancy grid must be even and at least 4");
  require(o.radial >= 1 && o.angular >= 8, "slice mesh too coarse");
  const auto& g = s.z.grid();
  std::vector<cplx> c(g.K + 1);
  for (int j = 1; j <= g.K; ++j) c[j] = g.mode(j) * s.l.half()[j];
  PeriodicField e1(g, std::move(c));
  const double n1 = sobolev_norm(e1, -0.5, true);
  require(n1 > 0.0, "degenerate slice: l has no nonzero modes");
  e1 = (1.0 / n1) * e1;
  const auto e2 = hilbert(e1);
  require(std::abs(sobolev_norm(e2, -0.5, true) - 1.0) < 1e-10, "degenerate slice: conjugate partner is not a unit vector");
  const auto f1 = linear_propagate(e1, s.flow, -s.T);
  const auto f2 = linear_propagate(e2, s.flow, -s.T);
  const auto hl = hilbert(s.l);
  auto image = [&](double x1, double x2) -> Point {
    const auto qT = flow_map(s, s.z + x1 * f1 + x2 * f2);
    return {pairing(s.l, qT), pairing(hl, qT)};
  };

  const int nr = o.radial, nt = o.angular;
  const Point center = image(0.0, 0.0);
  std::vector<std::vector<Point>> ring(nr + 1, std::vector<Point>(nt, center));
  for (int i = 1; i <= nr; ++i)
    for (int j = 0; j < nt; ++j) {
      const double rad = s.R * i / nr, th = 2.0 * kPi * j / nt;
      ring[i][j] = image(rad * std::cos(th), rad * std::sin(th));
    }
  std::vector<std::vector<Point>> polys;
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nt; ++j) {
      const int k = (j + 1) % nt;
      if (i == 0)
        polys.push_back({center, ring[1][j], ring[1][k]});
      else
        polys.push_back({ring[i][j], ring[i + 1][j], ring[i + 1][k], ring[i][k]});
    }
  Point lo = center, hi = center;
  for (const auto& r : ring)
    for (const auto& p : r)
      for (int d = 0; d < 2; ++d) {
        lo[d] = std::min(lo[d], p[d]);
        hi[d] = std::max(hi[d], p[d]);
      }
  double side = std::max(hi[0] - lo[0], hi[1] - lo[1]);
  if (side == 0.0) side = 1.0;
  const double pad = 0.02 * side;
  lo = {0.5 * (lo[0] + hi[0]) - 0.5 * side - pad, 0.5 * (lo[1] + hi[1]) - 0.5 * side - pad};
  side += 2 * pad;

  AreaResult out;
  out.grid = o.grid;
  out.disk_area = kPi * s.R * s.R;
  out.area = occupancy(polys, lo, side, o.grid);
  out.area_coarse = occupancy(polys, lo, side, o.grid / 2);
  out.refinement_error = std::abs(out.area - out.area_coarse);
  out.boundary = ring[nr];
  if (o.hull_samples >= 3) {
    std::vector<Point> pts;
    for (const auto& q : sample_ball(s, o.hull_samples, s.seed + 1)) {
      const auto qT = flow_map(s, q);
      pts.push_back({pairing(s.l, qT), pairing(hl, qT)});
    }
    out.hull_area = hull_area(std::move(pts));
  }
  return out;
}

ReportFiles run_report(const RunManifest& m, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  ReportFiles out;
  json outputs = json::array();
  for (const auto& t : m.tables) {
    require(!t.name.empty() && t.name.find('/') == std::string::npos, "table name must be a plain file stem");
    const auto path = dir / (t.name + ".csv");
    write_csv(path, t.table);
    const auto digest = sha256_file(path);
    out.paths.push_back(path);
    out.digests.push_back(digest);
    outputs.push_back({{"file", t.name + ".csv"},
                       {"sha256", digest},
                       {"columns", t.table.columns},
                       {"rows", t.table.rows.size()}});
  }
  out.manifest = {{"tool_version", m.tool_version},
                  {"scenario", m.scenario},
                  {"budgets", m.budgets},
                  {"seeds", m.seeds},
                  {"outputs", outputs}};
  const auto mpath = dir / "manifest.json";
  std::ofstream os(mpath);
  if (!os) throw std::runtime_error("cannot open " + mpath.string() + " for writing");
  os << out.manifest.dump(2) << '\n';
  if (!os) throw std::runtime_error("write failed for " + mpath.string());
  out.paths.push_back(mpath);
  return out;
}

}  // namespace kdvlab
