#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>

#include "CLI11.hpp"
#include "json.hpp"
#include "kdvlab/bridge.hpp"
#include "kdvlab/error.hpp"
#include "kdvlab/flows.hpp"
#include "kdvlab/greens.hpp"
#include "kdvlab/report.hpp"
#include "kdvlab/squeeze.hpp"

using namespace kdvlab;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw PreconditionError("cannot open config '" + path + "'");
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw PreconditionError("config '" + path + "': " + e.what());
  }
}

const json& section(const json& c, const char* key) {
  static const json empty = json::object();
  return c.contains(key) ? c.at(key) : empty;
}

template <class T>
T value(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

TorusGrid grid_of(const json& c) {
  const auto& g = section(c, "grid");
  return TorusGrid::make(value(g, "L", 8.0), value(g, "K", 32), value(g, "n", 0));
}

PeriodicField initial_of(const json& c, const TorusGrid& g) {
  const json fallback = {{"kind", "bump"}, {"amplitude", 0.5}, {"center", 0.0}, {"width", 1.0}};
  auto q = realize(prototype_from_json(c.contains("initial") ? c.at("initial") : fallback), g);
  if (value(section(c, "grid"), "mean_zero", true)) {
    auto h = q.half();
    h[0] = 0.0;
    q = PeriodicField(g, std::move(h));
  }
  return q;
}

FlowSpec flow_of(const json& c) {
  const auto& f = section(c, "flow");
  FlowSpec s;
  s.hamiltonian = hamiltonian_from_json(f);
  s.dt = value(f, "dt", 0.0);
  s.T = value(f, "T", 0.1);
  s.save_every = value(f, "save_every", 0.0);
  s.probes = value(f, "probes", std::vector<double>{});
  return s;
}

std::vector<double> kappas_of(const json& c) { return value(c, "kappas", std::vector<double>{1.0, 2.0, 4.0}); }

RunManifest manifest_of(const json& c, const std::string& command) {
  RunManifest m;
  m.scenario = c;
  m.scenario["command"] = command;
  m.budgets = section(c, "budgets");
  m.seeds = {value(c, "seed", 1u)};
  return m;
}

void finish(const RunManifest& m, const std::string& out) {
  const auto files = run_report(m, out);
  for (std::size_t i = 0; i < m.tables.size(); ++i)
    std::cout << files.paths[i].string() << " sha256=" << files.digests[i] << '\n';
  std::cout << files.paths.back().string() << '\n';
}

void cmd_evolve(const json& c, const std::string& out) {
  const auto g = grid_of(c);
  const auto spec = flow_of(c);
  const auto traj = evolve(initial_of(c, g), spec);
  Table mon{{"t", "M", "P", "H", "hamiltonian"}, {}};
  for (const auto& p : spec.probes) mon.columns.push_back("alpha_" + format_double(p));
  Table modes{{"t"}, {}};
  for (int j = 0; j <= g.K; ++j) {
    modes.columns.push_back("re_" + std::to_string(j));
    modes.columns.push_back("im_" + std::to_string(j));
  }
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const auto& r = traj.monitors[i];
    std::vector<double> row{traj.times[i], r.M, r.P, r.H, r.hamiltonian};
    row.insert(row.end(), r.alpha.begin(), r.alpha.end());
    mon.rows.push_back(row);
    std::vector<double> mrow{traj.times[i]};
    for (const auto& z : traj.states[i].half()) {
      mrow.push_back(z.real());
      mrow.push_back(z.imag());
    }
    modes.rows.push_back(mrow);
  }
  auto m = manifest_of(c, "evolve");
  m.tables = {{"monitors", mon}, {"modes", modes}};
  finish(m, out);
}

void cmd_greens(const json& c, const std::string& out) {
  const auto g = grid_of(c);
  const auto q = initial_of(c, g);
  const int cutoff = value(section(c, "flow"), "basis_cutoff", 0);
  Table t{{"x"}, {}};
  std::vector<std::vector<double>> cols;
  for (double k : kappas_of(c)) {
    t.columns.push_back("g_" + format_double(k));
    cols.push_back(green_diagonal(assemble_resolvent(q, k, cutoff)).g.samples());
  }
  for (int i = 0; i < g.n; ++i) {
    std::vector<double> row{i * g.spacing()};
    for (const auto& col : cols) row.push_back(col[i]);
    t.rows.push_back(row);
  }
  auto m = manifest_of(c, "greens");
  m.tables = {{"green", t}};
  finish(m, out);
}

void cmd_alpha(const json& c, const std::string& out) {
  const auto g = grid_of(c);
  const auto q = initial_of(c, g);
  const int cutoff = value(section(c, "flow"), "basis_cutoff", 0);
  const int l_max = value(c, "l_max", 8);
  Table t{{"kappa", "alpha", "alpha_series", "hs_norm", "tail_bound", "certified"}, {}};
  for (double k : kappas_of(c)) {
    const auto ctx = assemble_resolvent(q, k, cutoff);
    const auto a = alpha(ctx);
    const auto s = alpha_series(ctx, l_max);
    t.rows.push_back({k, a.value, s.value, a.hs_norm, s.tail_bound, s.certified ? 1.0 : 0.0});
  }
  auto m = manifest_of(c, "alpha");
  m.tables = {{"alpha", t}};
  finish(m, out);
}

void cmd_sweep_band(const json& c, const std::string& out) {
  const auto g = grid_of(c);
  const auto q = initial_of(c, g);
  const auto base = flow_of(c);
  const double kappa = value(section(c, "flow"), "kappa", 1.0);
  const auto bands = value(c, "bands", std::vector<std::array<double, 2>>{{1.0 / 4, 4.0}, {1.0 / 8, 8.0}});
  FlowSpec full = base;
  full.hamiltonian = HamiltonianSpec::hkappa(kappa);
  full.hamiltonian.basis_cutoff = base.hamiltonian.basis_cutoff;
  const auto ref = evolve(q, full);
  Table t{{"m", "M", "rate", "error"}, {}};
  for (const auto& [lo, hi] : bands) {
    FlowSpec tr = full;
    tr.hamiltonian = HamiltonianSpec::truncated(kappa, lo, hi);
    tr.hamiltonian.basis_cutoff = base.hamiltonian.basis_cutoff;
    const double e = compare_trajectories(ref, evolve(q, tr), -1.0).sup();
    t.rows.push_back({lo, hi, std::sqrt(lo) + 1.0 / std::sqrt(hi), e});
  }
  auto m = manifest_of(c, "sweep-band");
  m.tables = {{"band", t}};
  finish(m, out);
}

void cmd_sweep_kappa(const json& c, const std::string& out) {
  const auto g = grid_of(c);
  const auto spec = flow_of(c);
  const auto ks = kappas_of(c);
  const auto err = kappa_sweep(initial_of(c, g), ks, spec.T, spec.dt > 0 ? spec.dt : 1e-3, spec.save_every);
  Table t{{"kappa", "error"}, {}};
  for (std::size_t i = 0; i < ks.size(); ++i) t.rows.push_back({ks[i], err[i]});
  auto m = manifest_of(c, "sweep-kappa");
  m.tables = {{"kappa", t}};
  finish(m, out);
}

void cmd_cutcompare(const json& c, const std::string& out) {
  const auto g = grid_of(c);
  const auto u = initial_of(c, g);
  const auto& k = section(c, "cut");
  CutPolicy policy;
  policy.fraction = value(k, "fraction", policy.fraction);
  policy.exclusion = value(k, "exclusion", policy.exclusion);
  policy.zero_tol = value(k, "zero_tol", policy.zero_tol);
  const auto plan = select_cut(u, build_partition(g, value(k, "N", 32)), policy);
  const auto cmp = compare_local(u, plan, value(k, "kappa", 1.0), value(k, "m", 0.125), value(k, "M", 2.0),
                                 value(k, "T", 0.1), value(k, "dt", 1e-3), value(k, "save_every", 0.0),
                                 value(k, "basis_cutoff", 0));
  Table win{{"k", "center", "weight", "hm12", "hm1", "integral", "admissible"}, {}};
  for (int i = 0; i < plan.partition.N; ++i) {
    const auto& w = plan.table[i];
    const bool adm = std::find(plan.admissible.begin(), plan.admissible.end(), i) != plan.admissible.end();
    win.rows.push_back({double(i), plan.partition.center(i), plan.weights[i], w.hm12, w.hm1, w.integral, adm ? 1.0 : 0.0});
  }
  Table cur{{"t", "error", "exterior"}, {}};
  for (std::size_t i = 0; i < cmp.times.size(); ++i) cur.rows.push_back({cmp.times[i], cmp.error[i], cmp.exterior[i]});
  auto m = manifest_of(c, "cutcompare");
  m.scenario["cut_case"] = plan.cut_case == CutCase::Single ? "single" : plan.cut_case == CutCase::PairLeft ? "pair-left" : "pair-right";
  m.scenario["cut_window"] = plan.cut;
  m.tables = {{"windows", win}, {"local", cur}};
  finish(m, out);
}

EscapeBudget escape_budget_of(const json& c) {
  const auto& b = section(c, "budgets");
  EscapeBudget e;
  e.starts = value(b, "starts", e.starts);
  e.evaluations = value(b, "evaluations", e.evaluations);
  e.initial_step = value(b, "initial_step", e.initial_step);
  e.final_step = value(b, "final_step", e.final_step);
  if (b.contains("delta0")) {
    const auto& f = section(c, "flow");
    auto sb = SmallnessBudget::calibrate(grid_of(c), {value(f, "kappa", 1.0)}, value(c, "seed", 1u));
    sb.delta0 = b.at("delta0").get<double>();
    e.smallness = sb;
  }
  return e;
}

void cmd_squeeze(const json& c, const std::string& out) {
  const auto s = build_scenario(scenario_config_from_json(c));
  const auto res = escape_search(s, escape_budget_of(c));
  const double oracle = s.flow.linear ? linear_oracle(s) : kNaN;
  Table sum{{"value", "oracle", "r", "R", "exceeds_r", "evaluations", "aborted"}, {}};
  sum.rows.push_back({res.value, oracle, s.r, s.R, res.exceeds_r ? 1.0 : 0.0, double(res.evaluations), double(res.aborted)});
  Table starts{{"start", "value"}, {}};
  for (std::size_t i = 0; i < res.start_values.size(); ++i) starts.rows.push_back({double(i), res.start_values[i]});
  Table wit{{"j", "re", "im"}, {}};
  for (int j = 0; j <= res.witness.K(); ++j) wit.rows.push_back({double(j), res.witness.half()[j].real(), res.witness.half()[j].imag()});
  auto m = manifest_of(c, "squeeze");
  m.scenario["discretized"] = to_json(s);
  m.tables = {{"escape", sum}, {"starts", starts}, {"witness", wit}};
  finish(m, out);
  std::cout << "escape value " << format_double(res.value) << (res.exceeds_r ? " exceeds" : " does not exceed") << " r = "
            << format_double(s.r) << '\n';
}

void cmd_area(const json& c, const std::string& out) {
  const auto s = build_scenario(scenario_config_from_json(c));
  const auto& b = section(c, "budgets");
  AreaOptions o;
  o.grid = value(b, "area_grid", o.grid);
  o.radial = value(b, "radial", o.radial);
  o.angular = value(b, "angular", o.angular);
  o.hull_samples = value(b, "hull_samples", o.hull_samples);
  const auto a = image_area(s, o);
  Table sum{{"grid", "area", "area_coarse", "refinement_error", "hull_area", "disk_area"}, {}};
  sum.rows.push_back({double(a.grid), a.area, a.area_coarse, a.refinement_error, a.hull_area, a.disk_area});
  Table bd{{"x", "y"}, {}};
  for (const auto& p : a.boundary) bd.rows.push_back({p[0], p[1]});
  auto m = manifest_of(c, "area");
  m.scenario["discretized"] = to_json(s);
  m.tables = {{"area", sum}, {"boundary", bd}};
  finish(m, out);
  std::cout << "area/piR^2 = " << format_double(a.area / a.disk_area) << " +- "
            << format_double(a.refinement_error / a.disk_area) << '\n';
}

// Recomputes every digest listed in a manifest.
int cmd_report(const std::string& dir) {
  const auto path = std::filesystem::path(dir) / "manifest.json";
  const auto m = load_config(path.string());
  int bad = 0;
  for (const auto& o : m.at("outputs")) {
    const auto file = std::filesystem::path(dir) / o.at("file").get<std::string>();
    const auto digest = std::filesystem::exists(file) ? sha256_file(file) : std::string("missing");
    const bool ok = digest == o.at("sha256").get<std::string>();
    std::cout << (ok ? "ok       " : "MISMATCH ") << file.string() << '\n';
    bad += !ok;
  }
  if (bad) throw CertificationError(std::to_string(bad) + " output(s) do not match the manifest digests");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral KdV / H_kappa laboratory"};
  app.require_subcommand(1);
  std::string config, out = "kdvlab_out", dir;
  auto add = [&](const char* name, const char* help) {
    auto* sc = app.add_subcommand(name, help);
    sc->add_option("-c,--config", config, "JSON config file")->required()->check(CLI::ExistingFile);
    sc->add_option("-o,--out", out, "output directory");
    return sc;
  };
  add("evolve", "evolve the initial field; monitors.csv, modes.csv");
  add("greens", "diagonal Green's function per kappa; green.csv");
  add("alpha", "perturbation determinant per kappa; alpha.csv");
  add("sweep-band", "H_kappa versus truncated flows over bands; band.csv");
  add("sweep-kappa", "KdV versus H_kappa over kappa; kappa.csv");
  add("cutcompare", "cut, unwrap and compare circle and line flows; windows.csv, local.csv");
  add("squeeze", "cylinder escape search; escape.csv, starts.csv, witness.csv");
  add("area", "slice image area in the pairing plane; area.csv, boundary.csv");
  app.add_subcommand("report", "verify the digests of an output directory")
      ->add_option("dir", dir, "directory holding manifest.json")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const auto* sc = app.get_subcommands().front();
    const std::string name = sc->get_name();
    if (name == "report") return cmd_report(dir);
    const auto c = load_config(config);
    if (name == "evolve") cmd_evolve(c, out);
    else if (name == "greens") cmd_greens(c, out);
    else if (name == "alpha") cmd_alpha(c, out);
    else if (name == "sweep-band") cmd_sweep_band(c, out);
    else if (name == "sweep-kappa") cmd_sweep_kappa(c, out);
    else if (name == "cutcompare") cmd_cutcompare(c, out);
    else if (name == "squeeze") cmd_squeeze(c, out);
    else if (name == "area") cmd_area(c, out);
    return 0;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "precondition failed: config: " << e.what() << '\n';
    return 2;
  } catch (const CertificationError& e) {
    std::cerr << "certification failed: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
