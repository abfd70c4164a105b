#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kdvlab/flows.hpp"
#include "kdvlab/report.hpp"
#include "kdvlab/spectral.hpp"

namespace kdvlab {

inline constexpr const char* kToolVersion = "kdvlab 0.1.0";

// Compactly supported profile on the line, or a list of circle modes.
struct Prototype {
  enum class Kind { Zero, Bump, Modes } kind = Kind::Zero;
  double amplitude = 1.0;  // Bump: amplitude * exp(-1/(1-y^2)), y = (x - center)/width
  double center = 0.0;
  double width = 1.0;
  struct Mode {
    int j = 1;
    double re = 0.0;
    double im = 0.0;
  };
  std::vector<Mode> modes;  // Modes: coefficients f^(j/L)
};

struct ScenarioConfig {
  double L = 8.0;
  int K = 32;
  double m = 0.25;  // band m < |k| <= M
  double M = 2.0;
  Prototype z;
  Prototype l;
  double alpha = 0.0;
  double r = 0.5;
  double R = 1.0;
  double T = 0.1;
  double dt = 1e-3;
  HamiltonianSpec flow;
  unsigned seed = 1;
};

// {"kind": "zero" | "bump" | "modes", "amplitude", "center", "width", "modes": [[j, re, im], ...]}
Prototype prototype_from_json(const nlohmann::json& j);
ScenarioConfig scenario_config_from_json(const nlohmann::json& j);
HamiltonianSpec hamiltonian_from_json(const nlohmann::json& j);
nlohmann::json to_json(const HamiltonianSpec& h);

struct SqueezeScenario {
  PeriodicField z;  // mean-zero center, band-projected
  PeriodicField l;  // unit Hdot^{1/2}
  double alpha = 0.0;
  double r = 0.0;
  double R = 0.0;
  double T = 0.0;
  double dt = 0.0;
  HamiltonianSpec flow;
  double m = 0.0;
  double M = 0.0;
  double l_scale = 1.0;       // factor applied to the projected l
  double z_band_error = 0.0;  // ||zeta - z||_{L^2} before projection
  unsigned seed = 1;

  double L() const { return z.length(); }
};

SqueezeScenario build_scenario(const ScenarioConfig& config);
nlohmann::json to_json(const SqueezeScenario& s);

// Periodization of the prototype on the circle (before band projection).
PeriodicField realize(const Prototype& p, const TorusGrid& grid);
// Sharp projection onto m < |k| <= M.
PeriodicField band_project(const PeriodicField& f, double m, double M);
// exp(t Lambda) with Lambda the linear symbol of the flow.
PeriodicField linear_propagate(const PeriodicField& f, const HamiltonianSpec& h, double t);
// q(T) for q(0) = q0; exact propagator when the flow is linear.
PeriodicField flow_map(const SqueezeScenario& s, const PeriodicField& q0);
// |<l, q(T)> - alpha|
double escape_objective(const SqueezeScenario& s, const PeriodicField& q0);

// z + rho d with d a random unit band direction in Hdot^{-1/2}, rho = factor R u^{1/dim}, u in [0,1).
std::vector<PeriodicField> sample_ball(const SqueezeScenario& s, int count, unsigned seed, double radius_factor = 1.0);

struct EscapeBudget {
  int starts = 8;                 // random starting points on the sphere of radius R
  int evaluations = 400;          // flow evaluations for coordinate ascent after the starts
  double initial_step = 0.5;
  double final_step = 1e-6;
  std::optional<SmallnessBudget> smallness;
};

struct EscapeResult {
  PeriodicField witness;
  double value = 0.0;
  bool exceeds_r = false;
  int evaluations = 0;
  int aborted = 0;
  std::vector<double> start_values;
};

EscapeResult escape_search(const SqueezeScenario& s, const EscapeBudget& budget);
// |<U(-T) l, z> - alpha| + R ||U(-T) l||_{Hdot^{1/2}}
double linear_oracle(const SqueezeScenario& s);

struct AreaResult {
  double area = 0.0;         // occupancy at grid G
  double area_coarse = 0.0;  // occupancy at grid G/2
  double refinement_error = 0.0;
  double hull_area = 0.0;    // convex hull of full-ball samples, a secondary lower-bound statistic
  double disk_area = 0.0;    // pi R^2
  int grid = 0;
  std::vector<std::array<double, 2>> boundary;  // image of the slice circle
};

struct AreaOptions {
  int grid = 512;
  int radial = 24;
  int angular = 96;
  int hull_samples = 256;
};

// Image of the slice disk z + x1 U(-T) e1 + x2 U(-T) e2, |x| < R, under q -> (<l, q(T)>, <Hl, q(T)>).
AreaResult image_area(const SqueezeScenario& s, const AreaOptions& options = {});

struct NamedTable {
  std::string name;
  Table table;
};

struct RunManifest {
  nlohmann::json scenario = nlohmann::json::object();
  nlohmann::json budgets = nlohmann::json::object();
  std::vector<unsigned> seeds;
  std::string tool_version = kToolVersion;
  std::vector<NamedTable> tables;
};

struct ReportFiles {
  std::vector<std::filesystem::path> paths;
  std::vector<std::string> digests;
  nlohmann::json manifest;
};

// Writes <name>.csv per table and manifest.json with SHA-256 digests of every CSV.
ReportFiles run_report(const RunManifest& manifest, const std::filesystem::path& dir);

}  // namespace kdvlab
