#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kdvlab/spectral.hpp"

namespace kdvlab {

enum class FlowKind { KdV, Hkappa, HkappaTrunc };

struct HamiltonianSpec {
  FlowKind kind = FlowKind::KdV;
  double kappa = 1.0;
  MultiplierSpec band = MultiplierSpec::band(1.0, 2.0);  // HkappaTrunc only
  bool linear = false;   // drop the nonlinearity
  int basis_cutoff = 0;  // resolvent basis, 0 = field K

  static HamiltonianSpec kdv();
  static HamiltonianSpec hkappa(double kappa);
  static HamiltonianSpec truncated(double kappa, double m, double M);
};

std::string to_string(FlowKind kind);

// Calibrated constants of the small-data theory.
struct SmallnessBudget {
  double delta0 = 0.0;  // H^{-1} radius on which ||B|| <= 1/2 for every kappa probed
  double c = 0.0;       // fitted exponential growth rate
  double C_lip = 0.0;   // sup ||g(q) - g(p)||_{H^1} / ||q - p||_{H^{-1}} on the ball

  // delta0 from the exact symbol bound; C_lip from random pairs inside the ball.
  static SmallnessBudget calibrate(const TorusGrid& grid, const std::vector<double>& kappas, unsigned seed = 1,
                                   int trials = 20);
  bool admits(const PeriodicField& q) const;
};

struct FlowSpec {
  HamiltonianSpec hamiltonian;
  double dt = 0.0;          // 0 = min(1e-3, 0.5/(16 kappa^5 C_lip))
  double T = 0.0;
  double save_every = 0.0;  // 0 = only t=0 and t=T
  std::vector<double> probes;
  int probe_cutoff = 0;     // resolvent basis for alpha probes, 0 = 2K
  std::optional<SmallnessBudget> budget;
};

struct MonitorRecord {
  double M = 0.0;
  double P = 0.0;
  double H = 0.0;
  double hamiltonian = 0.0;    // the flow's own Hamiltonian
  std::vector<double> alpha;   // per probe; NaN when uncertified
};

struct Trajectory {
  std::vector<double> times;
  std::vector<PeriodicField> states;
  std::vector<MonitorRecord> monitors;
  std::vector<double> probes;
  int probe_cutoff = 0;
  HamiltonianSpec hamiltonian;
  double dt = 0.0;
};

// Fourier symbol of the linear part, per mode j = 0..K: q_t^ = Lambda q^ + N^.
std::vector<cplx> linear_symbol(const TorusGrid& grid, const HamiltonianSpec& h);
PeriodicField nonlinear_part(const PeriodicField& q, const HamiltonianSpec& h);
PeriodicField rhs(const PeriodicField& q, const HamiltonianSpec& h);
// H_KdV, -16 k^5 alpha(k;q) + 4 k^2 P, or -16 k^5 alpha(k;P q) + 4 k^2 P.
double hamiltonian_value(const PeriodicField& q, const HamiltonianSpec& h);

double default_dt(const FlowSpec& spec);
// Lawson integrating-factor RK4 step.
PeriodicField step(const PeriodicField& q, const HamiltonianSpec& h, double dt);
Trajectory evolve(const PeriodicField& q0, const FlowSpec& spec);

struct ConservationReport {
  double M = 0.0;
  double P = 0.0;
  double H = 0.0;
  double hamiltonian = 0.0;
  std::vector<double> alpha;
  std::vector<std::string> failures;
};

// Max relative drift over the trajectory.
ConservationReport monitors(const Trajectory& traj, const std::vector<double>& probes);

struct ErrorCurve {
  std::vector<double> times;
  std::vector<double> values;
  double sup() const;
};

ErrorCurve compare_flows(const PeriodicField& q0u, const PeriodicField& q0v, const FlowSpec& a, const FlowSpec& b,
                         double s);
ErrorCurve compare_trajectories(const Trajectory& u, const Trajectory& v, double s);
// sup_t ||KdV(q0) - H_kappa(q0)||_{H^{-1}} for each kappa.
std::vector<double> kappa_sweep(const PeriodicField& q0, const std::vector<double>& kappas, double T, double dt,
                                double save_every = 0.0);

struct ModulusTable {
  std::vector<double> deltas;
  std::vector<double> values;
};
ModulusTable time_equicontinuity(const Trajectory& traj);

// Least-squares slope of log ||q(t)||_{Hdot^{-1/2}} against t.
double fit_growth_rate(const Trajectory& traj);

}  // namespace kdvlab
