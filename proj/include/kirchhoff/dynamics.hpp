#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kirchhoff/domain.hpp"
#include "kirchhoff/functionals.hpp"
#include "kirchhoff/wellgeometry.hpp"

namespace kirchhoff {

struct SolverControls {
    double dt_init = 1e-4;
    double dt_min = 1e-12;
    double dt_max = 1e-2;
    double t_max = 50.0;
    double rel_tol = 1e-8;
    double norm_cap = 1e8;       // blow-up threshold on ||grad u||_2
    double decay_floor = 1e-12;  // ||u||_2^2 threshold declaring decay
    std::size_t snapshot_stride = 10;

    void validate() const;
};

struct EnergySnapshot {
    double t = 0.0;
    double dt = 0.0;
    double l2_sq = 0.0;
    double h1_sq = 0.0;
    double lqp1 = 0.0;
    double J = 0.0;
    double I = 0.0;
    double dissipation = 0.0;  // running integral of ||u_t||_2^2
    double residual = 0.0;     // energy-identity defect at this snapshot
    double M = 0.0;            // running integral of ||u||_2^2
    double F = 0.0;            // M'' M - (q+1)/2 (M')^2 with M'' = -2I, M' = l2_sq
};

enum class Outcome { GlobalDecay, BlowUp, Undetermined };

struct TrajectoryRecord {
    std::vector<EnergySnapshot> snapshots;
    Outcome outcome = Outcome::Undetermined;
    double decay_rate = 0.0;       // fitted d/dt log ||u||_2^2 (GlobalDecay)
    double blowup_time_est = 0.0;  // extrapolated T (BlowUp)
    double blowup_fit_quality = 0.0;
    std::string reason;            // Undetermined diagnostics
    SpectralField final_state;
    double t_final = 0.0;
};

// One ETD step: freeze m = a + b||grad u||^2 and the nonlinear coefficients
// at step start, advance each mode by its exact linear factor plus the
// exponentially weighted explicit nonlinear term. First order in the frozen
// quantities, unconditionally stable in the stiff linear part.
SpectralField etd_step(const Domain& dom, const ModelParams& p, const SpectralField& u,
                       double dt, bool include_nonlinearity = true);

// Single step with error estimate from a half-step composition.
struct StepResult {
    SpectralField next;       // full step
    SpectralField composed;   // two half steps (more accurate)
    double error_estimate = 0.0;
};
StepResult step(const Domain& dom, const ModelParams& p, const SpectralField& u, double dt);

TrajectoryRecord integrate(const Domain& dom, const ModelParams& p, const SpectralField& u0,
                           const SolverControls& controls);

// Max over snapshots of |dissipation + J(u) - J(u0)|.
double energy_residual(const TrajectoryRecord& traj);

// F(t) at each snapshot plus the first time past which F stays positive.
struct ConcavityDiagnostics {
    std::vector<std::pair<double, double>> F_series;
    double onset = -1.0;  // -1 when F never turns positive for good
};
ConcavityDiagnostics concavity_diagnostics(const TrajectoryRecord& traj, const ModelParams& p);

struct DecayBoundCheck {
    bool applicable = false;
    bool pass = false;
    double worst_margin = 0.0;  // min over snapshots of bound - observed
};
DecayBoundCheck decay_bound_check(const TrajectoryRecord& traj, double delta1,
                                  const ModelParams& p, double lambda1,
                                  double tol_decay = 1e-3);

struct WellInvarianceReport {
    bool applicable = false;
    std::size_t n_deltas = 0;
    std::size_t violations = 0;
    double worst_margin = 0.0;
};
// For sampled delta in (delta1, delta2): sign persistence of I_delta along the
// trajectory per the invariance of the modified wells, plus J < d(delta) on
// the positive branch.
WellInvarianceReport well_invariance_check(const Domain& dom, const ModelParams& p,
                                           const TrajectoryRecord& traj,
                                           const SpectralField& u0, const WellGeometry& geom,
                                           const DeltaRoots& roots, std::size_t n_deltas = 11);

// Delimited trajectory export; fixed column contract.
extern const char* const kTrajectoryHeader;
std::string format_trajectory(const TrajectoryRecord& traj);

}  // namespace kirchhoff
