#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kirchhoff/domain.hpp"
#include "kirchhoff/dynamics.hpp"
#include "kirchhoff/functionals.hpp"
#include "kirchhoff/wellgeometry.hpp"

namespace kirchhoff {

enum class Regime { Subcritical, Critical, Supercritical };
enum class Prediction { Global, BlowUp, NoPrediction };

struct ClassifyOptions {
    double tol_d = 1e-6;   // half-width of the critical band around d_est
    double margin = 0.10;  // safety margin against the sampled norm bounds
};

struct Classification {
    double J0 = 0.0;
    double I0 = 0.0;
    double l2_norm = 0.0;
    Regime regime = Regime::Subcritical;
    Prediction prediction = Prediction::NoPrediction;
    std::string evidence;  // decision rule applied and the quantities compared
    std::optional<Outcome> observed;
};

Classification classify_initial(const Domain& dom, const ModelParams& p, const SpectralField& u0,
                                const WellGeometry& geom,
                                const HighEnergyBounds* bounds = nullptr,
                                const ClassifyOptions& opt = {});

// Exact inequality [4(q+1)/(q-3)] |Omega|^{(q-1)/2} J(u0) <= ||u0||_2^{q+1};
// nullopt when the standing hypothesis J(u0) > d fails.
std::optional<bool> mass_dominance_predicate(const Domain& dom, const ModelParams& p,
                                     const SpectralField& u0, double d_est);

struct HighEnergyDatum {
    SpectralField u;
    double J = 0.0;
    double I = 0.0;
    double alpha = 0.0;       // scale of the left bump
    double beta = 0.0;        // scale of the right bump
    std::size_t bump_freq = 1;  // frequency index of the right bump shape
    double cross_term = 0.0;  // (b/2) ||grad alpha v||^2 ||grad beta w||^2
    double projection_leakage = 0.0;  // worst relative L2 truncation of the bumps
    bool predicate = false;
};

// Arbitrarily-high-energy blow-up datum: two disjoint cosine-taper bumps,
// the left scaled until its energy is nonpositive and its L2 mass large,
// the right scaled on the increasing branch until J of the sum hits the target.
HighEnergyDatum construct_high_energy(const Domain& dom, const ModelParams& p, double M_target,
                                      double d_est);

enum class FiberBranch { Ascending, Descending };

// mu with J(mu * u_shape) = E_target on the requested side of the fibering peak.
double scale_to_energy(const Domain& dom, const ModelParams& p, const SpectralField& u_shape,
                       double E_target, FiberBranch branch);

struct SweepProbe {
    double mu = 0.0;
    double J0 = 0.0;
    double I0 = 0.0;
    Prediction prediction = Prediction::NoPrediction;
    Outcome observed = Outcome::Undetermined;
};

struct SweepResult {
    double mu_star = 0.0;  // located dichotomy threshold
    double bracket_width = 0.0;
    std::vector<SweepProbe> probes;
};

// Bisection on mu with the observed outcome as oracle, to 1e-3 relative width.
SweepResult threshold_sweep(const Domain& dom, const ModelParams& p, const WellGeometry& geom,
                            const SolverControls& controls, const SpectralField& u_shape,
                            double mu_lo, double mu_hi);

const char* to_string(Regime r);
const char* to_string(Prediction p);
const char* to_string(Outcome o);

}  // namespace kirchhoff
