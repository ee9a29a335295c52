#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "kirchhoff/domain.hpp"
#include "kirchhoff/functionals.hpp"

namespace kirchhoff {

struct WellGeometryOptions {
    std::size_t restarts = 6;
    std::size_t ascent_iters = 600;    // Sobolev-constant ascent budget per start
    std::size_t descent_iters = 600;   // depth descent budget per start
    std::uint64_t seed = 1234;
    std::vector<double> delta_grid;    // empty: log grid on [0.05, 1] and [1, delta_max]
    double delta_max = 16.0;
    std::size_t curve_points_per_side = 12;
};

// Computed variational landscape for one (domain, params) pair.
struct WellGeometry {
    double S_est = 0.0;     // discrete optimal embedding constant H_0^1 -> L^{q+1}
    double d_est = 0.0;     // discrete well depth, inf over Nehari manifold of J
    double d_lower = 0.0;   // analytic lower-bound formula evaluated at S_est
    SpectralField minimizer;
    std::vector<std::pair<double, double>> d_curve;  // (delta, d(delta)) samples
    double delta_tilde = 0.0;  // zero crossing of d(delta) past delta = 1
};

struct DeltaRoots {
    double delta1 = 0.0;  // < 1
    double delta2 = 0.0;  // > 1
};

// Sampled estimates of lambda_s / Lambda_s over Nehari points below energy s.
// Inner approximation: lambda_s_est upper-bounds the true inf, Lambda_s_est
// lower-bounds the true sup.
struct HighEnergyBounds {
    double s = 0.0;
    double lambda_s_est = 0.0;
    double Lambda_s_est = 0.0;
    std::size_t n_samples = 0;
    std::size_t n_accepted = 0;
    double min_grad_norm = 0.0;  // smallest ||grad u||_2 among accepted samples
};

struct ThresholdReport {
    double delta = 0.0;
    double radius = 0.0;  // r(delta, S_est)
    std::size_t n_samples = 0;
    std::size_t n_negative = 0;          // samples with I_delta < 0
    std::size_t violations_radius = 0;   // I_delta < 0 but ||grad u|| <= r - tol
    std::size_t violations_sign = 0;     // ||grad u|| <= r but I_delta < -tol
    double worst_margin = 0.0;           // most negative slack observed
};

double depth_lower_bound(const ModelParams& p, double sobolev_const);

// r(delta) = (delta b / S^{q+1})^{1/(q-3)}
double r_delta(double delta, const ModelParams& p, double sobolev_const);

// Multi-start projected ascent of ||u||_{q+1} / ||grad u||_2 over the discrete
// subspace; throws a runtime error carrying the best iterate on stagnation.
double estimate_sobolev_constant(const Domain& dom, double q, std::size_t restarts,
                                 std::size_t iters, std::uint64_t seed = 1234);

// d(delta) = inf over directions of J(lambda(delta, u) u), by multi-start
// preconditioned CG on the unit H^1 sphere. delta = 1 gives the well depth.
struct DepthResult {
    double value = 0.0;
    SpectralField minimizer;
};
// stop_below: early-exit certificate threshold; once the descent value drops
// past it the minimization halts, since callers probing the sign of d(delta)
// do not need a converged minimum in the unbounded-below regime.
DepthResult compute_depth_delta(const Domain& dom, const ModelParams& p, double delta,
                                std::size_t restarts, std::size_t iters,
                                std::uint64_t seed, const SpectralField* warm_start = nullptr,
                                double stop_below = -std::numeric_limits<double>::infinity());
DepthResult compute_depth(const Domain& dom, const ModelParams& p, std::size_t restarts,
                          std::size_t iters = 600, std::uint64_t seed = 1234);

// Sweeps the grid in order, warm-starting each depth solve from the previous
// minimizer; stops after the first non-positive sample past delta = 1 (the
// zero crossing), where the manifold infimum ceases to be informative.
std::vector<std::pair<double, double>> d_delta_curve(const Domain& dom, const ModelParams& p,
                                                     const std::vector<double>& delta_grid,
                                                     const SpectralField& warm_minimizer,
                                                     std::size_t iters = 400);

// The two roots delta1 < 1 < delta2 of d(delta) = J0 for 0 < J0 < d_est.
DeltaRoots find_delta_roots(const Domain& dom, const ModelParams& p, const WellGeometry& geom,
                            double J0, std::size_t iters = 400);

HighEnergyBounds estimate_high_energy_bounds(const Domain& dom, const ModelParams& p, double s,
                                             double d_est, std::size_t n_samples,
                                             std::uint64_t seed);

ThresholdReport verify_norm_thresholds(const Domain& dom, const ModelParams& p, double delta,
                                       double sobolev_const, std::size_t n_samples,
                                       std::uint64_t seed);

WellGeometry compute_well_geometry(const Domain& dom, const ModelParams& p,
                                   const WellGeometryOptions& opt = {});

// Random band-limited field with decay-weighted Gaussian coefficients;
// shared by the sampling sweeps and the property suites.
SpectralField random_field(const Domain& dom, std::mt19937_64& rng);

}  // namespace kirchhoff
