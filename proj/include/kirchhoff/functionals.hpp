#pragma once

#include "kirchhoff/domain.hpp"

namespace kirchhoff {

// PDE constants: u_t - (a + b||grad u||^2) Lap u = |u|^{q-1} u.
struct ModelParams {
    double a = 1.0;
    double b = 1.0;
    double q = 5.0;

    void validate() const;
};

inline constexpr double kRootTol = 1e-12;  // relative tolerance for fibering roots

// J(u) = (a/2)||grad u||^2 + (b/4)||grad u||^4 - ||u||_{q+1}^{q+1} / (q+1)
double energy(const Domain& dom, const SpectralField& u, const ModelParams& p);

// I(u) = a||grad u||^2 + b||grad u||^4 - ||u||_{q+1}^{q+1}
double nehari(const Domain& dom, const SpectralField& u, const ModelParams& p);

// I_delta(u) = delta (a + b||grad u||^2) ||grad u||^2 - ||u||_{q+1}^{q+1}
double nehari_delta(const Domain& dom, const SpectralField& u, double delta,
                    const ModelParams& p);

// Scale-invariant data of the fibering map lambda -> J(lambda u).
struct FiberData {
    double grad_sq = 0.0;   // ||grad u||^2
    double lqp1 = 0.0;      // ||u||_{q+1}^{q+1}
};

FiberData fiber_data(const Domain& dom, const SpectralField& u, const ModelParams& p);

double fiber_energy(const FiberData& f, double lambda, const ModelParams& p);
double fiber_nehari(const FiberData& f, double lambda, const ModelParams& p);
double fiber_nehari_delta(const FiberData& f, double lambda, double delta,
                          const ModelParams& p);

// The unique maximizer of lambda -> J(lambda u); I(lambda* u) = 0.
double fiber_lambda_star(const Domain& dom, const SpectralField& u, const ModelParams& p);
double fiber_lambda_star(const FiberData& f, const ModelParams& p);

// The unique lambda(delta) > 0 with I_delta(lambda u) = 0; increasing in delta.
double fiber_lambda_delta(const Domain& dom, const SpectralField& u, double delta,
                          const ModelParams& p);
double fiber_lambda_delta(const FiberData& f, double delta, const ModelParams& p);

// Dual coefficients of L(u) = -(a + b||grad u||^2) Lap u.
SpectralField apply_nonlocal(const Domain& dom, const SpectralField& u, const ModelParams& p);

// <L(u) - L(v), u - v>; strongly monotone with constant a.
double monotonicity_gap(const Domain& dom, const SpectralField& u, const SpectralField& v,
                        const ModelParams& p);

// L2 gradient of J at u: (a + b||grad u||^2) lambda_k c_k - (|u|^{q-1}u)_k.
SpectralField energy_gradient(const Domain& dom, const SpectralField& u, const ModelParams& p);

}  // namespace kirchhoff
