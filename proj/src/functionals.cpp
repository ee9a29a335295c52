#include "kirchhoff/functionals.hpp"

#include <cmath>
#include <stdexcept>

namespace kirchhoff {

void ModelParams::validate() const {
    if (a <= 0.0) throw std::invalid_argument("model: a must be positive");
    if (b <= 0.0) throw std::invalid_argument("model: b must be positive");
    if (q <= 3.0) throw std::invalid_argument("model: q must exceed 3");
}

double energy(const Domain& dom, const SpectralField& u, const ModelParams& p) {
    const double g = dom.grad_sq(u);
    const double lqp1 = dom.lp_pow(u, p.q + 1.0);
    return 0.5 * p.a * g + 0.25 * p.b * g * g - lqp1 / (p.q + 1.0);
}

double nehari(const Domain& dom, const SpectralField& u, const ModelParams& p) {
    const double g = dom.grad_sq(u);
    return p.a * g + p.b * g * g - dom.lp_pow(u, p.q + 1.0);
}

double nehari_delta(const Domain& dom, const SpectralField& u, double delta,
                    const ModelParams& p) {
    if (delta <= 0.0) throw std::domain_error("nehari_delta: delta must be positive");
    const double g = dom.grad_sq(u);
    return delta * (p.a + p.b * g) * g - dom.lp_pow(u, p.q + 1.0);
}

FiberData fiber_data(const Domain& dom, const SpectralField& u, const ModelParams& p) {
    return FiberData{dom.grad_sq(u), dom.lp_pow(u, p.q + 1.0)};
}

double fiber_energy(const FiberData& f, double lambda, const ModelParams& p) {
    const double l2 = lambda * lambda;
    return 0.5 * p.a * l2 * f.grad_sq + 0.25 * p.b * l2 * l2 * f.grad_sq * f.grad_sq -
           std::pow(lambda, p.q + 1.0) * f.lqp1 / (p.q + 1.0);
}

double fiber_nehari(const FiberData& f, double lambda, const ModelParams& p) {
    const double l2 = lambda * lambda;
    return p.a * l2 * f.grad_sq + p.b * l2 * l2 * f.grad_sq * f.grad_sq -
           std::pow(lambda, p.q + 1.0) * f.lqp1;
}

double fiber_nehari_delta(const FiberData& f, double lambda, double delta,
                          const ModelParams& p) {
    const double l2 = lambda * lambda;
    return delta * (p.a + p.b * l2 * f.grad_sq) * l2 * f.grad_sq -
           std::pow(lambda, p.q + 1.0) * f.lqp1;
}

namespace {

// Solves h(lambda) = delta (a lambda^{1-q} g + b lambda^{3-q} g^2) - P = 0.
// h is strictly decreasing for q > 3, so bracketing by doubling/halving from
// lambda = 1 followed by bisection always converges.
double solve_fiber_root(const FiberData& f, double delta, const ModelParams& p) {
    if (f.grad_sq <= 0.0) throw std::domain_error("fibering: field has zero gradient norm");
    if (f.lqp1 <= 0.0) throw std::domain_error("fibering: field has zero L^{q+1} norm");
    const auto h = [&](double lam) {
        return delta * (p.a * std::pow(lam, 1.0 - p.q) * f.grad_sq +
                        p.b * std::pow(lam, 3.0 - p.q) * f.grad_sq * f.grad_sq) -
               f.lqp1;
    };
    double lo = 1.0, hi = 1.0;
    if (h(1.0) > 0.0) {
        while (h(hi) > 0.0) hi *= 2.0;
        lo = hi / 2.0;
    } else {
        while (h(lo) <= 0.0) lo *= 0.5;
        hi = lo * 2.0;
    }
    while (hi - lo > kRootTol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (h(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double fiber_lambda_star(const FiberData& f, const ModelParams& p) {
    return solve_fiber_root(f, 1.0, p);
}

double fiber_lambda_star(const Domain& dom, const SpectralField& u, const ModelParams& p) {
    return fiber_lambda_star(fiber_data(dom, u, p), p);
}

double fiber_lambda_delta(const FiberData& f, double delta, const ModelParams& p) {
    if (delta <= 0.0) throw std::domain_error("fiber_lambda_delta: delta must be positive");
    return solve_fiber_root(f, delta, p);
}

double fiber_lambda_delta(const Domain& dom, const SpectralField& u, double delta,
                          const ModelParams& p) {
    return fiber_lambda_delta(fiber_data(dom, u, p), delta, p);
}

SpectralField apply_nonlocal(const Domain& dom, const SpectralField& u, const ModelParams& p) {
    const double m = p.a + p.b * dom.grad_sq(u);
    SpectralField out(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) out[k] = m * dom.eigenvalue(k) * u[k];
    return out;
}

double monotonicity_gap(const Domain& dom, const SpectralField& u, const SpectralField& v,
                        const ModelParams& p) {
    const SpectralField lu = apply_nonlocal(dom, u, p);
    const SpectralField lv = apply_nonlocal(dom, v, p);
    double gap = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) gap += (lu[k] - lv[k]) * (u[k] - v[k]);
    return gap;
}

SpectralField energy_gradient(const Domain& dom, const SpectralField& u, const ModelParams& p) {
    SpectralField g = apply_nonlocal(dom, u, p);
    const SpectralField n = dom.power_nonlinearity(u, p.q);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] -= n[k];
    return g;
}

}  // namespace kirchhoff
