#include "kirchhoff/classify.hpp"

#include <cmath>
#include <stdexcept>

namespace kirchhoff {

const char* to_string(Regime r) {
    switch (r) {
        case Regime::Subcritical: return "subcritical";
        case Regime::Critical: return "critical";
        case Regime::Supercritical: return "supercritical";
    }
    return "?";
}

const char* to_string(Prediction p) {
    switch (p) {
        case Prediction::Global: return "global";
        case Prediction::BlowUp: return "blowup";
        case Prediction::NoPrediction: return "no-prediction";
    }
    return "?";
}

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::GlobalDecay: return "global-decay";
        case Outcome::BlowUp: return "blowup";
        case Outcome::Undetermined: return "undetermined";
    }
    return "?";
}

Classification classify_initial(const Domain& dom, const ModelParams& p, const SpectralField& u0,
                                const WellGeometry& geom, const HighEnergyBounds* bounds,
                                const ClassifyOptions& opt) {
    Classification c;
    c.J0 = energy(dom, u0, p);
    c.I0 = nehari(dom, u0, p);
    c.l2_norm = dom.norm_l2(u0);
    const double tol_I = 1e-9 * (1.0 + p.a * dom.grad_sq(u0));

    if (c.J0 < geom.d_est - opt.tol_d)
        c.regime = Regime::Subcritical;
    else if (c.J0 <= geom.d_est + opt.tol_d)
        c.regime = Regime::Critical;
    else
        c.regime = Regime::Supercritical;

    if (c.regime != Regime::Supercritical) {
        if (c.I0 >= -tol_I) {
            c.prediction = Prediction::Global;
            c.evidence = (c.regime == Regime::Subcritical)
                             ? "global existence below the well depth: J0 < d, I0 >= 0"
                             : "global existence at the well depth: J0 = d, I0 >= 0";
        } else {
            c.prediction = Prediction::BlowUp;
            c.evidence = (c.regime == Regime::Subcritical)
                             ? "finite-time blow-up below the well depth: J0 < d, I0 < 0"
                             : "finite-time blow-up at the well depth: J0 = d, I0 < 0";
        }
        return c;
    }

    if (bounds != nullptr && c.I0 > tol_I &&
        c.l2_norm <= bounds->lambda_s_est * (1.0 - opt.margin)) {
        c.prediction = Prediction::Global;
        c.evidence = "supercritical norm gate: I0 > 0 and ||u0||_2 clears the lambda_s estimate";
        return c;
    }
    if (bounds != nullptr && c.I0 < -tol_I &&
        c.l2_norm >= bounds->Lambda_s_est * (1.0 + opt.margin)) {
        c.prediction = Prediction::BlowUp;
        c.evidence = "supercritical norm gate: I0 < 0 and ||u0||_2 clears the Lambda_s estimate";
        return c;
    }
    const std::optional<bool> pred = mass_dominance_predicate(dom, p, u0, geom.d_est);
    if (pred.has_value() && *pred) {
        c.prediction = Prediction::BlowUp;
        c.evidence = "volume-weighted mass dominance: [4(q+1)/(q-3)] |Omega|^{(q-1)/2} J0 <= ||u0||_2^{q+1}";
        return c;
    }
    c.prediction = Prediction::NoPrediction;
    c.evidence = "outside the supercritical norm-gate hypotheses";
    return c;
}

std::optional<bool> mass_dominance_predicate(const Domain& dom, const ModelParams& p,
                                     const SpectralField& u0, double d_est) {
    const double J0 = energy(dom, u0, p);
    if (!(J0 > d_est)) return std::nullopt;
    const double lhs = 4.0 * (p.q + 1.0) / (p.q - 3.0) *
                       std::pow(dom.measure(), (p.q - 1.0) / 2.0) * J0;
    const double rhs = std::pow(dom.norm_l2(u0), p.q + 1.0);
    return lhs <= rhs;
}

namespace {

// Cosine-taper bump on [x0, x0 + w], modulated to frequency index m >= 1:
// zero outside, C^1 at the edges, higher m shifts mass to higher modes.
SpectralField project_bump(const Domain& dom, double x0, double w, std::size_t m,
                           double* leakage) {
    if (dom.spec().kind != DomainKind::Interval)
        throw std::invalid_argument("construct_high_energy: interval domains only");
    const double L = dom.spec().length_x;
    const std::size_t N = dom.spec().n_quad;
    std::vector<double> nodal(N, 0.0);
    double mass = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double x = double(i + 1) * L / double(N + 1);
        if (x > x0 && x < x0 + w) {
            const double s = (x - x0) / w;
            nodal[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * s)) * std::sin(double(m) * M_PI * s);
        }
        mass += nodal[i] * nodal[i];
    }
    SpectralField c = dom.analyze(nodal);
    if (leakage != nullptr) {
        const std::vector<double> back = dom.synthesize(c);
        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double d = back[i] - nodal[i];
            err += d * d;
        }
        *leakage = (mass > 0.0) ? std::sqrt(err / mass) : 0.0;
    }
    return c;
}

}  // namespace

HighEnergyDatum construct_high_energy(const Domain& dom, const ModelParams& p, double M_target,
                                      double d_est) {
    p.validate();
    if (!(M_target > d_est))
        throw std::domain_error("construct_high_energy: target must exceed the well depth");

    const double L = dom.spec().length_x;
    const double mass_threshold =
        4.0 * (p.q + 1.0) / (p.q - 3.0) * std::pow(dom.measure(), (p.q - 1.0) / 2.0) * M_target;

    HighEnergyDatum out;
    double leak_v = 0.0;
    const SpectralField v = project_bump(dom, 0.0, L / 3.0, 1, &leak_v);

    // Scale the left bump until its energy is nonpositive and its L2 mass
    // dominates the volume-weighted threshold with margin.
    double alpha = 1.0;
    const double vl2 = dom.norm_l2(v);
    for (int it = 0; it < 400; ++it) {
        const bool mass_ok = std::pow(alpha * vl2, p.q + 1.0) > 1.1 * mass_threshold;
        if (mass_ok && energy(dom, alpha * v, p) <= 0.0) break;
        alpha *= 1.5;
        if (it == 399) throw std::runtime_error("construct_high_energy: left bump scale diverged");
    }
    const SpectralField av = alpha * v;
    const double J_left = energy(dom, av, p);

    // Right bump on the increasing branch: raise J of the sum to the target,
    // escalating the bump frequency when the branch peak falls short.
    const double tol = 1e-8 * (1.0 + M_target);
    for (std::size_t m = 1; m <= dom.n_modes() / 2; m *= 2) {
        double leak_w = 0.0;
        const SpectralField w = project_bump(dom, 2.0 * L / 3.0, L / 3.0, m, &leak_w);
        const auto J_sum = [&](double beta) { return energy(dom, av + beta * w, p); };

        // March up the increasing branch until the target is bracketed.
        double lo = 0.0, hi = 0.0;
        double prev = J_left;
        for (double beta = 1e-3; beta < 1e12; beta *= 1.3) {
            const double val = J_sum(beta);
            if (val >= M_target) {
                hi = beta;
                break;
            }
            if (val < prev) break;  // past the branch peak, target unreachable
            prev = val;
            lo = beta;
        }
        if (hi == 0.0) continue;  // escalate frequency

        while (hi - lo > 1e-14 * hi) {
            const double mid = 0.5 * (lo + hi);
            if (J_sum(mid) < M_target)
                lo = mid;
            else
                hi = mid;
        }
        const double beta = 0.5 * (lo + hi);
        out.u = av + beta * w;
        out.J = energy(dom, out.u, p);
        if (std::fabs(out.J - M_target) > tol) continue;
        out.I = nehari(dom, out.u, p);
        out.alpha = alpha;
        out.beta = beta;
        out.bump_freq = m;
        out.cross_term = 0.5 * p.b * dom.grad_sq(av) * dom.grad_sq(beta * w);
        out.projection_leakage = std::max(leak_v, leak_w);
        const std::optional<bool> pred = mass_dominance_predicate(dom, p, out.u, d_est);
        out.predicate = pred.value_or(false);
        return out;
    }
    throw std::runtime_error(
        "construct_high_energy: target unreachable at this resolution; increase n_modes");
}

double scale_to_energy(const Domain& dom, const ModelParams& p, const SpectralField& u_shape,
                       double E_target, FiberBranch branch) {
    const FiberData f = fiber_data(dom, u_shape, p);
    const double lam_star = fiber_lambda_star(f, p);
    const double J_max = fiber_energy(f, lam_star, p);
    if (!(E_target > 0.0))
        throw std::domain_error("scale_to_energy: target must be positive");
    if (E_target > J_max)
        throw std::domain_error("scale_to_energy: target exceeds the fibering maximum " +
                                std::to_string(J_max));

    double lo, hi;
    bool increasing;
    if (branch == FiberBranch::Ascending) {
        lo = 0.0;
        hi = lam_star;
        increasing = true;
    } else {
        lo = lam_star;
        hi = 2.0 * lam_star;
        while (fiber_energy(f, hi, p) > E_target) hi *= 2.0;
        increasing = false;
    }
    while (hi - lo > kRootTol * (1.0 + hi)) {
        const double mid = 0.5 * (lo + hi);
        const double val = fiber_energy(f, mid, p);
        if ((val < E_target) == increasing)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

SweepResult threshold_sweep(const Domain& dom, const ModelParams& p, const WellGeometry& geom,
                            const SolverControls& controls, const SpectralField& u_shape,
                            double mu_lo, double mu_hi) {
    if (!(0.0 < mu_lo && mu_lo < mu_hi))
        throw std::domain_error("threshold_sweep: invalid bracket");

    SweepResult out;
    const auto probe = [&](double mu) {
        const SpectralField u0 = mu * u_shape;
        SweepProbe pr;
        pr.mu = mu;
        const Classification c = classify_initial(dom, p, u0, geom);
        pr.J0 = c.J0;
        pr.I0 = c.I0;
        pr.prediction = c.prediction;
        pr.observed = integrate(dom, p, u0, controls).outcome;
        out.probes.push_back(pr);
        return pr.observed;
    };

    const Outcome lo_out = probe(mu_lo);
    const Outcome hi_out = probe(mu_hi);
    if (lo_out != Outcome::GlobalDecay || hi_out != Outcome::BlowUp)
        throw std::domain_error(std::string("threshold_sweep: bracket endpoints gave ") +
                                to_string(lo_out) + " / " + to_string(hi_out));

    double lo = mu_lo, hi = mu_hi;
    while (hi - lo > 1e-3 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (probe(mid) == Outcome::BlowUp)
            hi = mid;
        else
            lo = mid;
    }
    out.mu_star = 0.5 * (lo + hi);
    out.bracket_width = hi - lo;
    return out;
}

}  // namespace kirchhoff
