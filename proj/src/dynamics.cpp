#include "kirchhoff/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace kirchhoff {

void SolverControls::validate() const {
    if (!(dt_min < dt_init && dt_init <= dt_max))
        throw std::invalid_argument("controls: need dt_min < dt_init <= dt_max");
    if (norm_cap <= 0.0) throw std::invalid_argument("controls: norm_cap must be positive");
    if (decay_floor <= 0.0) throw std::invalid_argument("controls: decay_floor must be positive");
    if (t_max <= 0.0) throw std::invalid_argument("controls: t_max must be positive");
    if (rel_tol <= 0.0) throw std::invalid_argument("controls: rel_tol must be positive");
}

SpectralField etd_step(const Domain& dom, const ModelParams& p, const SpectralField& u,
                       double dt, bool include_nonlinearity) {
    const double m = p.a + p.b * dom.grad_sq(u);
    SpectralField next(u.size());
    SpectralField n(u.size());
    if (include_nonlinearity) n = dom.power_nonlinearity(u, p.q);
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double z = m * dom.eigenvalue(k) * dt;
        const double decay = std::exp(-z);
        next[k] = decay * u[k];
        if (include_nonlinearity) {
            // dt * phi1(-z) with phi1(w) = (e^w - 1)/w, stable for small z.
            const double weight = (z > 1e-8) ? (1.0 - decay) / (m * dom.eigenvalue(k))
                                             : dt * (1.0 - 0.5 * z);
            next[k] += weight * n[k];
        }
    }
    return next;
}

StepResult step(const Domain& dom, const ModelParams& p, const SpectralField& u, double dt) {
    StepResult res;
    res.next = etd_step(dom, p, u, dt);
    const SpectralField half = etd_step(dom, p, u, 0.5 * dt);
    res.composed = etd_step(dom, p, half, 0.5 * dt);
    double err = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double d = res.next[k] - res.composed[k];
        err += d * d;
    }
    res.error_estimate = std::sqrt(err);
    return res;
}

namespace {

bool finite(const SpectralField& u) {
    for (double c : u.coeffs)
        if (!std::isfinite(c)) return false;
    return true;
}

struct StateDiagnostics {
    double l2_sq, h1_sq, lqp1, J, I, ut_l2_sq;
};

StateDiagnostics diagnose(const Domain& dom, const ModelParams& p, const SpectralField& u) {
    StateDiagnostics d{};
    d.l2_sq = dom.l2_sq(u);
    d.h1_sq = dom.grad_sq(u);
    d.lqp1 = dom.lp_pow(u, p.q + 1.0);
    d.J = 0.5 * p.a * d.h1_sq + 0.25 * p.b * d.h1_sq * d.h1_sq - d.lqp1 / (p.q + 1.0);
    d.I = p.a * d.h1_sq + p.b * d.h1_sq * d.h1_sq - d.lqp1;
    // u_t from the weak form in coefficients: -(a + b h1) lambda_k c_k + n_k.
    const SpectralField n = dom.power_nonlinearity(u, p.q);
    const double m = p.a + p.b * d.h1_sq;
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double ut = -m * dom.eigenvalue(k) * u[k] + n[k];
        s += ut * ut;
    }
    d.ut_l2_sq = s;
    return d;
}

EnergySnapshot make_snapshot(double t, double dt, const StateDiagnostics& d, double dissipation,
                             double M, double J0, const ModelParams& p) {
    EnergySnapshot s;
    s.t = t;
    s.dt = dt;
    s.l2_sq = d.l2_sq;
    s.h1_sq = d.h1_sq;
    s.lqp1 = d.lqp1;
    s.J = d.J;
    s.I = d.I;
    s.dissipation = dissipation;
    s.residual = dissipation + d.J - J0;
    s.M = M;
    s.F = (-2.0 * d.I) * M - 0.5 * (p.q + 1.0) * d.l2_sq * d.l2_sq;
    return s;
}

void fit_decay_rate(TrajectoryRecord& traj) {
    // Least-squares slope of log(l2_sq) over the later half of the trajectory.
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = traj.snapshots.size() / 2; i < traj.snapshots.size(); ++i)
        if (traj.snapshots[i].l2_sq > 0.0)
            pts.emplace_back(traj.snapshots[i].t, std::log(traj.snapshots[i].l2_sq));
    if (pts.size() < 2) {
        traj.decay_rate = 0.0;
        return;
    }
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (auto [t, y] : pts) {
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    const double n = double(pts.size());
    traj.decay_rate = (n * sty - st * sy) / (n * stt - st * st);
}

void fit_blowup_time(TrajectoryRecord& traj, const ModelParams& p) {
    // Power-law ansatz: ||grad u||^{-(q-1)} decays linearly to zero near T.
    const std::size_t n = traj.snapshots.size();
    const std::size_t tail = std::min<std::size_t>(20, n);
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = n - tail; i < n; ++i) {
        const auto& s = traj.snapshots[i];
        if (s.h1_sq > 0.0)
            pts.emplace_back(s.t, std::pow(s.h1_sq, -(p.q - 1.0) / 2.0));
    }
    if (pts.size() < 3) {
        traj.blowup_time_est = traj.t_final;
        traj.blowup_fit_quality = 0.0;
        return;
    }
    double st = 0, sy = 0, stt = 0, sty = 0, syy = 0;
    for (auto [t, y] : pts) {
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
        syy += y * y;
    }
    const double m = double(pts.size());
    const double denom = m * stt - st * st;
    const double slope = (m * sty - st * sy) / denom;
    const double icept = (sy - slope * st) / m;
    if (slope < 0.0)
        traj.blowup_time_est = -icept / slope;
    else
        traj.blowup_time_est = traj.t_final;
    const double ss_tot = syy - sy * sy / m;
    double ss_res = 0.0;
    for (auto [t, y] : pts) {
        const double r = y - (icept + slope * t);
        ss_res += r * r;
    }
    traj.blowup_fit_quality = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 0.0;
}

}  // namespace

TrajectoryRecord integrate(const Domain& dom, const ModelParams& p, const SpectralField& u0,
                           const SolverControls& controls) {
    controls.validate();
    p.validate();

    TrajectoryRecord traj;
    SpectralField u = u0;
    double t = 0.0;
    double dt = controls.dt_init;
    double dissipation = 0.0;
    double M = 0.0;
    StateDiagnostics diag = diagnose(dom, p, u);
    const double J0 = diag.J;

    traj.snapshots.push_back(make_snapshot(t, dt, diag, dissipation, M, J0, p));

    const auto finish = [&](Outcome outcome, const std::string& reason) {
        if (traj.snapshots.empty() || traj.snapshots.back().t != t)
            traj.snapshots.push_back(make_snapshot(t, dt, diag, dissipation, M, J0, p));
        traj.outcome = outcome;
        traj.reason = reason;
        traj.final_state = u;
        traj.t_final = t;
        if (outcome == Outcome::GlobalDecay) fit_decay_rate(traj);
        if (outcome == Outcome::BlowUp) fit_blowup_time(traj, p);
        return traj;
    };

    if (diag.l2_sq < controls.decay_floor && diag.I >= 0.0)
        return finish(Outcome::GlobalDecay, "initial datum below decay floor");

    std::size_t accepted = 0;
    while (t < controls.t_max) {
        const StepResult s = step(dom, p, u, dt);
        const bool ok = finite(s.composed);
        const double scale = ok ? 1.0 + std::sqrt(dom.l2_sq(s.composed)) : 0.0;

        if (!ok || s.error_estimate > controls.rel_tol * scale) {
            if (dt <= controls.dt_min * (1.0 + 1e-12))
                return finish(Outcome::BlowUp, "step size collapsed with exploding error");
            dt = std::max(0.5 * dt, controls.dt_min);
            continue;
        }

        const StateDiagnostics next_diag = diagnose(dom, p, s.composed);
        dissipation += 0.5 * dt * (diag.ut_l2_sq + next_diag.ut_l2_sq);
        M += 0.5 * dt * (diag.l2_sq + next_diag.l2_sq);
        u = s.composed;
        t += dt;
        diag = next_diag;
        ++accepted;

        if (accepted % controls.snapshot_stride == 0)
            traj.snapshots.push_back(make_snapshot(t, dt, diag, dissipation, M, J0, p));

        if (std::sqrt(diag.h1_sq) > controls.norm_cap)
            return finish(Outcome::BlowUp, "gradient norm escaped the cap");
        if (diag.l2_sq < controls.decay_floor && diag.I >= 0.0)
            return finish(Outcome::GlobalDecay, "L2 norm reached the decay floor");

        if (s.error_estimate < 0.25 * controls.rel_tol * scale)
            dt = std::min(1.5 * dt, controls.dt_max);
        dt = std::min(dt, controls.t_max - t > 0.0 ? controls.t_max - t : dt);
        if (dt <= 0.0) break;
    }
    return finish(Outcome::Undetermined, "time horizon reached");
}

double energy_residual(const TrajectoryRecord& traj) {
    if (traj.snapshots.empty()) throw std::invalid_argument("energy_residual: empty trajectory");
    double worst = 0.0;
    for (const auto& s : traj.snapshots) worst = std::max(worst, std::fabs(s.residual));
    return worst;
}

ConcavityDiagnostics concavity_diagnostics(const TrajectoryRecord& traj, const ModelParams&) {
    ConcavityDiagnostics out;
    out.F_series.reserve(traj.snapshots.size());
    for (const auto& s : traj.snapshots) out.F_series.emplace_back(s.t, s.F);
    if (traj.snapshots.empty() || traj.snapshots.back().F <= 0.0) {
        out.onset = -1.0;
        return out;
    }
    std::size_t i = traj.snapshots.size();
    while (i > 0 && traj.snapshots[i - 1].F > 0.0) --i;
    out.onset = traj.snapshots[i].t;
    return out;
}

DecayBoundCheck decay_bound_check(const TrajectoryRecord& traj, double delta1,
                                  const ModelParams& p, double lambda1, double tol_decay) {
    DecayBoundCheck out;
    if (traj.outcome != Outcome::GlobalDecay || !(delta1 < 1.0)) return out;
    out.applicable = true;
    out.pass = true;
    out.worst_margin = std::numeric_limits<double>::infinity();
    const double l2_0 = traj.snapshots.front().l2_sq;
    const double rate = 2.0 * p.a * lambda1 * (1.0 - delta1);
    for (const auto& s : traj.snapshots) {
        const double bound = l2_0 * std::exp(-rate * s.t) * (1.0 + tol_decay);
        out.worst_margin = std::min(out.worst_margin, bound - s.l2_sq);
        if (s.l2_sq > bound) out.pass = false;
    }
    return out;
}

WellInvarianceReport well_invariance_check(const Domain& dom, const ModelParams& p,
                                           const TrajectoryRecord& traj,
                                           const SpectralField& u0, const WellGeometry& geom,
                                           const DeltaRoots& roots, std::size_t n_deltas) {
    WellInvarianceReport rep;
    const double J0 = traj.snapshots.front().J;
    if (!(J0 > 0.0 && J0 < geom.d_est)) return rep;
    rep.applicable = true;
    rep.n_deltas = n_deltas;
    rep.worst_margin = std::numeric_limits<double>::infinity();

    const double I0 = nehari(dom, u0, p);
    SpectralField warm = geom.minimizer;
    for (std::size_t i = 0; i < n_deltas; ++i) {
        const double delta = roots.delta1 + (double(i + 1) / double(n_deltas + 1)) *
                                                (roots.delta2 - roots.delta1);
        double d_delta = 0.0;
        if (I0 > 0.0) {
            const DepthResult r = compute_depth_delta(dom, p, delta, 0, 400, 7, &warm);
            warm = r.minimizer;
            d_delta = r.value;
        }
        for (const auto& s : traj.snapshots) {
            const double idelta = delta * (p.a + p.b * s.h1_sq) * s.h1_sq - s.lqp1;
            const double tol = 1e-7 * (1.0 + p.a * s.h1_sq);
            if (I0 > 0.0) {
                rep.worst_margin = std::min(rep.worst_margin, idelta);
                if (idelta <= -tol) ++rep.violations;
                if (s.J >= d_delta + tol) ++rep.violations;
            } else if (I0 < 0.0) {
                rep.worst_margin = std::min(rep.worst_margin, -idelta);
                if (idelta >= tol) ++rep.violations;
            }
        }
    }
    return rep;
}

const char* const kTrajectoryHeader = "t,dt,l2_sq,h1_sq,lqp1,J,I,dissipation,residual,M,F";

std::string format_trajectory(const TrajectoryRecord& traj) {
    std::string out = kTrajectoryHeader;
    out += '\n';
    char buf[512];
    for (const auto& s : traj.snapshots) {
        std::snprintf(buf, sizeof(buf),
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      s.t, s.dt, s.l2_sq, s.h1_sq, s.lqp1, s.J, s.I, s.dissipation, s.residual,
                      s.M, s.F);
        out += buf;
    }
    return out;
}

}  // namespace kirchhoff
