#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "kirchhoff/domain.hpp"
#include "kirchhoff/dynamics.hpp"
#include "kirchhoff/functionals.hpp"
#include "kirchhoff/wellgeometry.hpp"

using namespace kirchhoff;

namespace {

Domain default_interval(std::size_t n_modes = 64) {
    return Domain(DomainSpec::interval(M_PI, n_modes, 2 * n_modes + 2));
}

const ModelParams kDefault{1.0, 1.0, 5.0};

SpectralField mode_datum(std::size_t n_modes, std::size_t mode, double amp) {
    SpectralField u(n_modes);
    u[mode] = amp;
    return u;
}

}  // namespace

TEST_CASE("solver controls are validated") {
    SolverControls c;
    CHECK_NOTHROW(c.validate());
    c.dt_init = 1e-13;  // below dt_min
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = SolverControls{};
    c.norm_cap = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = SolverControls{};
    c.rel_tol = -1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("zero field is an equilibrium and classifies as decayed") {
    const Domain dom = default_interval(8);
    const SpectralField zero(8);
    for (double v : etd_step(dom, kDefault, zero, 0.1).coeffs) CHECK(v == 0.0);
    const TrajectoryRecord traj = integrate(dom, kDefault, zero, SolverControls{});
    CHECK(traj.outcome == Outcome::GlobalDecay);
    CHECK(traj.t_final == 0.0);
}

TEST_CASE("linear-only step applies the exact frozen-coefficient factor") {
    const Domain dom = default_interval(8);
    const double c0 = 2.0;
    const SpectralField u = mode_datum(8, 0, c0);
    const double dt = 0.01;
    // m = a + b*||grad u||^2 = 1 + c0^2 with lambda_1 = 1.
    const double m = 1.0 + c0 * c0;
    const SpectralField next = etd_step(dom, kDefault, u, dt, false);
    CHECK(next[0] == doctest::Approx(c0 * std::exp(-m * dt)).epsilon(1e-14));
    for (std::size_t k = 1; k < 8; ++k) CHECK(next[k] == 0.0);
}

TEST_CASE("small-amplitude trajectory matches the linearized decay") {
    const Domain dom = default_interval(16);
    SolverControls c;
    c.t_max = 1.0;
    c.decay_floor = 1e-30;  // keep integrating to the horizon
    const double amp = 1e-3;
    const TrajectoryRecord traj = integrate(dom, kDefault, mode_datum(16, 0, amp), c);
    CHECK(traj.outcome == Outcome::Undetermined);
    for (const auto& s : traj.snapshots) {
        const double exact = amp * amp * std::exp(-2.0 * s.t);
        CHECK(std::fabs(s.l2_sq - exact) <= 1e-4 * exact);
    }
}

TEST_CASE("decay run: energy identity, monotonicity, snapshot ordering") {
    const Domain dom = default_interval();
    SolverControls c;
    const SpectralField u0 = mode_datum(64, 0, 0.1);
    const double J0 = energy(dom, u0, kDefault);
    const TrajectoryRecord traj = integrate(dom, kDefault, u0, c);

    CHECK(traj.outcome == Outcome::GlobalDecay);
    CHECK(traj.decay_rate < 0.0);
    CHECK(energy_residual(traj) <= 1e-6 * (1.0 + std::fabs(J0)));

    double prev_t = -1.0, prev_diss = -1.0, prev_J = 1e300;
    for (const auto& s : traj.snapshots) {
        CHECK(s.t > prev_t);
        CHECK(s.dissipation >= prev_diss);
        CHECK(s.J <= prev_J + 1e-8);
        prev_t = s.t;
        prev_diss = s.dissipation;
        prev_J = s.J;
    }

    SUBCASE("residual tracks the step tolerance") {
        SolverControls tight = c;
        tight.rel_tol = 1e-9;
        SolverControls loose = c;
        loose.rel_tol = 1e-6;
        const double r_def = energy_residual(traj);
        const double r_tight = energy_residual(integrate(dom, kDefault, u0, tight));
        const double r_loose = energy_residual(integrate(dom, kDefault, u0, loose));
        CHECK(r_tight < r_def);
        CHECK(r_def < r_loose);
    }
}

TEST_CASE("integration is deterministic") {
    const Domain dom = default_interval(32);
    SolverControls c;
    c.t_max = 2.0;
    SpectralField u0(32);
    u0[0] = 0.3;
    u0[3] = -0.05;
    const TrajectoryRecord a = integrate(dom, kDefault, u0, c);
    const TrajectoryRecord b = integrate(dom, kDefault, u0, c);
    REQUIRE(a.snapshots.size() == b.snapshots.size());
    for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
        CHECK(a.snapshots[i].t == b.snapshots[i].t);
        CHECK(a.snapshots[i].l2_sq == b.snapshots[i].l2_sq);
        CHECK(a.snapshots[i].J == b.snapshots[i].J);
        CHECK(a.snapshots[i].dissipation == b.snapshots[i].dissipation);
    }
    CHECK(format_trajectory(a) == format_trajectory(b));
}

TEST_CASE("fixed-step refinement shows first-order convergence") {
    const Domain dom = default_interval(16);
    SpectralField u0(16);
    u0[0] = 0.5;
    u0[1] = 0.1;
    const double t_end = 0.5;

    const auto run = [&](double dt) {
        SpectralField u = u0;
        const int n = int(std::llround(t_end / dt));
        for (int i = 0; i < n; ++i) u = etd_step(dom, kDefault, u, dt);
        return u;
    };
    const SpectralField ref = run(1e-4 / 8.0);
    const auto err = [&](const SpectralField& u) {
        double s = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) s += (u[k] - ref[k]) * (u[k] - ref[k]);
        return std::sqrt(s);
    };
    const double e1 = err(run(1e-4));
    const double e2 = err(run(0.5e-4));
    CHECK(e1 / e2 >= 1.5);
    CHECK(e1 / e2 <= 3.0);
}

TEST_CASE("negative-energy datum blows up with finite time estimate") {
    const Domain dom = default_interval();
    const SpectralField u0 = mode_datum(64, 0, 3.0);
    REQUIRE(energy(dom, u0, kDefault) < 0.0);
    SolverControls c;
    const TrajectoryRecord traj = integrate(dom, kDefault, u0, c);
    CHECK(traj.outcome == Outcome::BlowUp);
    CHECK(std::isfinite(traj.blowup_time_est));
    CHECK(traj.blowup_time_est >= traj.snapshots.front().t);
    CHECK(traj.blowup_time_est < c.t_max);

    SUBCASE("concavity functional turns and stays positive") {
        const ConcavityDiagnostics cd = concavity_diagnostics(traj, kDefault);
        CHECK(cd.onset >= 0.0);
        for (const auto& [t, F] : cd.F_series)
            if (t >= cd.onset) CHECK(F > 0.0);
    }

    SUBCASE("gradient norm escalates monotonically once large with I < 0") {
        SolverControls capped = c;
        capped.norm_cap = 100.0;
        const TrajectoryRecord esc = integrate(dom, kDefault, u0, capped);
        CHECK(esc.outcome == Outcome::BlowUp);
        bool armed = false;
        double prev = 0.0;
        for (const auto& s : esc.snapshots) {
            if (!armed && std::sqrt(s.h1_sq) > capped.norm_cap / 10.0 && s.I < 0.0) {
                armed = true;
                prev = s.h1_sq;
            } else if (armed) {
                CHECK(s.h1_sq >= prev * (1.0 - 1e-12));
                prev = s.h1_sq;
            }
        }
        CHECK(armed);
    }
}

TEST_CASE("decaying run keeps the concavity functional negative") {
    const Domain dom = default_interval(32);
    const TrajectoryRecord traj =
        integrate(dom, kDefault, mode_datum(32, 0, 0.1), SolverControls{});
    const ConcavityDiagnostics cd = concavity_diagnostics(traj, kDefault);
    CHECK(cd.onset == -1.0);
    for (const auto& [t, F] : cd.F_series) CHECK(F <= 0.0);
}

TEST_CASE("Nehari datum starts with vanishing second derivative of M") {
    const Domain dom = default_interval(32);
    const SpectralField e1 = dom.unit_mode(0);
    const double lam = fiber_lambda_star(dom, e1, kDefault);
    SolverControls c;
    c.t_max = 0.01;
    const TrajectoryRecord traj = integrate(dom, kDefault, lam * e1, c);
    // M''(0) = -2 I(u0) and u0 lies on the Nehari manifold.
    CHECK(std::fabs(traj.snapshots.front().I) <= 1e-9 * (1.0 + traj.snapshots.front().h1_sq));
}

TEST_CASE("decay bound with the left delta-root holds along the standard run") {
    const Domain dom = default_interval();
    const ModelParams p = kDefault;
    const SpectralField u0 = mode_datum(64, 0, 0.1);
    const double J0 = energy(dom, u0, p);
    WellGeometryOptions opt;
    opt.restarts = 4;
    const WellGeometry geom = compute_well_geometry(dom, p, opt);
    REQUIRE(J0 > 0.0);
    REQUIRE(J0 < geom.d_est);
    const DeltaRoots roots = find_delta_roots(dom, p, geom, J0);

    const TrajectoryRecord traj = integrate(dom, p, u0, SolverControls{});
    const DecayBoundCheck chk = decay_bound_check(traj, roots.delta1, p, dom.eigenvalue(0));
    CHECK(chk.applicable);
    CHECK(chk.pass);
    CHECK(chk.worst_margin >= 0.0);

    // Wrong-outcome input reports not-applicable.
    TrajectoryRecord blow = integrate(dom, p, mode_datum(64, 0, 3.0), SolverControls{});
    CHECK_FALSE(decay_bound_check(blow, roots.delta1, p, dom.eigenvalue(0)).applicable);

    SUBCASE("well invariance holds on both sides of the dichotomy") {
        const WellInvarianceReport inv =
            well_invariance_check(dom, p, traj, u0, geom, roots, 11);
        CHECK(inv.applicable);
        CHECK(inv.violations == 0);

        // Descending-branch datum: I < 0, 0 < J < d, must blow up with the
        // negative sign persisting.
        const SpectralField v0 = mode_datum(64, 0, 2.5);
        const double Jv = energy(dom, v0, p);
        REQUIRE(nehari(dom, v0, p) < 0.0);
        REQUIRE(Jv > 0.0);
        REQUIRE(Jv < geom.d_est);
        const DeltaRoots rv = find_delta_roots(dom, p, geom, Jv);
        const TrajectoryRecord tv = integrate(dom, p, v0, SolverControls{});
        CHECK(tv.outcome == Outcome::BlowUp);
        const WellInvarianceReport invv = well_invariance_check(dom, p, tv, v0, geom, rv, 11);
        CHECK(invv.applicable);
        CHECK(invv.violations == 0);
    }
}

TEST_CASE("trajectory export follows the fixed column contract") {
    const Domain dom = default_interval(8);
    SolverControls c;
    c.t_max = 0.05;
    const TrajectoryRecord traj = integrate(dom, kDefault, mode_datum(8, 0, 0.2), c);
    const std::string text = format_trajectory(traj);
    std::istringstream in(text);
    std::string header;
    std::getline(in, header);
    CHECK(header == std::string(kTrajectoryHeader));
    CHECK(header == "t,dt,l2_sq,h1_sq,lqp1,J,I,dissipation,residual,M,F");
    std::size_t rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == traj.snapshots.size());
}
