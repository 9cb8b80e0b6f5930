#include "trd/simulate.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

using namespace trd;

namespace {

LyapunovConfig certified(const ToeplitzSystem& sys, int degree) {
    const auto found = theta_search(SpectralDecomposition(sys), degree);
    REQUIRE(found.found);
    return found.config;
}

SimConfig base_config(int m, int q) {
    SimConfig c;
    c.sys = {m, 3.0, 1.0};
    const auto n = static_cast<std::size_t>(m);
    c.bc = BoundarySpec::neumann(n);
    c.region = RegionSpec::positive(n);
    c.reaction = builtin_family(m, q);
    c.lyapunov = certified(c.sys, 2);
    c.mesh = {1.0, 64};
    c.init.basis = InitialData::Basis::W;
    c.init.mean.assign(n, 1.0);
    c.init.amplitude.assign(n, 0.5);
    c.t_final = 1.0;
    return c;
}

InitialData w_profile(std::size_t m, double mean, double amp, InitialData::Shape shape) {
    InitialData init;
    init.basis = InitialData::Basis::W;
    init.shape = shape;
    init.mean.assign(m, mean);
    init.amplitude.assign(m, amp);
    return init;
}

}  // namespace

TEST_CASE("constant state is steady without reaction") {
    const auto dec = decompose({2, 3.0, 1.0});
    const ReactionSpec zero(2);
    const Mesh1D mesh{1.0, 32};
    const auto bc = BoundarySpec::neumann(2);
    SimState state = initial_state(w_profile(2, 0.7, 0.0, InitialData::Shape::Cosine), dec, mesh);
    const Matrix w0 = state.w;
    const DiagonalIntegrator integ(dec, zero, bc, mesh, 0.01);
    for (int k = 0; k < 200; ++k) {
        integ.step(state);
    }
    CHECK(max_abs_diff(state.w, w0) <= 1e-12);
    CHECK(state.steps == 200);
}

TEST_CASE("single-mode decay follows the heat kernel") {
    const auto dec = decompose({2, 3.0, 1.0});
    const ReactionSpec zero(2);
    const Mesh1D mesh{std::numbers::pi, 64};
    const auto bc = BoundarySpec::neumann(2);
    SimState state = initial_state(w_profile(2, 0.0, 1.0, InitialData::Shape::Cosine), dec, mesh);
    const double dt = 0.01;
    const DiagonalIntegrator integ(dec, zero, bc, mesh, dt);
    for (int k = 0; k < 100; ++k) {
        integ.step(state);
    }
    double err = 0.0;
    for (std::size_t l = 0; l < 2; ++l) {
        const double decay = std::exp(-dec.lambdas_bar()[l] * 1.0);
        for (std::size_t i = 0; i < mesh.nodes(); ++i) {
            err = std::max(err, std::abs(state.w(l, i) - decay * std::cos(mesh.x(i))));
        }
    }
    CHECK(err <= 1e-3);
}

TEST_CASE("w is refreshed from u every step") {
    auto c = base_config(3, 1);
    const auto dec = decompose(c.sys);
    SimState state = initial_state(c.init, dec, c.mesh);
    const DiagonalIntegrator integ(dec, c.reaction, c.bc, c.mesh, 0.01);
    for (int k = 0; k < 10; ++k) {
        integ.step(state);
    }
    CHECK(max_abs_diff(multiply(dec.transform(), state.u), state.w) <= 1e-12);
}

TEST_CASE("builtin reaction keeps data in the positive region") {
    for (int m : {2, 3}) {
        for (int q : {1, 2}) {
            const auto result = run(base_config(m, q));
            CHECK_FALSE(result.blew_up);
            CHECK(result.min_signed_w >= -1e-8);
            CHECK(result.gronwall.holds);
            CHECK(result.gronwall.envelope_holds);
            CHECK(std::isfinite(result.gronwall.c6));
            CHECK(std::isfinite(result.gronwall.c8));
            CHECK(result.trace.back().t == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("diffusion alone does not increase L under Dirichlet data") {
    auto c = base_config(2, 1);
    c.bc = BoundarySpec::dirichlet(2);
    c.reaction = ReactionSpec(2);
    c.init = w_profile(2, 0.0, 1.0, InitialData::Shape::Sine);
    c.lyapunov = certified(c.sys, 3);
    const auto result = run(c);
    for (std::size_t k = 1; k < result.trace.size(); ++k) {
        CHECK(result.trace[k].L <= result.trace[k - 1].L + 1e-10);
    }
    CHECK(result.min_signed_w >= -1e-8);
}

TEST_CASE("mass identity for the builtin family") {
    auto c = base_config(2, 1);
    c.t_final = 0.5;
    const auto dec = decompose(c.sys);
    SimState state = initial_state(c.init, dec, c.mesh);
    const double dt = c.mesh.h();
    const DiagonalIntegrator integ(dec, c.reaction, c.bc, c.mesh, dt);

    const auto weighted = [&](const Matrix& w, bool rhs) {
        std::vector<double> v(c.mesh.nodes());
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = rhs ? -w(0, i) * w(1, i) : 2.0 * w(0, i) + w(1, i);
        }
        return domain_average(v, c.mesh);
    };
    double worst = 0.0;
    for (int k = 0; k < 32; ++k) {
        const double m0 = weighted(state.w, false);
        const double r0 = weighted(state.w, true);
        integ.step(state);
        const double m1 = weighted(state.w, false);
        const double r1 = weighted(state.w, true);
        CHECK(r0 <= 0.0);
        worst = std::max(worst, std::abs((m1 - m0) / dt - 0.5 * (r0 + r1)));
    }
    CHECK(worst <= 10.0 * dt * dt);
}

TEST_CASE("mass is conserved without reaction under Neumann data") {
    auto c = base_config(3, 1);
    c.reaction = ReactionSpec(3);
    c.init.basis = InitialData::Basis::U;
    c.init.mean = {2.0, 1.5, 1.0};
    c.init.amplitude = {0.1, 0.2, 0.1};
    c.region = RegionSpec(3, {0, 1}, {2});
    const auto dec = decompose(c.sys);
    // Pick the region that actually contains the data.
    for (const auto& r : enumerate_regions(3)) {
        bool inside = true;
        SimState s = initial_state(c.init, dec, c.mesh);
        for (std::size_t i = 0; i < c.mesh.nodes() && inside; ++i) {
            std::vector<double> u0{s.u(0, i), s.u(1, i), s.u(2, i)};
            inside = membership(r, dec, u0).inside;
        }
        if (inside) {
            c.region = r;
            break;
        }
    }
    const auto result = run(c);
    for (std::size_t l = 0; l < 3; ++l) {
        const double m0 = result.trace.front().mass[l];
        for (const auto& s : result.trace) {
            CHECK(std::abs(s.mass[l] - m0) <= 1e-10);
        }
    }
}

TEST_CASE("square growth blows up near the ODE time") {
    auto c = base_config(2, 1);
    std::istringstream in("1 1.0 2 0\n2 1.0 0 2\n");
    c.reaction = parse_reaction(in, 2);
    c.init.amplitude.assign(2, 0.0);
    c.t_final = 2.0;
    c.mesh.n_cells = 16;
    c.dt = 1e-3;
    const auto result = run(c);
    CHECK(result.blew_up);
    CHECK(result.t_blowup < 2.0);
    CHECK(result.t_blowup > 0.99);
    CHECK(result.t_blowup < 1.01);
}

TEST_CASE("u and w formulations agree") {
    auto c = base_config(2, 1);
    c.t_final = 0.5;
    const auto report = cross_check(c);
    CHECK(report.max_discrepancy <= 1e-8);
    CHECK(report.steps == 32);

    auto d = c;
    d.bc = BoundarySpec::dirichlet(2);
    d.reaction = ReactionSpec(2);
    d.init = w_profile(2, 0.0, 1.0, InitialData::Shape::Sine);
    CHECK(cross_check(d).max_discrepancy <= 1e-12);

    auto r = c;
    r.bc = BoundarySpec::robin(2, 0.3, {1.0, 0.0});
    CHECK(cross_check(r).max_discrepancy <= 1e-8);

    CrossCheckOptions wrong;
    wrong.mismatch_ordering = true;
    CHECK(cross_check(c, wrong).max_discrepancy > 1e-3);
}

TEST_CASE("run preconditions name the failure") {
    auto outside = base_config(2, 1);
    outside.init.basis = InitialData::Basis::U;
    outside.init.mean = {1.0, 2.0};
    outside.init.amplitude = {0.0, 0.0};
    try {
        run(outside);
        FAIL("expected a precondition error");
    } catch (const PreconditionError& e) {
        CHECK(e.reason() == kRegionMembershipFailed);
    }

    auto weak = base_config(2, 1);
    weak.lyapunov.thetas = {1.0};
    try {
        run(weak);
        FAIL("expected a precondition error");
    } catch (const PreconditionError& e) {
        CHECK(e.reason() == kConditionFailed);
    }

    auto flat = base_config(2, 1);
    flat.sys = {2, 1.0, 1.0};
    try {
        run(flat);
        FAIL("expected a precondition error");
    } catch (const PreconditionError& e) {
        CHECK(e.reason() == kNotParabolic);
    }

    auto robin = base_config(2, 1);
    robin.bc = BoundarySpec::robin(2, 0.5, {0.0, 1.0});
    try {
        run(robin);
        FAIL("expected a precondition error");
    } catch (const PreconditionError& e) {
        CHECK(e.reason() == kBoundaryIncompatible);
    }

    auto inhomogeneous = base_config(2, 1);
    inhomogeneous.bc.beta = {1.0, 0.0};
    try {
        run(inhomogeneous);
        FAIL("expected a precondition error");
    } catch (const PreconditionError& e) {
        CHECK(e.reason() == kInvalidConfig);
    }
}

TEST_CASE("csv output") {
    auto c = base_config(2, 1);
    c.t_final = 0.1;
    c.dt = 0.01;
    const auto result = run(c);
    std::ostringstream a, b;
    write_csv(a, result, 3);
    write_csv(b, run(c), 3);
    CHECK(a.str() == b.str());
    std::istringstream lines(a.str());
    std::string header;
    std::getline(lines, header);
    CHECK(header == "t,L,Z,supnorm,minw_1,minw_2,mass_1,mass_2");
    int rows = 0;
    std::string line, last;
    while (std::getline(lines, line)) {
        ++rows;
        last = line;
    }
    // steps 0,3,6,9 and the final step 10
    CHECK(rows == 5);
    CHECK(last.rfind("0.1", 0) == 0);
}

TEST_CASE("gronwall fit on a synthetic exponential") {
    std::vector<MonitorSample> trace;
    for (int k = 0; k <= 100; ++k) {
        MonitorSample s;
        s.t = 0.01 * k;
        s.Z = std::exp(0.5 * s.t);
        trace.push_back(s);
    }
    const auto fit = fit_gronwall(trace, 2);
    CHECK(fit.holds);
    CHECK(fit.envelope_holds);
    CHECK(fit.c6 == doctest::Approx(1.0).epsilon(0.01));
    CHECK(fit.worst_slack >= -1e-9);
}
