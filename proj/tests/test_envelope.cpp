#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eqlab/envelope.hpp"
#include "eqlab/errors.hpp"

using namespace eqlab;

namespace {

constexpr double kPi = std::numbers::pi;

struct Run {
    WeightedSet K;
    ReferenceGeometry geom;
    EnvelopeSolution sol;
};

Run run(const char* set, const char* weight, double R = 4, int M = 64) {
    Chart ch(R, M);
    Run r{build_builtin_set(set, ch, WeightSpec::parse(weight)), fs_geometry(ch), {}};
    r.sol = envelope(r.K, r.geom);
    return r;
}

// Classical (flat) potential s = u + rho0 at node idx.
double flat_value(const Run& r, std::size_t i) { return r.sol.s[i]; }

double disc_sup_error(int M) {
    const auto r = run("unit-disc", "flat:0", 4, M);
    double e = 0;
    for (std::size_t i = 0; i < r.K.chart.size(); ++i) {
        const double a = std::log(std::max(1.0, std::abs(r.K.chart.node(i))));
        e = std::max(e, std::abs(flat_value(r, i) - a));
    }
    return e;
}

}  // namespace

TEST_CASE("disc with zero weight gives the Green function") {
    const auto r = run("unit-disc", "flat:0");
    const double h = r.K.chart.h();
    double on_k = 0, off = 0;
    for (std::size_t i = 0; i < r.K.chart.size(); ++i) {
        if (r.K.in_mask(i)) on_k = std::max(on_k, std::abs(flat_value(r, i)));
        off = std::max(off, std::abs(flat_value(r, i) - std::log(std::max(1.0, std::abs(r.K.chart.node(i))))));
    }
    CHECK(on_k <= 5 * h);
    CHECK(off <= 0.05);
    CHECK(std::abs(r.sol.boundary_rule.c) < 0.05);
}

TEST_CASE("solution invariants") {
    for (const char* set : {"unit-disc", "interval", "annulus", "square"}) {
        CAPTURE(set);
        const auto r = run(set, "flat:0.2*x");
        for (std::size_t i = 0; i < r.K.chart.size(); ++i)
            if (r.K.in_mask(i)) CHECK(r.sol.u[i] <= r.K.phi_grid[i] + 1e-10);
        CHECK(min_psh_density(r.sol.u) >= -std::max(1e-8, 2 * r.sol.residual));
        CHECK(r.sol.residual < 1e-5);
    }
}

TEST_CASE("doubling the resolution improves the disc error") {
    const double e32 = disc_sup_error(32), e64 = disc_sup_error(64);
    CHECK(e32 / e64 >= 1.5);
    CHECK(e32 / e64 <= 6);
}

TEST_CASE("disc equilibrium measure sits on the unit circle") {
    const auto r = run("unit-disc", "flat:0");
    const auto ma = ma_measure(r.sol, r.K, r.geom);
    const double h = r.K.chart.h();
    CHECK(std::abs(ma.total - 1) <= 10 * h);
    double near = 0;
    for (std::size_t i = 0; i < ma.measure.size(); ++i)
        if (std::abs(std::abs(ma.measure.points[i]) - 1) <= 3 * h) near += ma.measure.masses[i];
    CHECK(near / ma.total >= 0.95);
    const auto mu = mu_eq(r.K, r.geom);
    CHECK(mu.total() == doctest::Approx(1).epsilon(1e-14));
    CHECK(mu.normalized().total() == doctest::Approx(1).epsilon(1e-14));
    // Rotation invariance: first moment vanishes.
    CHECK(std::abs(mu.integrate([](cplx z) { return z.real(); })) < 1e-8);
}

TEST_CASE("interval equilibrium measure is the arcsine law") {
    const auto r = run("interval", "flat:0");
    const auto mu = mu_eq(r.K, r.geom);
    std::vector<std::pair<double, double>> a;
    for (std::size_t i = 0; i < mu.size(); ++i) a.emplace_back(mu.points[i].real(), mu.masses[i]);
    std::sort(a.begin(), a.end());
    double F = 0, ks = 0;
    for (std::size_t i = 0; i < a.size();) {
        const double x = a[i].first;
        const double Fa = x >= 1 ? 1 : x <= -1 ? 0 : 0.5 + std::asin(x) / kPi;
        ks = std::max(ks, std::abs(F - Fa));
        while (i < a.size() && a[i].first == x) F += a[i++].second;
        ks = std::max(ks, std::abs(F - Fa));
    }
    CHECK(ks <= 5 * r.K.chart.h());
}

TEST_CASE("whole space reproduces a psh weight and its density") {
    const auto r = run("whole", "0.2*exp(-r2)", 4, 32);
    double err = 0;
    for (std::size_t i = 0; i < r.K.chart.size(); ++i) err = std::max(err, std::abs(r.sol.u[i] - r.K.phi_grid[i]));
    CHECK(err < 1e-8);
    const auto ma = ma_measure(r.sol, r.K, r.geom);
    CHECK(ma.total == doctest::Approx(1).epsilon(1e-3));
    // Interior cell masses against the analytic density (lap phi / 2pi + omega0 density) h^2.
    const auto spec = WeightSpec::parse("0.2*exp(-r2)");
    const double h = r.K.chart.h();
    double l1 = 0;
    for (std::size_t i = 0; i < ma.measure.size(); ++i) {
        if (ma.measure.node[i] < 0) continue;
        const cplx z = ma.measure.points[i];
        l1 += std::abs(ma.measure.masses[i] - (spec.laplacian(z) / (2 * kPi) + fs_density(z)) * h * h);
    }
    CHECK(l1 <= 10 * h);
}

TEST_CASE("monotone and concave in the weight, equivariant under constants") {
    const auto a = run("unit-disc", "flat:0");
    const auto b = run("unit-disc", "flat:0.3*x*x+0.1*y");
    const auto c = run("unit-disc", "flat:0.3*x*x");
    const double tol = EnvelopeOptions{}.tol;
    double mono = 0;
    for (std::size_t i = 0; i < a.K.chart.size(); ++i) mono = std::max(mono, a.sol.u[i] - c.sol.u[i]);
    CHECK(mono <= 1e-8);
    for (double t : {0.25, 0.5, 0.75}) {
        CAPTURE(t);
        const auto m = a.K.with_weight(WeightField::linear(t, a.K.phi, 1 - t, b.K.phi));
        const auto sm = envelope(m, a.geom);
        double worst = 0;
        for (std::size_t i = 0; i < a.K.chart.size(); ++i)
            worst = std::max(worst, t * a.sol.u[i] + (1 - t) * b.sol.u[i] - sm.u[i]);
        CHECK(worst <= 2 * tol + 1e-6);
    }
    const auto shifted = a.K.with_weight(a.K.phi.shifted(0.25));
    const auto [lhs, rhs] = lipschitz_projection_check(a.K, shifted, a.geom);
    CHECK(rhs == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(lhs == doctest::Approx(0.25).epsilon(1e-5));
    const auto [l0, r0] = lipschitz_projection_check(a.K, a.sol, a.K, a.sol);
    CHECK(l0 == 0.0);
    CHECK(r0 == 0.0);
    const auto [l2, r2] = lipschitz_projection_check(a.K, a.sol, b.K, b.sol);
    CHECK(l2 <= r2 + 2 * tol + 1e-6);
}

TEST_CASE("envelope is idempotent") {
    const auto a = run("square", "flat:0.2*x-0.1*y*y");
    const auto again = envelope(a.K.with_weight(a.sol.field()), a.geom);
    double d = 0;
    for (std::size_t i = 0; i < a.K.chart.size(); ++i) d = std::max(d, std::abs(again.u[i] - a.sol.u[i]));
    CHECK(d <= 1e-6);
}

TEST_CASE("maximum principle") {
    const auto a = run("unit-disc", "flat:0.2*x");
    const auto [s1, s2, s3] = max_principle_check(a.sol.u, a.K, a.sol, std::max(1e-8, 2 * a.sol.residual));
    CHECK(s1 <= 1e-9);
    CHECK(std::abs(s1 - s2) < 1e-8);
    CHECK(std::abs(s2 - s3) < 1e-8);
    const auto b = run("unit-disc", "flat:0.3*y*y");
    const auto [t1, t2, t3] = max_principle_check(b.sol.u, a.K, a.sol, std::max(1e-8, 2 * b.sol.residual));
    const double h = a.K.chart.h();
    CHECK(std::abs(t1 - t2) <= 20 * h);
    CHECK(std::abs(t2 - t3) <= 20 * h);
    // A function with negative curvature somewhere is rejected.
    const auto bad = GridFunction::sample(a.K.chart, [](cplx z) { return -std::norm(z); });
    CHECK_THROWS_AS(max_principle_check(bad, a.K, a.sol), PreconditionError);
}

TEST_CASE("point charge has unit mass") {
    const Chart ch(2, 64);
    const auto g = GridFunction::sample(ch, [](cplx z) { return std::log(std::max(std::abs(z), 1e-3)); });
    const double h = ch.h();
    double mass = 0;
    for (int j = 1; j < ch.n() - 1; ++j)
        for (int k = 1; k < ch.n() - 1; ++k)
            if (std::abs(ch.node(j, k)) < 1) mass += g.laplacian(j, k) * h * h / (2 * kPi);
    CHECK(mass == doctest::Approx(1).epsilon(1e-3));
}

TEST_CASE("mass diagnostic exponents") {
    const Chart ch(4, 128);
    const std::vector<double> radii{0.15, 0.2, 0.28, 0.4, 0.56, 0.8};
    const auto green = GridFunction::sample(ch, [](cplx z) { return std::log(std::max(1.0, std::abs(z))); });
    const double a1 = holder_mass_diagnostic(green, {1.0, cplx(0, 1), std::polar(1.0, 2.0)}, radii);
    CHECK(a1 >= 0.8);
    CHECK(a1 <= 1.2);
    const auto smooth = GridFunction::sample(ch, [](cplx z) { return std::norm(z); });
    CHECK(holder_mass_diagnostic(smooth, {0.0, 0.5}, radii) >= 1.5);
    const auto dirac = GridFunction::sample(ch, [](cplx z) { return std::log(std::max(std::abs(z), 1e-3)); });
    CHECK(std::abs(holder_mass_diagnostic(dirac, {0.0}, radii)) < 0.1);
}

TEST_CASE("sweep budget exhaustion reports the residual") {
    Chart ch(4, 32);
    const auto K = build_builtin_set("unit-disc", ch, WeightSpec::parse("flat:0"));
    EnvelopeOptions opt;
    opt.max_sweeps = 5;
    opt.coarsest_M = 32;
    CHECK_THROWS_AS(envelope(K, fs_geometry(ch), opt), SolverError);
}
