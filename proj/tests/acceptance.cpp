// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "eqlab/bergman.hpp"
#include "eqlab/envelope.hpp"
#include "eqlab/errors.hpp"
#include "eqlab/fekete.hpp"
#include "eqlab/functionals.hpp"
#include "eqlab/metrics.hpp"
#include "eqlab/regops.hpp"
#include "eqlab/study.hpp"

using namespace eqlab;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void check(bool ok, const std::string& what) {
        if (!ok) pass = false;
        notes.push_back((ok ? "" : "FAILED ") + what);
    }
};

std::string f(const char* format, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, format, a);
    return buf;
}

std::string f(const char* format, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, format, a, b);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

WeightedSet flat_set(const char* name, double R, int M) {
    return build_builtin_set(name, Chart(R, M), WeightSpec::parse("flat:0"));
}

// Interior roots of P'_n together with the endpoints, by Newton from Chebyshev-Lobatto guesses.
std::vector<double> lobatto_nodes(int n) {
    std::vector<double> x{-1.0};
    for (int i = 1; i < n; ++i) {
        double t = -std::cos(kPi * i / n);
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (t * p1 - p0) / (t * t - 1);
            const double ddp = (2 * t * dp - n * (n + 1) * p1) / (1 - t * t);
            const double step = dp / ddp;
            t -= step;
            if (std::abs(step) < 1e-15) break;
        }
        x.push_back(t);
    }
    x.push_back(1.0);
    return x;
}

double disc_envelope_sup_error(int M) {
    const Chart ch(4, M);
    const auto K = flat_set("unit-disc", 4, M);
    const auto sol = envelope(K, fs_geometry(ch));
    double e = 0;
    for (std::size_t i = 0; i < ch.size(); ++i)
        e = std::max(e, std::abs(sol.s[i] - std::log(std::max(1.0, std::abs(ch.node(i))))));
    return e;
}

// Random smooth bounded weight.
WeightField random_weight(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    const double a = u(rng), b = u(rng), c = u(rng), x0 = u(rng), y0 = u(rng);
    return WeightField::from_function([=](cplx z) {
        return a * std::exp(-std::norm(z - cplx(x0, y0))) + b * std::sin(z.real()) + c * std::cos(z.imag());
    });
}

// omega0-psh function: sum_k w_k log sqrt(|z - a_k|^2 + e_k^2) - rho0 + c with sum w_k <= 1.
GridFunction random_psh(const Chart& ch, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0, 1);
    const int m = 1 + static_cast<int>(6 * u(rng));
    std::vector<double> w(m), e(m);
    std::vector<cplx> a(m);
    double total = 0;
    for (int k = 0; k < m; ++k) {
        w[k] = 0.1 + u(rng);
        total += w[k];
        a[k] = cplx(3 * u(rng) - 1.5, 3 * u(rng) - 1.5);
        e[k] = 3 * ch.h() + (0.8 - 3 * ch.h()) * u(rng);
    }
    const double scale = (0.2 + 0.8 * u(rng)) / total;
    const double c = u(rng) - 0.5;
    return GridFunction::sample(ch, [&](cplx z) {
        double s = c - fs_potential(z);
        for (int k = 0; k < m; ++k) s += scale * w[k] * 0.5 * std::log(std::norm(z - a[k]) + e[k] * e[k]);
        return s;
    });
}

double min_interior_laplacian(const GridFunction& g) {
    const Chart& c = g.chart();
    double m = std::numeric_limits<double>::infinity();
    for (int k = 1; k < c.n() - 1; ++k)
        for (int j = 1; j < c.n() - 1; ++j) m = std::min(m, g.laplacian(j, k));
    return m;
}

// ------------------------------------------------------------------ criteria

Outcome disc_optimality() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto K = flat_set("unit-disc", 2, 256);
    const double h = K.chart.h();
    double worst = 0, min_r = 1e9;
    for (int p : {3, 5, 8, 12, 16}) {
        const auto P = solve_fekete(K, p).first;
        const double n = p + 1;
        worst = std::max(worst, std::abs(P.log_w - 0.5 * n * std::log(n)));
        for (cplx z : P.points) min_r = std::min(min_r, std::abs(z));
    }
    const double t = seconds_since(t0);
    o.check(worst <= 1e-4, f("max |log_w - (N/2)log N| = %.3g (tol 1e-4)", worst));
    o.check(min_r >= 1 - 3 * h, f("min |z| = %.6f (need >= %.6f)", min_r, 1 - 3 * h));
    o.check(t <= 120, f("%.1f s (limit 120 s)", t));
    return o;
}

Outcome interval_oracle() {
    Outcome o;
    const auto K = flat_set("interval", 2, 128);
    const double h = K.chart.h();
    double worst = 0;
    for (int p : {2, 4, 8, 12}) {
        const auto P = solve_fekete(K, p).first;
        std::vector<double> x;
        for (cplx z : P.points) x.push_back(z.real());
        std::sort(x.begin(), x.end());
        const auto ref = lobatto_nodes(p);
        if (ref.size() != x.size()) {
            o.check(false, "point count mismatch at p=" + std::to_string(p));
            continue;
        }
        for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(x[i] - ref[i]));
        if (p == 2) o.check(std::abs(P.log_w - std::log(2.0)) <= 1e-6, f("p=2 log_w - log 2 = %.3g", P.log_w - std::log(2.0)));
    }
    o.check(worst <= 2 * h, f("max node distance %.3g (2h = %.3g)", worst, 2 * h));

    // Brute force over all triples of the coarse candidate pool.
    const auto coarse = flat_set("interval", 2, 8);
    const auto pool = candidate_pool(coarse);
    double best = -1e300;
    for (std::size_t a = 0; a < pool.size(); ++a)
        for (std::size_t b = a + 1; b < pool.size(); ++b)
            for (std::size_t c = b + 1; c < pool.size(); ++c)
                best = std::max(best, std::log(std::abs(pool[a] - pool[b])) + std::log(std::abs(pool[a] - pool[c])) +
                                          std::log(std::abs(pool[b] - pool[c])));
    const double solved = solve_fekete(coarse, 2).first.log_w;
    o.check(std::abs(solved - best) <= 1e-6 && std::abs(best - std::log(2.0)) <= 1e-6,
            f("coarse brute force %.12f, solver %.12f", best, solved));
    return o;
}

Outcome equilibrium_oracles() {
    Outcome o;
    {
        const Chart ch(4, 64);
        const auto K = flat_set("unit-disc", 4, 64);
        const auto geom = fs_geometry(ch);
        const auto ma = ma_measure(envelope(K, geom), K, geom);
        const double h = ch.h();
        double near = 0;
        for (std::size_t i = 0; i < ma.measure.size(); ++i)
            if (std::abs(std::abs(ma.measure.points[i]) - 1) <= 3 * h) near += ma.measure.masses[i];
        o.check(near / ma.total >= 0.95, f("disc mass within 3h of the circle %.4f", near / ma.total));
        o.check(std::abs(ma.total - 1) <= 10 * h, f("disc total mass %.5f (10h = %.3f)", ma.total, 10 * h));
    }
    {
        const Chart ch(4, 64);
        const auto K = flat_set("interval", 4, 64);
        const auto mu = mu_eq(K, fs_geometry(ch));
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
        o.check(ks <= 5 * ch.h(), f("interval Kolmogorov distance %.4f (5h = %.4f)", ks, 5 * ch.h()));
    }
    const double e64 = disc_envelope_sup_error(64), e128 = disc_envelope_sup_error(128);
    o.check(e64 / e128 >= 1.7, f("disc sup error 64 -> 128: ratio %.3f (need >= 1.7), e128 = %.3g", e64 / e128, e128));
    return o;
}

Outcome equidistribution_speed() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const double beta = 0.9 / (24 + 12 * 0.9);
    const std::vector<int> degrees{8, 12, 16, 24, 32, 48, 64};
    ExperimentConfig disc = ExperimentConfig::parse(
        "[study]\nset = unit-disc\nweight = flat:0\ndegrees = 8,12,16,24,32,48,64\nseed = 1\n"
        "[fekete]\nR = 2\nM = 256\n");
    ExperimentConfig x = ExperimentConfig::parse(
        "[study]\nset = whole\nweight = 0.2*exp(-r2)\ndegrees = 8,12,16,24,32,48,64\nseed = 1\n"
        "[fekete]\nR = 2\nM = 128\n[metrics]\nreference_rings = 128\n");
    double worst_ratio = 0;
    const auto dr = run_equidistribution_study(disc);
    for (const auto& r : dr.rows) worst_ratio = std::max(worst_ratio, r.w1 / (10 * std::pow(r.p, -beta)));
    o.check(dr.w1_fit.slope <= -0.9, f("disc w1 slope %.3f +- %.3f (need <= -0.9)", dr.w1_fit.slope, dr.w1_fit.slope_stderr));
    const auto xr = run_equidistribution_study(x);
    for (const auto& r : xr.rows) worst_ratio = std::max(worst_ratio, r.w1 / (10 * std::pow(r.p, -beta)));
    o.check(xr.w1_fit.slope >= -0.75 && xr.w1_fit.slope <= -0.35,
            f("X-case w1 slope %.3f +- %.3f (need in [-0.75, -0.35])", xr.w1_fit.slope, xr.w1_fit.slope_stderr));
    o.check(worst_ratio <= 1, f("max w1 / (10 p^-beta) = %.3f, beta = %.5f", worst_ratio, beta));
    const double t = seconds_since(t0);
    o.check(t <= 1200, f("%.1f s (limit 1200 s)", t));
    return o;
}

Outcome bergman_suite() {
    Outcome o;
    const Chart ch(4, 64);
    const auto mu0 = fs_measure(ch);
    const auto zero = WeightField::from_spec(WeightSpec::zero());
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-6, 6);
    std::vector<cplx> probes;
    for (int i = 0; i < 50; ++i) probes.emplace_back(u(rng), u(rng));
    double worst = 0, trace = 0;
    for (int p : {4, 8, 16, 32}) {
        const auto b = bergman_function(mu0, zero, p, ch);
        for (double v : b.rho.values()) worst = std::max(worst, std::abs(v / (p + 1) - 1));
        for (double v : b.at(probes)) worst = std::max(worst, std::abs(v / (p + 1) - 1));
        const auto at = b.at(mu0.points);
        double s = 0;
        for (std::size_t i = 0; i < mu0.size(); ++i) s += mu0.masses[i] * at[i];
        trace = std::max(trace, std::abs(s / (p + 1) - 1));
    }
    {
        // Trace identity for a non-balanced weight as well.
        const auto phi = WeightField::from_spec(WeightSpec::parse("0.2*exp(-r2)+0.1*x/(1+r2)"));
        for (int p : {8, 16}) {
            const auto b = bergman_function(mu0, phi, p, ch);
            const auto at = b.at(mu0.points);
            double s = 0;
            for (std::size_t i = 0; i < mu0.size(); ++i) s += mu0.masses[i] * at[i];
            trace = std::max(trace, std::abs(s / (p + 1) - 1));
        }
    }
    o.check(worst <= 1e-3, f("balanced case max |rho_p/(p+1) - 1| = %.3g (tol 1e-3)", worst));
    o.check(trace <= 1e-6, f("trace identity max relative error %.3g (tol 1e-6)", trace));
    const auto bump = tue4_experiment(WeightSpec::parse("0.2*exp(-r2)"), {8, 16, 32, 64}, Chart(4, 128));
    o.check(bump.zeta >= 0.5, f("certified zeta %.3f", bump.zeta));
    o.check(bump.slope <= -0.4, f("L1 error slope %.3f (need <= -0.4)", bump.slope));
    return o;
}

Outcome functional_identities() {
    Outcome o;
    const Chart ch(4, 32);
    const auto mu0 = fs_measure(ch);
    const double z = l_p_normalized(mu0, WeightField::constant(0), 6);
    o.check(z == 0.0, f("L_p(mu0, 0) = %.3g", z));
    std::mt19937_64 rng(11);
    double shift_err = 0, lp_excess = -1e9, e_excess = -1e9;
    for (int t = 0; t < 20; ++t) {
        const auto a = random_weight(rng), b = random_weight(rng);
        const double c = std::uniform_real_distribution<double>(-1, 1)(rng);
        shift_err = std::max(shift_err, std::abs(l_p_normalized(mu0, a.shifted(c), 6) - l_p_normalized(mu0, a, 6) - c));
        double sup = 0;
        for (cplx w : mu0.points) sup = std::max(sup, std::abs(a(w) - b(w)));
        lp_excess = std::max(lp_excess, std::abs(l_p_normalized(mu0, a, 6) - l_p_normalized(mu0, b, 6)) - sup);
    }
    o.check(shift_err <= 1e-8, f("constant shift error %.3g (tol 1e-8)", shift_err));
    o.check(lp_excess <= 1e-8, f("L_p Lipschitz: max(|dL| - sup|dphi|) = %.3g", lp_excess));

    const Chart ce(4, 64);
    const auto geom = fs_geometry(ce);
    const auto K = build_builtin_set("unit-disc", ce, WeightSpec::zero());
    for (int t = 0; t < 20; ++t) {
        const auto a = random_weight(rng), b = random_weight(rng);
        const auto Ka = K.with_weight(a), Kb = K.with_weight(b);
        double sup = 0;
        for (std::size_t i = 0; i < ce.size(); ++i)
            if (K.in_mask(i)) sup = std::max(sup, std::abs(Ka.phi_grid[i] - Kb.phi_grid[i]));
        e_excess = std::max(e_excess, std::abs(energy_difference(Ka, geom).value - energy_difference(Kb, geom).value) - sup);
    }
    o.check(e_excess <= 1e-4, f("E_eq Lipschitz: max(|dE| - sup_K|dphi|) = %.3g (quadrature tol 1e-4)", e_excess));

    const auto X = build_builtin_set("whole", ch, WeightSpec::zero());
    const auto solx = envelope(X, fs_geometry(ch));
    std::vector<std::pair<double, double>> w;
    for (int p : {4, 8, 16, 32}) w.emplace_back(p, l_p_K_bracket(X, solx, p).width() / std::log(p));
    o.check(fit_rate(w).slope <= -0.8, f("bracket width/log p slope %.3f (need <= -0.8)", fit_rate(w).slope));

    const auto D = build_builtin_set("unit-disc", ce, WeightSpec::parse("flat:0"));
    const auto sold = envelope(D, geom);
    const double E = energy_difference(D, geom).value;
    const auto F = flat_set("unit-disc", 2, 256);
    std::vector<double> gaps;
    for (int p : {8, 16, 32}) gaps.push_back(gap_report(D, sold, E, solve_fekete(F, p).first, p).gap());
    o.check(gaps[1] < gaps[0] && gaps[2] < gaps[1],
            f("disc |D_p + E_eq| at 8, 16, 32: %.4f, %.4f", gaps[0], gaps[1]) + f(", %.4f", gaps[2]));
    return o;
}

Outcome regularization_suite() {
    Outcome o;
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(-0.3, 0.3), pos(0, 1);
    const double eps = 0.1;
    long bad_bounds = 0, bad_mono = 0, bad_convex = 0, bad_drop = 0;
    const int samples = 10000;
    for (int t = 0; t < samples; ++t) {
        const std::size_t l = 1 + t % 3;
        std::vector<double> a(l), b(l), mid(l);
        for (std::size_t i = 0; i < l; ++i) {
            a[i] = u(rng);
            b[i] = u(rng);
            mid[i] = 0.5 * (a[i] + b[i]);
        }
        const double ma = max_eps(a, eps), mb = max_eps(b, eps);
        const double mx = *std::max_element(a.begin(), a.end());
        if (ma < mx - 1e-14 || ma > mx + eps + 1e-14) ++bad_bounds;
        if (max_eps(mid, eps) > 0.5 * (ma + mb) + 1e-12) ++bad_convex;
        auto up = a;
        up[t % l] += pos(rng) * 0.3;
        if (max_eps(up, eps) < ma - 1e-14) ++bad_mono;
        if (l >= 2) {
            // Push one coordinate at least 2 eps below the others: it drops out.
            auto low = a;
            const double rest = *std::max_element(a.begin() + 1, a.end());
            low[0] = rest - 2 * eps - pos(rng);
            const std::vector<double> kept(a.begin() + 1, a.end());
            if (std::abs(max_eps(low, eps) - max_eps(kept, eps)) > 1e-10) ++bad_drop;
        }
    }
    o.check(bad_bounds + bad_mono + bad_convex + bad_drop == 0,
            "regularized max over " + std::to_string(samples) + " samples: bounds " + std::to_string(bad_bounds) +
                ", monotone " + std::to_string(bad_mono) + ", convex " + std::to_string(bad_convex) + ", dropping " +
                std::to_string(bad_drop) + " violations");

    // Subharmonicity is kept: nodewise over random pairs on a grid.
    {
        const Chart ch(2, 32);
        double worst = 1e9;
        long nodes = 0;
        for (int t = 0; t < 20; ++t) {
            std::vector<GridFunction> g;
            for (int k = 0; k < 2; ++k) {
                const cplx c(u(rng) * 3, u(rng) * 3);
                const double e = 0.1 + pos(rng), s = 0.2 + pos(rng), lin = u(rng);
                g.push_back(GridFunction::sample(ch, [=](cplx z) {
                    return s * std::log(std::norm(z - c) + e) + lin * z.real() + (k == 0 ? 0.3 * std::norm(z) : 0.0);
                }));
            }
            worst = std::min(worst, min_interior_laplacian(max_eps(g, 0.05 + 0.3 * pos(rng))));
            nodes += (ch.n() - 2) * (ch.n() - 2);
        }
        o.check(worst >= -10 * ch.h(), f("max_eps keeps subharmonicity: min Laplacian %.3g (-10h = %.3g)", worst, -10 * ch.h()) +
                                             " over " + std::to_string(nodes) + " nodes");
    }

    const Chart ch(2, 64);
    const double h = ch.h();
    const auto absz = GridFunction::sample(ch, [](cplx z) { return std::abs(z); });
    std::vector<std::pair<double, double>> ladder;
    for (double d : {2 * h, 4 * h, 8 * h, 16 * h}) {
        const auto m = mollify(absz, d);
        const auto base = restrict_to(absz, m.chart());
        double s = 0;
        for (std::size_t i = 0; i < m.size(); ++i) s = std::max(s, std::abs(m[i] - base[i]));
        ladder.emplace_back(d, s);
    }
    o.check(fit_rate(ladder).slope >= 0.9, f("mollifier ladder exponent for |z| %.3f (need >= 0.9)", fit_rate(ladder).slope));

    const double delta = 8 * h;
    long kl_bad = 0, kl_nodes = 0;
    for (int t = 0; t < 4; ++t) {
        const double a = pos(rng), bx = u(rng), c0 = u(rng);
        const auto psi = GridFunction::sample(ch, [=](cplx z) {
            return a * std::norm(z) + bx * z.real() + 0.1 * std::log(std::norm(z - c0) + 0.05);
        });
        const double lo = *std::min_element(psi.values().begin(), psi.values().end());
        const auto upper = psi_average(psi, delta);
        for (double c : {0.1, 0.5, 2.0})
            for (double b : {0.0, 1.0}) {
                const auto k = kiselman_legendre(psi, c, delta, b);
                for (std::size_t i = 0; i < k.size(); ++i) {
                    ++kl_nodes;
                    if (k[i] > upper[i] + 1e-12 || k[i] < lo - b * delta - 1e-8) ++kl_bad;
                }
            }
    }
    o.check(kl_bad == 0, "Kiselman-Legendre bounds: " + std::to_string(kl_bad) + " violations over " +
                             std::to_string(kl_nodes) + " nodes");

    const int n = 401;
    auto grid = [&](double e, auto fn) {
        std::vector<double> v(n);
        const double r = std::sqrt(e);
        for (int i = 0; i < n; ++i) v[i] = fn(-r + 2 * r * i / (n - 1));
        return v;
    };
    std::uniform_real_distribution<double> s1(-1, 1);
    int accepted = 0, tries = 0, violated = 0;
    while (accepted < 1000 && tries < 20000) {
        ++tries;
        const double e = std::pow(10.0, -3 + 2 * pos(rng)), M = 3 * pos(rng);
        const double a = s1(rng), b = s1(rng), s = a + 3 * std::sqrt(e) * s1(rng), k = pos(rng), c0 = e * pos(rng);
        const auto G = grid(e, [&](double t) { return a * t + 0.5 * M * b * t * t; });
        const auto F = grid(e, [&](double t) { return s * t - k * t * t - c0; });
        const auto r = key_lemma_margin(F, G, e, M);
        if (!r.hypotheses_hold) continue;
        ++accepted;
        if (r.measured > r.bound) ++violated;
    }
    o.check(accepted == 1000 && violated == 0, "derivative lemma: " + std::to_string(violated) + " violations in " +
                                                   std::to_string(accepted) + " accepted trials (" +
                                                   std::to_string(tries) + " drawn)");
    return o;
}

Outcome max_principle_projection() {
    Outcome o;
    std::mt19937_64 rng(55);
    const EnvelopeOptions opt;
    for (const auto& [name, alpha] : {std::pair{"unit-disc", 1.0}, std::pair{"interval", 0.5}}) {
        const Chart ch(4, 64);
        const auto geom = fs_geometry(ch);
        const auto K = build_builtin_set(name, ch, WeightSpec::parse("flat:0.2*x"));
        const auto sol = envelope(K, geom);
        const double tol = 20 * std::pow(ch.h(), std::min(alpha, 1.0));
        double worst = 0;
        int rejected = 0;
        for (int t = 0; t < 50; ++t) {
            try {
                const auto [a, b, c] = max_principle_check(random_psh(ch, rng), K, sol, std::max(1e-8, 2 * sol.residual));
                worst = std::max({worst, std::abs(a - b), std::abs(b - c)});
            } catch (const PreconditionError&) {
                ++rejected;
            }
        }
        o.check(rejected == 0 && worst <= tol, std::string(name) + f(": max triple spread %.3g (tol %.3g)", worst, tol) +
                                                   ", " + std::to_string(rejected) + " psi rejected as non-psh");

        double excess = -1e9;
        for (int t = 0; t < 25; ++t) {
            const auto Ka = K.with_weight(random_weight(rng)), Kb = K.with_weight(random_weight(rng));
            const auto [lhs, rhs] = lipschitz_projection_check(Ka, Kb, geom);
            excess = std::max(excess, lhs - rhs);
        }
        o.check(excess <= 2 * opt.tol, std::string(name) + f(": 25 weight pairs, max(lhs - rhs) = %.3g (2 tol = %.1g)", excess, 2 * opt.tol));
    }
    return o;
}

Outcome reproducibility() {
    Outcome o;
    const auto cfg = ExperimentConfig::parse(
        "[study]\nset = unit-disc\nweight = flat:0\ndegrees = 2,3,4,5,6\nseed = 42\n"
        "[chart]\nM = 32\n[fekete]\nM = 64\nrestarts = 3\n[metrics]\ndictionary = 64\n");
    auto csv = [&] {
        std::ostringstream os;
        write_equidistribution_csv(os, cfg, run_equidistribution_study(cfg));
        return os.str();
    };
    const std::string a = csv(), b = csv();
    o.check(a == b, "two runs of one config: " + std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "different"));

    const auto P = solve_fekete(flat_set("interval", 2, 128), 9).first;
    const auto path = (std::filesystem::temp_directory_path() / "eqlab_acceptance_cache.csv").string();
    const auto Q = cache_roundtrip(path, Chart(2, 128), P);
    std::filesystem::remove(path);
    bool same = Q.points.size() == P.points.size() && Q.log_w == P.log_w && Q.degree == P.degree;
    for (std::size_t i = 0; same && i < P.points.size(); ++i) same = Q.points[i] == P.points[i];
    o.check(same, "cache round trip of a degree-9 configuration is bit-exact");
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"disc optimality oracle", disc_optimality},
        {"interval oracle", interval_oracle},
        {"equilibrium measure oracles", equilibrium_oracles},
        {"equidistribution speed", equidistribution_speed},
        {"Bergman suite", bergman_suite},
        {"functional identities", functional_identities},
        {"regularization properties", regularization_suite},
        {"maximum principle and projection", max_principle_projection},
        {"reproducibility", reproducibility},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.check(false, std::string("exception: ") + e.what());
        }
        if (!o.pass) ++failed;
        std::printf("%s %zu %s (%.1f s)", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), seconds_since(t0));
        for (std::size_t k = 0; k < o.notes.size(); ++k) std::printf("%s %s", k ? ";" : ":", o.notes[k].c_str());
        std::printf("\n");
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
