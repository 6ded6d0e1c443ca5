#include "eqlab/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <numeric>

#include "eqlab/errors.hpp"

namespace eqlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2 * std::numbers::pi;

struct Level {
    Chart chart;
    std::vector<double> g;  // obstacle phi + rho0 on K, +inf elsewhere
};

Level make_level(const WeightedSet& K, int M) {
    const Chart chart(K.chart.R(), M);
    Level L{chart, std::vector<double>(chart.size(), kInf)};
    const WeightedSet KL = M == K.chart.M() ? K : make_weighted_set(chart, K.shape, K.phi);
    for (std::size_t i = 0; i < chart.size(); ++i)
        if (KL.in_mask(i)) L.g[i] = KL.phi_grid[i] + fs_potential(chart.node(i));
    return L;
}

void set_edge(const Level& L, std::vector<double>& s, const BoundaryRule& br) {
    const Chart& c = L.chart;
    const int n = c.n();
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            if (!c.on_edge(j, k)) continue;
            const std::size_t i = c.index(j, k);
            s[i] = br.log_growth ? std::log(std::abs(c.node(i))) + br.c : L.g[i];
        }
}

// Projected SOR, checkerboard order, until the sup-change of a sweep is < tol.
long psor(const Level& L, std::vector<double>& s, const EnvelopeOptions& opt, long budget, double& change) {
    const int n = L.chart.n();
    const double w = opt.omega;
    double* sp = s.data();
    const double* gp = L.g.data();
    for (long sweep = 1; sweep <= budget; ++sweep) {
        double dmax = 0;
        for (int color = 0; color < 2; ++color) {
            for (int k = 1; k < n - 1; ++k) {
                const int j0 = ((1 + k) % 2 == color) ? 1 : 2;
                const std::size_t base = static_cast<std::size_t>(k) * n;
                for (int j = j0; j < n - 1; j += 2) {
                    const std::size_t i = base + j;
                    const double avg = 0.25 * (sp[i - 1] + sp[i + 1] + sp[i - n] + sp[i + n]);
                    double v = sp[i] + w * (avg - sp[i]);
                    if (v > gp[i]) v = gp[i];
                    const double d = std::abs(v - sp[i]);
                    if (d > dmax) dmax = d;
                    sp[i] = v;
                }
            }
        }
        change = dmax;
        if (dmax < opt.tol) return sweep;
    }
    return -1;
}

double ring_mean(const Level& L, const std::vector<double>& s, double radius) {
    const GridFunction g(L.chart, s);
    const int m = std::max(256, 8 * L.chart.M());
    double acc = 0;
    for (int a = 0; a < m; ++a) {
        const cplx z = std::polar(radius, kTwoPi * (a + 0.5) / m);
        acc += g.interpolate(z) - std::log(radius);
    }
    return acc / m;
}

// Solves one level in place; for compact K also iterates the boundary constant.
long solve_level(const Level& L, std::vector<double>& s, BoundaryRule& br, const EnvelopeOptions& opt,
                 double& change) {
    long used = 0;
    auto inner = [&] {
        set_edge(L, s, br);
        const long k = psor(L, s, opt, opt.max_sweeps - used, change);
        if (k < 0)
            throw SolverError("envelope did not converge within " + std::to_string(opt.max_sweeps) +
                                  " sweeps",
                              change);
        used += k;
    };
    inner();
    if (!br.log_growth) return used;

    // Secant iteration on F(c) = ring mean of (s - log|z|) - c.
    const double c_tol = std::max(1e-7, 1e3 * opt.tol);
    double c0 = br.c, f0 = ring_mean(L, s, br.ring_radius) - c0;
    br.c = c0 + f0;
    ++br.c_updates;
    double prev_step = std::abs(f0);
    for (int it = 0; it < opt.max_c_updates; ++it) {
        inner();
        const double c1 = br.c, f1 = ring_mean(L, s, br.ring_radius) - c1;
        const double slope = (f1 - f0) / (c1 - c0);
        const double next = (std::isfinite(slope) && slope < -1e-3) ? c1 - f1 / slope : c1 + f1;
        const double step = std::abs(next - c1);
        if (prev_step < c_tol && step < c_tol) break;
        c0 = c1;
        f0 = f1;
        br.c = next;
        ++br.c_updates;
        prev_step = step;
    }
    inner();
    return used;
}

}  // namespace

WeightField EnvelopeSolution::field() const {
    if (boundary_rule.log_growth) {
        const double c = boundary_rule.c;
        return WeightField::from_grid(
            u, [c](cplx z) { return std::log(std::abs(z)) + c - fs_potential(z); },
            [](cplx z) {
                const double q = 1 + std::norm(z);
                return -2.0 / (q * q);
            });
    }
    return WeightField::from_grid(
        u, [e = exterior](cplx z) { return e(z); },
        [e = exterior](cplx z) { return e.analytic_laplacian(z).value_or(0.0); });
}

EnvelopeSolution envelope(const WeightedSet& K, const ReferenceGeometry& geom, const EnvelopeOptions& opt) {
    if (K.count() == 0) throw PreconditionError("envelope of an empty set");
    if (!(geom.chart == K.chart)) throw PreconditionError("geometry and set use different charts");
    const int M = K.chart.M();
    std::vector<int> ladder{M};
    while (ladder.back() % 2 == 0 && ladder.back() / 2 >= opt.coarsest_M) ladder.push_back(ladder.back() / 2);
    std::reverse(ladder.begin(), ladder.end());

    BoundaryRule br;
    br.log_growth = !K.whole();
    br.ring_radius = br.log_growth ? 0.5 * (K.shape.extent() + K.chart.R()) : 0;

    EnvelopeSolution sol;
    std::vector<double> s;
    Level prev{K.chart, {}};
    for (std::size_t l = 0; l < ladder.size(); ++l) {
        Level L = make_level(K, ladder[l]);
        if (l == 0) {
            s.assign(L.chart.size(), 0.0);
            for (std::size_t i = 0; i < s.size(); ++i) {
                const double base = br.log_growth ? std::log(std::max(std::abs(L.chart.node(i)), 1e-300)) : kInf;
                s[i] = std::min(L.g[i], base);
            }
        } else {
            const GridFunction coarse(prev.chart, s);
            s.assign(L.chart.size(), 0.0);
            for (std::size_t i = 0; i < s.size(); ++i)
                s[i] = std::min(L.g[i], coarse.interpolate(L.chart.node(i)));
        }
        sol.sweeps += solve_level(L, s, br, opt, sol.last_change);
        prev = std::move(L);
    }
    const Level& L = prev;
    const Chart& chart = K.chart;
    sol.boundary_rule = br;
    sol.s = GridFunction(chart, s);
    sol.u = GridFunction(chart);
    for (std::size_t i = 0; i < chart.size(); ++i) sol.u[i] = s[i] - geom.fs_potential[i];
    sol.u.check_finite("envelope");

    sol.contact.assign(chart.size(), 0);
    const int n = chart.n();
    const double h2 = chart.h() * chart.h();
    double res = 0;
    for (int k = 1; k < n - 1; ++k)
        for (int j = 1; j < n - 1; ++j) {
            const std::size_t i = chart.index(j, k);
            res = std::max(res, s[i] - L.g[i]);
            const double dens = (s[i - 1] + s[i + 1] + s[i - n] + s[i + n] - 4 * s[i]) / h2 / kTwoPi;
            if (s[i] == L.g[i]) {
                sol.contact[i] = 1;
                res = std::max(res, -dens);
            } else {
                res = std::max(res, std::abs(dens));
            }
        }
    sol.residual = res;
    sol.exterior = K.whole() ? K.phi : WeightField::constant(0);
    return sol;
}

MAMeasure ma_measure(const EnvelopeSolution& sol, const WeightedSet& K, const ReferenceGeometry& geom) {
    const Chart& chart = sol.s.chart();
    const int n = chart.n();
    const double h2 = chart.h() * chart.h();
    const double floor = std::max(1e-8, 2 * sol.residual);
    MAMeasure out;
    out.measure.kind = MeasureKind::grid_cells;
    for (int k = 1; k < n - 1; ++k)
        for (int j = 1; j < n - 1; ++j) {
            const std::size_t i = chart.index(j, k);
            const double dens = sol.s.laplacian(j, k) / kTwoPi;
            if (dens < 0) {
                if (-dens > floor)
                    throw ConsistencyError("negative Monge-Ampere density " + std::to_string(dens) +
                                           " at node " + std::to_string(i));
                out.clamped = std::min(out.clamped, dens);
                continue;
            }
            if (dens > 0) out.measure.add(chart.node(i), dens * h2, static_cast<std::int64_t>(i));
        }
    if (K.whole()) {
        // Outside the box dd^c phi + omega0 is taken from the weight's analytic Laplacian.
        const DiscreteMeasure ext = fs_exterior_atoms(chart);
        for (std::size_t a = 0; a < ext.size(); ++a) {
            const cplx z = ext.points[a];
            const double lap = sol.exterior.analytic_laplacian(z).value_or(0.0);
            const double ratio = 1 + lap / (kTwoPi * fs_density(z));
            if (ratio < -1e-8) throw ConsistencyError("weight is not omega0-psh outside the chart box");
            if (ratio > 0) out.measure.add(z, ext.masses[a] * ratio, -1);
        }
    }
    (void)geom;
    out.total = out.measure.total();
    if (std::abs(out.total - 1) > 0.05)
        throw ConsistencyError("Monge-Ampere mass " + std::to_string(out.total) +
                               " deviates from 1 by more than 0.05 (under-resolved run)");
    return out;
}

DiscreteMeasure mu_eq(const WeightedSet& K, const ReferenceGeometry& geom, const EnvelopeOptions& opt) {
    return ma_measure(envelope(K, geom, opt), K, geom).measure.normalized();
}

double min_psh_density(const GridFunction& psi) {
    const Chart& chart = psi.chart();
    const int n = chart.n();
    GridFunction t(chart);
    for (std::size_t i = 0; i < chart.size(); ++i) t[i] = psi[i] + fs_potential(chart.node(i));
    double m = kInf;
    for (int k = 1; k < n - 1; ++k)
        for (int j = 1; j < n - 1; ++j) m = std::min(m, t.laplacian(j, k) / kTwoPi);
    return m;
}

std::tuple<double, double, double> max_principle_check(const GridFunction& psi, const WeightedSet& K,
                                                       const EnvelopeSolution& sol, double psh_tol) {
    if (!(psi.chart() == K.chart)) throw PreconditionError("psi and K use different charts");
    const double m = min_psh_density(psi);
    if (m < -psh_tol)
        throw PreconditionError("psi is not discretely omega0-psh (min density " + std::to_string(m) + ")");
    double a = -kInf, b = -kInf, c = -kInf;
    for (std::size_t i = 0; i < K.chart.size(); ++i) {
        const double d = psi[i] - sol.u[i];
        c = std::max(c, d);
        if (!K.in_mask(i)) continue;
        a = std::max(a, psi[i] - K.phi_grid[i]);
        b = std::max(b, d);
    }
    return {a, b, c};
}

std::pair<double, double> lipschitz_projection_check(const WeightedSet& K1, const EnvelopeSolution& s1,
                                                     const WeightedSet& K2, const EnvelopeSolution& s2) {
    if (!(K1.chart == K2.chart) || K1.mask != K2.mask)
        throw PreconditionError("Lipschitz check needs two weights on the same set");
    double lhs = 0, rhs = 0;
    for (std::size_t i = 0; i < K1.chart.size(); ++i) {
        lhs = std::max(lhs, std::abs(s1.u[i] - s2.u[i]));
        if (K1.in_mask(i)) rhs = std::max(rhs, std::abs(K1.phi_grid[i] - K2.phi_grid[i]));
    }
    return {lhs, rhs};
}

std::pair<double, double> lipschitz_projection_check(const WeightedSet& K1, const WeightedSet& K2,
                                                     const ReferenceGeometry& geom,
                                                     const EnvelopeOptions& opt) {
    return lipschitz_projection_check(K1, envelope(K1, geom, opt), K2, envelope(K2, geom, opt));
}

double holder_mass_diagnostic(const GridFunction& u, const std::vector<cplx>& centers,
                              const std::vector<double>& radii) {
    const Chart& chart = u.chart();
    const double h = chart.h();
    std::vector<double> ts;
    for (double t : radii)
        if (t > 4 * h && t < chart.R() / 4) ts.push_back(t);
    if (ts.size() < 2) throw PreconditionError("holder diagnostic needs at least two radii in (4h, R/4)");
    const int n = chart.n();
    double best = kInf;
    for (cplx x : centers) {
        std::vector<double> lx, ly;
        for (double t : ts) {
            double mass = 0;
            for (int k = 1; k < n - 1; ++k)
                for (int j = 1; j < n - 1; ++j)
                    if (std::abs(chart.node(j, k) - x) <= t) mass += std::abs(u.laplacian(j, k));
            mass *= h * h / kTwoPi;
            if (mass <= 0) continue;
            lx.push_back(std::log(t));
            ly.push_back(std::log(mass));
        }
        if (lx.size() < 2) {
            std::cerr << "warning: holder diagnostic skipped a center with empty balls\n";
            continue;
        }
        const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
        const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxy += (lx[i] - mx) * (ly[i] - my);
            sxx += (lx[i] - mx) * (lx[i] - mx);
        }
        best = std::min(best, sxy / sxx);  // m = 2, so the exponent is the slope itself
    }
    if (!std::isfinite(best)) throw NumericError("holder diagnostic had no usable center");
    return best;
}

double holder_mass_diagnostic(const EnvelopeSolution& sol, const std::vector<cplx>& centers,
                              const std::vector<double>& radii) {
    return holder_mass_diagnostic(sol.s, centers, radii);
}

}  // namespace eqlab
