#include "eqlab/bergman.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "eqlab/errors.hpp"

namespace eqlab {

namespace {

double loglog_slope(const std::vector<RateRow>& rows) {
    const double n = static_cast<double>(rows.size());
    double mx = 0, my = 0;
    for (const auto& r : rows) {
        mx += std::log(r.p) / n;
        my += std::log(r.value) / n;
    }
    double sxy = 0, sxx = 0;
    for (const auto& r : rows) {
        sxy += (std::log(r.p) - mx) * (std::log(r.value) - my);
        sxx += (std::log(r.p) - mx) * (std::log(r.p) - mx);
    }
    return sxy / sxx;
}

}  // namespace

std::vector<double> BergmanDensity::at(std::span<const cplx> points) const {
    std::vector<double> ls;
    const Eigen::MatrixXcd v = evaluate_scaled(basis, points, ctx, ls);
    std::vector<double> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        out[i] = v.row(static_cast<Eigen::Index>(i)).squaredNorm() * std::exp(2 * ls[i]);
    return out;
}

BergmanDensity bergman_function(const DiscreteMeasure& mu, const WeightField& phi, int p, const Chart& chart) {
    BergmanDensity b;
    b.degree = p;
    b.ctx = WeightedNormContext{phi, p, BundleFactor::fubini_study};
    const SectionBasis mono = SectionBasis::monomial(p);
    b.basis = orthonormalize(mono, gram(mono, mu, b.ctx));
    b.basis_provenance = b.basis.provenance;
    std::vector<cplx> nodes(chart.size());
    for (std::size_t i = 0; i < chart.size(); ++i) nodes[i] = chart.node(i);
    b.rho = GridFunction(chart, b.at(nodes));
    return b;
}

DiscreteMeasure bergman_measure(const DiscreteMeasure& mu, const WeightField& phi, int p) {
    const WeightedNormContext ctx{phi, p, BundleFactor::fubini_study};
    const SectionBasis mono = SectionBasis::monomial(p);
    BergmanDensity b;
    b.basis = orthonormalize(mono, gram(mono, mu, ctx));
    b.ctx = ctx;
    const std::vector<double> rho = b.at(mu.points);
    const double n = static_cast<double>(dimension(p, 1));
    DiscreteMeasure out = mu;
    for (std::size_t i = 0; i < mu.size(); ++i) out.masses[i] = mu.masses[i] * rho[i] / n;
    const double t = out.total();
    if (std::abs(t - mu.total()) > 1e-6 * mu.total())
        throw ConsistencyError("Bergman measure mass " + std::to_string(t) + " differs from the input mass");
    return out.normalized();
}

double curvature_ratio(const WeightSpec& phi, cplx z) {
    return 1 + phi.laplacian(z) / (2 * std::numbers::pi * fs_density(z));
}

Tue4Result tue4_experiment(const WeightSpec& phi, const std::vector<int>& degrees, const Chart& chart) {
    Tue4Result res;
    res.zeta = std::numeric_limits<double>::infinity();
    std::size_t worst = 0;
    for (std::size_t i = 0; i < chart.size(); ++i) {
        const double r = curvature_ratio(phi, chart.node(i));
        if (r < res.zeta) {
            res.zeta = r;
            worst = i;
        }
    }
    if (!(res.zeta > 0)) {
        const cplx z = chart.node(worst);
        throw PreconditionError("dd^c phi + omega0 is not positive at node " + std::to_string(worst) + " (z = " +
                                std::to_string(z.real()) + "+" + std::to_string(z.imag()) +
                                "i, ratio " + std::to_string(res.zeta) + ")");
    }
    const DiscreteMeasure mu0 = fs_measure(chart);
    const WeightField w = WeightField::from_spec(phi);
    std::vector<double> ratio(mu0.size());
    for (std::size_t i = 0; i < mu0.size(); ++i) ratio[i] = curvature_ratio(phi, mu0.points[i]);
    for (int p : degrees) {
        const WeightedNormContext ctx{w, p, BundleFactor::fubini_study};
        const SectionBasis mono = SectionBasis::monomial(p);
        BergmanDensity b;
        b.basis = orthonormalize(mono, gram(mono, mu0, ctx));
        b.ctx = ctx;
        const std::vector<double> rho = b.at(mu0.points);
        const double n = static_cast<double>(dimension(p, 1));
        double err = 0;
        for (std::size_t i = 0; i < mu0.size(); ++i) err += mu0.masses[i] * std::abs(rho[i] / n - ratio[i]);
        res.rows.push_back({p, err});
    }
    if (res.rows.size() >= 2) {
        bool positive = std::all_of(res.rows.begin(), res.rows.end(), [](const RateRow& r) { return r.value > 0; });
        res.slope = positive ? loglog_slope(res.rows) : 0;
    }
    return res;
}

BernsteinMarkovFit bernstein_markov_exponent(const WeightedSet& K, const EnvelopeSolution& sol,
                                             const std::vector<int>& degrees) {
    const Chart& chart = K.chart;
    const DiscreteMeasure mu0 = fs_measure(chart);
    const WeightField psi = sol.field();
    BernsteinMarkovFit fit;
    for (int p : degrees) {
        const BergmanDensity b = bergman_function(mu0, psi, p, chart);
        const double sup = *std::max_element(b.rho.values().begin(), b.rho.values().end());
        fit.sup_rho.push_back({p, sup});
    }
    fit.slope = fit.sup_rho.size() >= 2 ? loglog_slope(fit.sup_rho) : 0;
    for (const auto& r : fit.sup_rho) {
        // smallest B > 0 with B p^B >= sup, by bisection on the increasing map
        double lo = 0, hi = 1;
        while (hi * std::pow(r.p, hi) < r.value) hi *= 2;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (mid * std::pow(r.p, mid) < r.value ? lo : hi) = mid;
        }
        fit.B = std::max(fit.B, hi);
    }
    return fit;
}

}  // namespace eqlab
