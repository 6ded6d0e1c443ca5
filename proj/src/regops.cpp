#include "eqlab/regops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <random>

#include "eqlab/errors.hpp"

namespace eqlab {

double SmoothingKernel::theta(double x) noexcept {
    if (std::abs(x) >= 1) return 0;
    const double q = 1 - x * x;
    return 15.0 / 16.0 * q * q;
}

void SmoothingKernel::quadrature(int n, std::vector<double>& x, std::vector<double>& w) {
    gauss_legendre(n, -1.0, 1.0, x, w);
    for (int i = 0; i < n; ++i) w[i] *= theta(x[i]);
}

double chi(double t) noexcept {
    if (t >= 1) return 0;
    const double q = 1 - t;
    return std::numbers::e / std::numbers::pi * std::exp(-1 / q) / (q * q);
}

double max_eps(std::span<const double> t, double eps, std::uint64_t seed, int samples) {
    if (!(eps > 0)) throw PreconditionError("max_eps needs eps > 0");
    const std::size_t l = t.size();
    if (l == 0) throw PreconditionError("max_eps of an empty vector");
    if (l <= 3) {
        std::vector<double> x, w;
        SmoothingKernel::quadrature(32, x, w);
        const std::size_t q = x.size();
        std::size_t total = 1;
        for (std::size_t i = 0; i < l; ++i) total *= q;
        // Offsets from max(t), Neumaier-compensated: the kernel has unit mass, so
        // the result is max(t) plus a nonnegative correction up to roundoff.
        const double top = *std::max_element(t.begin(), t.end());
        double acc = 0, comp = 0;
        for (std::size_t k = 0; k < total; ++k) {
            std::size_t r = k;
            double weight = 1, m = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < l; ++i) {
                const std::size_t a = r % q;
                r /= q;
                weight *= w[a];
                m = std::max(m, (t[i] - top) + eps * x[a]);
            }
            const double term = weight * m, sum = acc + term;
            comp += std::abs(acc) >= std::abs(term) ? (acc - sum) + term : (term - sum) + acc;
            acc = sum;
        }
        return top + (acc + comp);
    }
    // theta is the density of 2B - 1 with B ~ Beta(3, 3).
    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> gam(3.0, 1.0);
    double acc = 0;
    for (int s = 0; s < samples; ++s) {
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < l; ++i) {
            const double a = gam(rng), b = gam(rng);
            m = std::max(m, t[i] + eps * (2 * a / (a + b) - 1));
        }
        acc += m;
    }
    return acc / samples;
}

GridFunction max_eps(const std::vector<GridFunction>& u, double eps) {
    if (u.empty()) throw PreconditionError("max_eps of no functions");
    GridFunction out(u[0].chart());
    std::vector<double> t(u.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (std::size_t k = 0; k < u.size(); ++k) t[k] = u[k][i];
        out[i] = max_eps(t, eps);
    }
    return out;
}

Chart interior_chart(const Chart& chart, double r) {
    const int k = static_cast<int>(std::ceil(r / chart.h() - 1e-9));
    if (k >= chart.M()) throw PreconditionError("radius leaves no interior nodes");
    return Chart::subchart(chart.R() - k * chart.h(), chart.M() - k);
}

GridFunction restrict_to(const GridFunction& u, const Chart& inner) {
    const Chart& c = u.chart();
    const int off = c.M() - inner.M();
    GridFunction out(inner);
    for (int k = 0; k < inner.n(); ++k)
        for (int j = 0; j < inner.n(); ++j) out(j, k) = u(j + off, k + off);
    return out;
}

namespace {

// Normalized chi-weighted disc average of radius t at the nodes of `inner`.
GridFunction disc_average(const GridFunction& u, double t, const Chart& inner) {
    const Chart& c = u.chart();
    const double h = c.h();
    const int r = static_cast<int>(std::floor(t / h));
    struct Tap {
        int dj, dk;
        double w;
    };
    std::vector<Tap> taps;
    double sum = 0;
    for (int dk = -r; dk <= r; ++dk)
        for (int dj = -r; dj <= r; ++dj) {
            const double s = (dj * dj + dk * dk) * h * h / (t * t);
            const double w = chi(s);
            if (w <= 0) continue;
            taps.push_back({dj, dk, w});
            sum += w;
        }
    for (auto& tp : taps) tp.w /= sum;
    const int off = c.M() - inner.M();
    GridFunction out(inner);
    for (int k = 0; k < inner.n(); ++k)
        for (int j = 0; j < inner.n(); ++j) {
            double acc = 0;
            for (const auto& tp : taps) acc += tp.w * u(j + off + tp.dj, k + off + tp.dk);
            out(j, k) = acc;
        }
    return out;
}

}  // namespace

GridFunction mollify(const GridFunction& u, double delta) {
    if (delta < 2 * u.chart().h() * (1 - 1e-12)) throw PreconditionError("mollify needs delta >= 2h");
    return disc_average(u, delta, interior_chart(u.chart(), delta));
}

GridFunction psi_average(const GridFunction& psi, double t) {
    const Chart& c = psi.chart();
    if (t < 2 * c.h() * (1 - 1e-12) || t > c.R() / 4 * (1 + 1e-12))
        throw PreconditionError("psi_average needs t in [2h, R/4]");
    return disc_average(psi, t, interior_chart(c, t));
}

GridFunction kiselman_legendre(const GridFunction& psi, double c, double delta, double b, int substeps) {
    const Chart& chart = psi.chart();
    const double h = chart.h();
    if (!(c > 0)) throw PreconditionError("Kiselman-Legendre transform needs c > 0");
    if (delta < 4 * h * (1 - 1e-12) || delta > chart.R() / 4 * (1 + 1e-12))
        throw PreconditionError("Kiselman-Legendre transform needs delta in [4h, R/4]");
    const int K = static_cast<int>(std::ceil(std::log2(delta / (2 * h)) - 1e-12));
    const Chart inner = interior_chart(chart, delta);
    const int n = K * substeps + 1;
    std::vector<GridFunction> f;
    f.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double t = delta * std::exp2(-static_cast<double>(k) / substeps);
        GridFunction avg = disc_average(psi, t, inner);
        const double shift = b * t - b * delta - c * std::log(t / delta);
        for (double& v : avg.values()) v += shift;
        f.push_back(std::move(avg));
    }
    // Grid minimum, lowered by the vertex of the parabola in log t through the
    // minimizer and its neighbours when that vertex falls inside the bracket.
    GridFunction out(inner);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int best = 0;
        for (int k = 1; k < n; ++k)
            if (f[k][i] < f[best][i]) best = k;
        double v = f[best][i];
        if (substeps > 1 && best > 0 && best + 1 < n) {
            const double l = f[best - 1][i], m = f[best][i], r = f[best + 1][i];
            const double curv = l - 2 * m + r;
            if (curv > 0) {
                const double x = 0.5 * (l - r) / curv;  // vertex offset in units of ds
                if (std::abs(x) <= 1) v = std::min(v, m - 0.25 * (l - r) * x);
            }
        }
        out[i] = v;
    }
    return out;
}

double kiselman_refinement_change(const GridFunction& psi, double c, double delta, double b, int substeps) {
    const GridFunction a = kiselman_legendre(psi, c, delta, b, substeps);
    const GridFunction f = kiselman_legendre(psi, c, delta, b, 2 * substeps);
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - f[i]));
    return d;
}

}  // namespace eqlab
