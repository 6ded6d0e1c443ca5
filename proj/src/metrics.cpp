#include "eqlab/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "eqlab/errors.hpp"

namespace eqlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2 * kPi;

void require_probability(const DiscreteMeasure& m, const char* what) {
    for (double x : m.masses)
        if (x < 0) throw ConsistencyError(std::string(what) + " has a negative mass");
    if (std::abs(m.total() - 1) > 1e-9) throw PreconditionError(std::string(what) + " is not a probability measure");
}

struct Event {
    double x;
    double dm;
};

std::vector<Event> events(const DiscreteMeasure& mu, const DiscreteMeasure& nu, bool angle) {
    std::vector<Event> ev;
    auto coord = [angle](cplx z) {
        if (!angle) return z.real();
        double t = std::arg(z);
        if (t < 0) t += kTwoPi;
        return t;
    };
    for (std::size_t i = 0; i < mu.size(); ++i) ev.push_back({coord(mu.points[i]), mu.masses[i]});
    for (std::size_t i = 0; i < nu.size(); ++i) ev.push_back({coord(nu.points[i]), -nu.masses[i]});
    std::sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) { return a.x < b.x; });
    return ev;
}

void check_carrier(const DiscreteMeasure& m, Carrier c, double tol) {
    for (cplx z : m.points) {
        const double d = c == Carrier::line ? std::abs(z.imag()) : std::abs(std::abs(z) - 1);
        if (d > tol) throw PreconditionError("measure support leaves the declared carrier");
    }
}

// Weighted median of values v with weights w.
double weighted_median(std::vector<std::pair<double, double>> vw) {
    std::sort(vw.begin(), vw.end());
    double total = 0;
    for (const auto& p : vw) total += p.second;
    double acc = 0;
    for (const auto& p : vw) {
        acc += p.second;
        if (acc >= 0.5 * total) return p.first;
    }
    return vw.empty() ? 0 : vw.back().first;
}

}  // namespace

double w1_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu, Carrier carrier, double tol) {
    require_probability(mu, "first measure");
    require_probability(nu, "second measure");
    check_carrier(mu, carrier, tol);
    check_carrier(nu, carrier, tol);
    const auto ev = events(mu, nu, carrier == Carrier::circle);
    if (carrier == Carrier::line) {
        double d = 0, w = 0;
        for (std::size_t k = 0; k + 1 < ev.size(); ++k) {
            d += ev[k].dm;
            w += std::abs(d) * (ev[k + 1].x - ev[k].x);
        }
        return w;
    }
    // Circle: min over alpha of int |D - alpha|, alpha the arclength-weighted median of D.
    std::vector<std::pair<double, double>> seg;
    double d = 0, prev = 0;
    for (const auto& e : ev) {
        seg.push_back({d, e.x - prev});
        d += e.dm;
        prev = e.x;
    }
    seg.push_back({d, kTwoPi - prev});
    const double alpha = weighted_median(seg);
    double w = 0;
    for (const auto& s : seg) w += std::abs(s.first - alpha) * s.second;
    return w;
}

double w1_circle_uniform(const DiscreteMeasure& mu, double tol) {
    require_probability(mu, "measure");
    check_carrier(mu, Carrier::circle, tol);
    const auto ev = events(mu, DiscreteMeasure{}, true);
    // Segments [l, r) on which D(theta) = c - theta / (2 pi).
    struct Seg {
        double l, r, c;
    };
    std::vector<Seg> seg;
    double c = 0, prev = 0;
    for (const auto& e : ev) {
        if (e.x > prev) seg.push_back({prev, e.x, c});
        c += e.dm;
        prev = e.x;
    }
    if (kTwoPi > prev) seg.push_back({prev, kTwoPi, c});
    auto below = [&](double a) {  // Lebesgue measure of {D < a}
        double m = 0;
        for (const auto& s : seg) {
            const double root = kTwoPi * (s.c - a);  // D < a  <=>  theta > root
            m += std::clamp(s.r - std::max(root, s.l), 0.0, s.r - s.l);
        }
        return m;
    };
    double lo = -2, hi = 2;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (below(mid) < kPi ? lo : hi) = mid;
    }
    const double alpha = 0.5 * (lo + hi);
    double w = 0;
    for (const auto& s : seg) {
        const double gl = s.c - s.l / kTwoPi - alpha, gr = s.c - s.r / kTwoPi - alpha;
        if (gl * gr >= 0)
            w += 0.5 * (std::abs(gl) + std::abs(gr)) * (s.r - s.l);
        else
            w += kPi * (gl * gl + gr * gr);
    }
    return w;
}

double w1_interval_arcsine(const DiscreteMeasure& mu, double tol) {
    require_probability(mu, "measure");
    check_carrier(mu, Carrier::line, tol);
    for (cplx z : mu.points)
        if (std::abs(z.real()) > 1 + tol) throw PreconditionError("measure support leaves [-1, 1]");
    auto G = [](double x) {
        x = std::clamp(x, -1.0, 1.0);
        return 0.5 * x + (x * std::asin(x) + std::sqrt(1 - x * x)) / kPi;
    };
    auto piece = [&](double a, double b, double c) {  // int_a^b |c - F|
        if (b <= a) return 0.0;
        const double xs = std::sin(kPi * (std::clamp(c, 0.0, 1.0) - 0.5));
        auto part = [&](double l, double r) { return std::abs(c * (r - l) - (G(r) - G(l))); };
        if (xs > a && xs < b) return part(a, xs) + part(xs, b);
        return part(a, b);
    };
    const auto ev = events(mu, DiscreteMeasure{}, false);
    double c = 0, prev = -1, w = 0;
    for (const auto& e : ev) {
        const double x = std::clamp(e.x, -1.0, 1.0);
        w += piece(prev, x, c);
        c += e.dm;
        prev = x;
    }
    w += piece(prev, 1.0, c);
    return w;
}

double sphere_distance(cplx z, cplx w) {
    const double chord = std::abs(z - w) / std::sqrt((1 + std::norm(z)) * (1 + std::norm(w)));
    return 2 * std::asin(std::min(1.0, chord));
}

SphereW1 w1_sphere(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    require_probability(mu, "first measure");
    require_probability(nu, "second measure");
    const auto n = static_cast<Eigen::Index>(mu.size());
    const auto m = static_cast<Eigen::Index>(nu.size());
    Eigen::MatrixXd d(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j) d(i, j) = sphere_distance(mu.points[i], nu.points[j]);
    Eigen::VectorXd a(n), f = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) a(i) = mu.masses[i];

    auto smoothed = [&](const Eigen::VectorXd& g, double eps, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) {
        double val = a.dot(g);
        if (grad) *grad = a;
        if (hess) hess->setZero(n, n);
        Eigen::VectorXd p(n);
        for (Eigen::Index j = 0; j < m; ++j) {
            double mn = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < n; ++i) mn = std::min(mn, d(i, j) - g(i));
            double s = 0;
            for (Eigen::Index i = 0; i < n; ++i) s += (p(i) = std::exp(-(d(i, j) - g(i) - mn) / eps));
            const double b = nu.masses[j];
            val += b * (mn - eps * std::log(s));
            if (!grad) continue;
            p /= s;
            *grad -= b * p;
            if (!hess) continue;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (p(i) < 1e-16) continue;
                (*hess)(i, i) += b * p(i) / eps;
                for (Eigen::Index k = 0; k < n; ++k)
                    if (p(k) >= 1e-16) (*hess)(i, k) -= b * p(i) * p(k) / eps;
            }
        }
        return val;
    };

    SphereW1 out;
    const double dmax = d.maxCoeff();
    for (double eps = 0.1 * std::max(dmax, 1e-3); eps >= 1e-7; eps *= 0.25) {
        out.final_eps = eps;
        for (int it = 0; it < 60; ++it) {
            Eigen::VectorXd grad;
            Eigen::MatrixXd hess;
            const double v0 = smoothed(f, eps, &grad, &hess);
            if (grad.lpNorm<1>() < 1e-12) break;
            // hess is the negated Hessian (positive semidefinite); constants are its null space.
            const double ridge = 1e-12 * std::max(1.0, hess.diagonal().maxCoeff());
            hess.diagonal().array() += ridge;
            Eigen::VectorXd step = hess.ldlt().solve(grad);
            if (!step.allFinite()) step = grad;
            const double decrement = grad.dot(step);  // Newton decrement squared
            if (decrement < 1e-14 * std::max(1.0, std::abs(v0))) break;
            double t = 1;
            bool moved = false;
            for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
                const Eigen::VectorXd trial = f + t * step;
                if (smoothed(trial, eps, nullptr, nullptr) >= v0 + 1e-4 * t * grad.dot(step)) {
                    f = trial;
                    moved = true;
                    break;
                }
            }
            ++out.newton_steps;
            if (!moved) break;
        }
        out.smoothed = smoothed(f, eps, nullptr, nullptr);
    }
    double hard = a.dot(f);
    for (Eigen::Index j = 0; j < m; ++j) hard += nu.masses[j] * (d.col(j) - f).minCoeff();
    out.value = hard;
    return out;
}

DiscreteMeasure uniform_circle_measure(int n) {
    DiscreteMeasure mu;
    for (int j = 0; j < n; ++j) mu.add(std::polar(1.0, kTwoPi * (j + 0.5) / n), 1.0 / n);
    return mu;
}

DiscreteMeasure arcsine_measure(int n) {
    DiscreteMeasure mu;
    for (int j = 0; j < n; ++j) mu.add(cplx(std::cos(kPi * (j + 0.5) / n), 0.0), 1.0 / n);
    return mu;
}

DiscreteMeasure radial_measure(const std::function<double(double)>& cdf, int n_r, int n_theta) {
    DiscreteMeasure mu;
    const double m = 1.0 / (static_cast<double>(n_r) * n_theta);
    for (int k = 0; k < n_r; ++k) {
        const double target = (k + 0.5) / n_r;
        double lo = 0, hi = 1;  // bisection on s = r / (1 + r)
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (cdf(mid / (1 - mid)) < target ? lo : hi) = mid;
        }
        const double s = 0.5 * (lo + hi);
        const double r = s / (1 - s);
        for (int j = 0; j < n_theta; ++j)
            mu.add(std::polar(r, kTwoPi * (j + 0.5 * (1 + k % 2)) / n_theta), m);
    }
    return mu;
}

// ------------------------------------------------------------ dictionaries

double TestFunction::operator()(cplx z) const {
    if (kind == plane_wave) return amplitude * std::cos(center.real() * z.real() + center.imag() * z.imag() + phase);
    return amplitude * std::exp(-std::norm(z - center) / (2 * scale * scale));
}

double TestFunction::sup_bound() const { return 1.0; }

double TestFunction::grad_bound() const {
    return kind == plane_wave ? std::abs(center) : 1.0 / (scale * std::sqrt(std::numbers::e));
}

double TestFunction::hess_bound() const {
    return kind == plane_wave ? std::norm(center) : 1.0 / (scale * scale);
}

double holder_norm_bound(const TestFunction& f, double gamma) {
    if (!(gamma > 0) || gamma > 2) throw PreconditionError("gamma must lie in (0, 2]");
    const double S = f.sup_bound(), L = f.grad_bound(), H = f.hess_bound();
    auto low = [&](double g) { return S + std::max(2 * S, std::pow(2 * S, 1 - g) * std::pow(L, g)); };
    if (gamma <= 1) return low(gamma);
    const double g = gamma - 1;
    return std::max(low(1.0), S + L + std::max(2 * L, std::pow(2 * L, 1 - g) * std::pow(H, g)));
}

TestDictionary TestDictionary::make(double gamma, std::uint64_t seed, int size) {
    TestDictionary d;
    d.gamma = gamma;
    d.seed = seed;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int k = 0; k < size; ++k) {
        TestFunction f;
        if (k % 2 == 0) {
            f.kind = TestFunction::plane_wave;
            const double mag = 0.5 * std::pow(128.0, u01(rng));
            f.center = std::polar(mag, kTwoPi * u01(rng));
            f.phase = kTwoPi * u01(rng);
        } else {
            f.kind = TestFunction::bump;
            f.center = cplx(3 * u01(rng) - 1.5, 3 * u01(rng) - 1.5);
            f.scale = 0.02 * std::pow(50.0, u01(rng));
        }
        d.functions.push_back(f);
    }
    return d.renormalized(gamma);
}

TestDictionary TestDictionary::renormalized(double gamma) const {
    TestDictionary d = *this;
    d.gamma = gamma;
    for (auto& f : d.functions) f.amplitude = 1.0 / holder_norm_bound(f, gamma);
    return d;
}

double TestDictionary::lipschitz() const {
    double l = 0;
    for (const auto& f : functions) l = std::max(l, f.amplitude * f.grad_bound());
    return l;
}

double dist_gamma_lower(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const TestDictionary& dict) {
    double best = 0;
    for (const auto& f : dict.functions) {
        double s = 0;
        for (std::size_t i = 0; i < mu.size(); ++i) s += mu.masses[i] * f(mu.points[i]);
        for (std::size_t i = 0; i < nu.size(); ++i) s -= nu.masses[i] * f(nu.points[i]);
        best = std::max(best, std::abs(s));
    }
    return best;
}

InterpolationCheck interpolation_check(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double gamma,
                                       double gamma_prime, std::uint64_t seed, std::optional<double> w1,
                                       int size) {
    if (gamma_prime < gamma) throw PreconditionError("interpolation check needs gamma' >= gamma");
    const TestDictionary dg = TestDictionary::make(gamma, seed, size);
    InterpolationCheck r;
    r.mid = dist_gamma_lower(mu, nu, dg);
    r.lhs = dist_gamma_lower(mu, nu, dg.renormalized(gamma_prime));
    if (w1) r.rhs = std::pow(*w1, std::min(gamma, 1.0));
    return r;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.size() < 4) throw PreconditionError("rate fit needs at least 4 points");
    RateFit fit;
    fit.pairs = pairs;
    const double n = static_cast<double>(pairs.size());
    double mx = 0, my = 0;
    for (const auto& [p, v] : pairs) {
        if (!(v > 0) || !(p > 0)) throw PreconditionError("rate fit needs positive values");
        mx += std::log(p) / n;
        my += std::log(v) / n;
    }
    double sxx = 0, sxy = 0;
    for (const auto& [p, v] : pairs) {
        sxx += (std::log(p) - mx) * (std::log(p) - mx);
        sxy += (std::log(p) - mx) * (std::log(v) - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0;
    for (const auto& [p, v] : pairs) {
        const double e = std::log(v) - (fit.intercept + fit.slope * std::log(p));
        ssr += e * e;
    }
    fit.slope_stderr = std::sqrt(ssr / (n - 2) / sxx);
    return fit;
}

}  // namespace eqlab
