#include "eqlab/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "eqlab/bergman.hpp"
#include "eqlab/errors.hpp"

namespace eqlab {

double l_p_difference(const DiscreteMeasure& mu, const WeightField& phi1, const WeightField& phi2, int p) {
    if (p < 1) throw PreconditionError("L_p needs p >= 1");
    const SectionBasis mono = SectionBasis::monomial(p);
    const double g1 = gram(mono, mu, {phi1, p, BundleFactor::fubini_study}).log_det();
    const double g2 = gram(mono, mu, {phi2, p, BundleFactor::fubini_study}).log_det();
    return -(g1 - g2) / (2.0 * p * static_cast<double>(mono.dim));
}

double l_p_normalized(const DiscreteMeasure& mu0, const WeightField& phi, int p) {
    return l_p_difference(mu0, phi, WeightField::constant(0), p);
}

Bracket l_p_K_bracket(const WeightedSet& K, const EnvelopeSolution& sol, int p) {
    const DiscreteMeasure mu0 = fs_measure(K.chart);
    const WeightField psi = sol.field();
    Bracket b;
    b.upper = l_p_normalized(mu0, psi, p);
    const BergmanDensity rho = bergman_function(mu0, psi, p, K.chart);
    b.sup_rho = *std::max_element(rho.rho.values().begin(), rho.rho.values().end());
    b.lower = b.upper - std::log(b.sup_rho) / (2.0 * p);
    return b;
}

namespace {

double pair(const WeightField& v, const DiscreteMeasure& mu) {
    double s = 0;
    for (std::size_t i = 0; i < mu.size(); ++i) s += mu.masses[i] * v(mu.points[i]);
    return s;
}

// int_0^1 <v, mu_eq(K_t)> dt where K_t carries the weight t v.
double path_integral(const WeightedSet& K, const WeightField& v, const ReferenceGeometry& geom, int nodes,
                     const EnvelopeOptions& opt) {
    std::vector<double> t, w;
    gauss_legendre(nodes, 0.0, 1.0, t, w);
    double acc = 0;
    for (int i = 0; i < nodes; ++i) {
        const WeightedSet Kt = make_weighted_set(K.chart, K.shape, WeightField::linear(t[i], v, 0.0, WeightField::constant(0)));
        acc += w[i] * pair(v, mu_eq(Kt, geom, opt));
    }
    return acc;
}

EnergyResult energy_once(const WeightedSet& K, const ReferenceGeometry& geom, int nodes,
                         const EnvelopeOptions& opt) {
    EnergyResult r;
    r.path = path_integral(K, K.phi, geom, nodes, opt);
    if (!K.whole()) {
        // E_eq(K, 0) = E_eq(X, P_K 0), reached along t P_K 0 on the whole space.
        const WeightedSet K0 = K.with_weight(WeightField::constant(0));
        const WeightField psi = envelope(K0, geom, opt).field();
        const WeightedSet X = make_weighted_set(K.chart, SetShape::parse("whole"), psi);
        r.offset = path_integral(X, psi, geom, nodes, opt);
    }
    r.value = r.path + r.offset;
    return r;
}

}  // namespace

EnergyResult energy_difference(const WeightedSet& K, const ReferenceGeometry& geom, int quad_nodes,
                               const EnvelopeOptions& opt, bool check_doubling) {
    if (quad_nodes < 4) throw PreconditionError("energy quadrature needs at least 4 nodes");
    EnergyResult r = energy_once(K, geom, quad_nodes, opt);
    if (check_doubling) r.doubling_change = std::abs(energy_once(K, geom, 2 * quad_nodes, opt).value - r.value);
    return r;
}

double d_p(const WeightedSet& K, const Configuration& best, int p) {
    const DiscreteMeasure mu0 = fs_measure(K.chart);
    const SectionBasis mono = SectionBasis::monomial(p);
    const WeightField zero = WeightField::constant(0);
    const SectionBasis s = orthonormalize(mono, gram(mono, mu0, {zero, p, BundleFactor::fubini_study}));
    const double lw = log_vandermonde(s, best.points, {K.phi, p, BundleFactor::fubini_study});
    return lw / (p * static_cast<double>(s.dim));
}

FunctionalReport gap_report(const WeightedSet& K, const EnvelopeSolution& sol, double E_eq,
                            const Configuration& best, int p) {
    FunctionalReport r;
    r.p = p;
    r.L_p_K_bracket = l_p_K_bracket(K, sol, p);
    r.L_p_mu0 = r.L_p_K_bracket.upper;
    r.E_eq = E_eq;
    r.D_p = d_p(K, best, p);
    r.eps_p = std::abs(r.L_p_mu0 - E_eq);
    r.V_p = r.eps_p;  // V_p(P_K phi, 0)
    if (!(r.eps_p >= 0)) throw ConsistencyError("eps_p is negative or not a number");
    return r;
}

double v_p(const WeightField& phi1, const WeightField& phi2, const Chart& chart, int p, int quad_nodes) {
    const ReferenceGeometry geom = fs_geometry(chart);
    const DiscreteMeasure mu0 = fs_measure(chart);
    auto energy = [&](const WeightField& phi) {
        return energy_difference(make_weighted_set(chart, SetShape::parse("whole"), phi), geom, quad_nodes).value;
    };
    return std::abs(l_p_difference(mu0, phi1, phi2, p) - (energy(phi1) - energy(phi2)));
}

KeyLemmaMargin key_lemma_margin(const std::vector<double>& F, const std::vector<double>& G, double eps,
                                double M) {
    const std::size_t n = F.size();
    if (n != G.size() || n < 5 || n % 2 == 0)
        throw PreconditionError("key lemma samples must be two odd-length series of equal size");
    const double r = std::sqrt(eps);
    const double dt = 2 * r / static_cast<double>(n - 1);
    const std::size_t c = n / 2;
    constexpr double tol = 1e-12;
    KeyLemmaMargin out;
    out.bound = (2 + M) * r;
    bool ok = std::abs(F[c] - G[c]) <= eps + tol;
    for (std::size_t i = 0; i < n; ++i) ok = ok && F[i] >= G[i] - eps - tol;
    for (std::size_t i = 1; i + 1 < n; ++i) ok = ok && F[i - 1] - 2 * F[i] + F[i + 1] <= tol;
    const double g0 = (G[c + 1] - G[c - 1]) / (2 * dt);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double gi = (G[i + 1] - G[i - 1]) / (2 * dt);
        ok = ok && std::abs(gi - g0) <= M * r * (1 + 1e-9) + tol;
    }
    out.hypotheses_hold = ok;
    out.measured = std::abs((F[c + 1] - F[c - 1]) / (2 * dt) - g0);
    return out;
}

}  // namespace eqlab
