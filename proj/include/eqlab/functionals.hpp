#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "eqlab/envelope.hpp"
#include "eqlab/fekete.hpp"
#include "eqlab/polyspace.hpp"

namespace eqlab {

/// -(1/(2 p N_p)) log det of the Gram under (mu, p phi1) of a basis
/// orthonormal under (mu, p phi2).
[[nodiscard]] double l_p_difference(const DiscreteMeasure& mu, const WeightField& phi1, const WeightField& phi2,
                                    int p);

/// L_p(mu0, phi), normalized so that L_p(mu0, 0) = 0.
[[nodiscard]] double l_p_normalized(const DiscreteMeasure& mu0, const WeightField& phi, int p);

struct Bracket {
    double lower = 0;
    double upper = 0;
    double sup_rho = 0;
    [[nodiscard]] double width() const { return upper - lower; }
};

/// upper = L_p(mu0, P_K phi); lower = upper - (1/2p) log sup_grid rho_p(mu0, P_K phi).
[[nodiscard]] Bracket l_p_K_bracket(const WeightedSet& K, const EnvelopeSolution& sol, int p);

struct EnergyResult {
    double value = 0;   // E_eq(K, phi) - E_eq(X, 0)
    double path = 0;    // E_eq(K, phi) - E_eq(K, 0)
    double offset = 0;  // E_eq(K, 0) - E_eq(X, 0)
    std::optional<double> doubling_change;
};

/// Gauss-Legendre path integrals of <v, mu_eq> as described for E_eq; with
/// check_doubling the quadrature is repeated with twice the nodes.
[[nodiscard]] EnergyResult energy_difference(const WeightedSet& K, const ReferenceGeometry& geom,
                                             int quad_nodes = 8, const EnvelopeOptions& opt = {},
                                             bool check_doubling = false);

/// (1/(p N_p)) log of the weighted determinant of a (mu0, 0)-orthonormal basis at the configuration.
[[nodiscard]] double d_p(const WeightedSet& K, const Configuration& best, int p);

struct FunctionalReport {
    int p = 0;
    double L_p_mu0 = 0;
    Bracket L_p_K_bracket;
    double E_eq = 0;
    double D_p = 0;
    double eps_p = 0;
    std::optional<double> V_p;
    std::optional<double> W_p;
    [[nodiscard]] double gap() const { return std::abs(D_p + E_eq); }
};

/// Assembles the report from an envelope, an energy value and a Fekete configuration.
[[nodiscard]] FunctionalReport gap_report(const WeightedSet& K, const EnvelopeSolution& sol, double E_eq,
                                          const Configuration& best, int p);

/// V_p(phi1, phi2) for weights omega0-psh on the whole space.
[[nodiscard]] double v_p(const WeightField& phi1, const WeightField& phi2, const Chart& chart, int p,
                         int quad_nodes = 8);

struct KeyLemmaMargin {
    double measured = 0;
    double bound = 0;
    bool hypotheses_hold = false;
};

/// F and G sampled on an odd, uniform grid over [-sqrt(eps), sqrt(eps)].
[[nodiscard]] KeyLemmaMargin key_lemma_margin(const std::vector<double>& F, const std::vector<double>& G,
                                              double eps, double M);

}  // namespace eqlab
