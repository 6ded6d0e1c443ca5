#pragma once

#include <tuple>
#include <utility>
#include <vector>

#include "eqlab/model.hpp"

namespace eqlab {

struct BoundaryRule {
    /// Compact K: s = log|z| + c on the box edge. Whole space: s = obstacle.
    bool log_growth = true;
    double c = 0;
    double ring_radius = 0;
    int c_updates = 0;
};

struct EnvelopeOptions {
    double tol = 1e-9;
    double omega = 1.8;
    long max_sweeps = 2'000'000;
    int max_c_updates = 40;
    /// Coarsest resolution of the nested initialization.
    int coarsest_M = 16;
};

/// P_K phi on the chart. u is in the Fubini-Study frame; s = u + rho0 is the
/// subharmonic unknown of the obstacle problem.
struct EnvelopeSolution {
    GridFunction u{Chart(2, 1)};
    GridFunction s{Chart(2, 1)};
    /// Largest violation of the discrete complementarity conditions, in
    /// obstacle units (s above the obstacle) or density units (dd^c s < 0).
    double residual = 0;
    BoundaryRule boundary_rule;
    long sweeps = 0;
    double last_change = 0;
    std::vector<std::uint8_t> contact;
    WeightField exterior;  // u outside the box (whole space: the weight)

    /// u evaluable everywhere: bilinear inside the box, exterior rule outside.
    [[nodiscard]] WeightField field() const;
};

[[nodiscard]] EnvelopeSolution envelope(const WeightedSet& K, const ReferenceGeometry& geom,
                                        const EnvelopeOptions& opt = {});

struct MAMeasure {
    DiscreteMeasure measure;
    double total = 0;
    double clamped = 0;  // most negative density clamped to zero
};

/// Cell masses of dd^c u + omega0 = dd^c s at interior nodes, plus the
/// exterior omega0 atoms when K is the whole space.
[[nodiscard]] MAMeasure ma_measure(const EnvelopeSolution& sol, const WeightedSet& K,
                                   const ReferenceGeometry& geom);

[[nodiscard]] DiscreteMeasure mu_eq(const WeightedSet& K, const ReferenceGeometry& geom,
                                    const EnvelopeOptions& opt = {});

/// Discrete dd^c(psi) + omega0 density at interior nodes, min over the grid.
[[nodiscard]] double min_psh_density(const GridFunction& psi);

/// (sup_K(psi - phi), sup_K(psi - u), sup_grid(psi - u)).
[[nodiscard]] std::tuple<double, double, double> max_principle_check(const GridFunction& psi,
                                                                     const WeightedSet& K,
                                                                     const EnvelopeSolution& sol,
                                                                     double psh_tol = 1e-8);

/// (sup_grid |u1 - u2|, sup_K |phi1 - phi2|).
[[nodiscard]] std::pair<double, double> lipschitz_projection_check(const WeightedSet& K1,
                                                                   const WeightedSet& K2,
                                                                   const ReferenceGeometry& geom,
                                                                   const EnvelopeOptions& opt = {});
[[nodiscard]] std::pair<double, double> lipschitz_projection_check(const WeightedSet& K1,
                                                                   const EnvelopeSolution& s1,
                                                                   const WeightedSet& K2,
                                                                   const EnvelopeSolution& s2);

/// Least-squares slope of log ||Delta u||_{B(x,t)} against log t, minimized
/// over centers. Radii outside (4h, R/4) are dropped.
[[nodiscard]] double holder_mass_diagnostic(const GridFunction& u, const std::vector<cplx>& centers,
                                            const std::vector<double>& radii);
[[nodiscard]] double holder_mass_diagnostic(const EnvelopeSolution& sol, const std::vector<cplx>& centers,
                                            const std::vector<double>& radii);

}  // namespace eqlab
