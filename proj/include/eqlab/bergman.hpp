#pragma once

#include <span>
#include <string>
#include <vector>

#include "eqlab/envelope.hpp"
#include "eqlab/polyspace.hpp"

namespace eqlab {

struct BergmanDensity {
    GridFunction rho{Chart(2, 1)};
    int degree = 0;
    SectionBasis basis;  // orthonormal for (mu, p phi)
    WeightedNormContext ctx;
    std::string basis_provenance;

    /// rho_p at arbitrary points.
    [[nodiscard]] std::vector<double> at(std::span<const cplx> points) const;
};

/// Sum of |s_j|^2_{p phi} over a basis orthonormal in L^2(mu, p phi), sampled on `chart`.
[[nodiscard]] BergmanDensity bergman_function(const DiscreteMeasure& mu, const WeightField& phi, int p,
                                              const Chart& chart);

/// mu reweighted by rho_p / N_p; throws ConsistencyError if the total is off by more than 1e-6.
[[nodiscard]] DiscreteMeasure bergman_measure(const DiscreteMeasure& mu, const WeightField& phi, int p);

struct RateRow {
    int p = 0;
    double value = 0;
};

struct Tue4Result {
    double zeta = 0;  // certified min of (dd^c phi + omega0) / omega0 over the nodes
    std::vector<RateRow> rows;
    double slope = 0;
};

/// Density ratio (dd^c phi + omega0) / omega0 = 1 + Delta phi / (2 pi fs_density).
[[nodiscard]] double curvature_ratio(const WeightSpec& phi, cplx z);

/// L^1(mu0) distance between rho_p(mu0, phi)/N_p and the curvature ratio, per p.
[[nodiscard]] Tue4Result tue4_experiment(const WeightSpec& phi, const std::vector<int>& degrees,
                                         const Chart& chart);

struct BernsteinMarkovFit {
    std::vector<RateRow> sup_rho;
    double slope = 0;
    double B = 0;  // smallest B with sup rho_p <= B p^B over the run
};

[[nodiscard]] BernsteinMarkovFit bernstein_markov_exponent(const WeightedSet& K, const EnvelopeSolution& sol,
                                                           const std::vector<int>& degrees);

}  // namespace eqlab
