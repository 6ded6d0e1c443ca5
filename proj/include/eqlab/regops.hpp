#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "eqlab/model.hpp"

namespace eqlab {

/// theta(x) = (15/16)(1 - x^2)^2 on [-1, 1]: even, C^1, unit mass.
struct SmoothingKernel {
    int smoothness_order = 1;
    [[nodiscard]] static double theta(double x) noexcept;
    /// Gauss-Legendre nodes and weights of theta on [-1, 1]; weights sum to 1.
    static void quadrature(int n, std::vector<double>& x, std::vector<double>& w);
};

/// Radial profile chi(t) = (e/pi) exp(1/(t-1)) / (1-t)^2 for t < 1, 0 otherwise,
/// normalized so that chi(|zeta|^2) has unit mass on the unit disc.
[[nodiscard]] double chi(double t) noexcept;

/// Regularized maximum: tensor Gauss quadrature (32 nodes per axis) for l <= 3,
/// Monte Carlo with the given seed for l > 3.
[[nodiscard]] double max_eps(std::span<const double> t, double eps, std::uint64_t seed = 0,
                             int samples = 200000);

/// Nodewise max_eps of several grid functions on one chart.
[[nodiscard]] GridFunction max_eps(const std::vector<GridFunction>& u, double eps);

/// Chart shrunk by ceil(r/h) nodes on each side (same spacing).
[[nodiscard]] Chart interior_chart(const Chart& chart, double r);

/// u * rho_delta with rho = chi(|w|^2), on the delta-interior chart.
[[nodiscard]] GridFunction mollify(const GridFunction& u, double delta);

/// Psi(z, t): chi-weighted average of psi over the disc of radius t (flat chart), on the t-interior chart.
[[nodiscard]] GridFunction psi_average(const GridFunction& psi, double t);

/// inf over t in {delta 2^{-k/substeps}} of Psi(z,t) + b t - b delta - c log(t/delta), on the delta-interior chart.
[[nodiscard]] GridFunction kiselman_legendre(const GridFunction& psi, double c, double delta, double b,
                                             int substeps = 8);

/// sup |psi_{c,delta}(substeps) - psi_{c,delta}(2 substeps)|; above 1e-6 the t-grid is under-resolved.
[[nodiscard]] double kiselman_refinement_change(const GridFunction& psi, double c, double delta, double b,
                                                int substeps = 8);

/// Values of u at the nodes of a sub-chart with the same spacing.
[[nodiscard]] GridFunction restrict_to(const GridFunction& u, const Chart& inner);

}  // namespace eqlab
