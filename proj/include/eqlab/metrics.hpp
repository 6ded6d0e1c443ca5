#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "eqlab/model.hpp"

namespace eqlab {

enum class Carrier { line, circle };

/// Exact W1 between two discrete measures on the real axis or the unit circle
/// (geodesic metric). Supports must lie within `tol` of the carrier.
[[nodiscard]] double w1_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu, Carrier carrier,
                           double tol = 1e-9);

/// Exact W1 between a discrete measure on the unit circle and uniform arclength.
[[nodiscard]] double w1_circle_uniform(const DiscreteMeasure& mu, double tol = 1e-9);

/// Exact W1 between a discrete measure on [-1,1] and the arcsine law.
[[nodiscard]] double w1_interval_arcsine(const DiscreteMeasure& mu, double tol = 1e-9);

/// Great-circle distance on the unit sphere between stereographic images of z and w.
[[nodiscard]] double sphere_distance(cplx z, cplx w);

struct SphereW1 {
    double value = 0;      // hard-min dual value, a lower bound on the discrete W1
    double smoothed = 0;   // entropic dual value at the final temperature
    double final_eps = 0;
    int newton_steps = 0;
};

/// W1 on the sphere between two discrete probability measures by the dual
/// of the transport problem, optimized over the potentials of mu.
[[nodiscard]] SphereW1 w1_sphere(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Reference discretizations.
[[nodiscard]] DiscreteMeasure uniform_circle_measure(int n);
[[nodiscard]] DiscreteMeasure arcsine_measure(int n);
/// Probability measure on the sphere with rotation-invariant |z|-law given by
/// its CDF (increasing, onto (0,1)), split into n_r rings of n_theta atoms.
[[nodiscard]] DiscreteMeasure radial_measure(const std::function<double(double)>& cdf, int n_r, int n_theta);

struct TestFunction {
    enum Kind { plane_wave, bump } kind = plane_wave;
    cplx center;    // bump center, or wave vector for plane waves
    double scale = 1;  // bump width
    double phase = 0;
    double amplitude = 1;
    [[nodiscard]] double operator()(cplx z) const;
    /// Certified bounds of sup|v|, sup|grad v|, sup|Hess v| for amplitude 1.
    [[nodiscard]] double sup_bound() const;
    [[nodiscard]] double grad_bound() const;
    [[nodiscard]] double hess_bound() const;
};

/// Certified C^gamma norm of an amplitude-one function; nondecreasing in gamma.
[[nodiscard]] double holder_norm_bound(const TestFunction& f, double gamma);

struct TestDictionary {
    std::vector<TestFunction> functions;
    double gamma = 1;
    std::uint64_t seed = 0;
    /// Seeded plane waves and Gaussian bumps, each rescaled to C^gamma norm <= 1.
    static TestDictionary make(double gamma, std::uint64_t seed, int size = 256);
    /// The same members rescaled for another exponent.
    [[nodiscard]] TestDictionary renormalized(double gamma) const;
    /// Largest certified Lipschitz constant of a member.
    [[nodiscard]] double lipschitz() const;
};

[[nodiscard]] double dist_gamma_lower(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                      const TestDictionary& dict);

struct InterpolationCheck {
    double lhs = 0;  // dist_{gamma'} lower estimate
    double mid = 0;  // dist_gamma lower estimate
    double rhs = 0;  // W1-based surrogate w1^{min(gamma,1)} (0 when no w1 is given)
};

[[nodiscard]] InterpolationCheck interpolation_check(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                                     double gamma, double gamma_prime, std::uint64_t seed,
                                                     std::optional<double> w1 = std::nullopt, int size = 256);

struct RateFit {
    std::vector<std::pair<double, double>> pairs;
    double slope = 0;
    double intercept = 0;
    double slope_stderr = 0;
};

/// Least squares of log value against log p over at least 4 points.
[[nodiscard]] RateFit fit_rate(const std::vector<std::pair<double, double>>& pairs);

}  // namespace eqlab
