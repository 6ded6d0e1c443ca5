#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "eqlab/model.hpp"
#include "eqlab/polyspace.hpp"

namespace eqlab {

struct Configuration {
    std::vector<cplx> points;
    double log_w = 0;
    int degree = 0;
    std::optional<double> defect;
};

struct SolveReport {
    int iterations = 0;
    std::int64_t exchanges_accepted = 0;
    double final_gain_per_sweep = 0;
    std::size_t candidate_count = 0;
    std::uint64_t seed = 0;
    /// log_w after each accepted exchange, in the solver's internal frame.
    std::vector<double> trace;
};

struct FeketeOptions {
    double tol = 1e-9;
    int max_sweeps = 200;
    int refine = 4;           // refinement factor of the boundary ring
    double ring_width = 2.0;  // in coarse grid steps
    std::uint64_t seed = 0;
};

/// Mask nodes of K plus a refined ring near the boundary and its projections
/// onto the boundary, sorted lexicographically by (Re, Im).
[[nodiscard]] std::vector<cplx> candidate_pool(const WeightedSet& K, const FeketeOptions& opt = {});

/// True if z is a mask node of K or lies in the continuum set.
[[nodiscard]] bool in_set(const WeightedSet& K, cplx z);

/// Greedy and exchange steps over a fixed candidate list. Section values are
/// kept in an orthonormalized column basis so that determinant ratios stay
/// well conditioned at high degree.
class FeketeSolver {
public:
    FeketeSolver(std::vector<cplx> candidates, const SectionBasis& basis, const WeightedNormContext& ctx);

    [[nodiscard]] std::size_t candidate_count() const noexcept { return cand_.size(); }
    [[nodiscard]] const std::vector<cplx>& candidates() const noexcept { return cand_; }

    [[nodiscard]] Configuration leja() const;
    [[nodiscard]] std::pair<Configuration, SolveReport> ascend(const Configuration& start, double tol,
                                                               int max_sweeps) const;

private:
    [[nodiscard]] std::size_t locate(cplx z) const;
    [[nodiscard]] Configuration finish(const std::vector<std::size_t>& idx) const;

    std::vector<cplx> cand_;
    SectionBasis basis_;
    WeightedNormContext ctx_;
    Eigen::MatrixXcd q_;     // candidate rows in the internal basis
    std::vector<double> d_;  // row log-scales
};

[[nodiscard]] Configuration leja_seed(const WeightedSet& K, const SectionBasis& basis,
                                      const WeightedNormContext& ctx);

/// Start points are added to the candidate pool if needed.
[[nodiscard]] std::pair<Configuration, SolveReport> exchange_ascent(const Configuration& start,
                                                                    const WeightedSet& K,
                                                                    const SectionBasis& basis,
                                                                    const WeightedNormContext& ctx,
                                                                    double tol = 1e-9, int max_sweeps = 200);

/// Leja seed followed by exchange ascent, monomial basis, weight of K.
[[nodiscard]] std::pair<Configuration, SolveReport> solve_fekete(const WeightedSet& K, int p,
                                                                 const FeketeOptions& opt = {},
                                                                 BundleFactor factor = BundleFactor::fubini_study);

[[nodiscard]] DiscreteMeasure fekete_measure(const Configuration& P);

/// sigma_P = (best - log_w) / (p N_p); roles are swapped (with a warning) if best < log_w.
[[nodiscard]] double defect(const Configuration& P, double best_known_log_w, int p);

void write_configuration(std::ostream& os, const Chart& chart, const Configuration& P,
                         const SolveReport& report, double tol);
[[nodiscard]] Configuration read_configuration(std::istream& is, Chart* chart = nullptr);

}  // namespace eqlab
