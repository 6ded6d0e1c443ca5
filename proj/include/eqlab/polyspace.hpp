#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "eqlab/model.hpp"

namespace eqlab {

/// N_p = C(p+n, n); throws ConfigError on overflow or invalid input.
[[nodiscard]] std::int64_t dimension(int p, int n);

enum class BasisKind { monomial, orthonormalized };

/// Basis of polynomials of degree <= p. Row i of coeff holds the monomial
/// coefficients of section i; coeff is lower triangular.
struct SectionBasis {
    int degree = 0;
    int dim = 1;
    BasisKind kind = BasisKind::monomial;
    Eigen::MatrixXcd coeff;
    std::string provenance;

    static SectionBasis monomial(int p);
    /// Sum of log|coeff(i,i)|, the log-determinant of the change of basis.
    [[nodiscard]] double log_det_coeff() const;
};

enum class BundleFactor { fubini_study, flat };

/// Pointwise norm |s|_{p psi} = |f| (1+|z|^2)^{-p/2} e^{-p psi} (FS factor) or |f| e^{-p psi}.
struct WeightedNormContext {
    WeightField psi;
    int degree = 0;
    BundleFactor factor = BundleFactor::fubini_study;

    /// Log-scale of the scaled monomial row at z, see monomial_row.
    [[nodiscard]] double row_log_scale(cplx z) const;
};

/// Scaled monomial values v_k with |v_k| <= 1 such that the weighted value
/// of z^k at z equals exp(row_log_scale(z)) * v_k.
void monomial_row(cplx z, int p, Eigen::Ref<Eigen::RowVectorXcd, 0, Eigen::InnerStride<>> out);

/// Rows of scaled section values at each point; log_scale receives row scales.
[[nodiscard]] Eigen::MatrixXcd evaluate_scaled(const SectionBasis& basis, std::span<const cplx> points,
                                               const WeightedNormContext& ctx,
                                               std::vector<double>& log_scale);

/// Gram matrix stored as exp(2*log_scale) * entries.
struct GramMatrix {
    Eigen::MatrixXcd entries;
    double log_scale = 0;
    std::string quadrature_id;

    [[nodiscard]] Eigen::MatrixXcd full() const;
    /// log det of the full matrix, via Cholesky.
    [[nodiscard]] double log_det() const;
};

[[nodiscard]] GramMatrix gram(const SectionBasis& basis, const DiscreteMeasure& mu,
                              const WeightedNormContext& ctx);
/// Lower Cholesky factor of the scaled entries; throws DegenerateMeasureError.
[[nodiscard]] Eigen::MatrixXcd cholesky_factor(const GramMatrix& g);
[[nodiscard]] SectionBasis orthonormalize(const SectionBasis& basis, const GramMatrix& g);

/// log of |det A| by partial-pivot LU after column equilibration; -inf if singular.
[[nodiscard]] double log_abs_det(Eigen::MatrixXcd a);

/// log of the weighted |det(s_i(x_j))|; points are canonically ordered first,
/// so the value is exactly permutation invariant.
[[nodiscard]] double log_vandermonde(const SectionBasis& basis, std::span<const cplx> points,
                                     const WeightedNormContext& ctx);

}  // namespace eqlab
