#include "eqlab/polyspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eqlab/errors.hpp"

namespace eqlab {

std::int64_t dimension(int p, int n) {
    if (p < 0 || n < 1) throw ConfigError("dimension needs p >= 0 and n >= 1");
    // C(p+n, n) built as a running product of binomials, each step exact.
    __int128 r = 1;
    for (int i = 1; i <= n; ++i) {
        r = r * (p + i) / i;
        if (r > std::numeric_limits<std::int64_t>::max())
            throw ConfigError("dimension C(p+n,n) overflows 64-bit integers");
    }
    return static_cast<std::int64_t>(r);
}

SectionBasis SectionBasis::monomial(int p) {
    if (p < 0) throw ConfigError("degree must be nonnegative");
    SectionBasis b;
    b.degree = p;
    b.dim = static_cast<int>(dimension(p, 1));
    b.kind = BasisKind::monomial;
    b.coeff = Eigen::MatrixXcd::Identity(b.dim, b.dim);
    b.provenance = "monomial";
    return b;
}

double SectionBasis::log_det_coeff() const {
    double s = 0;
    for (int i = 0; i < dim; ++i) s += std::log(std::abs(coeff(i, i)));
    return s;
}

double WeightedNormContext::row_log_scale(cplx z) const {
    const double p = degree;
    const double r2 = std::norm(z);
    const double w = -p * psi(z);
    if (factor == BundleFactor::flat) return r2 <= 1 ? w : w + 0.5 * p * std::log(r2);
    return r2 <= 1 ? w - 0.5 * p * std::log1p(r2) : w - 0.5 * p * std::log1p(1 / r2);
}

void monomial_row(cplx z, int p, Eigen::Ref<Eigen::RowVectorXcd, 0, Eigen::InnerStride<>> out) {
    const double r = std::abs(z);
    if (r <= 1) {
        cplx v(1, 0);
        for (int k = 0; k <= p; ++k) {
            out(k) = v;
            v *= z;
        }
        return;
    }
    // |z| > 1: z^k / |z|^p = u^k q^(p-k) with u = z/|z|, q = 1/|z|.
    const cplx u = z / r;
    const double q = 1 / r;
    cplx v(1, 0);
    for (int k = 0; k <= p; ++k) {
        out(k) = v;
        v *= u;
    }
    double qq = 1;
    for (int k = p; k >= 0; --k) {
        out(k) *= qq;
        qq *= q;
    }
}

Eigen::MatrixXcd evaluate_scaled(const SectionBasis& basis, std::span<const cplx> points,
                                 const WeightedNormContext& ctx, std::vector<double>& log_scale) {
    if (ctx.degree != basis.degree) throw ConfigError("norm context degree differs from basis degree");
    const int n = basis.dim;
    Eigen::MatrixXcd v(static_cast<Eigen::Index>(points.size()), n);
    log_scale.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        monomial_row(points[i], basis.degree, v.row(static_cast<Eigen::Index>(i)));
        log_scale[i] = ctx.row_log_scale(points[i]);
    }
    if (basis.kind == BasisKind::monomial) return v;
    return v * basis.coeff.transpose();
}

Eigen::MatrixXcd GramMatrix::full() const { return std::exp(2 * log_scale) * entries; }

GramMatrix gram(const SectionBasis& basis, const DiscreteMeasure& mu, const WeightedNormContext& ctx) {
    const int n = basis.dim;
    std::vector<double> ls(mu.size());
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mu.size(); ++i) {
        ls[i] = ctx.row_log_scale(mu.points[i]);
        if (mu.masses[i] > 0) top = std::max(top, ls[i]);
    }
    if (!std::isfinite(top)) throw DegenerateMeasureError("measure has no mass");
    GramMatrix g;
    g.entries = Eigen::MatrixXcd::Zero(n, n);
    g.log_scale = top;
    constexpr std::size_t chunk = 2048;
    Eigen::MatrixXcd rows;
    for (std::size_t start = 0; start < mu.size(); start += chunk) {
        const std::size_t len = std::min(chunk, mu.size() - start);
        rows.resize(static_cast<Eigen::Index>(len), n);
        for (std::size_t i = 0; i < len; ++i) {
            const std::size_t a = start + i;
            const auto r = static_cast<Eigen::Index>(i);
            monomial_row(mu.points[a], basis.degree, rows.row(r));
            rows.row(r) *= std::sqrt(mu.masses[a]) * std::exp(ls[a] - top);
        }
        if (basis.kind != BasisKind::monomial) rows = rows * basis.coeff.transpose();
        g.entries.noalias() += rows.transpose() * rows.conjugate();
    }
    g.entries = 0.5 * (g.entries + g.entries.adjoint()).eval();
    g.quadrature_id = "atoms=" + std::to_string(mu.size());
    return g;
}

Eigen::MatrixXcd cholesky_factor(const GramMatrix& g) {
    // Equilibrate to unit diagonal so that rank tests see conditioning, not scale.
    const Eigen::Index n = g.entries.rows();
    Eigen::VectorXd d(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double gii = g.entries(i, i).real();
        if (!(gii > 0)) throw DegenerateMeasureError("Gram matrix has a vanishing diagonal (degenerate measure)");
        d(i) = 1 / std::sqrt(gii);
    }
    const Eigen::MatrixXcd eq = d.asDiagonal() * g.entries * d.asDiagonal();
    Eigen::LLT<Eigen::MatrixXcd> llt(eq);
    if (llt.info() != Eigen::Success)
        throw DegenerateMeasureError("Gram matrix is not positive definite (degenerate measure)");
    Eigen::MatrixXcd l = llt.matrixL();
    double lo = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) lo = std::min(lo, l(i, i).real());
    if (!(lo >= 1e-6)) throw DegenerateMeasureError("Gram matrix is numerically singular (degenerate measure)");
    return d.cwiseInverse().asDiagonal() * l;
}

double GramMatrix::log_det() const {
    const Eigen::MatrixXcd l = cholesky_factor(*this);
    double s = 2.0 * static_cast<double>(l.rows()) * log_scale;
    for (Eigen::Index i = 0; i < l.rows(); ++i) s += 2 * std::log(l(i, i).real());
    return s;
}

SectionBasis orthonormalize(const SectionBasis& basis, const GramMatrix& g) {
    const Eigen::MatrixXcd l = cholesky_factor(g);
    SectionBasis out = basis;
    out.coeff = l.triangularView<Eigen::Lower>().solve(basis.coeff) * std::exp(-g.log_scale);
    out.kind = BasisKind::orthonormalized;
    out.provenance = "orthonormalized(" + g.quadrature_id + ")";
    return out;
}

double log_abs_det(Eigen::MatrixXcd a) {
    const Eigen::Index n = a.rows();
    double s = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double m = a.col(j).cwiseAbs().maxCoeff();
        if (m == 0) return -std::numeric_limits<double>::infinity();
        a.col(j) /= m;
        s += std::log(m);
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    const Eigen::MatrixXcd& u = lu.matrixLU();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = std::abs(u(i, i));
        if (d == 0) return -std::numeric_limits<double>::infinity();
        s += std::log(d);
    }
    return s;
}

double log_vandermonde(const SectionBasis& basis, std::span<const cplx> points,
                       const WeightedNormContext& ctx) {
    if (static_cast<int>(points.size()) != basis.dim)
        throw ConfigError("configuration size differs from the section space dimension");
    std::vector<cplx> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), [](cplx a, cplx b) {
        return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    });
    std::vector<double> ls;
    const Eigen::MatrixXcd a = evaluate_scaled(basis, pts, ctx, ls);
    double s = log_abs_det(a);
    for (double v : ls) s += v;
    return s;
}

}  // namespace eqlab
