#include "eqlab/fekete.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>

#include "eqlab/csvio.hpp"
#include "eqlab/errors.hpp"

namespace eqlab {

namespace {

bool lex_less(cplx a, cplx b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
}

void sort_unique(std::vector<cplx>& v) {
    std::sort(v.begin(), v.end(), lex_less);
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Gains below this are treated as rounding noise.
constexpr double kAcceptGain = 1e-12;

}  // namespace

bool in_set(const WeightedSet& K, cplx z) {
    if (K.shape.contains(z)) return true;
    const Chart& c = K.chart;
    if (!c.in_box(z)) return false;
    const double h = c.h();
    const int j = static_cast<int>(std::lround((z.real() + c.R()) / h));
    const int k = static_cast<int>(std::lround((z.imag() + c.R()) / h));
    if (j < 0 || k < 0 || j >= c.n() || k >= c.n()) return false;
    const std::size_t idx = c.index(j, k);
    return K.in_mask(idx) && c.node(idx) == z;
}

std::vector<cplx> candidate_pool(const WeightedSet& K, const FeketeOptions& opt) {
    const Chart& chart = K.chart;
    std::vector<cplx> out;
    if (K.whole()) {
        // Unit disc nodes and their inversions cover the sphere once.
        for (std::size_t i = 0; i < chart.size(); ++i) {
            const cplx z = chart.node(i);
            const double r = std::abs(z);
            if (r <= 1) out.push_back(z);
            if (r > 0 && r < 1) out.push_back(1.0 / z);
        }
        sort_unique(out);
        return out;
    }
    const SetShape& shape = K.shape;
    for (std::size_t i = 0; i < chart.size(); ++i) {
        if (!K.in_mask(i)) continue;
        const cplx z = chart.node(i);
        out.push_back(shape.contains(z) ? z : shape.project_to_boundary(z));
    }
    const double h = chart.h();
    const double hf = h / opt.refine;
    const double width = opt.ring_width * h;
    const int lim = static_cast<int>(std::ceil((shape.extent() + width) / hf));
    std::vector<cplx> proj;
    for (int b = -lim; b <= lim; ++b) {
        if (shape.kind == SetKind::interval && b != 0) continue;
        for (int a = -lim; a <= lim; ++a) {
            if (a % opt.refine == 0 && b % opt.refine == 0) continue;
            const cplx z(a * hf, b * hf);
            if (!shape.contains(z) || shape.distance_to_boundary(z) > width) continue;
            out.push_back(z);
            const cplx q = shape.project_to_boundary(z);
            if (std::abs(q - z) > 1e-12 && shape.contains(q)) proj.push_back(q);
        }
    }
    out.insert(out.end(), proj.begin(), proj.end());
    sort_unique(out);
    return out;
}

// ------------------------------------------------------------------ solver

FeketeSolver::FeketeSolver(std::vector<cplx> candidates, const SectionBasis& basis,
                           const WeightedNormContext& ctx)
    : cand_(std::move(candidates)), basis_(basis), ctx_(ctx) {
    sort_unique(cand_);
    const auto n = static_cast<std::size_t>(basis_.dim);
    if (cand_.size() < n)
        throw PreconditionError("candidate pool has " + std::to_string(cand_.size()) +
                                " points, fewer than N_p = " + std::to_string(n));
    Eigen::MatrixXcd v = evaluate_scaled(basis_, cand_, ctx_, d_);
    for (double d : d_)
        if (!std::isfinite(d)) throw NumericError("weight is not finite at a candidate point");
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(std::move(v));
    q_ = qr.householderQ() * Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(cand_.size()), basis_.dim);
}

std::size_t FeketeSolver::locate(cplx z) const {
    const auto it = std::lower_bound(cand_.begin(), cand_.end(), z, lex_less);
    if (it == cand_.end() || *it != z) throw PreconditionError("start point is not a candidate");
    return static_cast<std::size_t>(it - cand_.begin());
}

Configuration FeketeSolver::finish(const std::vector<std::size_t>& idx) const {
    Configuration P;
    P.degree = basis_.degree;
    for (std::size_t i : idx) P.points.push_back(cand_[i]);
    P.log_w = log_vandermonde(basis_, P.points, ctx_);
    return P;
}

Configuration FeketeSolver::leja() const {
    const Eigen::Index n = basis_.dim;
    const auto c = static_cast<Eigen::Index>(cand_.size());
    Eigen::MatrixXcd res = q_;
    std::vector<char> used(cand_.size(), 0);
    std::vector<std::size_t> idx;
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index best = -1;
        double best_v = -std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < c; ++i) {
            if (used[i]) continue;
            const double a = std::abs(res(i, k));
            if (a == 0) continue;
            const double v = d_[i] + std::log(a);
            if (v > best_v) {
                best_v = v;
                best = i;
            }
        }
        if (best < 0) throw NumericError("greedy seed found no unisolvent candidate");
        used[best] = 1;
        idx.push_back(static_cast<std::size_t>(best));
        if (k + 1 < n) {
            const Eigen::RowVectorXcd pivot = res.row(best).tail(n - k - 1) / res(best, k);
            const Eigen::VectorXcd colk = res.col(k);
            res.rightCols(n - k - 1).noalias() -= colk * pivot;
        }
    }
    return finish(idx);
}

std::pair<Configuration, SolveReport> FeketeSolver::ascend(const Configuration& start, double tol,
                                                           int max_sweeps) const {
    const Eigen::Index n = basis_.dim;
    if (static_cast<Eigen::Index>(start.points.size()) != n)
        throw PreconditionError("start configuration has the wrong number of points");
    std::vector<std::size_t> idx;
    for (cplx z : start.points) idx.push_back(locate(z));

    SolveReport rep;
    rep.candidate_count = cand_.size();
    Eigen::MatrixXcd b;
    double lw = 0;  // internal log_w, up to the constant log|det R|
    auto refactor = [&] {
        Eigen::MatrixXcd a(n, n);
        for (Eigen::Index j = 0; j < n; ++j) a.row(j) = q_.row(static_cast<Eigen::Index>(idx[j]));
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
        const double la = log_abs_det(a);
        if (!std::isfinite(la)) throw NumericError("start configuration is not unisolvent");
        b.noalias() = q_ * lu.inverse();
        lw = la;
        for (std::size_t i : idx) lw += d_[i];
    };
    refactor();
    rep.trace.push_back(lw);

    const auto c = static_cast<Eigen::Index>(cand_.size());
    int since_refactor = 0;
    double sweep_gain = 0;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        ++rep.iterations;
        sweep_gain = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double dj = d_[idx[j]];
            Eigen::Index best = -1;
            double best_g = kAcceptGain;
            for (Eigen::Index i = 0; i < c; ++i) {
                const double a = std::abs(b(i, j));
                if (a == 0) continue;
                const double g = d_[i] - dj + std::log(a);
                if (g > best_g) {
                    best_g = g;
                    best = i;
                }
            }
            if (best < 0) continue;
            // Sherman-Morrison: row j of A becomes q_best.
            const cplx piv = b(best, j);
            Eigen::RowVectorXcd r = b.row(best);
            r(j) -= 1.0;
            r /= piv;
            const Eigen::VectorXcd col = b.col(j);
            b.noalias() -= col * r;
            idx[j] = static_cast<std::size_t>(best);
            lw += best_g;
            sweep_gain += best_g;
            ++rep.exchanges_accepted;
            rep.trace.push_back(lw);
            if (++since_refactor >= n) {
                refactor();
                rep.trace.back() = lw;
                since_refactor = 0;
            }
        }
        if (sweep_gain < tol) break;
    }
    rep.final_gain_per_sweep = sweep_gain;
    Configuration out = finish(idx);
    return {std::move(out), rep};
}

// ------------------------------------------------------------------ wrappers

Configuration leja_seed(const WeightedSet& K, const SectionBasis& basis, const WeightedNormContext& ctx) {
    return FeketeSolver(candidate_pool(K), basis, ctx).leja();
}

std::pair<Configuration, SolveReport> exchange_ascent(const Configuration& start, const WeightedSet& K,
                                                      const SectionBasis& basis,
                                                      const WeightedNormContext& ctx, double tol,
                                                      int max_sweeps) {
    for (cplx z : start.points)
        if (!in_set(K, z)) throw PreconditionError("start point outside K");
    std::vector<cplx> pool = candidate_pool(K);
    pool.insert(pool.end(), start.points.begin(), start.points.end());
    return FeketeSolver(std::move(pool), basis, ctx).ascend(start, tol, max_sweeps);
}

std::pair<Configuration, SolveReport> solve_fekete(const WeightedSet& K, int p, const FeketeOptions& opt,
                                                   BundleFactor factor) {
    K.validate(p);
    const SectionBasis basis = SectionBasis::monomial(p);
    const WeightedNormContext ctx{K.phi, p, factor};
    const FeketeSolver solver(candidate_pool(K, opt), basis, ctx);
    const Configuration seed = solver.leja();
    auto result = solver.ascend(seed, opt.tol, opt.max_sweeps);
    result.second.seed = opt.seed;
    return result;
}

DiscreteMeasure fekete_measure(const Configuration& P) {
    DiscreteMeasure mu;
    const double m = 1.0 / static_cast<double>(P.points.size());
    std::vector<cplx> pts = P.points;
    std::sort(pts.begin(), pts.end(), lex_less);
    for (cplx z : pts) mu.add(z, m);
    return mu;
}

double defect(const Configuration& P, double best_known_log_w, int p) {
    if (p < 1) throw PreconditionError("defect needs degree p >= 1");
    double best = best_known_log_w, lw = P.log_w;
    if (best < lw) {
        std::cerr << "warning: best known log_w is below the configuration's; swapping roles\n";
        std::swap(best, lw);
    }
    const double n = static_cast<double>(dimension(p, 1));
    return (best - lw) / (p * n);
}

void write_configuration(std::ostream& os, const Chart& chart, const Configuration& P,
                         const SolveReport& report, double tol) {
    write_header(os, chart, "fekete_configuration");
    os << "re,im\n";
    for (cplx z : P.points) os << hex(z.real()) << ',' << hex(z.imag()) << '\n';
    os << "meta,degree," << P.degree << '\n'
       << "meta,log_w," << hex(P.log_w) << '\n'
       << "meta,seed," << report.seed << '\n'
       << "meta,tol," << hex(tol) << '\n'
       << "meta,iterations," << report.iterations << '\n'
       << "meta,exchanges_accepted," << report.exchanges_accepted << '\n';
    if (P.defect) os << "meta,defect," << hex(*P.defect) << '\n';
}

Configuration read_configuration(std::istream& is, Chart* chart) {
    const Chart c = read_header(is, "fekete_configuration");
    if (chart) *chart = c;
    Configuration P;
    std::string line;
    std::getline(is, line);
    bool have_degree = false, have_logw = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto r = split_csv(line);
        if (r.size() == 3 && r[0] == "meta") {
            if (r[1] == "degree") {
                P.degree = static_cast<int>(parse_int(r[2]));
                have_degree = true;
            } else if (r[1] == "log_w") {
                P.log_w = parse_double(r[2]);
                have_logw = true;
            } else if (r[1] == "defect") {
                P.defect = parse_double(r[2]);
            }
        } else if (r.size() == 2) {
            P.points.emplace_back(parse_double(r[0]), parse_double(r[1]));
        } else {
            throw FormatError("malformed configuration row");
        }
    }
    if (!have_degree || !have_logw) throw FormatError("configuration file lacks degree or log_w metadata");
    if (static_cast<std::int64_t>(P.points.size()) != dimension(P.degree, 1))
        throw FormatError("configuration has the wrong number of points for its degree");
    return P;
}

}  // namespace eqlab
