#include "eqlab/study.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "eqlab/csvio.hpp"
#include "eqlab/envelope.hpp"
#include "eqlab/errors.hpp"
#include "eqlab/functionals.hpp"

namespace eqlab {

namespace {

constexpr double kPi = std::numbers::pi;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        return parse_double(trim(v));
    } catch (const FormatError&) {
        throw ConfigError("config key " + key + ": not a number: '" + v + "'");
    }
}

long long to_int(const std::string& key, const std::string& v) {
    try {
        return parse_int(trim(v));
    } catch (const FormatError&) {
        throw ConfigError("config key " + key + ": not an integer: '" + v + "'");
    }
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class F>
auto staged(const std::string& stage, F&& f) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(stage, e);
    }
}

bool flat_constant(const WeightSpec& w) { return w.flat && w.expr.is_constant(); }

// Cells of equal omega0 mass in (|z|^2/(1+|z|^2), arg z), weighted by the curvature ratio of phi.
DiscreteMeasure polar_reference(const WeightSpec& phi, int rings) {
    DiscreteMeasure mu;
    const double cell = 1.0 / (static_cast<double>(rings) * rings);
    for (int a = 0; a < rings; ++a) {
        const double u = (a + 0.5) / rings;
        const double r = std::sqrt(u / (1 - u));
        for (int b = 0; b < rings; ++b) {
            const cplx z = std::polar(r, 2 * kPi * (b + 0.5 * (1 + a % 2)) / rings);
            const double ratio = curvature_ratio(phi, z);
            if (!(ratio > 0)) return {};
            mu.add(z, ratio * cell);
        }
    }
    return mu.normalized();
}

std::vector<cplx> random_subset(const std::vector<cplx>& pool, std::size_t n, std::mt19937_64& rng) {
    std::vector<std::size_t> idx(pool.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = 0; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    std::vector<cplx> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(pool[idx[i]]);
    return out;
}

}  // namespace

// ------------------------------------------------------------------ config

ExperimentConfig ExperimentConfig::parse(const std::string& ini_text) {
    boost::property_tree::ptree pt;
    std::istringstream is(ini_text);
    try {
        boost::property_tree::ini_parser::read_ini(is, pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.what());
    }
    static const std::map<std::string, std::set<std::string>> allowed{
        {"study", {"kind", "set", "weight", "degrees", "seed"}},
        {"chart", {"R", "M"}},
        {"fekete", {"R", "M", "tol", "restarts"}},
        {"envelope", {"tol"}},
        {"metrics", {"gamma", "dictionary", "reference_rings"}},
        {"output", {"csv", "svg"}},
    };
    ExperimentConfig c;
    for (const auto& [section, body] : pt) {
        const auto it = allowed.find(section);
        if (it == allowed.end()) throw ConfigError("unknown config section [" + section + "]");
        for (const auto& [key, node] : body) {
            if (!it->second.count(key)) throw ConfigError("unknown config key " + section + "." + key);
            const std::string name = section + "." + key;
            const std::string v = trim(node.data());
            if (name == "study.kind") {
                if (v == "equidistribution")
                    c.kind = StudyKind::equidistribution;
                else if (v == "bergman")
                    c.kind = StudyKind::bergman;
                else
                    throw ConfigError("study.kind must be equidistribution or bergman");
            } else if (name == "study.set") {
                c.set = v;
            } else if (name == "study.weight") {
                c.weight = v;
            } else if (name == "study.degrees") {
                c.degrees.clear();
                std::istringstream ds(v);
                std::string tok;
                while (std::getline(ds, tok, ',')) c.degrees.push_back(static_cast<int>(to_int(name, tok)));
            } else if (name == "study.seed") {
                c.seed = static_cast<std::uint64_t>(to_int(name, v));
            } else if (name == "chart.R") {
                c.chart_R = to_double(name, v);
            } else if (name == "chart.M") {
                c.chart_M = static_cast<int>(to_int(name, v));
            } else if (name == "fekete.R") {
                c.fekete_R = to_double(name, v);
            } else if (name == "fekete.M") {
                c.fekete_M = static_cast<int>(to_int(name, v));
            } else if (name == "fekete.tol") {
                c.fekete_tol = to_double(name, v);
            } else if (name == "fekete.restarts") {
                c.restarts = static_cast<int>(to_int(name, v));
            } else if (name == "envelope.tol") {
                c.envelope_tol = to_double(name, v);
            } else if (name == "metrics.gamma") {
                c.gamma = to_double(name, v);
            } else if (name == "metrics.dictionary") {
                c.dictionary_size = static_cast<int>(to_int(name, v));
            } else if (name == "metrics.reference_rings") {
                c.reference_rings = static_cast<int>(to_int(name, v));
            } else if (name == "output.csv") {
                c.csv = v;
            } else if (name == "output.svg") {
                c.svg = v;
            }
        }
    }
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void ExperimentConfig::validate() const {
    if (degrees.empty()) throw ConfigError("study.degrees is empty");
    for (std::size_t i = 0; i < degrees.size(); ++i) {
        if (degrees[i] < 1) throw ConfigError("degrees must be positive");
        if (i > 0 && degrees[i] <= degrees[i - 1]) throw ConfigError("degrees must be strictly increasing");
    }
    const WeightSpec spec = WeightSpec::parse(weight);
    (void)build_builtin_set(set, Chart(chart_R, chart_M), spec);
    if (kind == StudyKind::equidistribution) (void)build_builtin_set(set, Chart(fekete_R, fekete_M), spec);
    if (!(fekete_tol > 0) || !(envelope_tol > 0)) throw ConfigError("tolerances must be positive");
    if (!(gamma > 0) || gamma > 2) throw ConfigError("metrics.gamma must lie in (0, 2]");
    if (restarts < 0 || dictionary_size < 1 || reference_rings < 8)
        throw ConfigError("restarts >= 0, dictionary >= 1 and reference_rings >= 8 are required");
}

// ------------------------------------------------------- equidistribution

EquidistributionResult run_equidistribution_study(const ExperimentConfig& cfg, const RowSink& sink) {
    cfg.validate();
    const WeightSpec spec = WeightSpec::parse(cfg.weight);
    const Chart fchart(cfg.fekete_R, cfg.fekete_M), echart(cfg.chart_R, cfg.chart_M);
    const WeightedSet Kf = build_builtin_set(cfg.set, fchart, spec);
    const WeightedSet Ke = build_builtin_set(cfg.set, echart, spec);
    const ReferenceGeometry geom = fs_geometry(echart);
    EnvelopeOptions eopt;
    eopt.tol = cfg.envelope_tol;

    EquidistributionResult res;
    const EnvelopeSolution sol = staged("envelope", [&] { return envelope(Ke, geom, eopt); });
    res.E_eq = staged("energy", [&] { return energy_difference(Ke, geom, 8, eopt).value; });

    enum class Ref { circle, arcsine, sphere } ref_kind = Ref::sphere;
    DiscreteMeasure ref;
    staged("reference", [&] {
        const SetKind k = Kf.shape.kind;
        if (k == SetKind::unit_disc && flat_constant(spec)) {
            ref_kind = Ref::circle;
            ref = uniform_circle_measure(4096);
            res.reference = "uniform arclength on the unit circle (radial projection; geodesic W1)";
        } else if (k == SetKind::interval && flat_constant(spec)) {
            ref_kind = Ref::arcsine;
            ref = arcsine_measure(4096);
            res.reference = "arcsine law on [-1,1]";
        } else if (k == SetKind::whole && !(ref = polar_reference(spec, cfg.reference_rings)).points.empty()) {
            res.reference = "omega0 + dd^c phi on polar cells (" + std::to_string(cfg.reference_rings) +
                            " rings); sphere W1";
        } else {
            ref = mu_eq(Ke, geom, eopt);
            res.reference = "discrete equilibrium measure on the chart; sphere W1";
        }
        return 0;
    });
    const TestDictionary dict = TestDictionary::make(cfg.gamma, cfg.seed, cfg.dictionary_size);

    std::vector<std::pair<double, double>> pairs;
    for (int p : cfg.degrees) {
        const std::string tag = "p=" + std::to_string(p);
        EquidistributionRow row;
        row.p = p;
        FeketeOptions fopt;
        fopt.tol = cfg.fekete_tol;
        fopt.seed = cfg.seed;
        const Configuration P = staged(tag + " fekete", [&] { return solve_fekete(Kf, p, fopt).first; });
        row.log_w = P.log_w;
        double best = P.log_w;
        if (cfg.restarts > 0) {
            staged(tag + " restarts", [&] {
                const SectionBasis basis = SectionBasis::monomial(p);
                const WeightedNormContext ctx{Kf.phi, p, BundleFactor::fubini_study};
                const FeketeSolver solver(candidate_pool(Kf, fopt), basis, ctx);
                const std::vector<cplx> pool = candidate_pool(Kf, fopt);
                std::seed_seq sq{cfg.seed, static_cast<std::uint64_t>(p)};
                std::mt19937_64 rng(sq);
                for (int r = 0; r < cfg.restarts; ++r) {
                    Configuration start;
                    start.degree = p;
                    for (int attempt = 0; attempt < 20; ++attempt) {
                        start.points = random_subset(pool, P.points.size(), rng);
                        start.log_w = log_vandermonde(basis, start.points, ctx);
                        if (std::isfinite(start.log_w)) break;
                    }
                    if (!std::isfinite(start.log_w)) continue;
                    best = std::max(best, solver.ascend(start, fopt.tol, fopt.max_sweeps).first.log_w);
                }
                return 0;
            });
        }
        row.sigma_P = defect(P, best, p);

        staged(tag + " metrics", [&] {
            const DiscreteMeasure fm = fekete_measure(P);
            if (ref_kind == Ref::circle) {
                DiscreteMeasure proj = fm;
                for (auto& z : proj.points) z /= std::abs(z);
                row.w1 = w1_circle_uniform(proj);
            } else if (ref_kind == Ref::arcsine) {
                DiscreteMeasure proj = fm;
                for (auto& z : proj.points) z = std::clamp(z.real(), -1.0, 1.0);
                row.w1 = w1_interval_arcsine(proj);
            } else {
                row.w1 = w1_sphere(fm, ref).value;
            }
            row.dist_gamma = dist_gamma_lower(fm, ref, dict);
            return 0;
        });
        staged(tag + " functionals", [&] {
            const FunctionalReport fr = gap_report(Ke, sol, res.E_eq, P, p);
            row.D_p = fr.D_p;
            row.eps_p = fr.eps_p;
            row.gap = fr.gap();
            return 0;
        });
        res.rows.push_back(row);
        pairs.emplace_back(p, row.w1);
        if (sink) sink(row);
    }
    if (pairs.size() >= 4) res.w1_fit = fit_rate(pairs);
    return res;
}

void write_equidistribution_head(std::ostream& os, const ExperimentConfig& cfg) {
    write_header(os, Chart(cfg.fekete_R, cfg.fekete_M), "equidistribution");
    os << "p,sigma_P,log_w,w1,dist_gamma,D_p,eps_p,gap\n";
}

void write_equidistribution_row(std::ostream& os, const EquidistributionRow& r) {
    os << r.p << ',' << fmt(r.sigma_P) << ',' << fmt(r.log_w) << ',' << fmt(r.w1) << ',' << fmt(r.dist_gamma)
       << ',' << fmt(r.D_p) << ',' << fmt(r.eps_p) << ',' << fmt(r.gap) << '\n';
}

void write_equidistribution_tail(std::ostream& os, const EquidistributionResult& r) {
    os << "meta,reference," << r.reference << '\n' << "meta,E_eq," << fmt(r.E_eq) << '\n';
    if (!r.w1_fit.pairs.empty())
        os << "meta,w1_slope," << fmt(r.w1_fit.slope) << '\n'
           << "meta,w1_slope_stderr," << fmt(r.w1_fit.slope_stderr) << '\n';
}

void write_equidistribution_csv(std::ostream& os, const ExperimentConfig& cfg, const EquidistributionResult& r) {
    write_equidistribution_head(os, cfg);
    for (const auto& row : r.rows) write_equidistribution_row(os, row);
    write_equidistribution_tail(os, r);
}

// ----------------------------------------------------------------- bergman

BergmanStudyResult run_bergman_study(const ExperimentConfig& cfg) {
    cfg.validate();
    const Tue4Result t = staged("bergman", [&] {
        return tue4_experiment(WeightSpec::parse(cfg.weight), cfg.degrees, Chart(cfg.chart_R, cfg.chart_M));
    });
    return {t.zeta, t.rows, t.slope};
}

void write_bergman_csv(std::ostream& os, const ExperimentConfig& cfg, const BergmanStudyResult& r) {
    write_header(os, Chart(cfg.chart_R, cfg.chart_M), "bergman_study");
    os << "p,l1_error\n";
    for (const auto& row : r.rows) os << row.p << ',' << fmt(row.value) << '\n';
    os << "meta,zeta," << fmt(r.zeta) << '\n' << "meta,slope," << fmt(r.slope) << '\n';
}

// --------------------------------------------------------------------- svg

std::string loglog_svg(const std::string& title, const std::vector<Series>& series) {
    constexpr double W = 640, H = 480, L = 70, R = 200, T = 40, B = 50;
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            if (!(x > 0) || !(y > 0)) continue;
            x0 = std::min(x0, std::log10(x));
            x1 = std::max(x1, std::log10(x));
            y0 = std::min(y0, std::log10(y));
            y1 = std::max(y1, std::log10(y));
        }
    if (x0 > x1) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    x0 = std::floor(x0 * 10) / 10;
    x1 = std::ceil(x1 * 10) / 10 + (x1 == x0 ? 0.1 : 0);
    y0 = std::floor(y0);
    y1 = std::ceil(y1) + (y1 == y0 ? 1 : 0);
    auto px = [&](double lx) { return L + (lx - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double ly) { return H - B - (ly - y0) / (y1 - y0) * (H - T - B); };
    std::ostringstream os;
    char buf[256];
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" font-family=\"sans-serif\" "
          "font-size=\"12\">\n<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
    os << "<text x=\"" << L << "\" y=\"24\" font-size=\"14\">" << title << "</text>\n";
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"black\"/>\n", L,
                  T, W - L - R, H - T - B);
    os << buf;
    for (int d = static_cast<int>(y0); d <= static_cast<int>(y1); ++d) {
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/>"
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">1e%d</text>\n",
                      L, py(d), W - R, py(d), L - 6, py(d) + 4, d);
        os << buf;
    }
    std::set<double> xt;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) xt.insert(x);
    for (double x : xt) {
        std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%g</text>\n",
                      px(std::log10(x)), H - B + 16, x);
        os << buf;
    }
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">p</text>\n",
                  (L + W - R) / 2, H - 12);
    os << buf;
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* col = colors[k % 6];
        os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
        std::vector<std::pair<double, double>> pos;
        for (const auto& [x, y] : s.points) {
            if (!(x > 0) || !(y > 0)) continue;
            std::snprintf(buf, sizeof buf, "%.1f,%.1f ", px(std::log10(x)), py(std::log10(y)));
            os << buf;
            pos.emplace_back(x, y);
        }
        os << "\"/>\n";
        std::string label = s.name;
        if (pos.size() >= 4) {
            std::snprintf(buf, sizeof buf, " (slope %.3f)", fit_rate(pos).slope);
            label += buf;
        }
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" stroke-width=\"2\"/>"
                      "<text x=\"%.1f\" y=\"%.1f\">",
                      W - R + 10, T + 20.0 * k + 10, W - R + 30, T + 20.0 * k + 10, col, W - R + 35,
                      T + 20.0 * k + 14);
        os << buf << label << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

Configuration cache_roundtrip(const std::string& path, const Chart& chart, const Configuration& P) {
    std::ostringstream os;
    write_configuration(os, chart, P, SolveReport{}, 0.0);
    save_text(path, os.str());
    std::istringstream is(load_text(path));
    return read_configuration(is);
}

}  // namespace eqlab
