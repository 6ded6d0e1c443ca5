// eqlab command line: fekete, envelope, bergman, functionals and rate studies.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "eqlab/bergman.hpp"
#include "eqlab/csvio.hpp"
#include "eqlab/envelope.hpp"
#include "eqlab/errors.hpp"
#include "eqlab/fekete.hpp"
#include "eqlab/functionals.hpp"
#include "eqlab/study.hpp"

#ifndef EQLAB_CONFIG_DIR
#define EQLAB_CONFIG_DIR "configs"
#endif

namespace {

using namespace eqlab;

struct Common {
    std::uint64_t seed = 0;
    int threads = 1;
    std::string out;
    std::string svg;
    std::string set = "unit-disc";
    std::string weight = "flat:0";
    double R = 2;
    int M = 128;
};

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-")
        std::cout << text;
    else
        save_text(path, text);
}

std::string resolve_experiment(const std::string& name) {
    namespace fs = std::filesystem;
    for (const fs::path& p : {fs::path(name), fs::path(EQLAB_CONFIG_DIR) / name,
                              fs::path(EQLAB_CONFIG_DIR) / (name + ".ini")})
        if (fs::is_regular_file(p)) return p.string();
    throw ConfigError("unknown experiment '" + name + "' (no such file, and not in " EQLAB_CONFIG_DIR ")");
}

void add_common(CLI::App* sub, Common& c, bool with_set) {
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("--threads", c.threads, "worker threads (runs are sequential)")->check(CLI::PositiveNumber);
    sub->add_option("--out", c.out, "output CSV (stdout if omitted)");
    sub->add_option("--weight", c.weight, "weight expression, prefix flat: for the flat frame");
    sub->add_option("--R", c.R, "chart half width");
    sub->add_option("--M", c.M, "chart nodes per side");
    if (with_set) sub->add_option("--set", c.set, "unit-disc, interval, square, whole, annulus:r");
}

int run(int argc, char** argv) {
    CLI::App app{"eqlab: weighted equilibrium and Fekete point experiments"};
    app.require_subcommand(1);
    Common c;
    int degree = 0;
    double tol = 1e-9;
    std::string experiment, degrees_text;

    auto* fek = app.add_subcommand("fekete", "Fekete configurations")->require_subcommand(1);
    auto* fek_solve = fek->add_subcommand("solve", "exchange ascent on the candidate pool");
    add_common(fek_solve, c, true);
    fek_solve->add_option("--degree", degree)->required()->check(CLI::PositiveNumber);
    fek_solve->add_option("--tol", tol);

    auto* env = app.add_subcommand("envelope", "weighted extremal envelopes")->require_subcommand(1);
    auto* env_compute = env->add_subcommand("compute", "envelope and its Monge-Ampere cell masses");
    add_common(env_compute, c, true);
    env_compute->add_option("--tol", tol);

    auto* berg = app.add_subcommand("bergman", "Bergman densities")->require_subcommand(1);
    auto* berg_density = berg->add_subcommand("density", "rho_p / N_p against the curvature ratio");
    add_common(berg_density, c, false);
    berg_density->add_option("--degree", degree)->required()->check(CLI::PositiveNumber);

    auto* fun = app.add_subcommand("functionals", "energy and determinant functionals")->require_subcommand(1);
    auto* fun_report = fun->add_subcommand("report", "L_p, E_eq, D_p and the gap at one degree");
    add_common(fun_report, c, true);
    fun_report->add_option("--degree", degree)->required()->check(CLI::PositiveNumber);

    auto* rates = app.add_subcommand("rates", "rate studies")->require_subcommand(1);
    auto* rates_run = rates->add_subcommand("run", "run an experiment config");
    rates_run->add_option("--experiment", experiment, "config path or name under configs/")->required();
    rates_run->add_option("--degrees", degrees_text, "override the degree list, e.g. 8,12,16");
    rates_run->add_option("--seed", c.seed, "override the config seed");
    rates_run->add_option("--threads", c.threads, "worker threads (runs are sequential)")
        ->check(CLI::PositiveNumber);
    rates_run->add_option("--out", c.out, "output CSV (overrides the config)");
    rates_run->add_option("--svg", c.svg, "output SVG (overrides the config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ExitCode::config);
    }

    const WeightSpec spec = WeightSpec::parse(c.weight);
    if (fek_solve->parsed()) {
        const Chart chart(c.R, c.M);
        const WeightedSet K = build_builtin_set(c.set, chart, spec);
        FeketeOptions opt;
        opt.tol = tol;
        opt.seed = c.seed;
        const auto [P, rep] = solve_fekete(K, degree, opt);
        std::ostringstream os;
        write_configuration(os, chart, P, rep, tol);
        emit(c.out, os.str());
    } else if (env_compute->parsed()) {
        const Chart chart(c.R, c.M);
        const WeightedSet K = build_builtin_set(c.set, chart, spec);
        const ReferenceGeometry geom = fs_geometry(chart);
        EnvelopeOptions opt;
        opt.tol = tol;
        const EnvelopeSolution sol = envelope(K, geom, opt);
        std::ostringstream os;
        write_measure(os, chart, ma_measure(sol, K, geom).measure);
        emit(c.out, os.str());
    } else if (berg_density->parsed()) {
        const Chart chart(c.R, c.M);
        std::vector<int> ds;
        for (int q = 1; q <= degree; q *= 2) ds.push_back(q);
        if (ds.back() != degree) ds.push_back(degree);
        const Tue4Result t = tue4_experiment(spec, ds, chart);
        std::ostringstream os;
        write_header(os, chart, "bergman_density");
        os << "p,err,slope_so_far\n";
        std::vector<std::pair<double, double>> pts;
        for (const auto& row : t.rows) {
            pts.emplace_back(row.p, row.value);
            os << row.p << ',' << g17(row.value) << ',';
            if (pts.size() >= 4) os << g17(fit_rate(pts).slope);
            os << '\n';
        }
        os << "meta,zeta," << g17(t.zeta) << '\n';
        emit(c.out, os.str());
    } else if (fun_report->parsed()) {
        const Chart chart(c.R, c.M);
        const WeightedSet K = build_builtin_set(c.set, chart, spec);
        const ReferenceGeometry geom = fs_geometry(chart);
        const EnvelopeSolution sol = envelope(K, geom);
        const double E = energy_difference(K, geom).value;
        FeketeOptions fopt;
        fopt.seed = c.seed;
        const Configuration P = solve_fekete(K, degree, fopt).first;
        const FunctionalReport r = gap_report(K, sol, E, P, degree);
        std::ostringstream os;
        write_header(os, chart, "functionals_report");
        os << "quantity,value\n"
           << "p," << r.p << '\n'
           << "L_p_mu0," << g17(r.L_p_mu0) << '\n'
           << "L_p_K_lower," << g17(r.L_p_K_bracket.lower) << '\n'
           << "L_p_K_upper," << g17(r.L_p_K_bracket.upper) << '\n'
           << "E_eq," << g17(r.E_eq) << '\n'
           << "D_p," << g17(r.D_p) << '\n'
           << "eps_p," << g17(r.eps_p) << '\n'
           << "gap," << g17(r.gap()) << '\n';
        emit(c.out, os.str());
    } else if (rates_run->parsed()) {
        ExperimentConfig cfg = ExperimentConfig::load(resolve_experiment(experiment));
        if (!degrees_text.empty()) {
            std::ostringstream ini;
            ini << "[study]\ndegrees = " << degrees_text << '\n';
            cfg.degrees = ExperimentConfig::parse(ini.str()).degrees;
        }
        if (rates_run->count("--seed")) cfg.seed = c.seed;
        if (!c.out.empty()) cfg.csv = c.out;
        if (!c.svg.empty()) cfg.svg = c.svg;
        cfg.validate();

        std::vector<Series> series;
        std::ostringstream text;
        if (cfg.kind == StudyKind::equidistribution) {
            // Rows are flushed as they arrive so a failing stage leaves a partial CSV.
            std::ofstream file;
            std::ostream* os = &std::cout;
            if (!cfg.csv.empty() && cfg.csv != "-") {
                file.open(cfg.csv);
                if (!file) throw ConfigError("cannot write " + cfg.csv);
                os = &file;
            }
            write_equidistribution_head(*os, cfg);
            os->flush();
            const auto res = run_equidistribution_study(cfg, [&](const EquidistributionRow& r) {
                write_equidistribution_row(*os, r);
                os->flush();
                std::cerr << "p=" << r.p << " w1=" << r.w1 << " gap=" << r.gap << '\n';
            });
            write_equidistribution_tail(*os, res);
            Series w1{"w1", {}}, dg{"dist_gamma lower", {}}, gap{"|D_p+E_eq|", {}};
            for (const auto& r : res.rows) {
                w1.points.emplace_back(r.p, r.w1);
                dg.points.emplace_back(r.p, r.dist_gamma);
                gap.points.emplace_back(r.p, r.gap);
            }
            series = {w1, dg, gap};
        } else {
            const auto res = run_bergman_study(cfg);
            write_bergman_csv(text, cfg, res);
            emit(cfg.csv, text.str());
            Series s{"L1 error", {}};
            for (const auto& r : res.rows) s.points.emplace_back(r.p, r.value);
            series = {s};
        }
        if (!cfg.svg.empty()) save_text(cfg.svg, loglog_svg(experiment, series));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const eqlab::Error& e) {
        std::cerr << "eqlab: " << e.what() << '\n';
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::cerr << "eqlab: internal error: " << e.what() << '\n';
        return static_cast<int>(eqlab::ExitCode::consistency);
    }
}
