#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "eqlab/csvio.hpp"
#include "eqlab/errors.hpp"
#include "eqlab/study.hpp"

using namespace eqlab;

namespace {

const char* kSmallDisc = R"(
[study]
kind = equidistribution
set = unit-disc
weight = flat:0
degrees = 2,3,4,5
seed = 7
[chart]
R = 4
M = 24
[fekete]
R = 2
M = 48
restarts = 2
[metrics]
dictionary = 32
)";

std::string run_csv(const ExperimentConfig& cfg) {
    std::ostringstream os;
    write_equidistribution_csv(os, cfg, run_equidistribution_study(cfg));
    return os.str();
}

}  // namespace

TEST_CASE("config parsing and validation") {
    const auto cfg = ExperimentConfig::parse(kSmallDisc);
    CHECK(cfg.degrees == std::vector<int>{2, 3, 4, 5});
    CHECK(cfg.seed == 7);
    CHECK(cfg.fekete_M == 48);
    CHECK(cfg.restarts == 2);
    CHECK(cfg.dictionary_size == 32);

    CHECK_THROWS_AS(ExperimentConfig::parse("[study]\ndegrees = 4,4\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("[study]\ndegrees = 8,4\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("[study]\ndegrees = 0,4\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("[study]\ndegrees = 2\nset = moon\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("[study]\ndegrees = 2\ncolour = red\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("[plots]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("[study]\ndegrees = 2\n[metrics]\ngamma = 3\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("[chart]\nM = many\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::load("/nonexistent/eqlab.ini"), ConfigError);
}

TEST_CASE("equidistribution study is reproducible byte for byte") {
    const auto cfg = ExperimentConfig::parse(kSmallDisc);
    const std::string a = run_csv(cfg);
    const std::string b = run_csv(cfg);
    CHECK(a == b);
    CHECK(a.find("meta,w1_slope,") != std::string::npos);

    // Streaming output matches the one-shot writer.
    std::ostringstream s;
    write_equidistribution_head(s, cfg);
    const auto res = run_equidistribution_study(cfg, [&](const EquidistributionRow& r) {
        write_equidistribution_row(s, r);
    });
    write_equidistribution_tail(s, res);
    CHECK(s.str() == a);

    // SVG rendering is a pure view of the result.
    Series w1{"w1", {}};
    for (const auto& r : res.rows) w1.points.emplace_back(r.p, r.w1);
    const std::string svg = loglog_svg("disc", {w1});
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("slope") != std::string::npos);
    std::ostringstream again;
    write_equidistribution_csv(again, cfg, res);
    CHECK(again.str() == a);

    for (const auto& r : res.rows) {
        CHECK(r.sigma_P >= 0);
        CHECK(r.w1 > 0);
        CHECK(r.dist_gamma >= 0);
        CHECK(r.dist_gamma <= r.w1 * 1.000001);  // gamma = 1 dictionary is 1-Lipschitz in the geodesic metric
        CHECK(std::isfinite(r.gap));
    }
}

TEST_CASE("a different seed changes only seeded columns") {
    auto cfg = ExperimentConfig::parse(kSmallDisc);
    const auto a = run_equidistribution_study(cfg);
    cfg.seed = 8;
    const auto b = run_equidistribution_study(cfg);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].w1 == b.rows[i].w1);
        CHECK(a.rows[i].D_p == b.rows[i].D_p);
    }
}

TEST_CASE("bergman study delegates and is reproducible") {
    const auto cfg = ExperimentConfig::parse(
        "[study]\nkind = bergman\nset = whole\nweight = 0.2*exp(-r2)\ndegrees = 2,4,8,16\n[chart]\nR = 4\nM = 32\n");
    std::ostringstream a, b;
    write_bergman_csv(a, cfg, run_bergman_study(cfg));
    write_bergman_csv(b, cfg, run_bergman_study(cfg));
    CHECK(a.str() == b.str());
    CHECK(a.str().find("meta,zeta,") != std::string::npos);
}

TEST_CASE("stage failures name the stage and keep the exit code") {
    auto cfg = ExperimentConfig::parse(
        "[study]\nkind = bergman\nset = whole\nweight = 2*exp(-r2)\ndegrees = 2\n[chart]\nM = 16\n");
    try {
        (void)run_bergman_study(cfg);
        FAIL("expected a stage error");
    } catch (const StageError& e) {
        CHECK(e.stage() == "bergman");
        CHECK(e.code() == ExitCode::config);
    }
}

TEST_CASE("configuration cache round trip is bit exact") {
    const auto path = (std::filesystem::temp_directory_path() / "eqlab_study_cache.csv").string();
    Configuration P;
    P.degree = 3;
    P.points = {{0.1, -0.7}, {1.0 / 3.0, 2.0 / 7.0}, {-1e-300, 5e300}, {std::nextafter(1.0, 2.0), 0}};
    P.log_w = -1.0 / 9.0;
    const Configuration Q = cache_roundtrip(path, Chart(2, 64), P);
    REQUIRE(Q.points.size() == P.points.size());
    for (std::size_t i = 0; i < P.points.size(); ++i) {
        CHECK(Q.points[i].real() == P.points[i].real());
        CHECK(Q.points[i].imag() == P.points[i].imag());
    }
    CHECK(Q.log_w == P.log_w);
    CHECK(Q.degree == 3);

    save_text(path, "format_version,chart_R,chart_M\n99,0x1p+1,64\n");
    std::istringstream foreign(load_text(path));
    CHECK_THROWS_AS(read_configuration(foreign), UnsupportedVersionError);
    std::istringstream garbage("hello,world\n");
    CHECK_THROWS_AS(read_configuration(garbage), FormatError);
    std::filesystem::remove(path);
}
