#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <functional>

#include "eqlab/bergman.hpp"
#include "eqlab/fekete.hpp"
#include "eqlab/metrics.hpp"

namespace eqlab {

enum class StudyKind { equidistribution, bergman };

/// Experiment description, read from an INI file (see configs/ and README).
struct ExperimentConfig {
    StudyKind kind = StudyKind::equidistribution;
    std::string set = "unit-disc";
    std::string weight = "flat:0";
    std::vector<int> degrees;
    double chart_R = 4;
    int chart_M = 64;
    double fekete_R = 2;
    int fekete_M = 128;
    double fekete_tol = 1e-9;
    int restarts = 0;
    double envelope_tol = 1e-9;
    double gamma = 1;
    int dictionary_size = 256;
    int reference_rings = 128;
    std::uint64_t seed = 0;
    std::string csv;
    std::string svg;

    /// Throws ConfigError on unknown sections or keys and on invalid values.
    static ExperimentConfig parse(const std::string& ini_text);
    static ExperimentConfig load(const std::string& path);
    void validate() const;
};

struct EquidistributionRow {
    int p = 0;
    double sigma_P = 0;  // defect of the reported configuration against the best restart
    double log_w = 0;
    double w1 = 0;
    double dist_gamma = 0;
    double D_p = 0;
    double eps_p = 0;
    double gap = 0;  // |D_p + E_eq|
};

struct EquidistributionResult {
    std::string reference;  // description of the equilibrium measure used for w1
    double E_eq = 0;
    std::vector<EquidistributionRow> rows;
    RateFit w1_fit;
};

using RowSink = std::function<void(const EquidistributionRow&)>;

/// Rows are passed to `sink` as they complete, in degree order. Failures are
/// rethrown as StageError naming the stage.
[[nodiscard]] EquidistributionResult run_equidistribution_study(const ExperimentConfig& cfg,
                                                                const RowSink& sink = {});

/// CSV in three parts so that a failed run still leaves its finished rows.
void write_equidistribution_head(std::ostream& os, const ExperimentConfig& cfg);
void write_equidistribution_row(std::ostream& os, const EquidistributionRow& row);
void write_equidistribution_tail(std::ostream& os, const EquidistributionResult& r);
void write_equidistribution_csv(std::ostream& os, const ExperimentConfig& cfg, const EquidistributionResult& r);

struct BergmanStudyResult {
    double zeta = 0;
    std::vector<RateRow> rows;
    double slope = 0;
};

[[nodiscard]] BergmanStudyResult run_bergman_study(const ExperimentConfig& cfg);
void write_bergman_csv(std::ostream& os, const ExperimentConfig& cfg, const BergmanStudyResult& r);

struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

/// Log-log plot, one polyline per series, fitted slope in the legend.
[[nodiscard]] std::string loglog_svg(const std::string& title, const std::vector<Series>& series);

/// Writes P to `path`, reads it back and returns the copy.
[[nodiscard]] Configuration cache_roundtrip(const std::string& path, const Chart& chart, const Configuration& P);

}  // namespace eqlab
