#include "eqlab/csvio.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "eqlab/errors.hpp"

namespace eqlab {

std::string hex(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

double parse_double(std::string_view s) {
    const std::string t(s);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size()) throw FormatError("not a number: '" + t + "'");
    return v;
}

long long parse_int(std::string_view s) {
    const std::string t(s);
    char* end = nullptr;
    const long long v = std::strtoll(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size()) throw FormatError("not an integer: '" + t + "'");
    return v;
}

std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t c = line.find(',', start);
        out.emplace_back(line.substr(start, c == std::string_view::npos ? c : c - start));
        if (c == std::string_view::npos) break;
        start = c + 1;
    }
    if (!out.empty() && !out.back().empty() && out.back().back() == '\r') out.back().pop_back();
    return out;
}

namespace {
std::vector<std::string> next_row(std::istream& is, const char* what) {
    std::string line;
    if (!std::getline(is, line)) throw FormatError(std::string("unexpected end of file reading ") + what);
    return split_csv(line);
}
}  // namespace

void write_header(std::ostream& os, const Chart& chart, std::string_view kind) {
    os << "format_version,chart_R,chart_M\n"
       << kFormatVersion << ',' << hex(chart.R()) << ',' << chart.M() << '\n'
       << "kind," << kind << '\n';
}

Chart read_header(std::istream& is, std::string_view kind) {
    const auto h = next_row(is, "header");
    if (h.size() != 3 || h[0] != "format_version" || h[1] != "chart_R" || h[2] != "chart_M")
        throw FormatError("corrupted header: expected 'format_version,chart_R,chart_M'");
    const auto v = next_row(is, "header values");
    if (v.size() != 3) throw FormatError("corrupted header value row");
    const long long version = parse_int(v[0]);
    if (version != kFormatVersion)
        throw UnsupportedVersionError("unsupported format_version " + v[0] + " (this build reads " +
                                      std::to_string(kFormatVersion) + ")");
    const Chart chart(parse_double(v[1]), static_cast<int>(parse_int(v[2])));
    const auto k = next_row(is, "kind");
    if (k.size() != 2 || k[0] != "kind" || k[1] != kind)
        throw FormatError("expected kind '" + std::string(kind) + "'");
    return chart;
}

void write_grid_function(std::ostream& os, const GridFunction& g) {
    write_header(os, g.chart(), "grid_function");
    os << "index,value\n";
    for (std::size_t i = 0; i < g.size(); ++i) os << i << ',' << hex(g[i]) << '\n';
}

GridFunction read_grid_function(std::istream& is) {
    const Chart chart = read_header(is, "grid_function");
    (void)next_row(is, "column names");
    GridFunction g(chart);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto r = next_row(is, "grid values");
        if (r.size() != 2 || parse_int(r[0]) != static_cast<long long>(i))
            throw FormatError("grid function row " + std::to_string(i) + " is malformed");
        g[i] = parse_double(r[1]);
    }
    return g;
}

void write_measure(std::ostream& os, const Chart& chart, const DiscreteMeasure& mu) {
    write_header(os, chart, mu.kind == MeasureKind::grid_cells ? "measure_cells" : "measure_points");
    os << "index,re,im,mass\n";
    for (std::size_t i = 0; i < mu.size(); ++i)
        os << mu.node[i] << ',' << hex(mu.points[i].real()) << ',' << hex(mu.points[i].imag()) << ','
           << hex(mu.masses[i]) << '\n';
}

DiscreteMeasure read_measure(std::istream& is, Chart* chart) {
    // The kind tag decides the measure kind; accept either.
    const auto h = next_row(is, "header");
    if (h.size() != 3 || h[0] != "format_version") throw FormatError("corrupted header");
    const auto v = next_row(is, "header values");
    if (v.size() != 3) throw FormatError("corrupted header value row");
    if (parse_int(v[0]) != kFormatVersion) throw UnsupportedVersionError("unsupported format_version " + v[0]);
    const Chart c(parse_double(v[1]), static_cast<int>(parse_int(v[2])));
    if (chart) *chart = c;
    const auto k = next_row(is, "kind");
    DiscreteMeasure mu;
    if (k.size() == 2 && k[1] == "measure_cells")
        mu.kind = MeasureKind::grid_cells;
    else if (k.size() == 2 && k[1] == "measure_points")
        mu.kind = MeasureKind::point_atoms;
    else
        throw FormatError("expected a measure file");
    (void)next_row(is, "column names");
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto r = split_csv(line);
        if (r.size() != 4) throw FormatError("malformed measure row");
        mu.add(cplx(parse_double(r[1]), parse_double(r[2])), parse_double(r[3]), parse_int(r[0]));
    }
    return mu;
}

void write_basis(std::ostream& os, const Chart& chart, const SectionBasis& b) {
    write_header(os, chart, "section_basis");
    os << "degree," << b.degree << '\n'
       << "basis_kind," << (b.kind == BasisKind::monomial ? "monomial" : "orthonormalized") << '\n'
       << "row,col,re,im\n";
    for (int i = 0; i < b.dim; ++i)
        for (int j = 0; j < b.dim; ++j)
            os << i << ',' << j << ',' << hex(b.coeff(i, j).real()) << ',' << hex(b.coeff(i, j).imag())
               << '\n';
}

SectionBasis read_basis(std::istream& is) {
    (void)read_header(is, "section_basis");
    const auto d = next_row(is, "degree");
    if (d.size() != 2 || d[0] != "degree") throw FormatError("missing degree row");
    const auto k = next_row(is, "basis kind");
    if (k.size() != 2 || k[0] != "basis_kind") throw FormatError("missing basis_kind row");
    SectionBasis b = SectionBasis::monomial(static_cast<int>(parse_int(d[1])));
    b.kind = k[1] == "monomial" ? BasisKind::monomial : BasisKind::orthonormalized;
    (void)next_row(is, "column names");
    for (int i = 0; i < b.dim; ++i)
        for (int j = 0; j < b.dim; ++j) {
            const auto r = next_row(is, "coefficients");
            if (r.size() != 4) throw FormatError("malformed coefficient row");
            b.coeff(i, j) = cplx(parse_double(r[2]), parse_double(r[3]));
        }
    b.provenance = "file";
    return b;
}

void save_text(const std::string& path, const std::string& contents) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open '" + path + "' for writing");
    f << contents;
    if (!f) throw ConfigError("write to '" + path + "' failed");
}

std::string load_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace eqlab
