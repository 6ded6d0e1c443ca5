#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "eqlab/model.hpp"
#include "eqlab/polyspace.hpp"

namespace eqlab {

inline constexpr int kFormatVersion = 1;

/// Hexadecimal float literal, exact under round trip.
[[nodiscard]] std::string hex(double v);
/// Parses a float literal (hexadecimal or decimal); throws FormatError.
[[nodiscard]] double parse_double(std::string_view s);
[[nodiscard]] long long parse_int(std::string_view s);
[[nodiscard]] std::vector<std::string> split_csv(std::string_view line);

/// Writes `format_version,chart_R,chart_M` and its value row, then `kind,<kind>`.
void write_header(std::ostream& os, const Chart& chart, std::string_view kind);
/// Reads the header written by write_header and checks the kind tag.
[[nodiscard]] Chart read_header(std::istream& is, std::string_view kind);

void write_grid_function(std::ostream& os, const GridFunction& g);
[[nodiscard]] GridFunction read_grid_function(std::istream& is);

/// Rows (index, re, im, mass); index is the grid node or -1.
void write_measure(std::ostream& os, const Chart& chart, const DiscreteMeasure& mu);
[[nodiscard]] DiscreteMeasure read_measure(std::istream& is, Chart* chart = nullptr);

/// Rows: degree, kind, then row-major coefficients (re, im).
void write_basis(std::ostream& os, const Chart& chart, const SectionBasis& b);
[[nodiscard]] SectionBasis read_basis(std::istream& is);

void save_text(const std::string& path, const std::string& contents);
[[nodiscard]] std::string load_text(const std::string& path);

}  // namespace eqlab
