#include "eqlab/model.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <numbers>

#include "eqlab/errors.hpp"

namespace eqlab {

namespace {
constexpr double kEps = 1e-12;
}

Chart::Chart(double half_width, int resolution, Unchecked) : R_(half_width), M_(resolution) {
    if (!(half_width > 0) || resolution < 1)
        throw ConfigError("chart needs R > 0 and M >= 1");
}

Chart::Chart(double half_width, int resolution) : Chart(half_width, resolution, Unchecked{}) {
    if (half_width < 2.0) throw ConfigError("chart half-width R must be at least 2");
}

Chart Chart::subchart(double half_width, int resolution) { return Chart(half_width, resolution, Unchecked{}); }

GridFunction::GridFunction(const Chart& chart, double fill) : chart_(chart), v_(chart.size(), fill) {}

GridFunction::GridFunction(const Chart& chart, std::vector<double> values)
    : chart_(chart), v_(std::move(values)) {
    if (v_.size() != chart_.size()) throw ConfigError("grid function size does not match chart");
}

GridFunction GridFunction::sample(const Chart& chart, const std::function<double(cplx)>& f) {
    GridFunction g(chart);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = f(chart.node(i));
    return g;
}

double GridFunction::interpolate(cplx z) const {
    const double h = chart_.h();
    const int last = chart_.n() - 1;
    const double fx = std::clamp((z.real() + chart_.R()) / h, 0.0, static_cast<double>(last));
    const double fy = std::clamp((z.imag() + chart_.R()) / h, 0.0, static_cast<double>(last));
    const int j = std::min(static_cast<int>(fx), last - 1);
    const int k = std::min(static_cast<int>(fy), last - 1);
    const double a = fx - j, b = fy - k;
    return (1 - a) * (1 - b) * (*this)(j, k) + a * (1 - b) * (*this)(j + 1, k) +
           (1 - a) * b * (*this)(j, k + 1) + a * b * (*this)(j + 1, k + 1);
}

double GridFunction::laplacian(int j, int k) const {
    const double h = chart_.h();
    const auto& f = *this;
    return (f(j + 1, k) + f(j - 1, k) + f(j, k + 1) + f(j, k - 1) - 4 * f(j, k)) / (h * h);
}

void GridFunction::check_finite(std::string_view what) const {
    for (std::size_t i = 0; i < v_.size(); ++i)
        if (!std::isfinite(v_[i]))
            throw ConsistencyError(std::string(what) + ": non-finite value at node " +
                                   std::to_string(i));
}

double fs_potential(cplx z) noexcept { return 0.5 * std::log1p(std::norm(z)); }

double fs_density(cplx z) noexcept {
    const double q = 1 + std::norm(z);
    return 1 / (std::numbers::pi * q * q);
}

namespace {
// Antiderivative of (1+x^2+y^2)^-2 in x and y.
double rect_primitive(double x, double y) {
    const double sx = std::sqrt(1 + x * x), sy = std::sqrt(1 + y * y);
    return 0.5 * (x / sx * std::atan(y / sx) + y / sy * std::atan(x / sy));
}
}  // namespace

double fs_rect_mass(double x0, double x1, double y0, double y1) noexcept {
    const double v = rect_primitive(x1, y1) - rect_primitive(x0, y1) - rect_primitive(x1, y0) +
                     rect_primitive(x0, y0);
    return v / std::numbers::pi;
}

double ReferenceGeometry::exterior_mass() const {
    const double a = chart.R() - 0.5 * chart.h();
    return 1.0 - fs_rect_mass(-a, a, -a, a);
}

ReferenceGeometry fs_geometry(const Chart& chart) {
    return ReferenceGeometry{chart, GridFunction::sample(chart, fs_potential),
                             GridFunction::sample(chart, fs_density), 1.0};
}

void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
    gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(static_cast<size_t>(n));
    x.resize(static_cast<std::size_t>(n));
    w.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        gsl_integration_glfixed_point(a, b, static_cast<size_t>(i), &x[i], &w[i], t);
    gsl_integration_glfixed_table_free(t);
}

// ---------------------------------------------------------------- weights

WeightField::WeightField() : WeightField(constant(0.0)) {}

WeightField WeightField::constant(double c) {
    WeightField w{Raw{}};
    w.value_ = [c](cplx) { return c; };
    w.lap_ = [](cplx) { return 0.0; };
    return w;
}

WeightField WeightField::from_spec(const WeightSpec& spec) {
    return from_function([spec](cplx z) { return spec.value(z); },
                         [spec](cplx z) { return spec.laplacian(z); });
}

WeightField WeightField::from_function(Fn value, Fn laplacian) {
    WeightField w = constant(0.0);
    w.value_ = std::move(value);
    w.lap_ = std::move(laplacian);
    return w;
}

WeightField WeightField::from_grid(GridFunction grid, Fn exterior, Fn exterior_laplacian) {
    WeightField w = constant(0.0);
    w.lap_ = nullptr;
    w.grid_ = std::move(grid);
    w.exterior_ = std::move(exterior);
    w.exterior_lap_ = std::move(exterior_laplacian);
    auto shared = std::make_shared<GridFunction>(*w.grid_);
    auto ext = w.exterior_;
    w.value_ = [shared, ext](cplx z) {
        if (shared->chart().in_box(z)) return shared->interpolate(z);
        return ext(z);
    };
    return w;
}

WeightField WeightField::linear(double a, const WeightField& f, double b, const WeightField& g) {
    const GridFunction* gf = f.grid();
    const GridFunction* gg = g.grid();
    if (gf || gg) {
        const Chart& chart = gf ? gf->chart() : gg->chart();
        GridFunction sum(chart);
        for (std::size_t i = 0; i < sum.size(); ++i)
            sum[i] = a * f.at_node(chart, i) + b * g.at_node(chart, i);
        auto ext = [a, b, f, g](cplx z) { return a * f(z) + b * g(z); };
        Fn ext_lap = nullptr;
        if (f.grid_ ? static_cast<bool>(f.exterior_lap_) : f.has_laplacian()) {
            if (g.grid_ ? static_cast<bool>(g.exterior_lap_) : g.has_laplacian())
                ext_lap = [a, b, f, g](cplx z) { return a * *f.laplacian(z) + b * *g.laplacian(z); };
        }
        return from_grid(std::move(sum), ext, ext_lap);
    }
    Fn lap = nullptr;
    if (f.has_laplacian() && g.has_laplacian())
        lap = [a, b, fl = f.lap_, gl = g.lap_](cplx z) { return a * fl(z) + b * gl(z); };
    return from_function([a, b, fv = f.value_, gv = g.value_](cplx z) { return a * fv(z) + b * gv(z); },
                         lap);
}

double WeightField::at_node(const Chart& chart, std::size_t idx) const {
    if (grid_ && grid_->chart() == chart) return (*grid_)[idx];
    return value_(chart.node(idx));
}

std::optional<double> WeightField::laplacian(cplx z) const {
    if (grid_) {
        if (grid_->chart().in_box(z) || !exterior_lap_) return std::nullopt;
        return exterior_lap_(z);
    }
    if (!lap_) return std::nullopt;
    return lap_(z);
}

std::optional<double> WeightField::analytic_laplacian(cplx z) const {
    if (grid_) return exterior_lap_ ? std::optional<double>(exterior_lap_(z)) : std::nullopt;
    if (!lap_) return std::nullopt;
    return lap_(z);
}

// ---------------------------------------------------------------- sets

SetShape SetShape::parse(std::string_view name) {
    SetShape s;
    if (name == "unit-disc" || name == "disc") {
        s.kind = SetKind::unit_disc;
    } else if (name == "interval") {
        s.kind = SetKind::interval;
    } else if (name == "square") {
        s.kind = SetKind::square;
    } else if (name == "whole" || name == "X") {
        s.kind = SetKind::whole;
    } else if (name.substr(0, 7) == "annulus") {
        s.kind = SetKind::annulus;
        std::string_view rest = name.substr(7);
        if (!rest.empty()) {
            if (rest.front() != '(' || rest.back() != ')')
                throw ConfigError("annulus takes the form annulus(r)");
            try {
                s.inner = std::stod(std::string(rest.substr(1, rest.size() - 2)));
            } catch (const std::exception&) {
                throw ConfigError("annulus inner radius is not a number");
            }
        }
        if (!(s.inner > 0 && s.inner < 1)) throw ConfigError("annulus inner radius must lie in (0,1)");
    } else {
        throw ConfigError("unknown set '" + std::string(name) + "'");
    }
    return s;
}

std::string SetShape::name() const {
    switch (kind) {
        case SetKind::unit_disc: return "unit-disc";
        case SetKind::interval: return "interval";
        case SetKind::square: return "square";
        case SetKind::whole: return "whole";
        case SetKind::annulus: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "annulus(%g)", inner);
            return buf;
        }
    }
    return "?";
}

bool SetShape::contains(cplx z) const noexcept {
    const double r2 = std::norm(z);
    switch (kind) {
        case SetKind::unit_disc: return r2 <= 1 + kEps;
        case SetKind::interval: return std::abs(z.imag()) <= kEps && std::abs(z.real()) <= 1 + kEps;
        case SetKind::annulus: return r2 <= 1 + kEps && r2 >= inner * inner - kEps;
        case SetKind::square:
            return std::max(std::abs(z.real()), std::abs(z.imag())) <= 1 + kEps;
        case SetKind::whole: return true;
    }
    return false;
}

bool SetShape::rasterized(cplx z, double h) const noexcept {
    if (kind == SetKind::interval)
        return std::abs(z.imag()) <= 0.5 * h * (1 + kEps) && std::abs(z.real()) <= 1 + kEps;
    return contains(z);
}

double SetShape::extent() const noexcept {
    return kind == SetKind::whole ? std::numeric_limits<double>::infinity() : 1.0;
}

cplx SetShape::project_to_boundary(cplx z) const noexcept {
    const double r = std::abs(z);
    const cplx dir = r > 0 ? z / r : cplx(1, 0);
    switch (kind) {
        case SetKind::unit_disc: return dir;
        case SetKind::interval: return {std::clamp(z.real(), -1.0, 1.0), 0.0};
        case SetKind::annulus:
            return std::abs(r - 1) <= std::abs(r - inner) ? dir : inner * dir;
        case SetKind::square: {
            const double x = z.real(), y = z.imag();
            if (std::max(std::abs(x), std::abs(y)) > 1)
                return {std::clamp(x, -1.0, 1.0), std::clamp(y, -1.0, 1.0)};
            if (1 - std::abs(x) <= 1 - std::abs(y)) return {std::copysign(1.0, x), y};
            return {x, std::copysign(1.0, y)};
        }
        case SetKind::whole: return z;
    }
    return z;
}

double SetShape::distance_to_boundary(cplx z) const noexcept {
    if (kind == SetKind::whole) return std::numeric_limits<double>::infinity();
    return std::abs(z - project_to_boundary(z));
}

std::size_t WeightedSet::count() const {
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

void WeightedSet::validate(int max_degree) const {
    const std::size_t n = count();
    if (n == 0) throw ConfigError("weighted set " + shape.name() + " has an empty mask");
    // In dimension one, N distinct nodes are unisolvent for degree N-1.
    if (n < static_cast<std::size_t>(max_degree) + 1)
        throw ConfigError("weighted set " + shape.name() + " has " + std::to_string(n) +
                          " nodes, fewer than the dimension needed for degree " +
                          std::to_string(max_degree));
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i] && !std::isfinite(phi_grid[i]))
            throw ConfigError("weight is not finite on K at node " + std::to_string(i));
}

WeightedSet WeightedSet::with_weight(const WeightField& w) const {
    WeightedSet s = *this;
    s.phi = w;
    for (std::size_t i = 0; i < s.phi_grid.size(); ++i) s.phi_grid[i] = w.at_node(chart, i);
    return s;
}

WeightedSet make_weighted_set(const Chart& chart, const SetShape& shape, const WeightField& phi) {
    if (shape.kind != SetKind::whole && shape.extent() > 0.5 * chart.R() + kEps)
        throw ConfigError("set " + shape.name() + " does not fit the chart with margin R/2 (R = " +
                          std::to_string(chart.R()) + ")");
    WeightedSet s{chart, shape, std::vector<std::uint8_t>(chart.size(), 0), phi, GridFunction(chart),
                  std::nullopt};
    const double h = chart.h();
    for (std::size_t i = 0; i < chart.size(); ++i) {
        s.mask[i] = shape.rasterized(chart.node(i), h) ? 1 : 0;
        s.phi_grid[i] = phi.at_node(chart, i);
    }
    return s;
}

WeightedSet build_builtin_set(std::string_view name, const Chart& chart, const WeightSpec& weight) {
    return make_weighted_set(chart, SetShape::parse(name), WeightField::from_spec(weight));
}

// ---------------------------------------------------------------- measures

double DiscreteMeasure::total() const {
    double s = 0, c = 0;  // Neumaier summation
    for (double m : masses) {
        const double t = s + m;
        c += std::abs(s) >= std::abs(m) ? (s - t) + m : (m - t) + s;
        s = t;
    }
    return s + c;
}

void DiscreteMeasure::add(cplx z, double m, std::int64_t idx) {
    points.push_back(z);
    masses.push_back(m);
    node.push_back(idx);
}

DiscreteMeasure DiscreteMeasure::scaled(double c) const {
    if (c < 0) throw ConfigError("measure scaling factor must be nonnegative");
    DiscreteMeasure r = *this;
    for (double& m : r.masses) m *= c;
    return r;
}

DiscreteMeasure DiscreteMeasure::normalized() const {
    const double t = total();
    if (!(t > 0)) throw ConsistencyError("cannot normalize a measure of zero mass");
    return scaled(1.0 / t);
}

void DiscreteMeasure::check(bool probability) const {
    for (std::size_t i = 0; i < masses.size(); ++i)
        if (!(masses[i] >= 0)) throw ConsistencyError("negative atom mass at atom " + std::to_string(i));
    if (probability && std::abs(total() - 1) > 1e-12)
        throw ConsistencyError("probability measure has total mass " + std::to_string(total()));
}

double DiscreteMeasure::integrate(const std::function<double(cplx)>& f) const {
    double s = 0;
    for (std::size_t i = 0; i < size(); ++i) s += masses[i] * f(points[i]);
    return s;
}

DiscreteMeasure operator+(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    DiscreteMeasure r = a;
    if (a.kind != b.kind) r.kind = MeasureKind::point_atoms;
    r.points.insert(r.points.end(), b.points.begin(), b.points.end());
    r.masses.insert(r.masses.end(), b.masses.begin(), b.masses.end());
    r.node.insert(r.node.end(), b.node.begin(), b.node.end());
    return r;
}

DiscreteMeasure fs_exterior_atoms(const Chart& chart, int angular, int radial) {
    const double a = chart.R() - 0.5 * chart.h();
    DiscreteMeasure m;
    m.kind = MeasureKind::grid_cells;
    std::vector<double> tx, tw, yx, yw;
    const double q = std::numbers::pi / 4;
    for (int oct = 0; oct < 8; ++oct) {
        gauss_legendre(angular, oct * q, (oct + 1) * q, tx, tw);
        for (int i = 0; i < angular; ++i) {
            const double th = tx[i];
            const double rb = a / std::max(std::abs(std::cos(th)), std::abs(std::sin(th)));
            const double y0 = 1 / (1 + rb * rb);
            // mu0 mass of {|z| > r} is 1/(1+r^2); y = 1/(1+r^2) is uniform in mass.
            gauss_legendre(radial, 0.0, y0, yx, yw);
            for (int j = 0; j < radial; ++j) {
                const double y = yx[j];
                const double r = std::sqrt((1 - y) / y);
                m.add(std::polar(r, th), tw[i] * yw[j] / (2 * std::numbers::pi));
            }
        }
    }
    return m;
}

DiscreteMeasure fs_measure(const Chart& chart) {
    // Node-sampled density (midpoint rule): its error is a boundary term, far
    // smaller than that of exact cell masses paired with node values.
    DiscreteMeasure m;
    m.kind = MeasureKind::grid_cells;
    const double h = chart.h();
    for (int k = 1; k < chart.n() - 1; ++k)
        for (int j = 1; j < chart.n() - 1; ++j) {
            const cplx z = chart.node(j, k);
            m.add(z, fs_density(z) * h * h, static_cast<std::int64_t>(chart.index(j, k)));
        }
    const DiscreteMeasure ext = fs_exterior_atoms(chart);
    m = m.scaled((1.0 - ext.total()) / m.total());
    return m + ext;
}

}  // namespace eqlab
