#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eqlab/expr.hpp"

namespace eqlab {

using cplx = std::complex<double>;

/// Square chart [-R,R]^2 of the affine coordinate z, sampled on a (2M+1)^2 grid.
class Chart {
public:
    Chart(double half_width, int resolution);
    /// Chart of an interior region of a model chart; exempt from the R >= 2 rule.
    static Chart subchart(double half_width, int resolution);

    [[nodiscard]] double R() const noexcept { return R_; }
    [[nodiscard]] int M() const noexcept { return M_; }
    [[nodiscard]] double h() const noexcept { return R_ / M_; }
    /// Nodes per axis, 2M+1.
    [[nodiscard]] int n() const noexcept { return 2 * M_ + 1; }
    [[nodiscard]] std::size_t size() const noexcept {
        return static_cast<std::size_t>(n()) * static_cast<std::size_t>(n());
    }
    [[nodiscard]] std::size_t index(int j, int k) const noexcept {
        return static_cast<std::size_t>(k) * static_cast<std::size_t>(n()) +
               static_cast<std::size_t>(j);
    }
    [[nodiscard]] int col(std::size_t idx) const noexcept { return static_cast<int>(idx % n()); }
    [[nodiscard]] int row(std::size_t idx) const noexcept { return static_cast<int>(idx / n()); }
    [[nodiscard]] cplx node(int j, int k) const noexcept {
        return {-R_ + j * h(), -R_ + k * h()};
    }
    [[nodiscard]] cplx node(std::size_t idx) const noexcept { return node(col(idx), row(idx)); }
    [[nodiscard]] bool on_edge(int j, int k) const noexcept {
        return j == 0 || k == 0 || j == n() - 1 || k == n() - 1;
    }
    [[nodiscard]] bool in_box(cplx z) const noexcept {
        return std::abs(z.real()) <= R_ && std::abs(z.imag()) <= R_;
    }
    bool operator==(const Chart&) const = default;

private:
    struct Unchecked {};
    Chart(double half_width, int resolution, Unchecked);
    double R_;
    int M_;
};

/// Real field on the nodes of a chart.
class GridFunction {
public:
    GridFunction(const Chart& chart, double fill = 0.0);
    GridFunction(const Chart& chart, std::vector<double> values);

    [[nodiscard]] const Chart& chart() const noexcept { return chart_; }
    [[nodiscard]] double operator()(int j, int k) const { return v_[chart_.index(j, k)]; }
    double& operator()(int j, int k) { return v_[chart_.index(j, k)]; }
    [[nodiscard]] double operator[](std::size_t i) const { return v_[i]; }
    double& operator[](std::size_t i) { return v_[i]; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return v_; }
    std::vector<double>& values() noexcept { return v_; }
    [[nodiscard]] std::size_t size() const noexcept { return v_.size(); }

    /// Bilinear interpolation; z must lie in the chart box.
    [[nodiscard]] double interpolate(cplx z) const;
    /// 5-point Laplacian at an interior node.
    [[nodiscard]] double laplacian(int j, int k) const;
    /// Throws ConsistencyError if any value is not finite.
    void check_finite(std::string_view what) const;

    static GridFunction sample(const Chart& chart, const std::function<double(cplx)>& f);

private:
    Chart chart_;
    std::vector<double> v_;
};

/// rho0(z) = log sqrt(1+|z|^2), the local potential of the reference form.
[[nodiscard]] double fs_potential(cplx z) noexcept;
/// Density of the reference form against Lebesgue measure, (1/pi)(1+|z|^2)^-2.
[[nodiscard]] double fs_density(cplx z) noexcept;
/// Exact reference mass of the rectangle [x0,x1] x [y0,y1].
[[nodiscard]] double fs_rect_mass(double x0, double x1, double y0, double y1) noexcept;

struct ReferenceGeometry {
    Chart chart;
    GridFunction fs_potential;
    GridFunction fs_density;
    double total_mass = 1.0;

    /// Reference mass outside the square covered by interior-node cells.
    [[nodiscard]] double exterior_mass() const;
};

[[nodiscard]] ReferenceGeometry fs_geometry(const Chart& chart);

/// Weight phi in the Fubini-Study frame, evaluable anywhere in the plane.
class WeightField {
public:
    using Fn = std::function<double(cplx)>;

    WeightField();
    static WeightField from_spec(const WeightSpec& spec);
    static WeightField from_function(Fn value, Fn laplacian = nullptr);
    /// Grid-backed field: bilinear inside the chart box, `exterior` outside.
    static WeightField from_grid(GridFunction grid, Fn exterior, Fn exterior_laplacian = nullptr);
    /// a*f + b*g (grids combine nodewise when both are grid-backed on one chart).
    static WeightField linear(double a, const WeightField& f, double b, const WeightField& g);

    [[nodiscard]] double operator()(cplx z) const { return value_(z); }
    [[nodiscard]] double at_node(const Chart& chart, std::size_t idx) const;
    /// Analytic Laplacian where known (grid-backed fields: outside the box only).
    [[nodiscard]] std::optional<double> laplacian(cplx z) const;
    /// Analytic Laplacian; grid-backed fields use their exterior rule at every z.
    [[nodiscard]] std::optional<double> analytic_laplacian(cplx z) const;
    [[nodiscard]] bool has_laplacian() const noexcept { return static_cast<bool>(lap_); }
    [[nodiscard]] const GridFunction* grid() const noexcept {
        return grid_ ? &*grid_ : nullptr;
    }
    [[nodiscard]] WeightField shifted(double c) const { return linear(1.0, *this, 1.0, constant(c)); }
    static WeightField constant(double c);

private:
    struct Raw {};
    explicit WeightField(Raw) {}
    Fn value_;
    Fn lap_;
    std::optional<GridFunction> grid_;
    Fn exterior_;
    Fn exterior_lap_;
};

enum class SetKind { unit_disc, interval, annulus, square, whole };

/// Closed-form compact sets of the chart (and the whole projective line).
struct SetShape {
    SetKind kind = SetKind::unit_disc;
    double inner = 0.5;  // annulus inner radius

    static SetShape parse(std::string_view name);
    [[nodiscard]] std::string name() const;
    /// Membership in the exact (continuum) set.
    [[nodiscard]] bool contains(cplx z) const noexcept;
    /// Grid membership rule at spacing h.
    [[nodiscard]] bool rasterized(cplx z, double h) const noexcept;
    /// Half-width of the smallest centered square containing the set.
    [[nodiscard]] double extent() const noexcept;
    [[nodiscard]] cplx project_to_boundary(cplx z) const noexcept;
    [[nodiscard]] double distance_to_boundary(cplx z) const noexcept;
};

/// Compact set K (grid mask) with a weight phi on it.
struct WeightedSet {
    Chart chart;
    SetShape shape;
    std::vector<std::uint8_t> mask;
    WeightField phi;
    GridFunction phi_grid;
    std::optional<double> holder_exponent;

    [[nodiscard]] bool whole() const noexcept { return shape.kind == SetKind::whole; }
    [[nodiscard]] std::size_t count() const;
    [[nodiscard]] bool in_mask(std::size_t idx) const { return mask[idx] != 0; }
    /// Throws ConfigError unless K can carry degree-max_degree sections.
    void validate(int max_degree) const;
    /// Same set and mask with another weight.
    [[nodiscard]] WeightedSet with_weight(const WeightField& w) const;
};

[[nodiscard]] WeightedSet make_weighted_set(const Chart& chart, const SetShape& shape,
                                            const WeightField& phi);
[[nodiscard]] WeightedSet build_builtin_set(std::string_view name, const Chart& chart,
                                            const WeightSpec& weight);

enum class MeasureKind { point_atoms, grid_cells };

/// Nonnegative atoms; node[i] is the grid index of atom i or -1 when off-grid.
struct DiscreteMeasure {
    MeasureKind kind = MeasureKind::point_atoms;
    std::vector<cplx> points;
    std::vector<double> masses;
    std::vector<std::int64_t> node;

    [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
    [[nodiscard]] double total() const;
    void add(cplx z, double m, std::int64_t idx = -1);
    [[nodiscard]] DiscreteMeasure scaled(double c) const;
    /// Rescaled to total mass exactly 1 (up to the final rounding).
    [[nodiscard]] DiscreteMeasure normalized() const;
    /// Throws ConsistencyError on negative masses or, if probability, on |total-1| > 1e-12.
    void check(bool probability) const;
    /// Integral of f against the measure.
    [[nodiscard]] double integrate(const std::function<double(cplx)>& f) const;
};

[[nodiscard]] DiscreteMeasure operator+(const DiscreteMeasure& a, const DiscreteMeasure& b);

/// Quadrature atoms for the reference probability measure mu0 outside the
/// interior-cell square [-a,a]^2, a = R - h/2, in octant-wise Gauss form.
[[nodiscard]] DiscreteMeasure fs_exterior_atoms(const Chart& chart, int angular = 24,
                                                int radial = 48);
/// mu0 discretized as interior-node cells (exact cell masses) plus exterior atoms.
[[nodiscard]] DiscreteMeasure fs_measure(const Chart& chart);

/// Gauss-Legendre nodes and weights on [a,b].
void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w);

}  // namespace eqlab
