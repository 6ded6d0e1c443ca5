#pragma once

#include <complex>
#include <memory>
#include <string>
#include <string_view>

namespace eqlab {

using cplx = std::complex<double>;

/// Closed-form scalar expression in the chart variables x, y, r = |z| and r2 = |z|^2.
///
/// Grammar: numbers, `pi`, `+ - * / ^`, parentheses and the functions
/// exp, log, sqrt, sin, cos, tanh, atan, abs. Second derivatives are exact
/// (forward-mode jets), so the Laplacian never involves a finite difference.
class Expr {
public:
    Expr();
    static Expr parse(std::string_view text);

    [[nodiscard]] double value(double x, double y) const;
    [[nodiscard]] double laplacian(double x, double y) const;
    [[nodiscard]] bool is_constant() const;
    [[nodiscard]] const std::string& text() const noexcept { return text_; }

    struct Node;

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

/// A weight given in closed form. The `flat:` prefix selects the flat frame,
/// where the expression is the potential of the weight in the trivialization
/// (phi_fs = expr - rho0). Without the prefix the expression is phi_fs itself.
struct WeightSpec {
    std::string text;
    bool flat = false;
    Expr expr;

    static WeightSpec parse(std::string_view text);
    static WeightSpec zero() { return parse("0"); }

    /// phi in the Fubini-Study frame at z.
    [[nodiscard]] double value(cplx z) const;
    /// Laplacian of the Fubini-Study frame phi at z.
    [[nodiscard]] double laplacian(cplx z) const;
};

}  // namespace eqlab
