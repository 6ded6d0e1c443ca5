#include "eqlab/expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

#include "eqlab/errors.hpp"

namespace eqlab {

namespace {

// Value with first and second derivative along one coordinate direction.
struct Jet {
    double v = 0, d = 0, dd = 0;
};

Jet operator+(Jet a, Jet b) { return {a.v + b.v, a.d + b.d, a.dd + b.dd}; }
Jet operator-(Jet a, Jet b) { return {a.v - b.v, a.d - b.d, a.dd - b.dd}; }
Jet operator-(Jet a) { return {-a.v, -a.d, -a.dd}; }
Jet operator*(Jet a, Jet b) {
    return {a.v * b.v, a.d * b.v + a.v * b.d, a.dd * b.v + 2 * a.d * b.d + a.v * b.dd};
}
// Chain rule for g(u) given g, g', g'' at u.
Jet chain(Jet u, double g, double g1, double g2) {
    return {g, g1 * u.d, g2 * u.d * u.d + g1 * u.dd};
}
Jet operator/(Jet a, Jet b) {
    const double iv = 1.0 / b.v;
    return a * chain(b, iv, -iv * iv, 2 * iv * iv * iv);
}

enum class Op { num, x, y, r, r2, add, sub, mul, div, pow, neg, fn };
enum class Fn { exp, log, sqrt, sin, cos, tanh, atan, abs };

}  // namespace

struct Expr::Node {
    Op op = Op::num;
    Fn fn = Fn::exp;
    double num = 0;
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodeP = std::shared_ptr<const Expr::Node>;

NodeP make(Op op, NodeP a = nullptr, NodeP b = nullptr) {
    auto n = std::make_shared<Expr::Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    NodeP parse() {
        auto n = expr();
        skip();
        if (i_ != s_.size()) fail("unexpected character");
        return n;
    }

private:
    [[noreturn]] void fail(const char* what) const {
        throw ConfigError("weight expression '" + std::string(s_) + "': " + what + " at offset " +
                          std::to_string(i_));
    }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    NodeP expr() {
        auto n = term();
        for (;;) {
            if (eat('+'))
                n = make(Op::add, n, term());
            else if (eat('-'))
                n = make(Op::sub, n, term());
            else
                return n;
        }
    }
    NodeP term() {
        auto n = unary();
        for (;;) {
            if (eat('*'))
                n = make(Op::mul, n, unary());
            else if (eat('/'))
                n = make(Op::div, n, unary());
            else
                return n;
        }
    }
    NodeP unary() {
        if (eat('-')) return make(Op::neg, unary());
        if (eat('+')) return unary();
        return power();
    }
    NodeP power() {
        auto n = primary();
        if (eat('^')) return make(Op::pow, n, unary());
        return n;
    }
    NodeP primary() {
        skip();
        if (i_ >= s_.size()) fail("unexpected end");
        if (eat('(')) {
            auto n = expr();
            if (!eat(')')) fail("missing ')'");
            return n;
        }
        const char c = s_[i_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const std::string rest(s_.substr(i_));
            std::size_t used = 0;
            double v = 0;
            try {
                v = std::stod(rest, &used);
            } catch (const std::exception&) {
                fail("bad number");
            }
            i_ += used;
            auto n = std::make_shared<Expr::Node>();
            n->num = v;
            return n;
        }
        if (!std::isalpha(static_cast<unsigned char>(c))) fail("unexpected character");
        std::size_t j = i_;
        while (j < s_.size() && std::isalnum(static_cast<unsigned char>(s_[j]))) ++j;
        const std::string id(s_.substr(i_, j - i_));
        i_ = j;
        if (id == "x") return make(Op::x);
        if (id == "y") return make(Op::y);
        if (id == "r") return make(Op::r);
        if (id == "r2") return make(Op::r2);
        if (id == "pi") {
            auto n = std::make_shared<Expr::Node>();
            n->num = std::numbers::pi;
            return n;
        }
        static const std::pair<const char*, Fn> fns[] = {
            {"exp", Fn::exp},   {"log", Fn::log},   {"sqrt", Fn::sqrt}, {"sin", Fn::sin},
            {"cos", Fn::cos},   {"tanh", Fn::tanh}, {"atan", Fn::atan}, {"abs", Fn::abs}};
        for (const auto& [name, fn] : fns) {
            if (id == name) {
                if (!eat('(')) fail("expected '(' after function name");
                auto arg = expr();
                if (!eat(')')) fail("missing ')'");
                auto n = std::make_shared<Expr::Node>();
                n->op = Op::fn;
                n->fn = fn;
                n->a = arg;
                return n;
            }
        }
        fail("unknown identifier");
    }

    std::string_view s_;
    std::size_t i_ = 0;
};

double apply(Fn f, double u) {
    switch (f) {
        case Fn::exp: return std::exp(u);
        case Fn::log: return std::log(u);
        case Fn::sqrt: return std::sqrt(u);
        case Fn::sin: return std::sin(u);
        case Fn::cos: return std::cos(u);
        case Fn::tanh: return std::tanh(u);
        case Fn::atan: return std::atan(u);
        case Fn::abs: return std::abs(u);
    }
    return 0;
}

Jet apply(Fn f, Jet u) {
    const double x = u.v;
    switch (f) {
        case Fn::exp: {
            const double e = std::exp(x);
            return chain(u, e, e, e);
        }
        case Fn::log: return chain(u, std::log(x), 1 / x, -1 / (x * x));
        case Fn::sqrt: {
            const double s = std::sqrt(x);
            return chain(u, s, 0.5 / s, -0.25 / (s * x));
        }
        case Fn::sin: return chain(u, std::sin(x), std::cos(x), -std::sin(x));
        case Fn::cos: return chain(u, std::cos(x), -std::sin(x), -std::cos(x));
        case Fn::tanh: {
            const double t = std::tanh(x);
            const double s = 1 - t * t;
            return chain(u, t, s, -2 * t * s);
        }
        case Fn::atan: {
            const double q = 1 / (1 + x * x);
            return chain(u, std::atan(x), q, -2 * x * q * q);
        }
        case Fn::abs: return chain(u, std::abs(x), x < 0 ? -1.0 : 1.0, 0.0);
    }
    return {};
}

double eval(const Expr::Node& n, double x, double y) {
    switch (n.op) {
        case Op::num: return n.num;
        case Op::x: return x;
        case Op::y: return y;
        case Op::r: return std::hypot(x, y);
        case Op::r2: return x * x + y * y;
        case Op::add: return eval(*n.a, x, y) + eval(*n.b, x, y);
        case Op::sub: return eval(*n.a, x, y) - eval(*n.b, x, y);
        case Op::mul: return eval(*n.a, x, y) * eval(*n.b, x, y);
        case Op::div: return eval(*n.a, x, y) / eval(*n.b, x, y);
        case Op::pow: return std::pow(eval(*n.a, x, y), eval(*n.b, x, y));
        case Op::neg: return -eval(*n.a, x, y);
        case Op::fn: return apply(n.fn, eval(*n.a, x, y));
    }
    return 0;
}

// Jet evaluation along direction (dx, dy) in {(1,0), (0,1)}.
Jet eval(const Expr::Node& n, Jet x, Jet y) {
    switch (n.op) {
        case Op::num: return {n.num, 0, 0};
        case Op::x: return x;
        case Op::y: return y;
        case Op::r: return apply(Fn::sqrt, x * x + y * y);
        case Op::r2: return x * x + y * y;
        case Op::add: return eval(*n.a, x, y) + eval(*n.b, x, y);
        case Op::sub: return eval(*n.a, x, y) - eval(*n.b, x, y);
        case Op::mul: return eval(*n.a, x, y) * eval(*n.b, x, y);
        case Op::div: return eval(*n.a, x, y) / eval(*n.b, x, y);
        case Op::pow: {
            const Jet b = eval(*n.b, x, y);
            const Jet a = eval(*n.a, x, y);
            if (b.d == 0 && b.dd == 0) {
                const double c = b.v;
                if (a.v == 0 && c >= 2) {
                    const double g2 = (c == 2) ? 2.0 : 0.0;
                    return chain(a, 0, 0, g2);
                }
                return chain(a, std::pow(a.v, c), c * std::pow(a.v, c - 1),
                             c * (c - 1) * std::pow(a.v, c - 2));
            }
            return apply(Fn::exp, b * apply(Fn::log, a));
        }
        case Op::neg: return -eval(*n.a, x, y);
        case Op::fn: return apply(n.fn, eval(*n.a, x, y));
    }
    return {};
}

bool constant(const Expr::Node& n) {
    switch (n.op) {
        case Op::num: return true;
        case Op::x:
        case Op::y:
        case Op::r:
        case Op::r2: return false;
        default: return constant(*n.a) && (!n.b || constant(*n.b));
    }
}

}  // namespace

Expr::Expr() : root_(std::make_shared<Node>()), text_("0") {}

Expr Expr::parse(std::string_view text) {
    Expr e;
    e.root_ = Parser(text).parse();
    e.text_ = std::string(text);
    return e;
}

double Expr::value(double x, double y) const { return eval(*root_, x, y); }

double Expr::laplacian(double x, double y) const {
    const Jet ex = eval(*root_, Jet{x, 1, 0}, Jet{y, 0, 0});
    const Jet ey = eval(*root_, Jet{x, 0, 0}, Jet{y, 1, 0});
    return ex.dd + ey.dd;
}

bool Expr::is_constant() const { return constant(*root_); }

WeightSpec WeightSpec::parse(std::string_view text) {
    WeightSpec w;
    w.text = std::string(text);
    std::string_view body = text;
    constexpr std::string_view prefix = "flat:";
    if (body.substr(0, prefix.size()) == prefix) {
        w.flat = true;
        body.remove_prefix(prefix.size());
    }
    w.expr = Expr::parse(body);
    return w;
}

double WeightSpec::value(cplx z) const {
    const double v = expr.value(z.real(), z.imag());
    if (!flat) return v;
    return v - 0.5 * std::log1p(std::norm(z));
}

double WeightSpec::laplacian(cplx z) const {
    const double l = expr.laplacian(z.real(), z.imag());
    if (!flat) return l;
    const double q = 1 + std::norm(z);
    return l - 2 / (q * q);
}

}  // namespace eqlab
