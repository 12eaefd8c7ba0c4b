#pragma once

// Scalar and vector field expressions over ambient coordinates x1..xn.
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-'? power
//   power  := atom ('^' factor)?
//   atom   := number | 'pi' | 'norm2' | coord | func '(' expr ')' | '(' expr ')'
//   coord  := 'x' digits            (1-based)
//   func   := sqrt | abs | sin | cos | arccos
//
// norm2 is the squared Euclidean norm of the coordinate vector.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "slantkit/errors.hpp"
#include "slantkit/linalg.hpp"

namespace slantkit {

namespace ast {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

enum class BinaryOp { add, sub, mul, div, pow };
enum class Function { sqrt, abs, sin, cos, arccos };

struct Number {
    double value;
};
struct Coordinate {
    std::size_t index;  // 0-based
};
struct Pi {};
struct Norm2 {};
struct Negate {
    NodePtr operand;
};
struct Binary {
    BinaryOp op;
    NodePtr lhs;
    NodePtr rhs;
};
struct Call {
    Function function;
    NodePtr argument;
};

struct Node {
    std::variant<Number, Coordinate, Pi, Norm2, Negate, Binary, Call> data;
};

inline constexpr std::array<std::pair<std::string_view, Function>, 5> function_names{{
    {"sqrt", Function::sqrt},
    {"abs", Function::abs},
    {"sin", Function::sin},
    {"cos", Function::cos},
    {"arccos", Function::arccos},
}};

inline std::string_view name_of(Function f) {
    for (const auto& [name, fn] : function_names)
        if (fn == f) return name;
    return "?";
}

inline char symbol_of(BinaryOp op) {
    switch (op) {
        case BinaryOp::add: return '+';
        case BinaryOp::sub: return '-';
        case BinaryOp::mul: return '*';
        case BinaryOp::div: return '/';
        case BinaryOp::pow: return '^';
    }
    return '?';
}

inline std::string format_number(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

// Fully parenthesized; parses back to the same tree.
inline std::string print(const Node& node) {
    return std::visit(
        [](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Number>) {
                return format_number(n.value);
            } else if constexpr (std::is_same_v<T, Coordinate>) {
                return "x" + std::to_string(n.index + 1);
            } else if constexpr (std::is_same_v<T, Pi>) {
                return "pi";
            } else if constexpr (std::is_same_v<T, Norm2>) {
                return "norm2";
            } else if constexpr (std::is_same_v<T, Negate>) {
                return "(-" + print(*n.operand) + ")";
            } else if constexpr (std::is_same_v<T, Binary>) {
                return "(" + print(*n.lhs) + " " + symbol_of(n.op) + " " + print(*n.rhs) + ")";
            } else {
                return std::string(name_of(n.function)) + "(" + print(*n.argument) + ")";
            }
        },
        node.data);
}

inline bool structurally_equal(const Node& a, const Node& b) {
    if (a.data.index() != b.data.index()) return false;
    return std::visit(
        [&b](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.data);
            if constexpr (std::is_same_v<T, Number>) {
                return x.value == y.value;
            } else if constexpr (std::is_same_v<T, Coordinate>) {
                return x.index == y.index;
            } else if constexpr (std::is_same_v<T, Pi> || std::is_same_v<T, Norm2>) {
                return true;
            } else if constexpr (std::is_same_v<T, Negate>) {
                return structurally_equal(*x.operand, *y.operand);
            } else if constexpr (std::is_same_v<T, Binary>) {
                return x.op == y.op && structurally_equal(*x.lhs, *y.lhs) && structurally_equal(*x.rhs, *y.rhs);
            } else {
                return x.function == y.function && structurally_equal(*x.argument, *y.argument);
            }
        },
        a.data);
}

inline constexpr double clamp_window = 1e-12;

inline double checked(double value, const Node& node) {
    if (!std::isfinite(value)) throw EvalError("non-finite result", print(node));
    return value;
}

inline double evaluate(const Node& node, std::span<const double> x) {
    return std::visit(
        [&](const auto& n) -> double {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Number>) {
                return n.value;
            } else if constexpr (std::is_same_v<T, Coordinate>) {
                return x[n.index];
            } else if constexpr (std::is_same_v<T, Pi>) {
                return std::numbers::pi;
            } else if constexpr (std::is_same_v<T, Norm2>) {
                double s = 0.0;
                for (double c : x) s += c * c;
                return s;
            } else if constexpr (std::is_same_v<T, Negate>) {
                return -evaluate(*n.operand, x);
            } else if constexpr (std::is_same_v<T, Binary>) {
                const double l = evaluate(*n.lhs, x);
                const double r = evaluate(*n.rhs, x);
                switch (n.op) {
                    case BinaryOp::add: return checked(l + r, node);
                    case BinaryOp::sub: return checked(l - r, node);
                    case BinaryOp::mul: return checked(l * r, node);
                    case BinaryOp::div:
                        if (r == 0.0) throw EvalError("division by zero", print(node));
                        return checked(l / r, node);
                    case BinaryOp::pow: return checked(std::pow(l, r), node);
                }
                return 0.0;
            } else {
                const double a = evaluate(*n.argument, x);
                switch (n.function) {
                    case Function::sqrt:
                        if (a < -clamp_window) throw EvalError("sqrt of negative value", print(node));
                        return std::sqrt(std::max(0.0, a));
                    case Function::abs: return std::abs(a);
                    case Function::sin: return checked(std::sin(a), node);
                    case Function::cos: return checked(std::cos(a), node);
                    case Function::arccos:
                        if (std::abs(a) > 1.0 + clamp_window) throw EvalError("arccos argument outside [-1,1]", print(node));
                        return std::acos(std::clamp(a, -1.0, 1.0));
                }
                return 0.0;
            }
        },
        node.data);
}

class Parser {
public:
    Parser(std::string_view src, std::size_t n) : src_(src), n_(n) {}

    NodePtr parse() {
        skip_space();
        if (pos_ == src_.size()) fail("empty expression");
        NodePtr root = expr();
        skip_space();
        if (pos_ != src_.size()) fail(std::string("unexpected character '") + src_[pos_] + "'");
        return root;
    }

private:
    static constexpr int max_depth = 200;

    [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, pos_); }
    [[noreturn]] void fail_at(const std::string& message, std::size_t at) const { throw ParseError(message, at); }

    void skip_space() {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r'))
            ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static NodePtr make(auto payload) { return std::make_shared<const Node>(Node{std::move(payload)}); }

    struct DepthGuard {
        Parser& p;
        explicit DepthGuard(Parser& parser) : p(parser) {
            if (++p.depth_ > max_depth) p.fail("expression nested too deeply");
        }
        ~DepthGuard() { --p.depth_; }
    };

    NodePtr expr() {
        DepthGuard guard(*this);
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = make(Binary{BinaryOp::add, lhs, term()});
            } else if (accept('-')) {
                lhs = make(Binary{BinaryOp::sub, lhs, term()});
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = factor();
        for (;;) {
            if (accept('*')) {
                lhs = make(Binary{BinaryOp::mul, lhs, factor()});
            } else if (accept('/')) {
                lhs = make(Binary{BinaryOp::div, lhs, factor()});
            } else {
                return lhs;
            }
        }
    }

    NodePtr factor() {
        DepthGuard guard(*this);
        if (accept('-')) return make(Negate{power()});
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        if (accept('^')) return make(Binary{BinaryOp::pow, base, factor()});
        return base;
    }

    static bool is_digit(char c) { return c >= '0' && c <= '9'; }
    static bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
    static bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

    NodePtr atom() {
        skip_space();
        if (pos_ == src_.size()) fail("unexpected end of expression");
        const char c = src_[pos_];
        if (is_digit(c) || c == '.') return number();
        if (c == '(') {
            ++pos_;
            NodePtr inner = expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (is_ident_start(c)) return identifier();
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr number() {
        const std::size_t start = pos_;
        std::size_t end = pos_;
        while (end < src_.size() && is_digit(src_[end])) ++end;
        const bool int_digits = end > start;
        bool frac_digits = false;
        if (end < src_.size() && src_[end] == '.') {
            ++end;
            const std::size_t frac_start = end;
            while (end < src_.size() && is_digit(src_[end])) ++end;
            frac_digits = end > frac_start;
        }
        if (!int_digits && !frac_digits) fail_at("malformed number", start);
        if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
            std::size_t exp = end + 1;
            if (exp < src_.size() && (src_[exp] == '+' || src_[exp] == '-')) ++exp;
            const std::size_t exp_digits = exp;
            while (exp < src_.size() && is_digit(src_[exp])) ++exp;
            if (exp == exp_digits) fail_at("malformed exponent", end);
            end = exp;
        }
        double value = 0.0;
        const auto res = std::from_chars(src_.data() + start, src_.data() + end, value);
        if (res.ec != std::errc() || res.ptr != src_.data() + end) fail_at("malformed number", start);
        if (!std::isfinite(value)) fail_at("number out of range", start);
        pos_ = end;
        return make(Number{value});
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
        const std::string_view word = src_.substr(start, pos_ - start);
        if (word == "pi") return make(Pi{});
        if (word == "norm2") return make(Norm2{});
        for (const auto& [name, fn] : function_names) {
            if (word == name) {
                if (!accept('(')) fail("expected '(' after function name");
                NodePtr arg = expr();
                if (!accept(')')) fail("expected ')'");
                return make(Call{fn, arg});
            }
        }
        const auto digits = word.substr(std::min<std::size_t>(1, word.size()));
        if (word.size() > 1 && word[0] == 'x' && std::all_of(digits.begin(), digits.end(), is_digit)) {
            std::size_t index = 0;
            const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), index);
            if (res.ec != std::errc() || index == 0 || index > n_)
                fail_at("coordinate " + std::string(word) + " outside x1..x" + std::to_string(n_), start);
            return make(Coordinate{index - 1});
        }
        fail_at("unknown identifier '" + std::string(word) + "'", start);
    }

    std::string_view src_;
    std::size_t n_;
    std::size_t pos_ = 0;
    int depth_ = 0;
};

}  // namespace ast

class ScalarFieldExpr {
public:
    ScalarFieldExpr(ast::NodePtr root, std::size_t n) : root_(std::move(root)), n_(n) {}

    static ScalarFieldExpr parse(std::string_view src, std::size_t n) {
        return ScalarFieldExpr(ast::Parser(src, n).parse(), n);
    }

    [[nodiscard]] std::size_t dim() const noexcept { return n_; }
    [[nodiscard]] const ast::Node& root() const noexcept { return *root_; }
    [[nodiscard]] std::string print() const { return ast::print(*root_); }

    [[nodiscard]] double eval(std::span<const double> x) const {
        if (x.size() != n_) throw DimensionError("point dimension differs from expression dimension");
        return ast::evaluate(*root_, x);
    }
    [[nodiscard]] double eval(const Vec& x) const { return eval(std::span<const double>(x.data(), static_cast<std::size_t>(x.size()))); }
    [[nodiscard]] double eval(const AmbientPoint& p) const { return eval(p.coords()); }

    // True when the tree is a numeric literal equal to zero.
    [[nodiscard]] bool is_literal_zero() const {
        const auto* num = std::get_if<ast::Number>(&root_->data);
        return num != nullptr && num->value == 0.0;
    }

    friend bool structurally_equal(const ScalarFieldExpr& a, const ScalarFieldExpr& b) {
        return a.n_ == b.n_ && ast::structurally_equal(*a.root_, *b.root_);
    }

private:
    ast::NodePtr root_;
    std::size_t n_;
};

inline ScalarFieldExpr parse(std::string_view src, std::size_t n) { return ScalarFieldExpr::parse(src, n); }

inline double directional_derivative(const ScalarFieldExpr& e, const AmbientPoint& p, const Vec& dir, double h = 1e-5) {
    if (!(h > 0.0) || !std::isfinite(h)) throw ArgumentError("finite-difference step must be positive");
    if (static_cast<std::size_t>(dir.size()) != p.dim()) throw DimensionError("direction dimension differs from point");
    const Vec plus = p.coords() + h * dir;
    const Vec minus = p.coords() - h * dir;
    return (e.eval(plus) - e.eval(minus)) / (2.0 * h);
}

inline double directional_derivative(const ScalarFieldExpr& e, const AmbientPoint& p, const TangentVector& dir, double h = 1e-5) {
    if (!(dir.base() == p)) throw BasePointError("direction is not based at the evaluation point");
    return directional_derivative(e, p, dir.comps(), h);
}

class VectorFieldExpr {
public:
    explicit VectorFieldExpr(std::vector<ScalarFieldExpr> components) : components_(std::move(components)) {
        for (const auto& c : components_)
            if (c.dim() != components_.size()) throw DimensionError("vector field component count differs from dimension");
    }

    static VectorFieldExpr parse(std::span<const std::string> sources) {
        std::vector<ScalarFieldExpr> comps;
        comps.reserve(sources.size());
        for (const auto& s : sources) comps.push_back(ScalarFieldExpr::parse(s, sources.size()));
        return VectorFieldExpr(std::move(comps));
    }

    [[nodiscard]] std::size_t dim() const noexcept { return components_.size(); }
    [[nodiscard]] const ScalarFieldExpr& operator[](std::size_t i) const { return components_[i]; }
    [[nodiscard]] const std::vector<ScalarFieldExpr>& components() const noexcept { return components_; }

    [[nodiscard]] Vec eval(const Vec& x) const {
        Vec out(static_cast<Eigen::Index>(components_.size()));
        for (std::size_t i = 0; i < components_.size(); ++i) out(static_cast<Eigen::Index>(i)) = components_[i].eval(x);
        return out;
    }
    [[nodiscard]] Vec eval(const AmbientPoint& p) const { return eval(p.coords()); }

private:
    std::vector<ScalarFieldExpr> components_;
};

}  // namespace slantkit
