#pragma once

// Immutable arithmetic expression trees over named real variables.
//
// Used for deformation functions f(q), g(w), potentials U and every
// coefficient the geometry module derives from them. Trees are shared
// (nodes are reference counted and never mutated), so copies are cheap and
// an Expr may be evaluated concurrently from any number of threads.
//
// Construction always goes through folding constructors: an operation whose
// operands are all constants becomes a constant, and the neutral/absorbing
// identities (x+0, x*1, x*0, x^0, x^1, --x) are applied. No other
// simplification is attempted.

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ncbs::expr {

enum class Kind { Constant, Variable, Add, Sub, Mul, Div, Pow, Neg, Exp, Ln, Sqrt };

class Expr {
public:
    /// The constant 0.
    Expr();

    static Expr constant(double value);
    static Expr variable(std::string name);

    Kind kind() const noexcept;
    /// Only meaningful for Kind::Constant.
    double constant_value() const noexcept;
    /// Only meaningful for Kind::Variable.
    const std::string& variable_name() const noexcept;
    /// Only meaningful for Kind::Pow.
    unsigned exponent() const noexcept;
    /// Number of children (0, 1 or 2).
    std::size_t arity() const noexcept;
    /// i-th child; i < arity().
    const Expr& operand(std::size_t i) const;

    bool is_constant() const noexcept { return kind() == Kind::Constant; }
    bool is_constant(double v) const noexcept { return is_constant() && constant_value() == v; }

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    friend Expr make_binary(Kind, Expr, Expr);
    friend Expr make_unary(Kind, Expr);
    friend Expr make_pow(Expr, unsigned);

    std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

inline Expr operator+(double a, const Expr& b) { return Expr::constant(a) + b; }
inline Expr operator+(const Expr& a, double b) { return a + Expr::constant(b); }
inline Expr operator-(double a, const Expr& b) { return Expr::constant(a) - b; }
inline Expr operator-(const Expr& a, double b) { return a - Expr::constant(b); }
inline Expr operator*(double a, const Expr& b) { return Expr::constant(a) * b; }
inline Expr operator*(const Expr& a, double b) { return a * Expr::constant(b); }
inline Expr operator/(const Expr& a, double b) { return a / Expr::constant(b); }
inline Expr operator/(double a, const Expr& b) { return Expr::constant(a) / b; }

Expr pow(const Expr& base, unsigned exponent);
Expr exp(const Expr& e);
Expr ln(const Expr& e);
Expr sqrt(const Expr& e);

/// Variable values for evaluation. Small linear map; expressions here carry
/// at most two variables.
class Bindings {
public:
    Bindings() = default;
    Bindings(std::initializer_list<std::pair<std::string, double>> values);

    Bindings& set(std::string_view name, double value);
    /// nullptr when the name is unbound.
    const double* find(std::string_view name) const noexcept;

private:
    std::vector<std::pair<std::string, double>> values_;
};

/// Parse `text` with variables restricted to `variables`.
///
/// Grammar, loosest to tightest: + - (left), * / (left), unary minus, ^
/// (right, exponent must fold to a non-negative integer constant), atoms:
/// decimal literals, declared variables, exp(.) ln(.) sqrt(.), parentheses.
/// Throws ParseError / UnknownIdentifierError.
Expr parse(std::string_view text, const std::vector<std::string>& variables);

/// Throws DomainError for ln of a non-positive value, sqrt of a negative
/// value, division by zero, or any non-finite intermediate; throws
/// std::invalid_argument when a variable is unbound.
double evaluate(const Expr& e, const Bindings& bindings);

/// Exact symbolic derivative with respect to `var`.
Expr differentiate(const Expr& e, std::string_view var);

/// Replace every occurrence of variable `var` by `replacement`.
Expr substitute(const Expr& e, std::string_view var, const Expr& replacement);

/// Infix rendering that parses back to an evaluation-identical tree.
std::string to_string(const Expr& e);

std::set<std::string> free_variables(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

}  // namespace ncbs::expr
