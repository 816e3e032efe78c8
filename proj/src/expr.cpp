#include "ncbs/expr.hpp"

#include "ncbs/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace ncbs::expr {

struct Expr::Node {
    Kind kind = Kind::Constant;
    double value = 0.0;
    std::string name;
    unsigned exponent = 0;
    std::array<Expr, 2> children;
    std::size_t arity = 0;
};

// A null node is the constant 0; this keeps default construction (and the
// default-constructed child slots of Node) allocation free.
Expr::Expr() = default;

Expr Expr::constant(double value) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Constant;
    n->value = value;
    return Expr(std::move(n));
}

Expr Expr::variable(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Variable;
    n->name = std::move(name);
    return Expr(std::move(n));
}

Kind Expr::kind() const noexcept { return node_ ? node_->kind : Kind::Constant; }
double Expr::constant_value() const noexcept { return node_ ? node_->value : 0.0; }

const std::string& Expr::variable_name() const noexcept {
    static const std::string empty;
    return node_ ? node_->name : empty;
}

unsigned Expr::exponent() const noexcept { return node_ ? node_->exponent : 0U; }
std::size_t Expr::arity() const noexcept { return node_ ? node_->arity : 0U; }

const Expr& Expr::operand(std::size_t i) const {
    if (i >= arity()) throw std::out_of_range("expression operand index");
    return node_->children[i];
}

Expr make_binary(Kind kind, Expr a, Expr b) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = kind;
    n->children = {std::move(a), std::move(b)};
    n->arity = 2;
    return Expr(std::move(n));
}

Expr make_unary(Kind kind, Expr a) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = kind;
    n->children[0] = std::move(a);
    n->arity = 1;
    return Expr(std::move(n));
}

Expr make_pow(Expr base, unsigned exponent) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = Kind::Pow;
    n->exponent = exponent;
    n->children[0] = std::move(base);
    n->arity = 1;
    return Expr(std::move(n));
}

Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return Expr::constant(a.constant_value() + b.constant_value());
    if (a.is_constant(0.0)) return b;
    if (b.is_constant(0.0)) return a;
    return make_binary(Kind::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return Expr::constant(a.constant_value() - b.constant_value());
    if (b.is_constant(0.0)) return a;
    if (a.is_constant(0.0)) return -b;
    return make_binary(Kind::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return Expr::constant(a.constant_value() * b.constant_value());
    if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
    if (a.is_constant(1.0)) return b;
    if (b.is_constant(1.0)) return a;
    return make_binary(Kind::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
    // x/0 stays unfolded so evaluation reports it.
    if (a.is_constant() && b.is_constant() && b.constant_value() != 0.0)
        return Expr::constant(a.constant_value() / b.constant_value());
    if (b.is_constant(1.0)) return a;
    return make_binary(Kind::Div, a, b);
}

Expr operator-(const Expr& a) {
    if (a.is_constant()) return Expr::constant(-a.constant_value());
    if (a.kind() == Kind::Neg) return a.operand(0);
    return make_unary(Kind::Neg, a);
}

Expr pow(const Expr& base, unsigned exponent) {
    if (exponent == 0) return Expr::constant(1.0);
    if (exponent == 1) return base;
    if (base.is_constant()) return Expr::constant(std::pow(base.constant_value(), static_cast<double>(exponent)));
    return make_pow(base, exponent);
}

Expr exp(const Expr& e) {
    if (e.is_constant() && std::isfinite(std::exp(e.constant_value())))
        return Expr::constant(std::exp(e.constant_value()));
    return make_unary(Kind::Exp, e);
}

Expr ln(const Expr& e) {
    if (e.is_constant() && e.constant_value() > 0.0) return Expr::constant(std::log(e.constant_value()));
    return make_unary(Kind::Ln, e);
}

Expr sqrt(const Expr& e) {
    if (e.is_constant() && e.constant_value() >= 0.0) return Expr::constant(std::sqrt(e.constant_value()));
    return make_unary(Kind::Sqrt, e);
}

// ---------------------------------------------------------------------------
// Bindings

Bindings::Bindings(std::initializer_list<std::pair<std::string, double>> values) {
    for (const auto& [name, value] : values) set(name, value);
}

Bindings& Bindings::set(std::string_view name, double value) {
    for (auto& entry : values_) {
        if (entry.first == name) {
            entry.second = value;
            return *this;
        }
    }
    values_.emplace_back(std::string(name), value);
    return *this;
}

const double* Bindings::find(std::string_view name) const noexcept {
    for (const auto& entry : values_)
        if (entry.first == name) return &entry.second;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double checked(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string("non-finite result in ") + what);
    return v;
}

}  // namespace

double evaluate(const Expr& e, const Bindings& bindings) {
    switch (e.kind()) {
    case Kind::Constant:
        return e.constant_value();
    case Kind::Variable: {
        const double* v = bindings.find(e.variable_name());
        if (v == nullptr) throw std::invalid_argument("unbound variable '" + e.variable_name() + "'");
        return *v;
    }
    case Kind::Add:
        return checked(evaluate(e.operand(0), bindings) + evaluate(e.operand(1), bindings), "addition");
    case Kind::Sub:
        return checked(evaluate(e.operand(0), bindings) - evaluate(e.operand(1), bindings), "subtraction");
    case Kind::Mul:
        return checked(evaluate(e.operand(0), bindings) * evaluate(e.operand(1), bindings), "multiplication");
    case Kind::Div: {
        const double num = evaluate(e.operand(0), bindings);
        const double den = evaluate(e.operand(1), bindings);
        if (den == 0.0) throw DomainError("division by zero");
        return checked(num / den, "division");
    }
    case Kind::Pow:
        return checked(std::pow(evaluate(e.operand(0), bindings), static_cast<double>(e.exponent())), "power");
    case Kind::Neg:
        return -evaluate(e.operand(0), bindings);
    case Kind::Exp:
        return checked(std::exp(evaluate(e.operand(0), bindings)), "exp");
    case Kind::Ln: {
        const double x = evaluate(e.operand(0), bindings);
        if (!(x > 0.0)) throw DomainError("ln of non-positive argument " + std::to_string(x));
        return std::log(x);
    }
    case Kind::Sqrt: {
        const double x = evaluate(e.operand(0), bindings);
        if (x < 0.0) throw DomainError("sqrt of negative argument " + std::to_string(x));
        return std::sqrt(x);
    }
    }
    throw std::logic_error("unhandled expression kind");
}

// ---------------------------------------------------------------------------
// Differentiation and substitution

Expr differentiate(const Expr& e, std::string_view var) {
    switch (e.kind()) {
    case Kind::Constant:
        return Expr::constant(0.0);
    case Kind::Variable:
        return Expr::constant(e.variable_name() == var ? 1.0 : 0.0);
    case Kind::Add:
        return differentiate(e.operand(0), var) + differentiate(e.operand(1), var);
    case Kind::Sub:
        return differentiate(e.operand(0), var) - differentiate(e.operand(1), var);
    case Kind::Mul: {
        const Expr& u = e.operand(0);
        const Expr& v = e.operand(1);
        return differentiate(u, var) * v + u * differentiate(v, var);
    }
    case Kind::Div: {
        const Expr& u = e.operand(0);
        const Expr& v = e.operand(1);
        return (differentiate(u, var) * v - u * differentiate(v, var)) / pow(v, 2);
    }
    case Kind::Pow: {
        const Expr& u = e.operand(0);
        const unsigned n = e.exponent();
        return Expr::constant(static_cast<double>(n)) * pow(u, n - 1) * differentiate(u, var);
    }
    case Kind::Neg:
        return -differentiate(e.operand(0), var);
    case Kind::Exp:
        return e * differentiate(e.operand(0), var);
    case Kind::Ln:
        return differentiate(e.operand(0), var) / e.operand(0);
    case Kind::Sqrt:
        return differentiate(e.operand(0), var) / (Expr::constant(2.0) * e);
    }
    throw std::logic_error("unhandled expression kind");
}

Expr substitute(const Expr& e, std::string_view var, const Expr& replacement) {
    switch (e.kind()) {
    case Kind::Constant:
        return e;
    case Kind::Variable:
        return e.variable_name() == var ? replacement : e;
    case Kind::Add:
        return substitute(e.operand(0), var, replacement) + substitute(e.operand(1), var, replacement);
    case Kind::Sub:
        return substitute(e.operand(0), var, replacement) - substitute(e.operand(1), var, replacement);
    case Kind::Mul:
        return substitute(e.operand(0), var, replacement) * substitute(e.operand(1), var, replacement);
    case Kind::Div:
        return substitute(e.operand(0), var, replacement) / substitute(e.operand(1), var, replacement);
    case Kind::Pow:
        return pow(substitute(e.operand(0), var, replacement), e.exponent());
    case Kind::Neg:
        return -substitute(e.operand(0), var, replacement);
    case Kind::Exp:
        return exp(substitute(e.operand(0), var, replacement));
    case Kind::Ln:
        return ln(substitute(e.operand(0), var, replacement));
    case Kind::Sqrt:
        return sqrt(substitute(e.operand(0), var, replacement));
    }
    throw std::logic_error("unhandled expression kind");
}

static void collect_variables(const Expr& e, std::set<std::string>& out) {
    if (e.kind() == Kind::Variable) out.insert(e.variable_name());
    for (std::size_t i = 0; i < e.arity(); ++i) collect_variables(e.operand(i), out);
}

std::set<std::string> free_variables(const Expr& e) {
    std::set<std::string> out;
    collect_variables(e, out);
    return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.kind() != b.kind() || a.arity() != b.arity()) return false;
    switch (a.kind()) {
    case Kind::Constant:
        return a.constant_value() == b.constant_value();
    case Kind::Variable:
        return a.variable_name() == b.variable_name();
    case Kind::Pow:
        if (a.exponent() != b.exponent()) return false;
        break;
    default:
        break;
    }
    for (std::size_t i = 0; i < a.arity(); ++i)
        if (!structurally_equal(a.operand(i), b.operand(i))) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

// Binding strength used by the printer; mirrors the parser.
constexpr int kAdditive = 1;
constexpr int kMultiplicative = 2;
constexpr int kUnary = 3;
constexpr int kPower = 4;
constexpr int kAtom = 5;

int precedence(const Expr& e) {
    switch (e.kind()) {
    case Kind::Add:
    case Kind::Sub:
        return kAdditive;
    case Kind::Mul:
    case Kind::Div:
        return kMultiplicative;
    case Kind::Neg:
        return kUnary;
    case Kind::Pow:
        return kPower;
    case Kind::Constant:
        return std::signbit(e.constant_value()) ? kUnary : kAtom;
    default:
        return kAtom;
    }
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void print(const Expr& e, std::string& out);

void print_operand(const Expr& e, int min_precedence, std::string& out) {
    if (precedence(e) < min_precedence) {
        out += '(';
        print(e, out);
        out += ')';
    } else {
        print(e, out);
    }
}

void print_binary(const Expr& e, int prec, const char* op, std::string& out) {
    print_operand(e.operand(0), prec, out);
    out += op;
    // Right operands of equal precedence are parenthesized so that the
    // reparsed tree has the same association (and hence the same rounding).
    print_operand(e.operand(1), prec + 1, out);
}

void print(const Expr& e, std::string& out) {
    switch (e.kind()) {
    case Kind::Constant:
        out += format_number(e.constant_value());
        return;
    case Kind::Variable:
        out += e.variable_name();
        return;
    case Kind::Add:
        print_binary(e, kAdditive, " + ", out);
        return;
    case Kind::Sub:
        print_binary(e, kAdditive, " - ", out);
        return;
    case Kind::Mul:
        print_binary(e, kMultiplicative, "*", out);
        return;
    case Kind::Div:
        print_binary(e, kMultiplicative, "/", out);
        return;
    case Kind::Pow:
        print_operand(e.operand(0), kAtom, out);
        out += '^';
        out += std::to_string(e.exponent());
        return;
    case Kind::Neg:
        out += '-';
        print_operand(e.operand(0), kUnary, out);
        return;
    case Kind::Exp:
    case Kind::Ln:
    case Kind::Sqrt:
        out += e.kind() == Kind::Exp ? "exp(" : e.kind() == Kind::Ln ? "ln(" : "sqrt(";
        print(e.operand(0), out);
        out += ')';
        return;
    }
}

}  // namespace

std::string to_string(const Expr& e) {
    std::string out;
    print(e, out);
    return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok type = Tok::End;
    std::size_t offset = 0;
    std::string_view text;
    double number = 0.0;
};

class Parser {
public:
    Parser(std::string_view text, const std::vector<std::string>& variables)
        : text_(text), variables_(variables) {
        advance();
    }

    Expr parse_all() {
        if (current_.type == Tok::End) throw ParseError("empty expression", current_.offset);
        Expr e = parse_expression(kAdditive);
        if (current_.type != Tok::End) throw ParseError("unexpected '" + std::string(current_.text) + "'", current_.offset);
        return e;
    }

private:
    Expr parse_expression(int min_precedence) {
        Expr lhs = parse_prefix();
        for (;;) {
            const Token op = current_;
            int prec = 0;
            switch (op.type) {
            case Tok::Plus:
            case Tok::Minus:
                prec = kAdditive;
                break;
            case Tok::Star:
            case Tok::Slash:
                prec = kMultiplicative;
                break;
            case Tok::Caret:
                prec = kPower;
                break;
            default:
                return lhs;
            }
            if (prec < min_precedence) return lhs;
            advance();
            if (op.type == Tok::Caret) {
                const std::size_t at = current_.offset;
                // Right associative: the exponent may itself contain ^.
                const Expr exponent = parse_expression(kPower);
                lhs = pow(lhs, integer_exponent(exponent, at));
                continue;
            }
            const Expr rhs = parse_expression(prec + 1);
            switch (op.type) {
            case Tok::Plus: lhs = lhs + rhs; break;
            case Tok::Minus: lhs = lhs - rhs; break;
            case Tok::Star: lhs = lhs * rhs; break;
            default: lhs = lhs / rhs; break;
            }
        }
    }

    Expr parse_prefix() {
        const Token tok = current_;
        switch (tok.type) {
        case Tok::Number:
            advance();
            return Expr::constant(tok.number);
        case Tok::Minus:
            advance();
            return -parse_expression(kUnary);
        case Tok::Plus:
            advance();
            return parse_expression(kUnary);
        case Tok::LParen: {
            advance();
            Expr inner = parse_expression(kAdditive);
            expect(Tok::RParen, "')'");
            return inner;
        }
        case Tok::Ident:
            return parse_identifier();
        case Tok::End:
            throw ParseError("expected operand but reached end of input", tok.offset);
        default:
            throw ParseError("expected operand but found '" + std::string(tok.text) + "'", tok.offset);
        }
    }

    Expr parse_identifier() {
        const Token tok = current_;
        advance();
        const std::string name(tok.text);
        if (std::find(variables_.begin(), variables_.end(), name) != variables_.end()) return Expr::variable(name);
        if (name == "exp" || name == "ln" || name == "sqrt") {
            expect(Tok::LParen, "'(' after " + name);
            Expr arg = parse_expression(kAdditive);
            expect(Tok::RParen, "')'");
            if (name == "exp") return exp(arg);
            if (name == "ln") return ln(arg);
            return sqrt(arg);
        }
        throw UnknownIdentifierError(name, tok.offset);
    }

    unsigned integer_exponent(const Expr& e, std::size_t at) const {
        constexpr double kMaxExponent = 1024.0;
        if (!e.is_constant()) throw ParseError("exponent must be a non-negative integer constant", at);
        const double v = e.constant_value();
        if (!(v >= 0.0) || v != std::floor(v) || v > kMaxExponent)
            throw ParseError("exponent must be a non-negative integer constant", at);
        return static_cast<unsigned>(v);
    }

    void expect(Tok type, const std::string& what) {
        if (current_.type != type) {
            if (current_.type == Tok::End) throw ParseError("expected " + what + " but reached end of input", current_.offset);
            throw ParseError("expected " + what + " but found '" + std::string(current_.text) + "'", current_.offset);
        }
        advance();
    }

    void advance() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        current_ = Token{};
        current_.offset = pos_;
        if (pos_ >= text_.size()) {
            current_.type = Tok::End;
            return;
        }
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            lex_number();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) ++end;
            current_.type = Tok::Ident;
            current_.text = text_.substr(pos_, end - pos_);
            pos_ = end;
            return;
        }
        current_.text = text_.substr(pos_, 1);
        switch (c) {
        case '+': current_.type = Tok::Plus; break;
        case '-': current_.type = Tok::Minus; break;
        case '*': current_.type = Tok::Star; break;
        case '/': current_.type = Tok::Slash; break;
        case '^': current_.type = Tok::Caret; break;
        case '(': current_.type = Tok::LParen; break;
        case ')': current_.type = Tok::RParen; break;
        default: throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
        }
        ++pos_;
    }

    void lex_number() {
        const std::size_t start = pos_;
        std::size_t end = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end, ++n;
            return n;
        };
        std::size_t mantissa = digits();
        if (end < text_.size() && text_[end] == '.') {
            ++end;
            mantissa += digits();
        }
        if (mantissa == 0) throw ParseError("malformed number", start);
        if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
            ++end;
            if (end < text_.size() && (text_[end] == '+' || text_[end] == '-')) ++end;
            if (digits() == 0) throw ParseError("malformed exponent in number", start);
        }
        double value = 0.0;
        const auto res = std::from_chars(text_.data() + start, text_.data() + end, value);
        if (res.ec != std::errc() || res.ptr != text_.data() + end || !std::isfinite(value))
            throw ParseError("number out of range", start);
        current_.type = Tok::Number;
        current_.text = text_.substr(start, end - start);
        current_.number = value;
        pos_ = end;
    }

    std::string_view text_;
    const std::vector<std::string>& variables_;
    std::size_t pos_ = 0;
    Token current_;
};

}  // namespace

Expr parse(std::string_view text, const std::vector<std::string>& variables) {
    return Parser(text, variables).parse_all();
}

}  // namespace ncbs::expr
