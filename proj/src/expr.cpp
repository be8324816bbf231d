#include "compete/expr.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "compete/errors.hpp"

namespace compete {

namespace {

using Kind = Expr::Kind;
using Node = Expr::Node;
using NodePtr = Expr::NodePtr;

NodePtr make_constant(double v) {
    return std::make_shared<const Node>(Node{Kind::Constant, v, 0, nullptr, nullptr});
}

NodePtr make_variable(int i) {
    return std::make_shared<const Node>(Node{Kind::Variable, 0.0, i, nullptr, nullptr});
}

bool is_const(const NodePtr& n, double v) { return n->kind == Kind::Constant && n->value == v; }
bool is_const(const NodePtr& n) { return n->kind == Kind::Constant; }

// Smart constructors: fold constants and drop neutral elements so derivative
// trees stay small. The folding never changes the value of the expression.
NodePtr add(NodePtr a, NodePtr b) {
    if (is_const(a) && is_const(b)) return make_constant(a->value + b->value);
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    return std::make_shared<const Node>(Node{Kind::Add, 0.0, 0, std::move(a), std::move(b)});
}

NodePtr neg(NodePtr a) {
    if (is_const(a)) return make_constant(-a->value);
    if (a->kind == Kind::Neg) return a->lhs;
    return std::make_shared<const Node>(Node{Kind::Neg, 0.0, 0, std::move(a), nullptr});
}

NodePtr sub(NodePtr a, NodePtr b) {
    if (is_const(a) && is_const(b)) return make_constant(a->value - b->value);
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return neg(std::move(b));
    return std::make_shared<const Node>(Node{Kind::Sub, 0.0, 0, std::move(a), std::move(b)});
}

NodePtr mul(NodePtr a, NodePtr b) {
    if (is_const(a) && is_const(b)) return make_constant(a->value * b->value);
    if (is_const(a, 0.0) || is_const(b, 0.0)) return make_constant(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    if (is_const(a, -1.0)) return neg(std::move(b));
    if (is_const(b, -1.0)) return neg(std::move(a));
    return std::make_shared<const Node>(Node{Kind::Mul, 0.0, 0, std::move(a), std::move(b)});
}

NodePtr divide(NodePtr a, NodePtr b) {
    if (is_const(b, 1.0)) return a;
    if (is_const(a, 0.0) && !is_const(b, 0.0)) return make_constant(0.0);
    return std::make_shared<const Node>(Node{Kind::Div, 0.0, 0, std::move(a), std::move(b)});
}

NodePtr power(NodePtr a, int exponent) {
    if (exponent == 0) return make_constant(1.0);
    if (exponent == 1) return a;
    return std::make_shared<const Node>(Node{Kind::Pow, 0.0, exponent, std::move(a), nullptr});
}

NodePtr unary(Kind k, NodePtr a) {
    return std::make_shared<const Node>(Node{k, 0.0, 0, std::move(a), nullptr});
}

double checked(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string("non-finite result in ") + what);
    return v;
}

double eval_node(const Node& n, std::span<const double> x) {
    switch (n.kind) {
        case Kind::Constant: return n.value;
        case Kind::Variable: return x[n.index];
        case Kind::Add: return eval_node(*n.lhs, x) + eval_node(*n.rhs, x);
        case Kind::Sub: return eval_node(*n.lhs, x) - eval_node(*n.rhs, x);
        case Kind::Mul: return eval_node(*n.lhs, x) * eval_node(*n.rhs, x);
        case Kind::Div: {
            const double den = eval_node(*n.rhs, x);
            if (den == 0.0) throw DomainError("division by zero");
            return eval_node(*n.lhs, x) / den;
        }
        case Kind::Neg: return -eval_node(*n.lhs, x);
        case Kind::Pow: {
            const double base = eval_node(*n.lhs, x);
            if (base == 0.0 && n.index < 0) throw DomainError("division by zero in negative power");
            return checked(std::pow(base, n.index), "power");
        }
        case Kind::Exp: return checked(std::exp(eval_node(*n.lhs, x)), "exp");
        case Kind::Log: {
            const double a = eval_node(*n.lhs, x);
            if (!(a > 0.0)) throw DomainError("log of a nonpositive value");
            return std::log(a);
        }
    }
    return 0.0;
}

NodePtr differentiate(const NodePtr& n, int var) {
    switch (n->kind) {
        case Kind::Constant: return make_constant(0.0);
        case Kind::Variable: return make_constant(n->index == var ? 1.0 : 0.0);
        case Kind::Add: return add(differentiate(n->lhs, var), differentiate(n->rhs, var));
        case Kind::Sub: return sub(differentiate(n->lhs, var), differentiate(n->rhs, var));
        case Kind::Mul:
            return add(mul(differentiate(n->lhs, var), n->rhs),
                       mul(n->lhs, differentiate(n->rhs, var)));
        case Kind::Div: {
            auto da = differentiate(n->lhs, var);
            auto db = differentiate(n->rhs, var);
            if (is_const(db, 0.0)) return divide(std::move(da), n->rhs);
            return divide(sub(mul(da, n->rhs), mul(n->lhs, db)), power(n->rhs, 2));
        }
        case Kind::Neg: return neg(differentiate(n->lhs, var));
        case Kind::Pow:
            return mul(mul(make_constant(n->index), power(n->lhs, n->index - 1)),
                       differentiate(n->lhs, var));
        case Kind::Exp: return mul(n, differentiate(n->lhs, var));
        case Kind::Log: return divide(differentiate(n->lhs, var), n->lhs);
    }
    return make_constant(0.0);
}

// Rebuild with variables replaced; `map[i] >= 0` renames u_i, otherwise the
// variable becomes the constant `values[i]`.
NodePtr substitute(const NodePtr& n, std::span<const int> map, std::span<const double> values) {
    switch (n->kind) {
        case Kind::Constant: return n;
        case Kind::Variable:
            return map[n->index] >= 0 ? make_variable(map[n->index])
                                      : make_constant(values[n->index]);
        case Kind::Add: return add(substitute(n->lhs, map, values), substitute(n->rhs, map, values));
        case Kind::Sub: return sub(substitute(n->lhs, map, values), substitute(n->rhs, map, values));
        case Kind::Mul: return mul(substitute(n->lhs, map, values), substitute(n->rhs, map, values));
        case Kind::Div:
            return divide(substitute(n->lhs, map, values), substitute(n->rhs, map, values));
        case Kind::Neg: return neg(substitute(n->lhs, map, values));
        case Kind::Pow: return power(substitute(n->lhs, map, values), n->index);
        case Kind::Exp:
        case Kind::Log: return unary(n->kind, substitute(n->lhs, map, values));
    }
    return n;
}

void print(const Node& n, std::ostringstream& os) {
    switch (n.kind) {
        case Kind::Constant: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            if (n.value < 0 || std::signbit(n.value)) {
                os << '(' << buf << ')';
            } else {
                os << buf;
            }
            return;
        }
        case Kind::Variable: os << 'u' << (n.index + 1); return;
        case Kind::Add:
        case Kind::Sub:
        case Kind::Mul:
        case Kind::Div: {
            const char op = n.kind == Kind::Add   ? '+'
                            : n.kind == Kind::Sub ? '-'
                            : n.kind == Kind::Mul ? '*'
                                                  : '/';
            os << '(';
            print(*n.lhs, os);
            os << ' ' << op << ' ';
            print(*n.rhs, os);
            os << ')';
            return;
        }
        case Kind::Neg:
            os << "(-";
            print(*n.lhs, os);
            os << ')';
            return;
        case Kind::Pow:
            os << '(';
            print(*n.lhs, os);
            os << '^' << n.index << ')';
            return;
        case Kind::Exp:
        case Kind::Log:
            os << (n.kind == Kind::Exp ? "exp(" : "log(");
            print(*n.lhs, os);
            os << ')';
            return;
    }
}

class Parser {
public:
    Parser(std::string_view text, int num_vars, const Expr::Parameters& params)
        : text_(text), num_vars_(num_vars), params_(params) {}

    NodePtr parse() {
        skip_space();
        if (pos_ >= text_.size()) fail("empty expression");
        auto n = parse_sum();
        skip_space();
        if (pos_ < text_.size()) fail(std::string("unexpected '") + text_[pos_] + "'");
        return n;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr parse_sum() {
        auto lhs = parse_product();
        for (;;) {
            if (accept('+')) {
                lhs = node(Kind::Add, lhs, parse_product());
            } else if (accept('-')) {
                lhs = node(Kind::Sub, lhs, parse_product());
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_product() {
        auto lhs = parse_unary();
        for (;;) {
            if (accept('*')) {
                lhs = node(Kind::Mul, lhs, parse_unary());
            } else if (accept('/')) {
                lhs = node(Kind::Div, lhs, parse_unary());
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) return unary(Kind::Neg, parse_unary());
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    NodePtr parse_power() {
        auto base = parse_primary();
        if (!accept('^')) return base;
        skip_space();
        bool negative = false;
        if (accept('-')) negative = true;
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) fail("exponent must be an integer literal");
        int exponent = 0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, exponent);
        if (ec != std::errc()) fail("exponent out of range");
        (void)ptr;
        if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E')) {
            fail("exponent must be an integer literal");
        }
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '^') fail("chained powers need parentheses");
        const auto n = std::make_shared<const Node>(
            Node{Kind::Pow, 0.0, negative ? -exponent : exponent, std::move(base), nullptr});
        return n;
    }

    NodePtr parse_primary() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            auto inner = parse_sum();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        fail(std::string("unexpected '") + c + "'");
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
        if (ec != std::errc()) fail("malformed number");
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        if (!std::isfinite(value)) {
            pos_ = start;
            fail("number out of range");
        }
        return make_constant(value);
    }

    NodePtr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        const std::string_view name = text_.substr(start, pos_ - start);
        if (name == "exp" || name == "log") {
            if (!accept('(')) fail("expected '(' after " + std::string(name));
            auto arg = parse_sum();
            if (!accept(')')) fail("expected ')'");
            return unary(name == "exp" ? Kind::Exp : Kind::Log, std::move(arg));
        }
        if (auto it = params_.find(name); it != params_.end()) return make_constant(it->second);
        if (name == "u" && num_vars_ <= 2) return make_variable(0);
        if (name == "v" && num_vars_ == 2) return make_variable(1);
        if (name.size() > 1 && name[0] == 'u') {
            int index = 0;
            auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), index);
            if (ec == std::errc() && ptr == name.data() + name.size()) {
                if (index < 1 || index > num_vars_) {
                    pos_ = start;
                    fail("variable " + std::string(name) + " out of range (N = " +
                         std::to_string(num_vars_) + ")");
                }
                return make_variable(index - 1);
            }
        }
        pos_ = start;
        fail("unknown identifier '" + std::string(name) + "'");
    }

    static NodePtr node(Kind k, NodePtr a, NodePtr b) {
        return std::make_shared<const Node>(Node{k, 0.0, 0, std::move(a), std::move(b)});
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int num_vars_;
    const Expr::Parameters& params_;
};

}  // namespace

Expr Expr::parse(std::string_view text, int num_vars, const Parameters& parameters) {
    if (num_vars < 1) throw ValidationError("expression needs at least one variable");
    return Expr(Parser(text, num_vars, parameters).parse(), num_vars);
}

Expr Expr::constant(double value, int num_vars) { return Expr(make_constant(value), num_vars); }

Expr Expr::variable(int index, int num_vars) {
    if (index < 0 || index >= num_vars) throw std::out_of_range("variable index out of range");
    return Expr(make_variable(index), num_vars);
}

double Expr::eval(std::span<const double> point) const {
    if (point.size() != static_cast<std::size_t>(num_vars_)) {
        throw std::invalid_argument("evaluation point has the wrong dimension");
    }
    return checked(eval_node(*root_, point), "expression");
}

Expr Expr::derivative(int var) const {
    if (var < 0 || var >= num_vars_) throw std::out_of_range("variable index out of range");
    return Expr(differentiate(root_, var), num_vars_);
}

Expr Expr::section(int var, std::span<const double> frozen) const {
    if (var < 0 || var >= num_vars_) throw std::out_of_range("variable index out of range");
    if (frozen.size() != static_cast<std::size_t>(num_vars_)) {
        throw std::invalid_argument("frozen point has the wrong dimension");
    }
    std::vector<int> map(num_vars_, -1);
    map[var] = 0;
    return Expr(substitute(root_, map, frozen), 1);
}

std::string Expr::to_string() const {
    std::ostringstream os;
    print(*root_, os);
    return os.str();
}

}  // namespace compete
