#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace compete {

/// Immutable expression tree in variables u1..uN.
///
/// Grammar (highest precedence first):
///   primary  : number | variable | parameter | exp(e) | log(e) | (e)
///   power    : primary [ '^' ['-'] integer ]
///   unary    : '-' unary | power
///   product  : unary { ('*' | '/') unary }
///   sum      : product { ('+' | '-') product }
///
/// Variables are spelled u1..uN; `u`, `v` alias u1, u2 when N == 2 and `u`
/// aliases u1 when N == 1. Named parameters are substituted as constants at
/// parse time.
class Expr {
public:
    enum class Kind { Constant, Variable, Add, Sub, Mul, Div, Neg, Pow, Exp, Log };

    struct Node {
        Kind kind;
        double value = 0.0;  // Constant
        int index = 0;       // Variable index, or Pow exponent
        std::shared_ptr<const Node> lhs;
        std::shared_ptr<const Node> rhs;
    };
    using NodePtr = std::shared_ptr<const Node>;
    using Parameters = std::map<std::string, double, std::less<>>;

    static Expr parse(std::string_view text, int num_vars, const Parameters& parameters = {});
    static Expr constant(double value, int num_vars);
    static Expr variable(int index, int num_vars);

    int num_vars() const noexcept { return num_vars_; }
    const Node& root() const noexcept { return *root_; }

    /// Throws DomainError for log of a nonpositive value, division by zero, or
    /// a non-finite result.
    double eval(std::span<const double> point) const;
    double eval(std::initializer_list<double> point) const {
        return eval(std::span<const double>(point.begin(), point.size()));
    }

    /// Exact partial derivative with respect to u_{var+1} (0-based index).
    Expr derivative(int var) const;

    /// One-variable restriction s -> g(p_0, .., p_{var-1}, s, p_{var+1}, ..).
    /// `frozen[var]` is ignored.
    Expr section(int var, std::span<const double> frozen) const;

    bool is_constant() const noexcept { return root_->kind == Kind::Constant; }

    /// Canonical fully parenthesized text; parse(to_string()) evaluates
    /// identically (numbers are printed with 17 significant digits).
    std::string to_string() const;

private:
    Expr(NodePtr root, int num_vars) : root_(std::move(root)), num_vars_(num_vars) {}

    NodePtr root_;
    int num_vars_ = 1;
};

}  // namespace compete
