#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hypersurf/geometry.hpp"

namespace hypersurf {

/// Closed-form real expression in `x` (and `y` when dimension is 2).
///
/// Grammar, loosest binding first:
///     sum     := product (('+' | '-') product)*
///     product := unary (('*' | '/') unary)*
///     unary   := '-' unary | power
///     power   := primary ('^' unary)?          right associative
///     primary := number | 'pi' | 'x' | 'y' | func '(' sum ')' | '(' sum ')'
///     func    := sin | cos | exp | abs | sqrt
class Expression {
public:
    enum class Op : std::uint8_t { Number, Pi, VarX, VarY, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Abs, Sqrt };

    struct Node {
        Op op;
        double value = 0.0;
        std::int32_t lhs = -1;
        std::int32_t rhs = -1;
    };

    static Expression parse(std::string_view source, int dimension);

    int dimension() const noexcept { return dimension_; }
    const std::string& source() const noexcept { return source_; }

    /// Throws EvaluationError on division by zero or sqrt of a negative number;
    /// other non-finite results propagate.
    double evaluate(double x, double y = 0.0) const { return eval(root_, x, y); }
    double evaluate(const Point& p) const { return eval(root_, p[0], p[1]); }

    /// Fully parenthesized text that parses back to an identically evaluating expression.
    std::string print() const;

    /// Same tree shape and literals.
    bool structurally_equal(const Expression& other) const;

private:
    Expression() = default;
    double eval(std::int32_t node, double x, double y) const;
    void print_node(std::int32_t node, std::string& out) const;

    std::vector<Node> nodes_;
    std::int32_t root_ = -1;
    int dimension_ = 2;
    std::string source_;

    friend class ExpressionParser;
};

}  // namespace hypersurf
