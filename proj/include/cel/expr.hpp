#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cel/jets.hpp"

namespace cel::dsl {

enum class UnaryOp { Neg, Sin, Cos, Exp, Ln, Sqrt };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

// Immutable expression tree over a fixed coordinate list. Exponents of Pow
// are always Constant nodes (the parser folds coordinate-free exponents).
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { Constant, Coordinate, Unary, Binary };
    Kind kind;
    double value = 0.0; // Constant
    int coord = -1;     // Coordinate
    UnaryOp uop = UnaryOp::Neg;
    BinaryOp bop = BinaryOp::Add;
    ExprPtr lhs, rhs;

    static ExprPtr constant(double v);
    static ExprPtr coordinate(int index);
    static ExprPtr unary(UnaryOp op, ExprPtr e);
    static ExprPtr binary(BinaryOp op, ExprPtr a, ExprPtr b);
};

// Recursive-descent parser with the usual precedence (pow over unary minus
// over mul/div over add/sub; pow is right associative, the rest left).
// Functions: sin, cos, exp, ln, sqrt. Identifiers must be coordinate names.
ExprPtr parse_expression(std::string_view text, std::span<const std::string> coord_names);

// Prints with minimal parentheses; parse(to_string(e)) == e structurally.
std::string to_string(const Expr& e, std::span<const std::string> coord_names);

bool equal(const Expr& a, const Expr& b);

// Plain evaluation at a point; throws DomainError outside function domains.
double eval(const Expr& e, std::span<const double> point);

// Evaluation in truncated Taylor arithmetic at a point.
jets::Jet eval_jet(const Expr& e, std::span<const double> point, int order);

} // namespace cel::dsl
