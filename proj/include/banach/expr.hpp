#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "banach/algebra.hpp"

namespace banach {

/// Node of a parsed expression. Constants are "i", "pi" and "e"; variables
/// are "x", "y", "z" and "theta"; unary operators are "neg" and the function
/// names abs, conj, exp, log, re, im; binary operators are + - * / ^.
struct Expr {
  enum class Kind { Number, Constant, Variable, Unary, Binary };

  Kind kind = Kind::Number;
  double number = 0.0;
  std::string name;  ///< constant, variable or operator name
  std::shared_ptr<const Expr> lhs;  ///< operand of unary nodes
  std::shared_ptr<const Expr> rhs;
  std::size_t offset = 0;  ///< byte offset in the source text

  /// Structural equality, ignoring offsets.
  bool operator==(const Expr& other) const;
};

using ExprPtr = std::shared_ptr<const Expr>;

/// Throws SyntaxError with detail {offset, expected}.
ExprPtr parse_expr(std::string_view text);

/// Minimal-parenthesis rendering that parses back to the same tree.
std::string to_string(const Expr& expr);

struct EvalPoint {
  Scalar z;
  double theta = 0.0;
};

/// Throws DomainError (detail {offset}) for log 0, division by zero,
/// non-integer exponents and non-finite results.
Scalar evaluate(const Expr& expr, const EvalPoint& point);

/// Samples at every spectrum point: z is the point position, theta its angle
/// (circle) or arg z. Real instances require a vanishing imaginary part.
Element evaluate(const Expr& expr, const Instance& owner);

}  // namespace banach
