#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ribound/errors.hpp"

namespace ribound {

/// Immutable arithmetic expression over a fixed, ordered set of variables.
///
/// Grammar (ASCII): binary + - * / ^ with the usual precedence, ^ binding
/// tightest and associating to the right; unary minus binds tighter than
/// binary minus; calls exp, ln, sqrt, abs (unary) and min, max, pow (binary);
/// the constants e and pi. Whitespace is insignificant.
///
/// Evaluation is pure and total on its domain. Leaving the domain of a
/// builtin throws EvalError naming the offending subexpression: ln of a
/// non-positive value, sqrt of a negative value, division by a denominator
/// of magnitude below 1e-300, and pow with a negative base and non-integer
/// exponent (or zero base and negative exponent).
class Expr {
 public:
  enum class Kind { Literal, Variable, Negate, Binary, Call };
  enum class BinOp { Add, Sub, Mul, Div, Pow };
  enum class Fn { Exp, Ln, Sqrt, Abs, Min, Max, Pow };

  struct Node;  // defined in the implementation file
  using NodePtr = std::shared_ptr<const Node>;

  /// Parses `text` over the given variable names (evaluation order follows
  /// this vector). Throws SyntaxError on malformed input, unknown
  /// identifiers, or call arity mismatches.
  static Expr parse(std::string_view text, const std::vector<std::string>& variables);

  /// Evaluates with positional values matching the variable order given to
  /// parse(). Size mismatch throws std::invalid_argument.
  double eval(std::span<const double> values) const;
  double eval() const { return eval(std::span<const double>{}); }
  double eval(double v0) const { return eval(std::span<const double>(&v0, 1)); }
  double eval(double v0, double v1) const {
    const double v[2] = {v0, v1};
    return eval(std::span<const double>(v, 2));
  }

  const std::vector<std::string>& variables() const { return vars_; }

  /// Renders with minimal parentheses; the result parses back to an
  /// expression that evaluates identically.
  std::string str() const;

  /// Fully parenthesized prefix rendering, e.g. "(+ (* 2 t) 1)". Intended
  /// for structural assertions in tests.
  std::string tree() const;

 private:
  Expr(NodePtr root, std::vector<std::string> vars);
  friend struct ExprParser;
  NodePtr root_;
  std::vector<std::string> vars_;
};

}  // namespace ribound
