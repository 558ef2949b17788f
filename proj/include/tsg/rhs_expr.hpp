#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tsg {

/// Node of an arithmetic expression tree.
struct ExprNode {
  enum class Kind { Number, Variable, Neg, Add, Sub, Mul, Div, Pow, Call };

  Kind kind = Kind::Number;
  double number = 0.0;   // Number
  std::string name;      // Variable or Call
  std::size_t slot = 0;  // Variable: index into the declared variable list
  std::vector<std::shared_ptr<const ExprNode>> args;

  friend bool operator==(const ExprNode& a, const ExprNode& b);
};

using ExprPtr = std::shared_ptr<const ExprNode>;

/// A parsed, immutable expression: one tree per output component, with
/// variables resolved against a declared list such as {x, y, z1, z2}.
class RhsExpr {
public:
  RhsExpr() = default;

  /// Parses `src`. A vector-valued expression is written "[e1, e2, ...]".
  /// Throws ParseError (syntax, unknown identifier).
  static RhsExpr parse(std::string_view src, std::vector<std::string> vars);

  std::size_t dim() const noexcept { return components_.size(); }
  const std::vector<ExprPtr>& components() const noexcept { return components_; }
  const std::vector<std::string>& vars() const noexcept { return vars_; }
  /// Declared variables that actually occur in the tree.
  std::vector<std::string> free_vars() const;
  const std::string& source() const noexcept { return source_; }

  /// Evaluates with values given positionally, one per declared variable.
  /// Writes dim() results to `out`. Throws EvalError on non-finite results
  /// or domain violations (division by zero, log of a nonpositive number,
  /// sqrt of a negative number).
  void eval(std::span<const double> values, std::span<double> out) const;
  std::vector<double> eval(std::span<const double> values) const;
  /// Name-based evaluation; throws EvalError on a missing binding.
  std::vector<double> eval(const std::map<std::string, double>& bindings) const;

  /// Fully parenthesized text that re-parses to an identical tree.
  std::string to_string() const;

  friend bool operator==(const RhsExpr& a, const RhsExpr& b);

private:
  std::vector<ExprPtr> components_;
  std::vector<std::string> vars_;
  std::string source_;
};

/// Variable list for an n-component right-hand side f(x, y, z1..zn).
std::vector<std::string> rhs_vars(std::size_t dim);

} // namespace tsg
