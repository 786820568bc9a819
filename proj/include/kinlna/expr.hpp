#ifndef KINLNA_EXPR_HPP
#define KINLNA_EXPR_HPP

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace kinlna {

/// Symbol categories a rate expression may reference. Indices point into
/// the owning network's species/param/constant tables.
enum class SymbolKind { Species, Param, Constant };

struct Symbol {
  SymbolKind kind;
  int index;
};

/// Expression tree over +, -, *, /, unary minus, numeric literals and
/// resolved identifiers. Immutable after construction.
class Expr {
public:
  enum class Op { Literal, Symbol, Neg, Add, Sub, Mul, Div };

  using Ptr = std::shared_ptr<const Expr>;

  static Ptr literal(double v);
  static Ptr symbol(Symbol s, std::string name);
  static Ptr unary(Op op, Ptr operand);
  static Ptr binary(Op op, Ptr lhs, Ptr rhs);

  Op op() const { return op_; }
  double value() const { return value_; }
  Symbol sym() const { return sym_; }
  const std::string& name() const { return name_; }
  const Ptr& lhs() const { return lhs_; }
  const Ptr& rhs() const { return rhs_; }

  /// Evaluates at the given state/parameter/constant vectors.
  /// Throws Error(EvaluationError) on division by zero.
  double eval(std::span<const double> species, std::span<const double> params,
              std::span<const double> constants) const;

  /// Exact symbolic partial derivative with respect to species j.
  Ptr diff_species(int j) const;

  /// Renders the expression with minimal parentheses; parse(to_string(e))
  /// evaluates identically to e.
  std::string to_string() const;

private:
  Expr() = default;
  Op op_ = Op::Literal;
  double value_ = 0.0;
  Symbol sym_{SymbolKind::Species, -1};
  std::string name_;
  Ptr lhs_, rhs_;
};

} // namespace kinlna

#endif
