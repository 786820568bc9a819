#include "kinlna/expr.hpp"

#include <cmath>
#include <sstream>

#include "kinlna/errors.hpp"

namespace kinlna {

Expr::Ptr Expr::literal(double v) {
  auto e = std::shared_ptr<Expr>(new Expr());
  e->op_ = Op::Literal;
  e->value_ = v;
  return e;
}

Expr::Ptr Expr::symbol(Symbol s, std::string name) {
  auto e = std::shared_ptr<Expr>(new Expr());
  e->op_ = Op::Symbol;
  e->sym_ = s;
  e->name_ = std::move(name);
  return e;
}

Expr::Ptr Expr::unary(Op op, Ptr operand) {
  auto e = std::shared_ptr<Expr>(new Expr());
  e->op_ = op;
  e->lhs_ = std::move(operand);
  return e;
}

Expr::Ptr Expr::binary(Op op, Ptr lhs, Ptr rhs) {
  auto e = std::shared_ptr<Expr>(new Expr());
  e->op_ = op;
  e->lhs_ = std::move(lhs);
  e->rhs_ = std::move(rhs);
  return e;
}

double Expr::eval(std::span<const double> species, std::span<const double> params,
                  std::span<const double> constants) const {
  switch (op_) {
  case Op::Literal:
    return value_;
  case Op::Symbol:
    switch (sym_.kind) {
    case SymbolKind::Species:
      return species[static_cast<size_t>(sym_.index)];
    case SymbolKind::Param:
      return params[static_cast<size_t>(sym_.index)];
    case SymbolKind::Constant:
      return constants[static_cast<size_t>(sym_.index)];
    }
    break;
  case Op::Neg:
    return -lhs_->eval(species, params, constants);
  case Op::Add:
    return lhs_->eval(species, params, constants) +
           rhs_->eval(species, params, constants);
  case Op::Sub:
    return lhs_->eval(species, params, constants) -
           rhs_->eval(species, params, constants);
  case Op::Mul:
    return lhs_->eval(species, params, constants) *
           rhs_->eval(species, params, constants);
  case Op::Div: {
    double den = rhs_->eval(species, params, constants);
    if (den == 0.0)
      throw Error(ErrorKind::EvaluationError,
                  "division by zero in rate expression");
    return lhs_->eval(species, params, constants) / den;
  }
  }
  throw Error(ErrorKind::EvaluationError, "corrupt expression node");
}

namespace {

bool is_zero(const Expr::Ptr& e) {
  return e->op() == Expr::Op::Literal && e->value() == 0.0;
}
bool is_one(const Expr::Ptr& e) {
  return e->op() == Expr::Op::Literal && e->value() == 1.0;
}

// Light simplification so derivatives stay readable and cheap.
Expr::Ptr add(Expr::Ptr a, Expr::Ptr b) {
  if (is_zero(a)) return b;
  if (is_zero(b)) return a;
  return Expr::binary(Expr::Op::Add, std::move(a), std::move(b));
}
Expr::Ptr sub(Expr::Ptr a, Expr::Ptr b) {
  if (is_zero(b)) return a;
  if (is_zero(a)) return Expr::unary(Expr::Op::Neg, std::move(b));
  return Expr::binary(Expr::Op::Sub, std::move(a), std::move(b));
}
Expr::Ptr mul(Expr::Ptr a, Expr::Ptr b) {
  if (is_zero(a) || is_zero(b)) return Expr::literal(0.0);
  if (is_one(a)) return b;
  if (is_one(b)) return a;
  return Expr::binary(Expr::Op::Mul, std::move(a), std::move(b));
}
Expr::Ptr divide(Expr::Ptr a, Expr::Ptr b) {
  if (is_zero(a)) return Expr::literal(0.0);
  if (is_one(b)) return a;
  return Expr::binary(Expr::Op::Div, std::move(a), std::move(b));
}

} // namespace

Expr::Ptr Expr::diff_species(int j) const {
  switch (op_) {
  case Op::Literal:
    return literal(0.0);
  case Op::Symbol:
    return literal(sym_.kind == SymbolKind::Species && sym_.index == j ? 1.0
                                                                       : 0.0);
  case Op::Neg: {
    auto d = lhs_->diff_species(j);
    if (is_zero(d)) return d;
    return unary(Op::Neg, std::move(d));
  }
  case Op::Add:
    return add(lhs_->diff_species(j), rhs_->diff_species(j));
  case Op::Sub:
    return sub(lhs_->diff_species(j), rhs_->diff_species(j));
  case Op::Mul:
    return add(mul(lhs_->diff_species(j), rhs_),
               mul(lhs_, rhs_->diff_species(j)));
  case Op::Div:
    // (u/v)' = u'/v - u v'/v^2
    return sub(divide(lhs_->diff_species(j), rhs_),
               divide(mul(lhs_, rhs_->diff_species(j)), mul(rhs_, rhs_)));
  }
  throw Error(ErrorKind::EvaluationError, "corrupt expression node");
}

namespace {

int precedence(Expr::Op op) {
  switch (op) {
  case Expr::Op::Add:
  case Expr::Op::Sub:
    return 1;
  case Expr::Op::Mul:
  case Expr::Op::Div:
    return 2;
  case Expr::Op::Neg:
    return 3;
  default:
    return 4;
  }
}

void render(const Expr& e, std::ostringstream& out, int parent_prec,
            bool rhs_of_noncommutative) {
  int prec = precedence(e.op());
  bool need_paren =
      prec < parent_prec || (prec == parent_prec && rhs_of_noncommutative);
  if (need_paren) out << '(';
  switch (e.op()) {
  case Expr::Op::Literal: {
    std::ostringstream num;
    num.precision(17);
    num << e.value();
    std::string s = num.str();
    if (!s.empty() && s[0] == '-') {
      out << '(' << s << ')';
    } else {
      out << s;
    }
    break;
  }
  case Expr::Op::Symbol:
    out << e.name();
    break;
  case Expr::Op::Neg:
    out << '-';
    render(*e.lhs(), out, prec, true);
    break;
  case Expr::Op::Add:
    render(*e.lhs(), out, prec, false);
    out << " + ";
    render(*e.rhs(), out, prec, false);
    break;
  case Expr::Op::Sub:
    render(*e.lhs(), out, prec, false);
    out << " - ";
    render(*e.rhs(), out, prec, true);
    break;
  case Expr::Op::Mul:
    render(*e.lhs(), out, prec, false);
    out << " * ";
    render(*e.rhs(), out, prec, false);
    break;
  case Expr::Op::Div:
    render(*e.lhs(), out, prec, false);
    out << " / ";
    render(*e.rhs(), out, prec, true);
    break;
  }
  if (need_paren) out << ')';
}

} // namespace

std::string Expr::to_string() const {
  std::ostringstream out;
  render(*this, out, 0, false);
  return out.str();
}

const char* error_kind_name(ErrorKind k) {
  switch (k) {
  case ErrorKind::SyntaxError: return "syntax-error";
  case ErrorKind::UnknownIdentifier: return "unknown-identifier";
  case ErrorKind::DuplicateName: return "duplicate-name";
  case ErrorKind::EmptyReactionList: return "empty-reaction-list";
  case ErrorKind::EvaluationError: return "evaluation-error";
  case ErrorKind::StateInconsistency: return "state-inconsistency";
  case ErrorKind::IntegrationFailure: return "integration-failure";
  case ErrorKind::FilterFailure: return "filter-failure";
  case ErrorKind::RangeError: return "range-error";
  case ErrorKind::UsageError: return "usage-error";
  case ErrorKind::NumericalFailure: return "numerical-failure";
  }
  return "unknown-error";
}

} // namespace kinlna
