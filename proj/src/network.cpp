#include "kinlna/network.hpp"

#include <cmath>
#include <sstream>

#include "kinlna/errors.hpp"

namespace kinlna {

ReactionNetwork::ReactionNetwork(std::vector<std::string> species,
                                 std::vector<std::string> params,
                                 std::vector<std::string> constant_names,
                                 std::vector<double> constant_values,
                                 std::vector<Reaction> reactions)
    : species_(std::move(species)), params_(std::move(params)),
      const_names_(std::move(constant_names)),
      const_values_(std::move(constant_values)),
      reactions_(std::move(reactions)) {
  if (species_.empty())
    throw Error(ErrorKind::UsageError, "network needs at least one species");
  if (reactions_.empty())
    throw Error(ErrorKind::EmptyReactionList, "network has no reactions");

  const int ns = num_species();
  const int nr = num_reactions();
  net_effect_.resize(nr, ns);
  for (int i = 0; i < nr; ++i) {
    if (reactions_[static_cast<size_t>(i)].net_effect.size() != ns)
      throw Error(ErrorKind::UsageError, "net-effect length mismatch");
    net_effect_.row(i) = reactions_[static_cast<size_t>(i)].net_effect.transpose();
    if (net_effect_.row(i).isZero()) degenerate_ = true;
  }

  rate_species_derivs_.resize(static_cast<size_t>(nr));
  for (int i = 0; i < nr; ++i) {
    auto& row = rate_species_derivs_[static_cast<size_t>(i)];
    row.reserve(static_cast<size_t>(ns));
    for (int j = 0; j < ns; ++j)
      row.push_back(reactions_[static_cast<size_t>(i)].rate->diff_species(j));
  }
}

void ReactionNetwork::check_inputs(const Vector& x, const Vector& theta) const {
  if (x.size() != num_species())
    throw Error(ErrorKind::UsageError, "state dimension mismatch");
  if (theta.size() != num_params())
    throw Error(ErrorKind::UsageError, "parameter dimension mismatch");
  if (!x.allFinite())
    throw Error(ErrorKind::UsageError, "non-finite state");
  for (int j = 0; j < theta.size(); ++j)
    if (!(theta[j] > 0.0) || !std::isfinite(theta[j]))
      throw Error(ErrorKind::UsageError,
                  "parameter " + params_[static_cast<size_t>(j)] +
                      " must be strictly positive and finite");
}

Vector ReactionNetwork::propensities(const Vector& x, const Vector& theta) const {
  check_inputs(x, theta);
  Vector h(num_reactions());
  std::span<const double> xs(x.data(), static_cast<size_t>(x.size()));
  std::span<const double> th(theta.data(), static_cast<size_t>(theta.size()));
  std::span<const double> cs(const_values_.data(), const_values_.size());
  for (int i = 0; i < num_reactions(); ++i) {
    try {
      h[i] = reactions_[static_cast<size_t>(i)].rate->eval(xs, th, cs);
    } catch (const Error& e) {
      throw Error(e.kind(),
                  std::string(e.what()) + " in reaction " + std::to_string(i + 1));
    }
    if (!std::isfinite(h[i]))
      throw Error(ErrorKind::NumericalFailure,
                  "non-finite propensity in reaction " + std::to_string(i + 1));
  }
  return h;
}

Vector ReactionNetwork::drift(const Vector& x, const Vector& theta) const {
  return net_effect_.transpose().cast<double>() * propensities(x, theta);
}

Matrix ReactionNetwork::diffusion_matrix_unchecked(const Vector& x,
                                                   const Vector& theta) const {
  Vector h = propensities(x, theta);
  Matrix At = net_effect_.transpose().cast<double>();
  return At * h.asDiagonal() * At.transpose();
}

Matrix ReactionNetwork::diffusion_matrix(const Vector& x,
                                         const Vector& theta) const {
  Vector h = propensities(x, theta);
  for (int i = 0; i < h.size(); ++i)
    if (h[i] < 0.0)
      throw Error(ErrorKind::StateInconsistency,
                  "negative propensity in reaction " + std::to_string(i + 1));
  Matrix At = net_effect_.transpose().cast<double>();
  return At * h.asDiagonal() * At.transpose();
}

Matrix ReactionNetwork::drift_jacobian(const Vector& x, const Vector& theta) const {
  check_inputs(x, theta);
  const int ns = num_species();
  const int nr = num_reactions();
  std::span<const double> xs(x.data(), static_cast<size_t>(x.size()));
  std::span<const double> th(theta.data(), static_cast<size_t>(theta.size()));
  std::span<const double> cs(const_values_.data(), const_values_.size());
  // dh/dx, then chain through A'.
  Matrix dh(nr, ns);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < ns; ++j)
      dh(i, j) = rate_species_derivs_[static_cast<size_t>(i)][static_cast<size_t>(j)]
                     ->eval(xs, th, cs);
  return net_effect_.transpose().cast<double>() * dh;
}

// ---------------------------------------------------------------------------
// DSL parser

namespace {

struct Cursor {
  const std::string& text;
  size_t pos = 0;
  int line = 1;
  int col = 1;
};

bool ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

struct LineTokens {
  std::vector<std::string> tokens;
  std::vector<int> cols;
  int line = 0;
};

// Splits a logical line into tokens: identifiers, numbers, and single-char
// punctuation; "->" is one token.
LineTokens tokenize_line(const std::string& raw, int lineno) {
  LineTokens lt;
  lt.line = lineno;
  size_t i = 0;
  while (i < raw.size()) {
    char c = raw[i];
    if (c == '#') break;
    if (c == ' ' || c == '\t' || c == '\r') { ++i; continue; }
    int col = static_cast<int>(i) + 1;
    if (ident_start(c)) {
      size_t j = i;
      while (j < raw.size() && ident_char(raw[j])) ++j;
      lt.tokens.push_back(raw.substr(i, j - i));
      lt.cols.push_back(col);
      i = j;
    } else if ((c >= '0' && c <= '9') || c == '.') {
      size_t j = i;
      while (j < raw.size() &&
             ((raw[j] >= '0' && raw[j] <= '9') || raw[j] == '.' ||
              raw[j] == 'e' || raw[j] == 'E' ||
              ((raw[j] == '+' || raw[j] == '-') && j > i &&
               (raw[j - 1] == 'e' || raw[j - 1] == 'E'))))
        ++j;
      lt.tokens.push_back(raw.substr(i, j - i));
      lt.cols.push_back(col);
      i = j;
    } else if (c == '-' && i + 1 < raw.size() && raw[i + 1] == '>') {
      lt.tokens.push_back("->");
      lt.cols.push_back(col);
      i += 2;
    } else if (std::string("+-*/()=@:").find(c) != std::string::npos) {
      lt.tokens.emplace_back(1, c);
      lt.cols.push_back(col);
      ++i;
    } else {
      throw ParseError(ErrorKind::SyntaxError,
                       std::string("unexpected character '") + c + "'", lineno,
                       col);
    }
  }
  return lt;
}

bool is_number(const std::string& t) {
  return !t.empty() && ((t[0] >= '0' && t[0] <= '9') || t[0] == '.');
}

struct SymbolTable {
  std::vector<std::string> species, params, consts;

  bool lookup(const std::string& name, Symbol& out) const {
    for (size_t j = 0; j < species.size(); ++j)
      if (species[j] == name) { out = {SymbolKind::Species, (int)j}; return true; }
    for (size_t j = 0; j < params.size(); ++j)
      if (params[j] == name) { out = {SymbolKind::Param, (int)j}; return true; }
    for (size_t j = 0; j < consts.size(); ++j)
      if (consts[j] == name) { out = {SymbolKind::Constant, (int)j}; return true; }
    return false;
  }
  bool declared(const std::string& name) const {
    Symbol s;
    return lookup(name, s);
  }
};

// Recursive-descent expression parser over a token slice.
class ExprParser {
public:
  ExprParser(const LineTokens& lt, size_t begin, const SymbolTable& syms)
      : lt_(lt), i_(begin), syms_(syms) {}

  Expr::Ptr parse_all() {
    auto e = parse_expr();
    if (i_ < lt_.tokens.size())
      fail("trailing tokens after expression");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string& msg) const {
    int col = i_ < lt_.cols.size() ? lt_.cols[i_]
                                   : (lt_.cols.empty() ? 1 : lt_.cols.back() + 1);
    throw ParseError(ErrorKind::SyntaxError, msg, lt_.line, col);
  }

  bool peek(const std::string& t) const {
    return i_ < lt_.tokens.size() && lt_.tokens[i_] == t;
  }

  Expr::Ptr parse_expr() {
    auto e = parse_term();
    while (peek("+") || peek("-")) {
      bool plus = lt_.tokens[i_] == "+";
      ++i_;
      auto r = parse_term();
      e = Expr::binary(plus ? Expr::Op::Add : Expr::Op::Sub, std::move(e),
                       std::move(r));
    }
    return e;
  }

  Expr::Ptr parse_term() {
    auto e = parse_factor();
    while (peek("*") || peek("/")) {
      bool mul = lt_.tokens[i_] == "*";
      ++i_;
      auto r = parse_factor();
      e = Expr::binary(mul ? Expr::Op::Mul : Expr::Op::Div, std::move(e),
                       std::move(r));
    }
    return e;
  }

  Expr::Ptr parse_factor() {
    if (i_ >= lt_.tokens.size()) fail("expected expression");
    const std::string& t = lt_.tokens[i_];
    if (t == "-") {
      ++i_;
      return Expr::unary(Expr::Op::Neg, parse_factor());
    }
    if (t == "(") {
      ++i_;
      auto e = parse_expr();
      if (!peek(")")) fail("expected ')'");
      ++i_;
      return e;
    }
    if (is_number(t)) {
      ++i_;
      try {
        return Expr::literal(std::stod(t));
      } catch (const std::exception&) {
        --i_;
        fail("malformed number '" + t + "'");
      }
    }
    if (ident_start(t[0])) {
      Symbol s;
      if (!syms_.lookup(t, s))
        throw ParseError(ErrorKind::UnknownIdentifier,
                         "identifier '" + t + "' not declared", lt_.line,
                         lt_.cols[i_]);
      ++i_;
      return Expr::symbol(s, t);
    }
    fail("unexpected token '" + t + "'");
  }

  const LineTokens& lt_;
  size_t i_;
  const SymbolTable& syms_;
};

// Parses one side of a reaction arrow: `0` or `k1 S1 + k2 S2 + ...`.
// Accumulates multiplicities into counts (indexed by species).
void parse_side(const LineTokens& lt, size_t begin, size_t end,
                const SymbolTable& syms, std::vector<int>& counts,
                std::string& text_out) {
  std::ostringstream text;
  if (begin == end)
    throw ParseError(ErrorKind::SyntaxError, "empty reaction side", lt.line,
                     begin < lt.cols.size() ? lt.cols[begin] : 1);
  if (end - begin == 1 && lt.tokens[begin] == "0") {
    text_out = "0";
    return;
  }
  size_t i = begin;
  bool first = true;
  while (i < end) {
    if (!first) {
      if (lt.tokens[i] != "+")
        throw ParseError(ErrorKind::SyntaxError, "expected '+' between terms",
                         lt.line, lt.cols[i]);
      ++i;
      text << " + ";
    }
    first = false;
    int mult = 1;
    if (i < end && is_number(lt.tokens[i])) {
      size_t parsed = 0;
      try {
        mult = std::stoi(lt.tokens[i], &parsed);
      } catch (const std::exception&) {
        parsed = 0;
      }
      if (parsed != lt.tokens[i].size() || mult <= 0)
        throw ParseError(ErrorKind::SyntaxError,
                         "multiplicity must be a positive integer", lt.line,
                         lt.cols[i]);
      text << lt.tokens[i] << ' ';
      ++i;
    }
    if (i >= end || !ident_start(lt.tokens[i][0]))
      throw ParseError(ErrorKind::SyntaxError, "expected species name", lt.line,
                       i < lt.cols.size() ? lt.cols[i] : 1);
    Symbol s;
    if (!syms.lookup(lt.tokens[i], s) || s.kind != SymbolKind::Species)
      throw ParseError(ErrorKind::UnknownIdentifier,
                       "'" + lt.tokens[i] + "' is not a declared species",
                       lt.line, lt.cols[i]);
    counts[static_cast<size_t>(s.index)] += mult;
    text << lt.tokens[i];
    ++i;
  }
  text_out = text.str();
}

} // namespace

ReactionNetwork parse_network(const std::string& text) {
  SymbolTable syms;
  std::vector<double> const_values;
  std::vector<Reaction> reactions;
  bool saw_species = false, saw_params = false;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    LineTokens lt = tokenize_line(raw, lineno);
    if (lt.tokens.empty()) continue;
    const std::string& head = lt.tokens[0];

    auto check_fresh = [&](const std::string& name, int col) {
      if (syms.declared(name))
        throw ParseError(ErrorKind::DuplicateName,
                         "name '" + name + "' already declared", lineno, col);
    };

    if (head == "species") {
      if (saw_species)
        throw ParseError(ErrorKind::SyntaxError, "duplicate species line",
                         lineno, lt.cols[0]);
      saw_species = true;
      if (lt.tokens.size() < 2)
        throw ParseError(ErrorKind::SyntaxError,
                         "species line needs at least one name", lineno,
                         lt.cols[0]);
      for (size_t i = 1; i < lt.tokens.size(); ++i) {
        if (!ident_start(lt.tokens[i][0]))
          throw ParseError(ErrorKind::SyntaxError,
                           "bad species name '" + lt.tokens[i] + "'", lineno,
                           lt.cols[i]);
        check_fresh(lt.tokens[i], lt.cols[i]);
        syms.species.push_back(lt.tokens[i]);
      }
    } else if (head == "param") {
      if (saw_params)
        throw ParseError(ErrorKind::SyntaxError, "duplicate param line", lineno,
                         lt.cols[0]);
      saw_params = true;
      for (size_t i = 1; i < lt.tokens.size(); ++i) {
        if (!ident_start(lt.tokens[i][0]))
          throw ParseError(ErrorKind::SyntaxError,
                           "bad parameter name '" + lt.tokens[i] + "'", lineno,
                           lt.cols[i]);
        check_fresh(lt.tokens[i], lt.cols[i]);
        syms.params.push_back(lt.tokens[i]);
      }
    } else if (head == "const") {
      if (lt.tokens.size() != 4 || lt.tokens[2] != "=" ||
          !ident_start(lt.tokens[1][0]) || !is_number(lt.tokens[3]))
        throw ParseError(ErrorKind::SyntaxError,
                         "const line must be 'const <name> = <number>'", lineno,
                         lt.cols[0]);
      check_fresh(lt.tokens[1], lt.cols[1]);
      syms.consts.push_back(lt.tokens[1]);
      const_values.push_back(std::stod(lt.tokens[3]));
    } else if (head == "reaction") {
      if (lt.tokens.size() < 2 || lt.tokens[1] != ":")
        throw ParseError(ErrorKind::SyntaxError, "expected ':' after 'reaction'",
                         lineno, lt.cols[0]);
      if (!saw_species)
        throw ParseError(ErrorKind::SyntaxError,
                         "species must be declared before reactions", lineno,
                         lt.cols[0]);
      size_t arrow = 0, at = 0;
      for (size_t i = 2; i < lt.tokens.size(); ++i) {
        if (lt.tokens[i] == "->" && arrow == 0) arrow = i;
        if (lt.tokens[i] == "@" && at == 0) at = i;
      }
      if (arrow == 0 || at == 0 || at < arrow)
        throw ParseError(ErrorKind::SyntaxError,
                         "reaction line must be 'reaction: <lhs> -> <rhs> @ <expr>'",
                         lineno, lt.cols[0]);
      std::vector<int> reactants(syms.species.size(), 0);
      std::vector<int> products(syms.species.size(), 0);
      Reaction r;
      parse_side(lt, 2, arrow, syms, reactants, r.lhs_text);
      parse_side(lt, arrow + 1, at, syms, products, r.rhs_text);
      ExprParser ep(lt, at + 1, syms);
      r.rate = ep.parse_all();
      r.net_effect.resize(static_cast<Eigen::Index>(syms.species.size()));
      for (size_t j = 0; j < syms.species.size(); ++j)
        r.net_effect[static_cast<Eigen::Index>(j)] = products[j] - reactants[j];
      reactions.push_back(std::move(r));
    } else {
      throw ParseError(ErrorKind::SyntaxError,
                       "unknown directive '" + head + "'", lineno, lt.cols[0]);
    }
  }

  if (!saw_species)
    throw ParseError(ErrorKind::SyntaxError, "missing species line", lineno, 1);
  if (reactions.empty())
    throw ParseError(ErrorKind::EmptyReactionList, "no reactions declared",
                     lineno, 1);

  return ReactionNetwork(syms.species, syms.params, syms.consts, const_values,
                         std::move(reactions));
}

std::string serialize_network(const ReactionNetwork& net) {
  std::ostringstream out;
  out << "species";
  for (const auto& s : net.species()) out << ' ' << s;
  out << '\n' << "param";
  for (const auto& p : net.params()) out << ' ' << p;
  out << '\n';
  out.precision(17);
  for (size_t j = 0; j < net.constant_names().size(); ++j)
    out << "const " << net.constant_names()[j] << " = "
        << net.constant_values()[j] << '\n';
  for (const auto& r : net.reactions())
    out << "reaction: " << r.lhs_text << " -> " << r.rhs_text << " @ "
        << r.rate->to_string() << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Builtin models

namespace {

const char* kLotkaVolterraDsl = R"(# Lotka-Volterra predator-prey
species Pred Prey
param theta1 theta2 theta3
reaction: Pred + Prey -> 2 Pred @ theta1 * Pred * Prey
reaction: Pred -> 0 @ theta2 * Pred
reaction: Prey -> 2 Prey @ theta3 * Prey
)";

const char* kSirDsl = R"(# SIR epidemic model: X1 = infected, X2 = susceptible
species I S
param theta1 theta2
reaction: I + S -> 2 I @ theta1 * I * S
reaction: I -> 0 @ theta2 * I
)";

// Autoregulatory gene network; DNA.P2 is untracked, DNA + DNA.P2 = k.
std::string autoreg_dsl(double k) {
  std::ostringstream out;
  out.precision(17);
  out << "species DNA RNA P P2\n"
      << "param theta1 theta2 theta3 theta4 theta5 theta6 theta7 theta8\n"
      << "const k = " << k << "\n"
      << "reaction: DNA + P2 -> 0 @ theta1 * DNA * P2\n"
      << "reaction: 0 -> DNA + P2 @ theta2 * (k - DNA)\n"
      << "reaction: DNA -> DNA + RNA @ theta3 * DNA\n"
      << "reaction: RNA -> RNA + P @ theta4 * RNA\n"
      << "reaction: 2 P -> P2 @ theta5 / 2 * P * (P - 1)\n"
      << "reaction: P2 -> 2 P @ theta6 * P2\n"
      << "reaction: RNA -> 0 @ theta7 * RNA\n"
      << "reaction: P -> 0 @ theta8 * P\n";
  return out.str();
}

} // namespace

BuiltinModel builtin(const std::string& name, double scale) {
  if (name == "lotka-volterra") {
    BuiltinModel m{parse_network(kLotkaVolterraDsl), Vector(3), Vector(2)};
    m.theta << 0.01, 0.6, 0.3;
    m.x0 << 40, 140;
    return m;
  }
  if (name == "sir") {
    BuiltinModel m{parse_network(kSirDsl), Vector(2), Vector(2)};
    m.theta << 0.001, 0.1;
    m.x0 << 1, 118;
    return m;
  }
  if (name == "autoreg") {
    double omega = scale;
    if (!(omega > 0))
      throw Error(ErrorKind::UsageError, "autoreg scale must be positive");
    BuiltinModel m{parse_network(autoreg_dsl(10.0 * omega)), Vector(8), Vector(4)};
    m.theta << 0.1 / omega, 0.7, 0.35, 0.2, 0.1 / omega, 0.9, 0.3, 0.1;
    m.x0 << 5 * omega, 8 * omega, 8 * omega, 8 * omega;
    return m;
  }
  throw Error(ErrorKind::UsageError, "unknown builtin network '" + name + "'");
}

} // namespace kinlna
