#ifndef KINLNA_NETWORK_HPP
#define KINLNA_NETWORK_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "kinlna/expr.hpp"

namespace kinlna {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// One reaction: a row of the net-effect matrix plus its rate law.
struct Reaction {
  Eigen::VectorXi net_effect; // length n_s, products minus reactants
  Expr::Ptr rate;
  std::string lhs_text; // original reactant/product sides, kept for
  std::string rhs_text; // serialization
};

/// A reaction network: species, rate parameters, named constants and
/// reactions. Immutable after construction; all evaluation functions are
/// pure and safe to call concurrently.
class ReactionNetwork {
public:
  ReactionNetwork(std::vector<std::string> species,
                  std::vector<std::string> params,
                  std::vector<std::string> constant_names,
                  std::vector<double> constant_values,
                  std::vector<Reaction> reactions);

  int num_species() const { return static_cast<int>(species_.size()); }
  int num_params() const { return static_cast<int>(params_.size()); }
  int num_reactions() const { return static_cast<int>(reactions_.size()); }

  const std::vector<std::string>& species() const { return species_; }
  const std::vector<std::string>& params() const { return params_; }
  const std::vector<std::string>& constant_names() const { return const_names_; }
  const std::vector<double>& constant_values() const { return const_values_; }
  const std::vector<Reaction>& reactions() const { return reactions_; }

  /// n_r x n_s net-effect matrix A (row i = state change of reaction i).
  const Eigen::MatrixXi& net_effect_matrix() const { return net_effect_; }

  /// True if any reaction has an all-zero net-effect row.
  bool has_degenerate_reaction() const { return degenerate_; }

  /// Rate vector h(x, theta). Throws on division by zero, non-finite result
  /// or nonpositive theta.
  Vector propensities(const Vector& x, const Vector& theta) const;

  /// A' h(x, theta): the infinitesimal mean rate of change.
  Vector drift(const Vector& x, const Vector& theta) const;

  /// A' diag(h) A. Validates h >= 0 (StateInconsistency otherwise).
  Matrix diffusion_matrix(const Vector& x, const Vector& theta) const;

  /// As diffusion_matrix but without the nonnegativity check; used inside
  /// the LNA right-hand side where the deterministic path may make small
  /// negative excursions.
  Matrix diffusion_matrix_unchecked(const Vector& x, const Vector& theta) const;

  /// Exact Jacobian of drift with respect to the state, F_ij = d(drift_i)/dx_j.
  Matrix drift_jacobian(const Vector& x, const Vector& theta) const;

private:
  void check_inputs(const Vector& x, const Vector& theta) const;

  std::vector<std::string> species_;
  std::vector<std::string> params_;
  std::vector<std::string> const_names_;
  std::vector<double> const_values_;
  std::vector<Reaction> reactions_;
  Eigen::MatrixXi net_effect_;
  std::vector<std::vector<Expr::Ptr>> rate_species_derivs_; // [reaction][species]
  bool degenerate_ = false;
};

/// Parses the network DSL. Errors carry ErrorKind SyntaxError,
/// UnknownIdentifier, DuplicateName or EmptyReactionList with line/column.
ReactionNetwork parse_network(const std::string& text);

/// Emits DSL text that parses back to an identical network.
std::string serialize_network(const ReactionNetwork& net);

/// A builtin network plus its default parameters and initial state.
struct BuiltinModel {
  ReactionNetwork network;
  Vector theta;
  Vector x0;
};

/// name in {"lotka-volterra", "sir", "autoreg"}; scale is the system size
/// Omega and only affects autoreg.
BuiltinModel builtin(const std::string& name, double scale = 1.0);

} // namespace kinlna

#endif
