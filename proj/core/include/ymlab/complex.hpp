#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "ymlab/surface.hpp"

namespace ymlab {

// Three-term twisted cochain complex C^0 -> C^1 -> C^2 of the presentation
// 2-complex: C^0 = C^2 = g, C^1 = g^{2g}, coefficients twisted by the
// adjoint holonomy.
//
// Conventions (see docs/conventions.md):
//   (D0 phi)_s = Ad(rho(s))^-1 phi - phi
//   D1 u = sum over relator occurrences of tau_i(u), where tau_i transports
//          the letter value by the adjoint holonomy of the relator prefix
//          (inclusive for positive letters, exclusive for inverse letters).
//   cup_sigma  = antisymmetrized sum over ordered occurrence pairs of
//                <tau_i(u), tau_j(v)>           (scalar, C^2 evaluated)
//   cup_bracket = symmetrized sum of [tau_i(u), tau_j(v)]   (C^2 valued)
// D1 equals the derivative at 0 of the relator deformation map, and
// cup_bracket equals its exact second-order term.
class TwistedComplex {
 public:
  static std::shared_ptr<const TwistedComplex> build(CentralRep rep,
                                                     double defect_tol = 1e-10,
                                                     double d1d0_tol = 1e-10);

  // No relator-defect admission check: used by tests to observe D1*D0 != 0
  // on inadmissible tuples.
  static std::shared_ptr<const TwistedComplex> build_unchecked(CentralRep rep);

  const CentralRep& rep() const { return rep_; }
  const LieContext& ctx() const { return *rep_.ctx; }
  const SurfacePresentation& presentation() const { return pres_; }

  int n() const { return n_; }                 // dim g
  int genus() const { return rep_.genus; }
  int dim_c1() const { return 2 * genus() * n_; }

  const Eigen::MatrixXd& d0() const { return d0_; }
  const Eigen::MatrixXd& d1() const { return d1_; }

  // tau matrix of relator occurrence i (maps C^1 to C^2 = g).
  const std::vector<Eigen::MatrixXd>& tau() const { return tau_; }

  const Eigen::MatrixXd& sigma_matrix() const { return sigma_; }
  // cup_bracket(u,v)[k] = u^T bracket_tensor()[k] v
  const std::vector<Eigen::MatrixXd>& bracket_tensor() const { return cup_w_; }

  double cup_sigma(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
  Eigen::VectorXd cup_bracket(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
  double pair02(const Eigen::VectorXd& phi, const Eigen::VectorXd& beta) const;

  // Mixed cups: blockwise bracket action of a 0-cochain.
  Eigen::VectorXd cup01(const Eigen::VectorXd& phi, const Eigen::VectorXd& u) const;
  Eigen::VectorXd cup10(const Eigen::VectorXd& u, const Eigen::VectorXd& phi) const;

  // Action of a group element on cochains (blockwise adjoint action).
  Eigen::MatrixXd action_c0(const GroupElement& z) const;
  Eigen::MatrixXd action_c1(const GroupElement& z) const;
  Eigen::MatrixXd action_c2(const GroupElement& z) const;

  // Ranks with relative threshold; Betti numbers b0, b1, b2.
  std::array<int, 3> betti(double rank_rel_tol = 1e-8) const;

  // Block-diagonal gram metric on C^1 (the base metric before refinement).
  Eigen::MatrixXd base_metric_c1() const;

  double d1d0_norm() const { return (d1_ * d0_).norm(); }

 private:
  TwistedComplex(CentralRep rep);
  void assemble();

  CentralRep rep_;
  SurfacePresentation pres_;
  int n_;
  Eigen::MatrixXd d0_, d1_;
  std::vector<Eigen::MatrixXd> tau_;
  Eigen::MatrixXd sigma_;
  std::vector<Eigen::MatrixXd> cup_w_;
};

using TwistedComplexPtr = std::shared_ptr<const TwistedComplex>;

}  // namespace ymlab
