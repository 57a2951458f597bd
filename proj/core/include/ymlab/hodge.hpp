#pragma once

#include <array>
#include <memory>

#include "ymlab/complex.hpp"
#include "ymlab/linalg.hpp"

namespace ymlab {

// Inner products, compatible complex structure J on C^1, duality operators
// in degrees 0/2, adjoints, Laplacians, Green operators, homotopies and
// harmonic projections for a twisted complex.
//
// Construction: the skew operator S of cup_sigma against the block-diagonal
// base metric is polar-decomposed into J (sign fixed so that
// g1 = cup_sigma(., J.) is positive definite); degrees 0 and 2 carry the
// gram metric with identity duality operators. All adjoint and homotopy
// identities listed in docs/conventions.md then hold to machine precision.
class KaehlerHodgePackage {
 public:
  static std::shared_ptr<const KaehlerHodgePackage> build(TwistedComplexPtr complex,
                                                          double rank_rel_tol = 1e-8);

  // Same construction against a caller-supplied base metric on C^1 (used by
  // the metric-perturbation experiment); must be SPD and stabilizer-invariant.
  static std::shared_ptr<const KaehlerHodgePackage> build_with_base(
      TwistedComplexPtr complex, const Eigen::MatrixXd& base_metric,
      double rank_rel_tol = 1e-8);

  const TwistedComplex& complex() const { return *complex_; }
  int n() const { return complex_->n(); }
  int dim_c1() const { return complex_->dim_c1(); }

  const MetricSpace& space_c0() const { return s0_; }
  const MetricSpace& space_c1() const { return s1_; }
  const MetricSpace& space_c2() const { return s2_; }

  const Eigen::MatrixXd& jop() const { return jop_; }
  // star0 : C^0 -> C^2 and star2 : C^2 -> C^0 are identity matrices in the
  // chosen identification; kept explicit so alternates stay pluggable.
  const Eigen::MatrixXd& star0() const { return star0_; }
  const Eigen::MatrixXd& star2() const { return star2_; }

  const Eigen::MatrixXd& d0adj() const { return d0adj_; }
  const Eigen::MatrixXd& d1adj() const { return d1adj_; }
  const Eigen::MatrixXd& lap0() const { return lap0_; }
  const Eigen::MatrixXd& lap1() const { return lap1_; }
  const Eigen::MatrixXd& lap2() const { return lap2_; }

  // g-orthonormal harmonic bases (columns), possibly zero columns.
  const Eigen::MatrixXd& harm0() const { return harm0_; }
  const Eigen::MatrixXd& harm1() const { return harm1_; }
  const Eigen::MatrixXd& harm2() const { return harm2_; }

  // Harmonic projectors (iota . alpha as one matrix per degree).
  const Eigen::MatrixXd& alpha0() const { return alpha0_; }
  const Eigen::MatrixXd& alpha1() const { return alpha1_; }
  const Eigen::MatrixXd& alpha2() const { return alpha2_; }

  // Orthogonal projectors onto the coboundary spaces B^1, B^2.
  const Eigen::MatrixXd& p1() const { return p1_; }
  const Eigen::MatrixXd& p2() const { return p2_; }

  // Inverses of the Laplacian restricted to B^j (zero on the complement).
  const Eigen::MatrixXd& green1() const { return green1_; }
  const Eigen::MatrixXd& green2() const { return green2_; }

  // Homotopy operators, h1 : C^1 -> C^0, h2 : C^2 -> C^1.
  const Eigen::MatrixXd& h1() const { return h1_; }
  const Eigen::MatrixXd& h2() const { return h2_; }

  int dim_h0() const { return static_cast<int>(harm0_.cols()); }
  int dim_h1() const { return static_cast<int>(harm1_.cols()); }
  int dim_h2() const { return static_cast<int>(harm2_.cols()); }

  // (exact, harmonic, coexact) components of v in degree j.
  struct Split {
    Eigen::VectorXd exact, harmonic, coexact;
  };
  Split hodge_split(const Eigen::VectorXd& v, int degree) const;

  Eigen::VectorXd homotopy_h(const Eigen::VectorXd& v, int degree) const;

  // Harmonic representative of a cocycle; throws NotACocycle when the
  // cocycle residual exceeds cocycle_tol times the vector scale.
  Eigen::VectorXd kappa(const Eigen::VectorXd& v, int degree,
                        double cocycle_tol = 1e-8) const;

  // Harmonic coordinates: v = harm1 * coords for v in H^1.
  Eigen::VectorXd harm1_coords(const Eigen::VectorXd& v) const;
  Eigen::VectorXd harm1_embed(const Eigen::VectorXd& coords) const;

 private:
  KaehlerHodgePackage() = default;

  TwistedComplexPtr complex_;
  MetricSpace s0_, s1_, s2_;
  Eigen::MatrixXd jop_, star0_, star2_;
  Eigen::MatrixXd d0adj_, d1adj_, lap0_, lap1_, lap2_;
  Eigen::MatrixXd harm0_, harm1_, harm2_;
  Eigen::MatrixXd alpha0_, alpha1_, alpha2_;
  Eigen::MatrixXd p1_, p2_, green1_, green2_, h1_, h2_;
  Eigen::MatrixXd coex1_proj_;  // projector onto im(d1adj)
};

using HodgePackagePtr = std::shared_ptr<const KaehlerHodgePackage>;

}  // namespace ymlab
