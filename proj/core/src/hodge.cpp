#include "ymlab/hodge.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "ymlab/errors.hpp"

namespace ymlab {

std::shared_ptr<const KaehlerHodgePackage> KaehlerHodgePackage::build(TwistedComplexPtr complex,
                                                                      double rank_rel_tol) {
  Eigen::MatrixXd base = complex->base_metric_c1();
  return build_with_base(std::move(complex), base, rank_rel_tol);
}

std::shared_ptr<const KaehlerHodgePackage> KaehlerHodgePackage::build_with_base(
    TwistedComplexPtr complex, const Eigen::MatrixXd& base_metric, double rank_rel_tol) {
  auto pkg = std::shared_ptr<KaehlerHodgePackage>(new KaehlerHodgePackage());
  pkg->complex_ = std::move(complex);
  const TwistedComplex& cx = *pkg->complex_;
  const int n = cx.n();
  const int dim1 = cx.dim_c1();

  // (i) base metric, (ii) whitened skew operator of sigma
  MetricSpace base(base_metric);
  Eigen::MatrixXd s_w =
      base.chol_lt_inv().transpose() * cx.sigma_matrix() * base.chol_lt_inv();
  s_w = 0.5 * (s_w - s_w.transpose());

  Eigen::JacobiSVD<Eigen::MatrixXd> svd_s(s_w);
  double smax = svd_s.singularValues().size() ? svd_s.singularValues()[0] : 0.0;
  double smin = svd_s.singularValues().size()
                    ? svd_s.singularValues()[svd_s.singularValues().size() - 1]
                    : 0.0;
  if (smax <= 0.0 || smin <= rank_rel_tol * smax) {
    throw DegenerateSigma("build_package: cup_sigma is rank-deficient on C^1",
                          smax > 0 ? smin / smax : 0.0);
  }

  // (iii) polar factor, oriented so that sigma(., J.) is positive definite
  Eigen::MatrixXd t = s_w.transpose() * s_w;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (t + t.transpose()));
  Eigen::VectorXd inv_sqrt = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd t_inv_sqrt =
      es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
  Eigen::MatrixXd j_w = -s_w * t_inv_sqrt;
  pkg->jop_ = base.chol_lt_inv() * j_w * base.chol_lt();

  // (iv) refined metric g1 = sigma(., J.)
  Eigen::MatrixXd g1 = cx.sigma_matrix() * pkg->jop_;
  g1 = 0.5 * (g1 + g1.transpose());

  // (v)/(vi) gram metrics and identity duality operators in degrees 0, 2
  pkg->s0_ = MetricSpace(cx.ctx().gram());
  pkg->s1_ = MetricSpace(g1);
  pkg->s2_ = MetricSpace(cx.ctx().gram());
  pkg->star0_ = Eigen::MatrixXd::Identity(n, n);
  pkg->star2_ = Eigen::MatrixXd::Identity(n, n);

  // (vii) whitened differentials, subspaces, and the operator family
  Eigen::MatrixXd d0w = pkg->s0_.whiten_op(pkg->s1_, cx.d0());
  Eigen::MatrixXd d1w = pkg->s1_.whiten_op(pkg->s2_, cx.d1());

  Eigen::MatrixXd b1_w = range_basis(d0w, rank_rel_tol);           // image of d0
  Eigen::MatrixXd b2_w = range_basis(d1w, rank_rel_tol);           // image of d1
  Eigen::MatrixXd co1_w = range_basis(d1w.transpose(), rank_rel_tol);

  Eigen::MatrixXd stacked(n + n, dim1);
  stacked.topRows(n) = d1w;
  stacked.bottomRows(n) = d0w.transpose();
  Eigen::MatrixXd h1basis_w = null_basis(stacked, rank_rel_tol);
  Eigen::MatrixXd h0basis_w = null_basis(d0w, rank_rel_tol);
  Eigen::MatrixXd h2basis_w = null_basis(Eigen::MatrixXd(d1w.transpose()), rank_rel_tol);

  auto unop = [&](const MetricSpace& dom, const MetricSpace& cod, const Eigen::MatrixXd& aw) {
    return dom.unwhiten_op(cod, aw);
  };

  pkg->d0adj_ = unop(pkg->s1_, pkg->s0_, d0w.transpose());
  pkg->d1adj_ = unop(pkg->s2_, pkg->s1_, d1w.transpose());
  pkg->lap0_ = pkg->d0adj_ * cx.d0();
  pkg->lap1_ = cx.d0() * pkg->d0adj_ + pkg->d1adj_ * cx.d1();
  pkg->lap2_ = cx.d1() * pkg->d1adj_;

  auto unbasis = [&](const MetricSpace& space, const Eigen::MatrixXd& cols_w) {
    Eigen::MatrixXd out(cols_w.rows(), cols_w.cols());
    for (int c = 0; c < cols_w.cols(); ++c) out.col(c) = space.unwhiten(cols_w.col(c));
    return out;
  };
  pkg->harm0_ = unbasis(pkg->s0_, h0basis_w);
  pkg->harm1_ = unbasis(pkg->s1_, h1basis_w);
  pkg->harm2_ = unbasis(pkg->s2_, h2basis_w);

  pkg->alpha0_ = unop(pkg->s0_, pkg->s0_, projector(h0basis_w));
  pkg->alpha1_ = unop(pkg->s1_, pkg->s1_, projector(h1basis_w));
  pkg->alpha2_ = unop(pkg->s2_, pkg->s2_, projector(h2basis_w));

  pkg->p1_ = unop(pkg->s1_, pkg->s1_, projector(b1_w));
  pkg->p2_ = unop(pkg->s2_, pkg->s2_, projector(b2_w));
  pkg->coex1_proj_ = unop(pkg->s1_, pkg->s1_, projector(co1_w));

  // Green operators: inverses of the Laplacian on the coboundary blocks.
  auto green_from = [&](const Eigen::MatrixXd& dw, const Eigen::MatrixXd& range_w) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(dw, Eigen::ComputeFullU | Eigen::ComputeFullV);
    int r = static_cast<int>(range_w.cols());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dw.rows(), dw.rows());
    for (int i = 0; i < r; ++i) {
      double s = svd.singularValues()[i];
      out += svd.matrixU().col(i) * svd.matrixU().col(i).transpose() / (s * s);
    }
    return out;
  };
  pkg->green1_ = unop(pkg->s1_, pkg->s1_, green_from(d0w, b1_w));
  pkg->green2_ = unop(pkg->s2_, pkg->s2_, green_from(d1w, b2_w));

  pkg->h1_ = unop(pkg->s1_, pkg->s0_, pinv(d0w, rank_rel_tol));
  pkg->h2_ = unop(pkg->s2_, pkg->s1_, pinv(d1w, rank_rel_tol));
  return pkg;
}

KaehlerHodgePackage::Split KaehlerHodgePackage::hodge_split(const Eigen::VectorXd& v,
                                                            int degree) const {
  Split out;
  switch (degree) {
    case 0:
      out.exact = Eigen::VectorXd::Zero(v.size());
      out.harmonic = alpha0_ * v;
      out.coexact = v - out.harmonic;
      break;
    case 1:
      out.exact = p1_ * v;
      out.harmonic = alpha1_ * v;
      out.coexact = coex1_proj_ * v;
      break;
    case 2:
      out.exact = p2_ * v;
      out.harmonic = alpha2_ * v;
      out.coexact = Eigen::VectorXd::Zero(v.size());
      break;
    default:
      throw Error("hodge_split: degree out of range");
  }
  return out;
}

Eigen::VectorXd KaehlerHodgePackage::homotopy_h(const Eigen::VectorXd& v, int degree) const {
  if (degree == 1) return h1_ * v;
  if (degree == 2) return h2_ * v;
  throw Error("homotopy_h: degree out of range");
}

Eigen::VectorXd KaehlerHodgePackage::kappa(const Eigen::VectorXd& v, int degree,
                                           double cocycle_tol) const {
  double scale = std::max(1.0, v.norm());
  switch (degree) {
    case 0:
      if ((complex_->d0() * v).norm() > cocycle_tol * scale) {
        throw NotACocycle("kappa: vector is not a 0-cocycle");
      }
      return alpha0_ * v;
    case 1:
      if ((complex_->d1() * v).norm() > cocycle_tol * scale) {
        throw NotACocycle("kappa: vector is not a 1-cocycle");
      }
      return alpha1_ * v;
    case 2:
      return alpha2_ * v;
    default:
      throw Error("kappa: degree out of range");
  }
}

Eigen::VectorXd KaehlerHodgePackage::harm1_coords(const Eigen::VectorXd& v) const {
  return harm1_.transpose() * s1_.gram() * v;
}

Eigen::VectorXd KaehlerHodgePackage::harm1_embed(const Eigen::VectorXd& coords) const {
  if (harm1_.cols() == 0) return Eigen::VectorXd::Zero(dim_c1());
  return harm1_ * coords;
}

}  // namespace ymlab
