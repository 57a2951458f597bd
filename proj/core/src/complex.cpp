#include "ymlab/complex.hpp"

#include "ymlab/errors.hpp"
#include "ymlab/linalg.hpp"

namespace ymlab {

TwistedComplex::TwistedComplex(CentralRep rep)
    : rep_(std::move(rep)), pres_(rep_.genus), n_(rep_.ctx->dim_g()) {}

std::shared_ptr<const TwistedComplex> TwistedComplex::build(CentralRep rep, double defect_tol,
                                                            double d1d0_tol) {
  if (rep.defect > defect_tol ||
      relator_defect(SurfacePresentation(rep.genus), rep.images, rep.c) > defect_tol) {
    throw NotCentral("TwistedComplex: relator defect exceeds tolerance");
  }
  auto cx = build_unchecked(std::move(rep));
  if (cx->d1d0_norm() > d1d0_tol) {
    throw NotCentral("TwistedComplex: D1*D0 residual exceeds tolerance");
  }
  return cx;
}

std::shared_ptr<const TwistedComplex> TwistedComplex::build_unchecked(CentralRep rep) {
  auto cx = std::shared_ptr<TwistedComplex>(new TwistedComplex(std::move(rep)));
  cx->assemble();
  return cx;
}

void TwistedComplex::assemble() {
  const LieContext& ctx = *rep_.ctx;
  const int n = n_;
  const int gens = pres_.num_generators();
  const int dim1 = gens * n;

  // D0 blocks: Ad(rho(s))^-1 - I
  d0_ = Eigen::MatrixXd::Zero(dim1, n);
  for (int s = 0; s < gens; ++s) {
    GroupElement inv{rep_.images[s].m.adjoint()};
    d0_.middleRows(s * n, n) =
        adjoint_action(ctx, inv) - Eigen::MatrixXd::Identity(n, n);
  }

  // tau matrices: walk the relator, transporting by the adjoint holonomy of
  // the running prefix (inclusive for positive letters, exclusive for
  // inverse letters).
  tau_.clear();
  std::vector<int> tau_gen;
  Eigen::MatrixXcd prefix = Eigen::MatrixXcd::Identity(ctx.mat_dim(), ctx.mat_dim());
  for (const auto& letter : pres_.relator()) {
    const Eigen::MatrixXcd& g = rep_.images[letter.generator].m;
    Eigen::MatrixXd t(n, dim1);
    t.setZero();
    if (letter.sign > 0) {
      prefix = prefix * g;
      t.middleCols(letter.generator * n, n) = adjoint_action(ctx, GroupElement{prefix});
    } else {
      t.middleCols(letter.generator * n, n) = -adjoint_action(ctx, GroupElement{prefix});
      prefix = prefix * g.adjoint();
    }
    tau_.push_back(std::move(t));
    tau_gen.push_back(letter.generator);
  }

  d1_ = Eigen::MatrixXd::Zero(n, dim1);
  for (const auto& t : tau_) d1_ += t;

  // sigma = antisymmetrization of sum_{i<j} tau_i^T G tau_j
  Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(dim1, dim1);
  const Eigen::MatrixXd& g0 = ctx.gram();
  for (std::size_t i = 0; i < tau_.size(); ++i) {
    for (std::size_t j = i + 1; j < tau_.size(); ++j) {
      raw += tau_[i].transpose() * g0 * tau_[j];
    }
  }
  sigma_ = 0.5 * (raw - raw.transpose());

  // cup tensor: W_k = 1/2 sum_{i<j} (tau_i^T C_k tau_j - tau_j^T C_k tau_i),
  // with C_k the structure-constant form of coordinate k; exactly symmetric.
  cup_w_.assign(n, Eigen::MatrixXd::Zero(dim1, dim1));
  for (int k = 0; k < n; ++k) {
    const Eigen::MatrixXd& ck = ctx.structure_constants()[k];
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(dim1, dim1);
    for (std::size_t i = 0; i < tau_.size(); ++i) {
      for (std::size_t j = i + 1; j < tau_.size(); ++j) {
        acc += tau_[i].transpose() * ck * tau_[j] - tau_[j].transpose() * ck * tau_[i];
      }
    }
    cup_w_[k] = 0.5 * acc;
  }
}

double TwistedComplex::cup_sigma(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
  if (u.size() != dim_c1() || v.size() != dim_c1()) throw Error("cup_sigma: dimension mismatch");
  return u.dot(sigma_ * v);
}

Eigen::VectorXd TwistedComplex::cup_bracket(const Eigen::VectorXd& u,
                                            const Eigen::VectorXd& v) const {
  if (u.size() != dim_c1() || v.size() != dim_c1()) {
    throw Error("cup_bracket: dimension mismatch");
  }
  Eigen::VectorXd out(n_);
  for (int k = 0; k < n_; ++k) out[k] = u.dot(cup_w_[k] * v);
  return out;
}

double TwistedComplex::pair02(const Eigen::VectorXd& phi, const Eigen::VectorXd& beta) const {
  if (phi.size() != n_ || beta.size() != n_) throw Error("pair02: dimension mismatch");
  return phi.dot(ctx().gram() * beta);
}

Eigen::VectorXd TwistedComplex::cup01(const Eigen::VectorXd& phi,
                                      const Eigen::VectorXd& u) const {
  Eigen::MatrixXd ad = ctx().ad_matrix(AlgebraElement{phi});
  Eigen::VectorXd out(dim_c1());
  for (int s = 0; s < 2 * genus(); ++s) {
    out.segment(s * n_, n_) = ad * u.segment(s * n_, n_);
  }
  return out;
}

Eigen::VectorXd TwistedComplex::cup10(const Eigen::VectorXd& u,
                                      const Eigen::VectorXd& phi) const {
  return -cup01(phi, u);
}

Eigen::MatrixXd TwistedComplex::action_c0(const GroupElement& z) const {
  return adjoint_action(ctx(), z);
}

Eigen::MatrixXd TwistedComplex::action_c1(const GroupElement& z) const {
  Eigen::MatrixXd ad = adjoint_action(ctx(), z);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim_c1(), dim_c1());
  for (int s = 0; s < 2 * genus(); ++s) {
    out.block(s * n_, s * n_, n_, n_) = ad;
  }
  return out;
}

Eigen::MatrixXd TwistedComplex::action_c2(const GroupElement& z) const {
  return adjoint_action(ctx(), z);
}

std::array<int, 3> TwistedComplex::betti(double rank_rel_tol) const {
  int r0 = svd_rank(d0_, rank_rel_tol);
  int r1 = svd_rank(d1_, rank_rel_tol);
  int b0 = n_ - r0;
  int b1 = dim_c1() - r1 - r0;
  int b2 = n_ - r1;
  return {b0, b1, b2};
}

Eigen::MatrixXd TwistedComplex::base_metric_c1() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim_c1(), dim_c1());
  for (int s = 0; s < 2 * genus(); ++s) {
    out.block(s * n_, s * n_, n_, n_) = ctx().gram();
  }
  return out;
}

}  // namespace ymlab
