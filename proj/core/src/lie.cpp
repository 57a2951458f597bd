#include "ymlab/lie.hpp"

#include <cmath>
#include <complex>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "ymlab/errors.hpp"
#include "ymlab/linalg.hpp"

namespace ymlab {

using cplx = std::complex<double>;

std::string group_id_name(GroupId id) {
  switch (id) {
    case GroupId::u1: return "u1";
    case GroupId::su2: return "su2";
    case GroupId::u2: return "u2";
  }
  return "?";
}

GroupId group_id_from_name(const std::string& name) {
  if (name == "u1") return GroupId::u1;
  if (name == "su2") return GroupId::su2;
  if (name == "u2") return GroupId::u2;
  throw ConfigError("unknown group id: " + name);
}

namespace {

Eigen::MatrixXcd pauli(int k) {
  Eigen::MatrixXcd s(2, 2);
  const cplx i(0.0, 1.0);
  switch (k) {
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, -i, i, 0; break;
    default: s << 1, 0, 0, -1; break;
  }
  return s;
}

double alg_inner_matrices(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
  // <x,y> = -1/2 tr(xy); real for anti-hermitian arguments.
  return -0.5 * (x * y).trace().real();
}

}  // namespace

std::shared_ptr<const LieContext> LieContext::make(GroupId id) {
  auto ctx = std::shared_ptr<LieContext>(new LieContext());
  ctx->id_ = id;
  const cplx i(0.0, 1.0);
  switch (id) {
    case GroupId::u1: {
      ctx->mat_dim_ = 1;
      ctx->abelian_ = true;
      Eigen::MatrixXcd e(1, 1);
      e << i;
      ctx->basis_ = {e};
      ctx->center_indices_ = {0};
      break;
    }
    case GroupId::su2: {
      ctx->mat_dim_ = 2;
      ctx->abelian_ = false;
      ctx->basis_ = {i * pauli(1), i * pauli(2), i * pauli(3)};
      ctx->center_indices_ = {};
      ctx->discrete_center_ = {-Eigen::MatrixXcd::Identity(2, 2)};
      break;
    }
    case GroupId::u2: {
      ctx->mat_dim_ = 2;
      ctx->abelian_ = false;
      ctx->basis_ = {i * pauli(1), i * pauli(2), i * pauli(3),
                     i * Eigen::MatrixXcd::Identity(2, 2)};
      ctx->center_indices_ = {3};
      break;
    }
  }
  ctx->dim_g_ = static_cast<int>(ctx->basis_.size());
  const int n = ctx->dim_g_;

  ctx->gram_.resize(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      ctx->gram_(a, b) = alg_inner_matrices(ctx->basis_[a], ctx->basis_[b]);
    }
  }
  ctx->gram_inv_ = ctx->gram_.inverse();

  // structure constants via gram: [e_a, e_b] = sum_k c^k_{ab} e_k
  ctx->structure_.assign(n, Eigen::MatrixXd::Zero(n, n));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      Eigen::MatrixXcd comm = ctx->basis_[a] * ctx->basis_[b] - ctx->basis_[b] * ctx->basis_[a];
      Eigen::VectorXd pair(n);
      for (int k = 0; k < n; ++k) pair[k] = alg_inner_matrices(ctx->basis_[k], comm);
      Eigen::VectorXd c = ctx->gram_inv_ * pair;
      for (int k = 0; k < n; ++k) ctx->structure_[k](a, b) = c[k];
    }
  }
  ctx->ad_basis_.assign(n, Eigen::MatrixXd::Zero(n, n));
  for (int a = 0; a < n; ++a) {
    for (int k = 0; k < n; ++k) {
      for (int b = 0; b < n; ++b) ctx->ad_basis_[a](k, b) = ctx->structure_[k](a, b);
    }
  }
  return ctx;
}

Eigen::MatrixXcd LieContext::reconstruct(const AlgebraElement& x) const {
  if (x.coeffs.size() != dim_g_) throw Error("AlgebraElement: coefficient dimension mismatch");
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(mat_dim_, mat_dim_);
  for (int k = 0; k < dim_g_; ++k) out += x.coeffs[k] * basis_[k];
  return out;
}

AlgebraElement LieContext::project(const Eigen::MatrixXcd& anti_hermitian) const {
  Eigen::VectorXd pair(dim_g_);
  for (int k = 0; k < dim_g_; ++k) pair[k] = alg_inner_matrices(basis_[k], anti_hermitian);
  return AlgebraElement{gram_inv_ * pair};
}

GroupElement LieContext::identity() const {
  return GroupElement{Eigen::MatrixXcd::Identity(mat_dim_, mat_dim_)};
}

Eigen::MatrixXd LieContext::ad_matrix(const AlgebraElement& x) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim_g_, dim_g_);
  for (int k = 0; k < dim_g_; ++k) out += x.coeffs[k] * ad_basis_[k];
  return out;
}

double LieContext::inner(const AlgebraElement& x, const AlgebraElement& y) const {
  return x.coeffs.dot(gram_ * y.coeffs);
}

double LieContext::norm(const AlgebraElement& x) const {
  return std::sqrt(std::max(0.0, inner(x, x)));
}

double LieContext::unitarity_residual(const GroupElement& a) const {
  return (a.m.adjoint() * a.m - Eigen::MatrixXcd::Identity(mat_dim_, mat_dim_)).norm();
}

double LieContext::det_residual(const GroupElement& a) const {
  cplx det = a.m.determinant();
  if (requires_unit_det()) return std::abs(det - cplx(1.0, 0.0));
  return std::abs(std::abs(det) - 1.0);
}

AlgebraElement LieContext::random_algebra(RngStream& rng, double scale) const {
  return AlgebraElement{scale * rng.gaussian_vector(dim_g_)};
}

GroupElement LieContext::random_group(RngStream& rng, double scale) const {
  return exp_alg(*this, random_algebra(rng, scale));
}

AlgebraElement bracket(const LieContext& ctx, const AlgebraElement& x, const AlgebraElement& y) {
  if (x.coeffs.size() != ctx.dim_g() || y.coeffs.size() != ctx.dim_g()) {
    throw Error("bracket: dimension mismatch");
  }
  return AlgebraElement{ctx.ad_matrix(x) * y.coeffs};
}

GroupElement exp_alg(const LieContext& ctx, const AlgebraElement& x) {
  // X anti-hermitian: write X = i H with H hermitian and diagonalize H.
  Eigen::MatrixXcd xm = ctx.reconstruct(x);
  Eigen::MatrixXcd h = cplx(0.0, -1.0) * xm;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::VectorXcd phases(ctx.mat_dim());
  for (int k = 0; k < ctx.mat_dim(); ++k) {
    phases[k] = std::exp(cplx(0.0, es.eigenvalues()[k]));
  }
  Eigen::MatrixXcd out =
      es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  return GroupElement{out};
}

AlgebraElement log_group(const LieContext& ctx, const GroupElement& a, double branch_tol) {
  // Unitary matrices are normal, so the Schur form is diagonal and the Schur
  // basis is a unitary eigenbasis.
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(a.m);
  Eigen::MatrixXcd q = schur.matrixU();
  Eigen::MatrixXcd t = schur.matrixT();
  Eigen::VectorXd angles(ctx.mat_dim());
  for (int k = 0; k < ctx.mat_dim(); ++k) {
    cplx ev = t(k, k);
    double theta = std::atan2(ev.imag(), ev.real());
    if (std::abs(std::abs(theta) - M_PI) <= branch_tol) {
      throw BranchAmbiguity("log_group: eigenvalue within tolerance of angle pi");
    }
    angles[k] = theta;
  }
  Eigen::MatrixXcd logm = q * (cplx(0.0, 1.0) * angles.cast<cplx>()).asDiagonal() * q.adjoint();
  AlgebraElement out = ctx.project(logm);
  // Guard against inputs outside the group: the projection must reproduce logm.
  if ((ctx.reconstruct(out) - logm).norm() > 1e-8 * std::max(1.0, logm.norm())) {
    throw Error("log_group: logarithm does not lie in the Lie algebra");
  }
  return out;
}

Eigen::MatrixXd adjoint_action(const LieContext& ctx, const GroupElement& a) {
  const int n = ctx.dim_g();
  Eigen::MatrixXd pair(n, n);
  for (int b = 0; b < n; ++b) {
    Eigen::MatrixXcd adv = a.m * ctx.basis()[b] * a.m.adjoint();
    for (int k = 0; k < n; ++k) pair(k, b) = alg_inner_matrices(ctx.basis()[k], adv);
  }
  return ctx.gram_inv() * pair;
}

std::vector<AlgebraElement> centralizer_algebra(const LieContext& ctx,
                                                const std::vector<GroupElement>& elems,
                                                double rank_rel_tol) {
  const int n = ctx.dim_g();
  MetricSpace g_space(ctx.gram());
  Eigen::MatrixXd stacked(static_cast<int>(elems.size()) * n, n);
  for (int e = 0; e < static_cast<int>(elems.size()); ++e) {
    // whitened coordinates so the null basis comes out gram-orthonormal
    Eigen::MatrixXd block = adjoint_action(ctx, elems[e]) - Eigen::MatrixXd::Identity(n, n);
    stacked.middleRows(e * n, n) = g_space.whiten_op(g_space, block);
  }
  Eigen::MatrixXd kernel_w = elems.empty()
                                 ? Eigen::MatrixXd::Identity(n, n)
                                 : null_basis(stacked, rank_rel_tol);
  std::vector<AlgebraElement> out;
  out.reserve(kernel_w.cols());
  for (int c = 0; c < kernel_w.cols(); ++c) {
    out.push_back(AlgebraElement{g_space.unwhiten(kernel_w.col(c))});
  }
  return out;
}

bool is_central(const LieContext& ctx, const GroupElement& a, double tol) {
  const int n = ctx.dim_g();
  return (adjoint_action(ctx, a) - Eigen::MatrixXd::Identity(n, n)).norm() <= tol &&
         ctx.unitarity_residual(a) <= tol;
}

}  // namespace ymlab
