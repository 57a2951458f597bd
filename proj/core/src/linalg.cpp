#include "ymlab/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include "ymlab/errors.hpp"

namespace ymlab {

MetricSpace::MetricSpace(Eigen::MatrixXd gram) : gram_(std::move(gram)) {
  Eigen::LLT<Eigen::MatrixXd> llt(gram_);
  if (llt.info() != Eigen::Success) {
    throw Error("MetricSpace: Gram matrix is not positive definite");
  }
  lt_ = llt.matrixU();  // L^T (upper triangular)
  lt_inv_ = lt_.triangularView<Eigen::Upper>().solve(
      Eigen::MatrixXd::Identity(lt_.rows(), lt_.cols()));
}

Eigen::VectorXd MetricSpace::whiten(const Eigen::VectorXd& x) const { return lt_ * x; }

Eigen::VectorXd MetricSpace::unwhiten(const Eigen::VectorXd& xw) const { return lt_inv_ * xw; }

Eigen::MatrixXd MetricSpace::whiten_op(const MetricSpace& codomain,
                                       const Eigen::MatrixXd& a) const {
  return codomain.lt_ * a * lt_inv_;
}

Eigen::MatrixXd MetricSpace::unwhiten_op(const MetricSpace& codomain,
                                         const Eigen::MatrixXd& aw) const {
  return codomain.lt_inv_ * aw * lt_;
}

double MetricSpace::inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  return x.dot(gram_ * y);
}

double MetricSpace::norm(const Eigen::VectorXd& x) const {
  return std::sqrt(std::max(0.0, inner(x, x)));
}

namespace {
Eigen::JacobiSVD<Eigen::MatrixXd> full_svd(const Eigen::MatrixXd& a) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

int rank_from(const Eigen::JacobiSVD<Eigen::MatrixXd>& svd, double rel_tol) {
  if (svd.singularValues().size() == 0) return 0;
  // absolute floor so numerically-zero matrices report rank 0
  double cutoff = std::max(rel_tol * svd.singularValues()[0], 1e-12);
  int r = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()[i] > cutoff) ++r;
  }
  return r;
}
}  // namespace

int svd_rank(const Eigen::MatrixXd& a, double rel_tol) {
  if (a.size() == 0) return 0;
  return rank_from(full_svd(a), rel_tol);
}

Eigen::MatrixXd range_basis(const Eigen::MatrixXd& a, double rel_tol) {
  if (a.size() == 0) return Eigen::MatrixXd(a.rows(), 0);
  auto svd = full_svd(a);
  int r = rank_from(svd, rel_tol);
  return svd.matrixU().leftCols(r);
}

Eigen::MatrixXd null_basis(const Eigen::MatrixXd& a, double rel_tol) {
  if (a.size() == 0 || a.rows() == 0) {
    return Eigen::MatrixXd::Identity(a.cols(), a.cols());
  }
  auto svd = full_svd(a);
  int r = rank_from(svd, rel_tol);
  return svd.matrixV().rightCols(a.cols() - r);
}

Eigen::MatrixXd pinv(const Eigen::MatrixXd& a, double rel_tol) {
  if (a.size() == 0) return Eigen::MatrixXd(a.cols(), a.rows());
  auto svd = full_svd(a);
  int r = rank_from(svd, rel_tol);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.cols(), a.rows());
  for (int i = 0; i < r; ++i) {
    out += svd.matrixV().col(i) * svd.matrixU().col(i).transpose() / svd.singularValues()[i];
  }
  return out;
}

Eigen::MatrixXd projector(const Eigen::MatrixXd& q) {
  if (q.cols() == 0) return Eigen::MatrixXd::Zero(q.rows(), q.rows());
  return q * q.transpose();
}

double subspace_distance(const Eigen::MatrixXd& qa, const Eigen::MatrixXd& qb) {
  if (qa.rows() != qb.rows()) throw Error("subspace_distance: ambient dimension mismatch");
  return spectral_norm(projector(qa) - projector(qb));
}

double spectral_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
}

}  // namespace ymlab
