#pragma once

#include <Eigen/Core>

namespace ymlab {

// Inner-product space with Gram matrix G (symmetric positive definite).
// Whitening maps x to L^T x where G = L L^T, so metric adjoints become
// plain transposes in whitened coordinates.
class MetricSpace {
 public:
  MetricSpace() = default;
  explicit MetricSpace(Eigen::MatrixXd gram);

  int dim() const { return static_cast<int>(gram_.rows()); }
  const Eigen::MatrixXd& gram() const { return gram_; }

  Eigen::VectorXd whiten(const Eigen::VectorXd& x) const;
  Eigen::VectorXd unwhiten(const Eigen::VectorXd& xw) const;

  // Whitened matrix of an operator A : this -> codomain.
  Eigen::MatrixXd whiten_op(const MetricSpace& codomain, const Eigen::MatrixXd& a) const;
  // Inverse transform: operator from its whitened matrix.
  Eigen::MatrixXd unwhiten_op(const MetricSpace& codomain, const Eigen::MatrixXd& aw) const;

  double inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
  double norm(const Eigen::VectorXd& x) const;

  const Eigen::MatrixXd& chol_lt() const { return lt_; }        // L^T
  const Eigen::MatrixXd& chol_lt_inv() const { return lt_inv_; }

 private:
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd lt_;      // L^T with G = L L^T
  Eigen::MatrixXd lt_inv_;  // (L^T)^{-1}
};

// Rank with relative singular-value threshold tau * sigma_max.
int svd_rank(const Eigen::MatrixXd& a, double rel_tol);

// Orthonormal basis (columns) of the range of A, relative threshold.
Eigen::MatrixXd range_basis(const Eigen::MatrixXd& a, double rel_tol);

// Orthonormal basis (columns) of the null space of A, relative threshold.
Eigen::MatrixXd null_basis(const Eigen::MatrixXd& a, double rel_tol);

// Moore-Penrose pseudoinverse with relative threshold.
Eigen::MatrixXd pinv(const Eigen::MatrixXd& a, double rel_tol);

// Orthogonal projector onto the span of the (orthonormal) columns of Q.
Eigen::MatrixXd projector(const Eigen::MatrixXd& q);

// Distance between subspaces spanned by orthonormal columns: ||P_a - P_b||_2.
double subspace_distance(const Eigen::MatrixXd& qa, const Eigen::MatrixXd& qb);

double spectral_norm(const Eigen::MatrixXd& a);

}  // namespace ymlab
