#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ymlab/rng.hpp"

namespace ymlab {

enum class GroupId { u1, su2, u2 };

std::string group_id_name(GroupId id);
GroupId group_id_from_name(const std::string& name);

struct GroupElement {
  Eigen::MatrixXcd m;
};

struct AlgebraElement {
  Eigen::VectorXd coeffs;
};

// A compact matrix group backend: Lie algebra basis of anti-hermitian
// matrices, Gram matrix of the orthogonal structure <x,y> = -1/2 tr(xy),
// structure constants, and the centre.
//
// Values are immutable after construction; every operation is pure.
class LieContext {
 public:
  static std::shared_ptr<const LieContext> make(GroupId id);

  GroupId id() const { return id_; }
  int dim_g() const { return dim_g_; }
  int mat_dim() const { return mat_dim_; }
  const std::vector<Eigen::MatrixXcd>& basis() const { return basis_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::MatrixXd& gram_inv() const { return gram_inv_; }

  // ad matrix of basis vector k (bracket action in coefficients).
  const std::vector<Eigen::MatrixXd>& ad_basis() const { return ad_basis_; }
  // structure_constants()[k](i,j) is the e_k coefficient of [e_i, e_j].
  const std::vector<Eigen::MatrixXd>& structure_constants() const { return structure_; }

  // Indices into basis() spanning the centre algebra z.
  const std::vector<int>& center_indices() const { return center_indices_; }
  int dim_center() const { return static_cast<int>(center_indices_.size()); }

  // Central group elements not reachable as exp of z (e.g. -I in SU(2)).
  const std::vector<Eigen::MatrixXcd>& discrete_center() const { return discrete_center_; }

  bool abelian() const { return abelian_; }
  bool requires_unit_det() const { return id_ == GroupId::su2; }

  Eigen::MatrixXcd reconstruct(const AlgebraElement& x) const;
  AlgebraElement project(const Eigen::MatrixXcd& anti_hermitian) const;

  GroupElement identity() const;

  // ad matrix of an arbitrary algebra element, acting on coefficients.
  Eigen::MatrixXd ad_matrix(const AlgebraElement& x) const;

  double inner(const AlgebraElement& x, const AlgebraElement& y) const;
  double norm(const AlgebraElement& x) const;

  // Validation residuals (0 when the invariant holds).
  double unitarity_residual(const GroupElement& a) const;
  double det_residual(const GroupElement& a) const;

  AlgebraElement random_algebra(RngStream& rng, double scale = 1.0) const;
  GroupElement random_group(RngStream& rng, double scale = 1.0) const;

 private:
  LieContext() = default;

  GroupId id_;
  int dim_g_ = 0;
  int mat_dim_ = 0;
  bool abelian_ = false;
  std::vector<Eigen::MatrixXcd> basis_;
  Eigen::MatrixXd gram_, gram_inv_;
  std::vector<Eigen::MatrixXd> ad_basis_;
  std::vector<Eigen::MatrixXd> structure_;
  std::vector<int> center_indices_;
  std::vector<Eigen::MatrixXcd> discrete_center_;
};

using LieContextPtr = std::shared_ptr<const LieContext>;

AlgebraElement bracket(const LieContext& ctx, const AlgebraElement& x, const AlgebraElement& y);

GroupElement exp_alg(const LieContext& ctx, const AlgebraElement& x);

// Principal logarithm by unitary diagonalization; eigenvalue angles live in
// (-pi, pi]. Throws BranchAmbiguity within branch_tol of angle pi.
AlgebraElement log_group(const LieContext& ctx, const GroupElement& a,
                         double branch_tol = 1e-8);

// Matrix of Ad(a) in the chosen basis; orthogonal with respect to gram.
Eigen::MatrixXd adjoint_action(const LieContext& ctx, const GroupElement& a);

// Gram-orthonormal basis of { x : Ad(a) x = x for all a in elems }.
// The empty list yields an orthonormal basis of all of g.
std::vector<AlgebraElement> centralizer_algebra(const LieContext& ctx,
                                                const std::vector<GroupElement>& elems,
                                                double rank_rel_tol = 1e-8);

bool is_central(const LieContext& ctx, const GroupElement& a, double tol = 1e-12);

}  // namespace ymlab
