#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "ymlab/hodge.hpp"

namespace ymlab {

// Momentum values in coordinates against the gram-orthonormal z_A basis.
struct MomentumValue {
  Eigen::VectorXd coords;
  double norm() const { return coords.norm(); }
};

struct InverseResult {
  Eigen::VectorXd eta;
  bool inside_certificate = true;
  int iterations = 0;
  double fixed_point_residual = 0.0;
};

struct ConeResult {
  bool in_cone = false;
  double residual = 0.0;
};

struct NonsingularResult {
  bool nonsingular = false;
  double max_infinitesimal_action = 0.0;
  double max_group_action_deviation = 0.0;
  bool theta_zero_sampled = false;
  double max_theta_sampled = 0.0;
};

struct SampleRow {
  Eigen::VectorXd xi_coords;          // harmonic coordinates of the draw
  bool kept = false;
  double cone_residual = 0.0;
  int orbit_label = -1;               // clusters over kept samples
  bool polish_converged = false;
  double polish_defect = 0.0;
  double chart_image_distance = 0.0;  // ||alpha1(F(eta*)) - xi|| in g1
  double chart_image_theta = 0.0;     // momentum norm at the polished chart image
  double pullback_norm = 0.0;         // ||eta*|| of the polished point
  bool contradiction = false;
  std::vector<GroupElement> polished; // exact tuple for kept rows
};

struct SampleReport {
  std::vector<SampleRow> rows;
  int kept_count = 0;
  int contradiction_count = 0;
  int orbit_count = 0;
  double max_kept_polish_defect = 0.0;
  double max_kept_chart_theta = 0.0;
  double min_intercluster_orbit_distance = 0.0;  // chart coords; 0 when < 2 orbits
  double min_intercluster_rep_distance = 0.0;    // polished tuples; informational
  double sample_scale = 0.0;
};

// The assembled local model at one central representation: quadratic
// curvature map, transverse slice residuals, Kuranishi map and its certified
// inverse, momentum maps, cone membership, stabilizer action and the
// sample-level reduced-space apparatus.
struct ChartOptions {
  double rank_rel_tol = 1e-8;
  double slice_tol = 1e-8;
  double cone_tol = 1e-8;
  double inverse_tol = 1e-13;
  int inverse_max_iter = 200;
  double polish_target = 1e-10;
  double polish_accept = 1e-8;
  int polish_max_iter = 50;
  double sample_scale = 1e-3;
  double cluster_radius = 1e-4;
  double cluster_separation = 10.0;
};

class KuranishiChart {
 public:
  static std::shared_ptr<const KuranishiChart> build(TwistedComplexPtr complex,
                                                     HodgePackagePtr package,
                                                     StabilizerData stab,
                                                     ChartOptions opt = ChartOptions());

  const CentralRep& rep() const { return complex_->rep(); }
  const TwistedComplex& complex() const { return *complex_; }
  const KaehlerHodgePackage& package() const { return *package_; }
  const StabilizerData& stab() const { return stab_; }
  const ChartOptions& options() const { return opt_; }

  const Eigen::VectorXd& k_xi() const { return k_xi_; }
  double ball_radius() const { return ball_radius_; }
  double norm_h() const { return norm_h_; }
  int dim_h1() const { return package_->dim_h1(); }
  int dim_za() const { return static_cast<int>(stab_.algebra.size()); }

  // Stabilizer actions restricted to harmonic coordinates, one per sample.
  const std::vector<Eigen::MatrixXd>& action_h1() const { return act_h1_; }
  const std::vector<Eigen::MatrixXd>& action_h2() const { return act_h2_; }
  // Infinitesimal z_A actions on harmonic coordinates, one per basis vector.
  const std::vector<Eigen::MatrixXd>& infinitesimal_action_h1() const { return inf_act_h1_; }

  double k_xi_harmonic_residual() const { return k_xi_harm_res_; }
  double k_xi_invariance_residual() const { return k_xi_inv_res_; }

  Eigen::VectorXd curvature_quad(const Eigen::VectorXd& eta) const;

  // Residual of membership in the slice variety (coboundary part of the
  // curvature deviation).
  double slice_variety_residual(const Eigen::VectorXd& eta) const;
  // Residual of membership in the transverse gauge slice (d0adj part).
  double transverse_residual(const Eigen::VectorXd& eta) const;

  // Harmonic part of the quadratic curvature; throws NotInSliceVariety.
  Eigen::VectorXd j_sharp(const Eigen::VectorXd& eta) const;

  Eigen::VectorXd kuranishi_f(const Eigen::VectorXd& eta) const;

  // Fixed-point inverse eta <- xi - 1/2 h2[eta,eta]; throws NoConvergence.
  InverseResult kuranishi_inverse(const Eigen::VectorXd& xi_harmonic) const;

  MomentumValue theta(const Eigen::VectorXd& xi) const;

  // (Phi value, theta-hat value); throws NotInChart on residual violations.
  std::pair<Eigen::VectorXd, MomentumValue> phi_chart(const Eigen::VectorXd& eta) const;

  ConeResult cone_test(const Eigen::VectorXd& xi) const;

  NonsingularResult nonsingular_test(RngStream& rng, int theta_samples = 16) const;

  // Exact relator curvature log(relator(images exp(eta)) c^-1) + x_xi.
  AlgebraElement relator_curvature(const Eigen::VectorXd& eta) const;

  // Distance between stabilizer orbits of two harmonic points (coordinates
  // against harm1): best sampled element, refined over the identity
  // component of Z_A by Gauss-Newton.
  double orbit_distance(const Eigen::VectorXd& a_coords,
                        const Eigen::VectorXd& b_coords) const;

  // Witness search for a harmonic direction with nonzero momentum.
  std::pair<Eigen::VectorXd, double> max_theta_witness(RngStream& rng, int draws = 64) const;

  SampleReport reduced_sample(int count, std::uint64_t seed) const;

 private:
  KuranishiChart() = default;

  Eigen::VectorXd project_to_cone(Eigen::VectorXd xi, RngStream& rng) const;

  TwistedComplexPtr complex_;
  HodgePackagePtr package_;
  StabilizerData stab_;
  ChartOptions opt_;
  Eigen::VectorXd k_xi_;
  double norm_h_ = 0.0;
  double ball_radius_ = 0.0;
  double k_xi_harm_res_ = 0.0;
  double k_xi_inv_res_ = 0.0;
  std::vector<Eigen::MatrixXd> act_h1_, act_h2_, inf_act_h1_;
};

using KuranishiChartPtr = std::shared_ptr<const KuranishiChart>;

}  // namespace ymlab
