#include "ymlab/driver.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "ymlab/errors.hpp"
#include "ymlab/linalg.hpp"
#include "ymlab/rep_io.hpp"

namespace ymlab {

namespace {

AlgebraElement x_xi_from_target(const LieContext& ctx, const std::vector<double>& target) {
  if (static_cast<int>(target.size()) != ctx.dim_center()) {
    throw ConfigError("central_target length must equal the centre dimension (" +
                      std::to_string(ctx.dim_center()) + ")");
  }
  AlgebraElement x{Eigen::VectorXd::Zero(ctx.dim_g())};
  for (std::size_t i = 0; i < target.size(); ++i) {
    x.coeffs[ctx.center_indices()[i]] = target[i];
  }
  return x;
}

// Commutator words evaluate to unit-determinant elements, so a target with
// det != 1 is unreachable; abelian groups force the identity.
void check_feasible(const LieContext& ctx, const GroupElement& c) {
  const int d = ctx.mat_dim();
  if (ctx.abelian()) {
    if ((c.m - Eigen::MatrixXcd::Identity(d, d)).norm() > 1e-12) {
      throw Infeasible("abelian group: relator is identically I, central target must be I");
    }
    return;
  }
  if (std::abs(c.m.determinant() - std::complex<double>(1.0, 0.0)) > 1e-12) {
    throw Infeasible("central target has determinant != 1; relator values are commutators");
  }
}

std::vector<GroupElement> torus_tuple(const LieContext& ctx, int genus, RngStream& rng) {
  std::vector<GroupElement> images;
  for (int s = 0; s < 2 * genus; ++s) {
    AlgebraElement x{Eigen::VectorXd::Zero(ctx.dim_g())};
    switch (ctx.id()) {
      case GroupId::u1:
        x.coeffs[0] = rng.uniform(-2.0, 2.0);
        break;
      case GroupId::su2:
        x.coeffs[2] = rng.uniform(-2.0, 2.0);
        break;
      case GroupId::u2:
        x.coeffs[2] = rng.uniform(-2.0, 2.0);
        x.coeffs[3] = rng.uniform(-2.0, 2.0);
        break;
    }
    images.push_back(exp_alg(ctx, x));
  }
  return images;
}

// Base tuple with relator value c: identity tuple for c = I, the Pauli pair
// padded by identities for c = -I.
std::vector<GroupElement> base_tuple(const LieContext& ctx, int genus, const GroupElement& c) {
  const int d = ctx.mat_dim();
  std::vector<GroupElement> images(2 * genus, GroupElement{Eigen::MatrixXcd::Identity(d, d)});
  if ((c.m - Eigen::MatrixXcd::Identity(d, d)).norm() <= 1e-12) return images;
  if (d == 2 && (c.m + Eigen::MatrixXcd::Identity(d, d)).norm() <= 1e-12) {
    images[0] = exp_alg(ctx, AlgebraElement{
        (Eigen::VectorXd(ctx.dim_g()) << M_PI / 2.0,
         Eigen::VectorXd::Zero(ctx.dim_g() - 1)).finished()});
    // exp((pi/2) i sigma1) = i sigma1, exp((pi/2) i sigma2) = i sigma2
    AlgebraElement y{Eigen::VectorXd::Zero(ctx.dim_g())};
    y.coeffs[1] = M_PI / 2.0;
    images[1] = exp_alg(ctx, y);
    return images;
  }
  throw Infeasible("no base tuple available for the requested central target");
}

}  // namespace

CentralRep find_central_rep(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.strategy == RepStrategy::from_file) {
    if (cfg.rep_file.empty()) throw ConfigError("from-file strategy requires rep_file");
    return read_rep_file(cfg.rep_file, cfg.tolerance("defect_admit"));
  }

  auto ctx = LieContext::make(cfg.group);
  AlgebraElement x_xi = x_xi_from_target(*ctx, cfg.central_target);
  GroupElement c = central_element(*ctx, x_xi, cfg.central_twist);
  check_feasible(*ctx, c);
  const double defect_tol = cfg.tolerance("defect_admit");
  const int d = ctx->mat_dim();
  RngStream rng = RngStream::derive(cfg.seed, "find_central_rep");

  switch (cfg.strategy) {
    case RepStrategy::trivial: {
      if ((c.m - Eigen::MatrixXcd::Identity(d, d)).norm() > 1e-12) {
        throw Infeasible("trivial strategy: identity tuple has relator I != c");
      }
      std::vector<GroupElement> images(2 * cfg.genus,
                                       GroupElement{Eigen::MatrixXcd::Identity(d, d)});
      return make_central_rep(ctx, cfg.genus, std::move(images), c, x_xi, defect_tol);
    }
    case RepStrategy::diagonal: {
      if ((c.m - Eigen::MatrixXcd::Identity(d, d)).norm() > 1e-12) {
        throw Infeasible("diagonal strategy: commuting tuple has relator I != c");
      }
      return make_central_rep(ctx, cfg.genus, torus_tuple(*ctx, cfg.genus, rng), c, x_xi,
                              defect_tol);
    }
    case RepStrategy::pauli_genus1: {
      if (cfg.group != GroupId::su2 || cfg.genus != 1 || cfg.central_twist != -1) {
        throw Infeasible("pauli-genus1 requires su2, genus 1, central_twist = -1");
      }
      std::vector<GroupElement> images = {GroupElement{ctx->basis()[0]},
                                          GroupElement{ctx->basis()[1]}};
      return make_central_rep(ctx, cfg.genus, std::move(images), c, x_xi, defect_tol);
    }
    case RepStrategy::random_polish: {
      SurfacePresentation pres(cfg.genus);
      std::vector<GroupElement> start = base_tuple(*ctx, cfg.genus, c);
      for (auto& g : start) {
        g.m = g.m * exp_alg(*ctx, ctx->random_algebra(rng, 0.4)).m;
      }
      // polish well below the admission tolerance: the d1 d0 residual of the
      // complex degrades linearly in the defect
      PolishOutcome polish =
          polish_to_central(*ctx, pres, std::move(start), c, 1e-3 * defect_tol, 50);
      if (polish.defect > defect_tol) {
        throw NoConvergence("random-polish: Newton failed to reach the defect target");
      }
      return make_central_rep(ctx, cfg.genus, std::move(polish.images), c, x_xi, defect_tol);
    }
    default:
      throw ConfigError("unhandled strategy");
  }
}

ChartBundle build_chart_bundle(const ExperimentConfig& cfg) {
  return build_chart_bundle(cfg, find_central_rep(cfg));
}

ChartBundle build_chart_bundle(const ExperimentConfig& cfg, CentralRep rep) {
  ChartBundle bundle;
  bundle.complex = TwistedComplex::build(std::move(rep), cfg.tolerance("defect_admit"),
                                         cfg.tolerance("identity"));
  bundle.package = KaehlerHodgePackage::build(bundle.complex, cfg.tolerance("rank_rel"));
  RngStream stab_rng = RngStream::derive(cfg.seed, "stabilizer");
  StabilizerData stab =
      stabilizer_group(bundle.complex->rep(), stab_rng,
                       static_cast<int>(cfg.tolerance("stabilizer_samples")));
  ChartOptions opt;
  opt.rank_rel_tol = cfg.tolerance("rank_rel");
  opt.slice_tol = cfg.tolerance("slice");
  opt.cone_tol = cfg.tolerance("cone");
  opt.polish_target = cfg.tolerance("polish_target");
  opt.polish_accept = cfg.tolerance("polish_accept");
  opt.sample_scale = cfg.tolerance("sample_scale");
  opt.cluster_radius = cfg.tolerance("cluster_radius");
  opt.cluster_separation = cfg.tolerance("cluster_separation");
  bundle.chart = KuranishiChart::build(bundle.complex, bundle.package, std::move(stab), opt);
  return bundle;
}

namespace {

using VecList = std::vector<Eigen::VectorXd>;

Eigen::VectorXd za_random(const StabilizerData& stab, int n, RngStream& rng) {
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(n);
  for (const auto& b : stab.algebra) phi += rng.gaussian() * b.coeffs;
  double nn = phi.norm();
  if (nn > 0) phi /= nn;
  return phi;
}

Eigen::MatrixXd block_ad(const TwistedComplex& cx, const Eigen::VectorXd& phi) {
  Eigen::MatrixXd ad = cx.ctx().ad_matrix(AlgebraElement{phi});
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(cx.dim_c1(), cx.dim_c1());
  for (int s = 0; s < 2 * cx.genus(); ++s) {
    t.block(s * cx.n(), s * cx.n(), cx.n(), cx.n()) = ad;
  }
  return t;
}

}  // namespace

std::vector<InvariantResult> run_invariant_suite(const ChartBundle& bundle,
                                                 const ExperimentConfig& cfg) {
  const TwistedComplex& cx = *bundle.complex;
  const KaehlerHodgePackage& pkg = *bundle.package;
  const KuranishiChart& chart = *bundle.chart;
  const StabilizerData& stab = chart.stab();
  const int n = cx.n();
  const int dim1 = cx.dim_c1();
  const double tol_id = cfg.tolerance("identity");
  const double tol_chart = cfg.tolerance("chart");

  std::vector<InvariantResult> out;
  auto push = [&](const std::string& name, double residual, double tolerance) {
    out.push_back({name, residual, tolerance, residual <= tolerance});
  };

  RngStream rng = RngStream::derive(cfg.seed, "invariant_suite");

  // ---- surface-complex ----
  push("complex.d1_d0_zero", cx.d1d0_norm(), tol_id);

  auto betti = cx.betti(cfg.tolerance("rank_rel"));
  double euler = std::abs(double(betti[0] - betti[1] + betti[2]) - double((2 - 2 * cx.genus()) * n));
  push("complex.euler_characteristic", euler, 0.5);
  push("complex.poincare_duality", std::abs(double(betti[0] - betti[2])), 0.5);

  {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      Eigen::VectorXd phi = rng.gaussian_vector(n).normalized();
      Eigen::VectorXd psi = rng.gaussian_vector(dim1).normalized();
      worst = std::max(worst, std::abs(cx.pair02(phi, cx.d1() * psi) -
                                       cx.cup_sigma(cx.d0() * phi, psi)));
    }
    push("complex.stokes", worst, tol_id);
  }

  {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      Eigen::VectorXd u = rng.gaussian_vector(dim1).normalized();
      Eigen::VectorXd v = rng.gaussian_vector(dim1).normalized();
      Eigen::VectorXd a = rng.gaussian_vector(n).normalized();
      Eigen::VectorXd b = rng.gaussian_vector(n).normalized();
      Eigen::VectorXd bc = rng.gaussian_vector(n).normalized();
      // all-degree placements against the algebra pairing
      worst = std::max(worst,
                       std::abs(cx.pair02(cx.ctx().ad_matrix(AlgebraElement{a}) * b, bc) -
                                cx.pair02(a, cx.ctx().ad_matrix(AlgebraElement{b}) * bc)));
      if (!stab.algebra.empty()) {
        Eigen::VectorXd phi = za_random(stab, n, rng);
        worst = std::max(worst, std::abs(cx.pair02(phi, cx.cup_bracket(u, v)) -
                                         cx.cup_sigma(cx.cup01(phi, u), v)));
        worst = std::max(worst, std::abs(cx.pair02(phi, cx.cup_bracket(u, v)) -
                                         cx.cup_sigma(u, cx.cup10(v, phi))));
        worst = std::max(worst, std::abs(cx.cup_sigma(cx.cup10(u, phi), v) -
                                         cx.cup_sigma(u, cx.cup01(phi, v))));
      }
    }
    push("complex.ad_invariance", worst, tol_id);
  }

  {
    double worst = 0.0;
    for (const auto& z : stab.samples) {
      Eigen::MatrixXd a0 = cx.action_c0(z), a1 = cx.action_c1(z), a2 = cx.action_c2(z);
      worst = std::max(worst, (a1 * cx.d0() - cx.d0() * a0).norm());
      worst = std::max(worst, (a2 * cx.d1() - cx.d1() * a1).norm());
      worst = std::max(worst, (a1.transpose() * cx.sigma_matrix() * a1 -
                               cx.sigma_matrix()).norm());
      worst = std::max(worst,
                       (a0.transpose() * cx.ctx().gram() * a2 - cx.ctx().gram()).norm());
      for (int i = 0; i < 5; ++i) {
        Eigen::VectorXd u = rng.gaussian_vector(dim1).normalized();
        Eigen::VectorXd v = rng.gaussian_vector(dim1).normalized();
        worst = std::max(worst, (cx.cup_bracket(a1 * u, a1 * v) -
                                 a2 * cx.cup_bracket(u, v)).norm());
      }
    }
    push("complex.equivariance", worst, tol_id);
  }

  {
    MetricSpace g_space(cx.ctx().gram());
    Eigen::MatrixXd d0w = g_space.whiten_op(MetricSpace(cx.base_metric_c1()), cx.d0());
    Eigen::MatrixXd ker_w = null_basis(d0w, cfg.tolerance("rank_rel"));
    auto cz = centralizer_algebra(cx.ctx(), cx.rep().images, cfg.tolerance("rank_rel"));
    Eigen::MatrixXd cz_w(n, static_cast<int>(cz.size()));
    for (std::size_t i = 0; i < cz.size(); ++i) cz_w.col(i) = g_space.whiten(cz[i].coeffs);
    push("complex.ker_d0_centralizer", subspace_distance(ker_w, cz_w), tol_id);
  }

  // ---- hodge-kaehler ----
  push("hodge.j_squared",
       (pkg.jop() * pkg.jop() + Eigen::MatrixXd::Identity(dim1, dim1)).norm(), tol_id);
  push("hodge.j_symplectic",
       (pkg.jop().transpose() * cx.sigma_matrix() * pkg.jop() - cx.sigma_matrix()).norm(),
       tol_id);

  {
    Eigen::MatrixXd g1 = pkg.space_c1().gram();
    double res = (g1 - g1.transpose()).norm();
    res = std::max(res, (g1 - cx.sigma_matrix() * pkg.jop()).norm());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g1);
    double min_eig = es.eigenvalues().minCoeff();
    if (min_eig <= 0) res = std::max(res, 1.0 - min_eig);
    push("hodge.g1_positive", res, tol_id);
  }

  {
    double res = (pkg.d0adj() - pkg.star2() * cx.d1() * pkg.jop()).norm();
    res = std::max(res, (pkg.d1adj() - pkg.jop() * cx.d0() * pkg.star2()).norm());
    res = std::max(res, (pkg.d0adj() * pkg.h2()).norm());
    res = std::max(res, (pkg.jop() * pkg.h2() +
                         cx.d0() * pkg.star2() * pkg.green2() * pkg.p2()).norm());
    res = std::max(res,
                   (pkg.star0() * pkg.h1() - cx.d1() * pkg.jop() * pkg.green1() * pkg.p1()).norm());
    push("hodge.adjoint_star_relations", res, tol_id);
  }

  {
    double rel = cfg.tolerance("rank_rel");
    Eigen::MatrixXd h1w = pkg.space_c1().whiten_op(pkg.space_c0(), pkg.h1());
    Eigen::MatrixXd d0aw = pkg.space_c1().whiten_op(pkg.space_c0(), pkg.d0adj());
    Eigen::MatrixXd h2w = pkg.space_c2().whiten_op(pkg.space_c1(), pkg.h2());
    Eigen::MatrixXd d1aw = pkg.space_c2().whiten_op(pkg.space_c1(), pkg.d1adj());
    double res = subspace_distance(null_basis(h1w, rel), null_basis(d0aw, rel));
    res = std::max(res, subspace_distance(null_basis(h2w, rel), null_basis(d1aw, rel)));
    push("hodge.ker_h_eq_ker_dstar", res, tol_id);
  }

  push("hodge.p_eq_dh",
       std::max((pkg.p1() - cx.d0() * pkg.h1()).norm(), (pkg.p2() - cx.d1() * pkg.h2()).norm()),
       tol_id);

  {
    Eigen::MatrixXd i0 = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd i1 = Eigen::MatrixXd::Identity(dim1, dim1);
    double res = (pkg.h1() * cx.d0() - (i0 - pkg.alpha0())).norm();
    res = std::max(res, (cx.d0() * pkg.h1() + pkg.h2() * cx.d1() - (i1 - pkg.alpha1())).norm());
    res = std::max(res, (cx.d1() * pkg.h2() - (i0 - pkg.alpha2())).norm());
    push("hodge.homotopy_identity", res, tol_id);
  }

  {
    double worst = 0.0;
    for (const auto& z : stab.samples) {
      Eigen::MatrixXd a0 = cx.action_c0(z), a1 = cx.action_c1(z), a2 = cx.action_c2(z);
      worst = std::max(worst, (a1 * pkg.lap1() - pkg.lap1() * a1).norm());
      worst = std::max(worst, (a0 * pkg.lap0() - pkg.lap0() * a0).norm());
      worst = std::max(worst, (a2 * pkg.lap2() - pkg.lap2() * a2).norm());
      worst = std::max(worst, (a1 * pkg.p1() - pkg.p1() * a1).norm());
      worst = std::max(worst, (a2 * pkg.p2() - pkg.p2() * a2).norm());
      worst = std::max(worst, (a0 * pkg.h1() - pkg.h1() * a1).norm());
      worst = std::max(worst, (a1 * pkg.h2() - pkg.h2() * a2).norm());
      worst = std::max(worst, (a1 * pkg.alpha1() - pkg.alpha1() * a1).norm());
      worst = std::max(worst, (a1 * pkg.jop() - pkg.jop() * a1).norm());
      worst = std::max(worst, (a1 * pkg.green1() - pkg.green1() * a1).norm());
      worst = std::max(worst, (a2 * pkg.green2() - pkg.green2() * a2).norm());
    }
    push("hodge.equivariance", worst, tol_id);
  }

  {
    double worst = 0.0;
    for (const auto& phi : stab.algebra) {
      Eigen::MatrixXd t = block_ad(cx, phi.coeffs);
      worst = std::max(worst, (t * pkg.jop() - pkg.jop() * t).norm());
    }
    push("hodge.infinitesimal_action_commutes_j", worst, tol_id);
  }

  {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      Eigen::VectorXd u = rng.gaussian_vector(dim1).normalized();
      Eigen::VectorXd v = rng.gaussian_vector(dim1).normalized();
      worst = std::max(worst, (pkg.alpha2() * cx.cup_bracket(u, v) -
                               pkg.alpha2() * cx.cup_bracket(pkg.jop() * u, pkg.jop() * v))
                                  .norm());
    }
    push("hodge.bracket_class_j_invariance", worst, cfg.tolerance("cocycle"));
  }

  {
    double res = ((Eigen::MatrixXd::Identity(dim1, dim1) - pkg.alpha1()) * pkg.jop() *
                  pkg.alpha1()).norm();
    if (pkg.dim_h1() > 0) {
      Eigen::MatrixXd ex = pkg.harm1().transpose() * pkg.space_c1().gram();
      Eigen::MatrixXd jh = ex * pkg.jop() * pkg.harm1();
      Eigen::MatrixXd sh = pkg.harm1().transpose() * cx.sigma_matrix() * pkg.harm1();
      res = std::max(res, (sh + jh).norm());  // sigma = -g1(., J.) on harmonics
      for (const auto& mz : chart.action_h1()) {
        res = std::max(res, (mz.transpose() * mz -
                             Eigen::MatrixXd::Identity(mz.rows(), mz.cols())).norm());
        res = std::max(res, (mz.transpose() * sh * mz - sh).norm());
      }
    }
    push("hodge.hermitian_harmonic_package", res, tol_id);
  }

  {
    double res = (pkg.lap1() * pkg.green1() - pkg.p1()).norm();
    res = std::max(res, (pkg.green1() * pkg.lap1() * pkg.p1() - pkg.p1()).norm());
    res = std::max(res, (pkg.lap2() * pkg.green2() - pkg.p2()).norm());
    res = std::max(res, (pkg.green2() * pkg.lap2() * pkg.p2() - pkg.p2()).norm());
    push("hodge.green_invertibility", res, tol_id);
  }

  {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      Eigen::VectorXd v = rng.gaussian_vector(dim1).normalized();
      auto split = pkg.hodge_split(v, 1);
      double res = (split.exact + split.harmonic + split.coexact - v).norm();
      res = std::max(res, std::abs(pkg.space_c1().inner(split.exact, split.harmonic)));
      res = std::max(res, std::abs(pkg.space_c1().inner(split.exact, split.coexact)));
      res = std::max(res, std::abs(pkg.space_c1().inner(split.harmonic, split.coexact)));
      worst = std::max(worst, res);
    }
    push("hodge.split_recompose", worst, tol_id);
  }

  {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      Eigen::VectorXd phi = rng.gaussian_vector(n).normalized();
      Eigen::VectorXd hv = pkg.dim_h1() > 0
                               ? pkg.harm1_embed(rng.gaussian_vector(pkg.dim_h1())).eval()
                               : Eigen::VectorXd::Zero(dim1).eval();
      Eigen::VectorXd cocycle = hv + cx.d0() * phi;
      worst = std::max(worst, (pkg.kappa(cocycle, 1) - pkg.alpha1() * hv).norm());
      worst = std::max(worst, (pkg.kappa(cx.d0() * phi, 1)).norm());
    }
    push("hodge.kappa_class_invariance", worst, tol_id);
  }

  // ---- kuranishi ----
  {
    double worst = 0.0;
    for (const auto& z : stab.samples) {
      Eigen::MatrixXd a1 = cx.action_c1(z);
      for (int i = 0; i < 5; ++i) {
        Eigen::VectorXd eta = rng.gaussian_vector(dim1);
        worst = std::max(worst,
                         (a1 * chart.kuranishi_f(eta) - chart.kuranishi_f(a1 * eta)).norm());
      }
    }
    push("kuranishi.f_equivariance", worst, tol_id);
  }

  {
    double worst_d = 0.0, worst_ds = 0.0;
    for (int i = 0; i < 100; ++i) {
      Eigen::VectorXd eta = 2.0 * rng.gaussian_vector(dim1).normalized() * rng.uniform();
      Eigen::VectorXd f = chart.kuranishi_f(eta);
      worst_d = std::max(worst_d,
                         (cx.d1() * f - pkg.p2() * chart.curvature_quad(eta)).norm());
      worst_ds = std::max(worst_ds, (pkg.d0adj() * f - pkg.d0adj() * eta).norm());
    }
    push("kuranishi.slice_identity_d", worst_d, tol_id);
    push("kuranishi.slice_identity_dstar", worst_ds, tol_id);
  }

  // chart points for the certified-ball identities
  VecList chart_xis, chart_etas;
  if (chart.dim_h1() > 0) {
    for (int i = 0; i < 100; ++i) {
      Eigen::VectorXd xi = pkg.harm1_embed(rng.gaussian_vector(chart.dim_h1()));
      double nn = pkg.space_c1().norm(xi);
      if (nn > 0) xi *= rng.uniform(0.05, 1.0) * chart.ball_radius() / nn;
      chart_xis.push_back(xi);
      chart_etas.push_back(chart.kuranishi_inverse(xi).eta);
    }
  }

  {
    double worst = 0.0;
    for (std::size_t i = 0; i < chart_xis.size(); ++i) {
      const auto& xi = chart_xis[i];
      const auto& eta = chart_etas[i];
      double res = pkg.space_c1().norm(chart.kuranishi_f(eta) - xi);
      res = std::max(res, chart.transverse_residual(eta));
      res = std::max(res, chart.slice_variety_residual(eta));
      worst = std::max(worst, res);
    }
    push("kuranishi.inverse_roundtrip", worst, tol_chart);
  }

  {
    double worst = 0.0;
    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(dim1, dim1) - pkg.p1();  // ker d0adj
    for (std::size_t i = 0; i < chart_etas.size(); ++i) {
      const auto& eta = chart_etas[i];
      Eigen::VectorXd psi = q * rng.gaussian_vector(dim1).normalized();
      Eigen::VectorXd tht = q * rng.gaussian_vector(dim1).normalized();
      Eigen::VectorXd psi2 = psi + pkg.h2() * cx.cup_bracket(eta, psi);
      Eigen::VectorXd tht2 = tht + pkg.h2() * cx.cup_bracket(eta, tht);
      worst = std::max(worst,
                       std::abs(cx.cup_sigma(psi, tht) - cx.cup_sigma(psi2, tht2)));
    }
    push("kuranishi.pullback_symplectomorphism", worst, tol_chart);
  }

  {
    double worst = 0.0, worst_cob = 0.0;
    for (std::size_t i = 0; i < chart_etas.size(); ++i) {
      const auto& eta = chart_etas[i];
      auto [phi_value, theta_hat] = chart.phi_chart(eta);
      MomentumValue theta_of_phi = chart.theta(phi_value);
      worst = std::max(worst, (theta_hat.coords - theta_of_phi.coords).norm());
      Eigen::VectorXd q2 = pkg.h2() * cx.cup_bracket(eta, eta);
      worst_cob = std::max(worst_cob, (pkg.alpha2() * cx.cup_bracket(eta, q2)).norm());
      worst_cob = std::max(worst_cob, (pkg.alpha2() * cx.cup_bracket(q2, q2)).norm());
    }
    push("kuranishi.momentum_intertwining", worst, tol_chart);
    push("kuranishi.coboundary_residuals", worst_cob, tol_chart);
  }

  {
    double worst = 0.0;
    double step = cfg.tolerance("fd_step");
    if (chart.dim_h1() > 0 && chart.dim_za() > 0) {
      for (int k = 0; k < chart.dim_za(); ++k) {
        Eigen::VectorXd phi = stab.algebra[k].coeffs;
        Eigen::MatrixXd t = block_ad(cx, phi);
        for (int i = 0; i < 10; ++i) {
          Eigen::VectorXd xi = pkg.harm1_embed(rng.gaussian_vector(chart.dim_h1()));
          Eigen::VectorXd v = pkg.harm1_embed(rng.gaussian_vector(chart.dim_h1()));
          double fp = chart.theta(xi + step * v).coords[k];
          double fm = chart.theta(xi - step * v).coords[k];
          double fd = (fp - fm) / (2.0 * step);
          double exact = cx.cup_sigma(t * xi, v);
          double denom = std::max(1.0, std::abs(exact));
          worst = std::max(worst, std::abs(fd - exact) / denom);
        }
      }
    }
    push("kuranishi.hamiltonian_fd", worst, cfg.tolerance("fd_rel"));
  }

  {
    double worst = 0.0;
    if (chart.dim_h1() > 0) {
      for (const auto& z : stab.samples) {
        Eigen::MatrixXd a1 = cx.action_c1(z), a2 = cx.action_c2(z);
        for (int i = 0; i < 5; ++i) {
          Eigen::VectorXd xi = pkg.harm1_embed(rng.gaussian_vector(chart.dim_h1()));
          Eigen::VectorXd va = 0.5 * (pkg.alpha2() * cx.cup_bracket(a1 * xi, a1 * xi));
          Eigen::VectorXd vb = a2 * (0.5 * (pkg.alpha2() * cx.cup_bracket(xi, xi)));
          worst = std::max(worst, (va - vb).norm());
        }
      }
    }
    push("kuranishi.theta_equivariance", worst, tol_chart);
  }

  {
    // finite-difference first derivative of the relator curvature against d1
    double step = cfg.tolerance("fd_step");
    Eigen::MatrixXd jac(n, dim1);
    for (int j = 0; j < dim1; ++j) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(dim1);
      e[j] = step;
      Eigen::VectorXd mp = chart.relator_curvature(e).coeffs;
      Eigen::VectorXd mm = chart.relator_curvature(-e).coeffs;
      jac.col(j) = (mp - mm) / (2.0 * step);
    }
    double denom = std::max(1.0, cx.d1().norm());
    push("kuranishi.relator_first_derivative", (jac - cx.d1()).norm() / denom,
         cfg.tolerance("fd_first_order"));
  }

  {
    // second-order agreement: log-log slope of the cubic remainder
    double slope_floor = cfg.tolerance("taylor_slope");
    double min_slope = 4.0;
    Eigen::MatrixXd ker_proj =
        Eigen::MatrixXd::Identity(dim1, dim1) -
        pinv(cx.d1(), cfg.tolerance("rank_rel")) * cx.d1();
    for (int i = 0; i < 20; ++i) {
      Eigen::VectorXd eta = ker_proj * rng.gaussian_vector(dim1);
      double nn = eta.norm();
      if (nn < 1e-12) continue;
      eta /= nn;
      Eigen::VectorXd quad = 0.5 * (pkg.alpha2() * cx.cup_bracket(eta, eta));
      std::vector<double> logt, logr;
      for (int k = 0; k < 7; ++k) {
        double t = std::pow(10.0, -1.0 - 2.0 * k / 6.0);  // 1e-1 .. 1e-3
        Eigen::VectorXd dev =
            chart.relator_curvature(t * eta).coeffs - cx.rep().x_xi.coeffs;
        double r = (pkg.alpha2() * dev - t * t * quad).norm();
        if (r > 1e-14) {
          logt.push_back(std::log(t));
          logr.push_back(std::log(r));
        }
      }
      if (logt.size() < 3) continue;  // remainder at machine zero: exact match
      double mt = 0, mr = 0;
      for (std::size_t k = 0; k < logt.size(); ++k) {
        mt += logt[k];
        mr += logr[k];
      }
      mt /= logt.size();
      mr /= logr.size();
      double num = 0, den = 0;
      for (std::size_t k = 0; k < logt.size(); ++k) {
        num += (logt[k] - mt) * (logr[k] - mr);
        den += (logt[k] - mt) * (logt[k] - mt);
      }
      min_slope = std::min(min_slope, num / den);
    }
    push("kuranishi.taylor_second_order", std::max(0.0, slope_floor - min_slope), 1e-9);
  }

  push("kuranishi.ball_certificate",
       std::max(0.0, 2.0 * chart.ball_radius() * chart.norm_h() - 0.5), 1e-12);
  push("kuranishi.curvature_class_invariant",
       std::max(chart.k_xi_harmonic_residual(), chart.k_xi_invariance_residual()), tol_id);

  {
    RngStream ns_rng = RngStream::derive(cfg.seed, "nonsingular");
    NonsingularResult ns = chart.nonsingular_test(ns_rng);
    double res = ns.nonsingular ? ns.max_theta_sampled : 0.0;
    push("kuranishi.nonsingular_theta_zero", res, 1e-12);
  }

  return out;
}

namespace {

void fill_common_report(Report& report, const ExperimentConfig& cfg, const ChartBundle& b) {
  const CentralRep& rep = b.complex->rep();
  auto& doc = report.doc();
  doc["seed"] = cfg.seed;
  doc["config"] = cfg.to_string();

  nlohmann::ordered_json rj;
  rj["group"] = group_id_name(rep.ctx->id());
  rj["genus"] = rep.genus;
  rj["strategy"] = strategy_name(cfg.strategy);
  rj["defect"] = rep.defect;
  rj["stabilizer_dim"] = static_cast<int>(b.chart->stab().algebra.size());
  auto betti = b.complex->betti(cfg.tolerance("rank_rel"));
  rj["betti"] = {betti[0], betti[1], betti[2]};
  rj["central_twist"] = central_twist_of(rep);
  rj["x_xi"] = std::vector<double>(rep.x_xi.coeffs.data(),
                                   rep.x_xi.coeffs.data() + rep.x_xi.coeffs.size());
  doc["rep"] = rj;

  RngStream ns_rng = RngStream::derive(cfg.seed, "nonsingular");
  NonsingularResult ns = b.chart->nonsingular_test(ns_rng);
  nlohmann::ordered_json cj;
  cj["ball_radius"] = b.chart->ball_radius();
  cj["norm_h"] = b.chart->norm_h();
  cj["dim_h1"] = b.chart->dim_h1();
  cj["dim_za"] = b.chart->dim_za();
  cj["nonsingular"] = ns.nonsingular;
  cj["max_infinitesimal_action"] = ns.max_infinitesimal_action;
  cj["max_group_action_deviation"] = ns.max_group_action_deviation;
  cj["theta_zero_sampled"] = ns.theta_zero_sampled;
  cj["max_theta_sampled"] = ns.max_theta_sampled;
  if (!ns.nonsingular) {
    RngStream w_rng = RngStream::derive(cfg.seed, "witness");
    auto [witness, theta_norm] = b.chart->max_theta_witness(w_rng);
    cj["witness_theta_norm"] = theta_norm;
    Eigen::VectorXd coords = b.package->harm1_coords(witness);
    cj["witness_xi"] = std::vector<double>(coords.data(), coords.data() + coords.size());
  }
  doc["chart"] = cj;

  if (cfg.metric_jitter > 0.0) {
    // metric-perturbation experiment: rebuild the package against a jittered
    // block-diagonal base metric and record the chart summary
    RngStream j_rng = RngStream::derive(cfg.seed, "metric_jitter");
    Eigen::MatrixXd base = b.complex->base_metric_c1();
    const int n = b.complex->n();
    for (int s = 0; s < 2 * b.complex->genus(); ++s) {
      double factor = 1.0 + cfg.metric_jitter * j_rng.uniform(-0.5, 0.5);
      base.block(s * n, s * n, n, n) *= factor;
    }
    auto jittered = KaehlerHodgePackage::build_with_base(b.complex, base,
                                                         cfg.tolerance("rank_rel"));
    RngStream stab_rng = RngStream::derive(cfg.seed, "stabilizer");
    StabilizerData stab = stabilizer_group(
        b.complex->rep(), stab_rng, static_cast<int>(cfg.tolerance("stabilizer_samples")));
    auto jchart = KuranishiChart::build(b.complex, jittered, std::move(stab),
                                        b.chart->options());
    RngStream jns_rng = RngStream::derive(cfg.seed, "nonsingular");
    NonsingularResult jns = jchart->nonsingular_test(jns_rng);
    nlohmann::ordered_json mj;
    mj["jitter"] = cfg.metric_jitter;
    mj["dim_h1"] = jchart->dim_h1();
    mj["dim_za"] = jchart->dim_za();
    mj["nonsingular"] = jns.nonsingular;
    mj["ball_radius"] = jchart->ball_radius();
    doc["metric_jitter"] = mj;
  }

  if (cfg.dump_operators) {
    auto dump_matrix = [](const Eigen::MatrixXd& m) {
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (int r = 0; r < m.rows(); ++r) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
      }
      return rows;
    };
    nlohmann::ordered_json oj;
    oj["d0"] = dump_matrix(b.complex->d0());
    oj["d1"] = dump_matrix(b.complex->d1());
    oj["jop"] = dump_matrix(b.package->jop());
    oj["g1"] = dump_matrix(b.package->space_c1().gram());
    doc["operators"] = oj;
  }
}

RunResult finish_run(Report&& report, const ExperimentConfig& cfg, bool invariants_pass) {
  RunResult rr{std::move(report), invariants_pass ? 0 : 1};
  if (!cfg.out_path.empty()) rr.report.to_file(cfg.out_path);
  return rr;
}

RunResult error_run(const ExperimentConfig& cfg, const std::string& kind,
                    const std::string& message) {
  Report report;
  report.doc()["seed"] = cfg.seed;
  report.doc()["config"] = cfg.to_string();
  report.doc()["error"] = {{"kind", kind}, {"message", message}};
  RunResult rr{std::move(report), 2};
  if (!cfg.out_path.empty()) rr.report.to_file(cfg.out_path);
  return rr;
}

template <typename Fn>
RunResult guarded_run(const ExperimentConfig& cfg, Fn&& fn) {
  try {
    return fn();
  } catch (const NotCentral& e) {
    return error_run(cfg, "NotCentral", e.what());
  } catch (const DegenerateSigma& e) {
    return error_run(cfg, "DegenerateSigma", e.what());
  } catch (const Infeasible& e) {
    return error_run(cfg, "Infeasible", e.what());
  } catch (const NoConvergence& e) {
    return error_run(cfg, "NoConvergence", e.what());
  } catch (const ConfigError& e) {
    return error_run(cfg, "ConfigError", e.what());
  } catch (const SchemaError& e) {
    return error_run(cfg, "SchemaError", e.what());
  } catch (const IoError& e) {
    return error_run(cfg, "IoError", e.what());
  } catch (const Error& e) {
    return error_run(cfg, "Error", e.what());
  }
}

}  // namespace

RunResult run_verify(const ExperimentConfig& cfg) {
  return guarded_run(cfg, [&]() {
    cfg.validate();
    ChartBundle bundle = build_chart_bundle(cfg);
    auto invariants = run_invariant_suite(bundle, cfg);
    Report report;
    fill_common_report(report, cfg, bundle);
    report.set_invariants(invariants);
    nlohmann::ordered_json work;
    work["mode"] = "verify";
    work["invariant_count"] = static_cast<int>(invariants.size());
    report.doc()["work"] = work;
    bool pass = true;
    for (const auto& r : invariants) pass = pass && r.pass;
    return finish_run(std::move(report), cfg, pass);
  });
}

RunResult run_chart(const ExperimentConfig& cfg) {
  return guarded_run(cfg, [&]() {
    cfg.validate();
    if (cfg.sample_count <= 0) throw ConfigError("chart mode requires sample_count > 0");
    ChartBundle bundle = build_chart_bundle(cfg);
    auto invariants = run_invariant_suite(bundle, cfg);

    SampleReport samples = bundle.chart->reduced_sample(cfg.sample_count, cfg.seed);

    // sample-level local-model invariant
    double res = samples.max_kept_polish_defect;
    if (samples.kept_count > 0) res = std::max(res, samples.max_kept_chart_theta);
    if (samples.contradiction_count > 0) res = std::max(res, 1.0);
    if (samples.orbit_count >= 2) {
      double floor = cfg.tolerance("cluster_separation") * cfg.tolerance("cluster_radius") *
                     samples.sample_scale;
      res = std::max(res, std::max(0.0, floor - samples.min_intercluster_orbit_distance));
    }
    invariants.push_back({"kuranishi.cone_local_model", res, cfg.tolerance("polish_accept"),
                          res <= cfg.tolerance("polish_accept")});

    Report report;
    fill_common_report(report, cfg, bundle);
    report.set_invariants(invariants);

    nlohmann::ordered_json sj;
    sj["count"] = static_cast<int>(samples.rows.size());
    sj["kept"] = samples.kept_count;
    sj["orbits"] = samples.orbit_count;
    sj["contradictions"] = samples.contradiction_count;
    sj["sample_scale"] = samples.sample_scale;
    sj["max_kept_polish_defect"] = samples.max_kept_polish_defect;
    sj["max_kept_chart_theta"] = samples.max_kept_chart_theta;
    sj["min_intercluster_orbit_distance"] = samples.min_intercluster_orbit_distance;
    sj["min_intercluster_rep_distance"] = samples.min_intercluster_rep_distance;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : samples.rows) {
      nlohmann::ordered_json r;
      r["kept"] = row.kept;
      r["cone_residual"] = row.cone_residual;
      r["orbit"] = row.orbit_label;
      r["polish_defect"] = row.polish_defect;
      r["polish_converged"] = row.polish_converged;
      r["chart_distance"] =
          std::isfinite(row.chart_image_distance) ? row.chart_image_distance : -1.0;
      r["chart_theta"] = std::isfinite(row.chart_image_theta) ? row.chart_image_theta : -1.0;
      r["contradiction"] = row.contradiction;
      rows.push_back(r);
    }
    sj["rows"] = rows;
    report.doc()["samples"] = sj;

    nlohmann::ordered_json work;
    work["mode"] = "chart";
    work["invariant_count"] = static_cast<int>(invariants.size());
    work["samples"] = static_cast<int>(samples.rows.size());
    report.doc()["work"] = work;

    bool pass = true;
    for (const auto& r : invariants) pass = pass && r.pass;
    pass = pass && samples.contradiction_count == 0;
    return finish_run(std::move(report), cfg, pass);
  });
}

std::vector<RunResult> run_sweep(const ExperimentConfig& cfg) {
  std::vector<RunResult> out;
  for (int k = 0; k < cfg.sweep_count; ++k) {
    ExperimentConfig sub = cfg;
    sub.seed = cfg.seed + static_cast<std::uint64_t>(k);
    if (!cfg.out_path.empty()) {
      sub.out_path = cfg.out_path + ".s" + std::to_string(k);
    }
    out.push_back(run_chart(sub));
  }
  return out;
}

}  // namespace ymlab
