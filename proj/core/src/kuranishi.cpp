#include "ymlab/kuranishi.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SVD>

#include "ymlab/errors.hpp"

namespace ymlab {

namespace {

// Spectral-norm bound for the bilinear map (u,v) -> h2 cup_bracket(u,v) in
// g1-whitened coordinates, via the matrix unfolding of its coefficient
// tensor.
double quad_norm_bound(const TwistedComplex& cx, const KaehlerHodgePackage& pkg) {
  const int dim1 = cx.dim_c1();
  const int n = cx.n();
  const Eigen::MatrixXd lt = pkg.space_c1().chol_lt();
  const Eigen::MatrixXd lt_inv = pkg.space_c1().chol_lt_inv();
  Eigen::MatrixXd a = lt * pkg.h2();  // C^2 coords -> whitened C^1
  Eigen::MatrixXd unfolding(dim1, dim1 * dim1);
  for (int m = 0; m < dim1; ++m) {
    Eigen::MatrixXd km = Eigen::MatrixXd::Zero(dim1, dim1);
    for (int k = 0; k < n; ++k) {
      if (a(m, k) != 0.0) {
        km += a(m, k) * (lt_inv.transpose() * cx.bracket_tensor()[k] * lt_inv);
      }
    }
    unfolding.row(m) = Eigen::Map<Eigen::VectorXd>(km.data(), dim1 * dim1).transpose();
  }
  return spectral_norm(unfolding);
}

}  // namespace

std::shared_ptr<const KuranishiChart> KuranishiChart::build(TwistedComplexPtr complex,
                                                            HodgePackagePtr package,
                                                            StabilizerData stab,
                                                            ChartOptions opt) {
  auto chart = std::shared_ptr<KuranishiChart>(new KuranishiChart());
  chart->complex_ = std::move(complex);
  chart->package_ = std::move(package);
  chart->stab_ = std::move(stab);
  chart->opt_ = opt;

  const TwistedComplex& cx = *chart->complex_;
  const KaehlerHodgePackage& pkg = *chart->package_;

  chart->k_xi_ = cx.rep().x_xi.coeffs;
  chart->k_xi_harm_res_ = (pkg.lap2() * chart->k_xi_).norm();
  double inv_res = 0.0;
  for (const auto& z : chart->stab_.samples) {
    inv_res = std::max(inv_res, (cx.action_c2(z) * chart->k_xi_ - chart->k_xi_).norm());
  }
  chart->k_xi_inv_res_ = inv_res;
  double scale = std::max(1.0, chart->k_xi_.norm());
  if (chart->k_xi_harm_res_ > 1e-10 * scale || chart->k_xi_inv_res_ > 1e-10 * scale) {
    throw Error("KuranishiChart: curvature class is not an invariant harmonic vector");
  }

  if (static_cast<int>(chart->stab_.algebra.size()) != pkg.dim_h2()) {
    throw Error("KuranishiChart: dim z_A does not match dim H^2");
  }

  chart->norm_h_ = quad_norm_bound(cx, pkg);
  chart->ball_radius_ = 0.25 / std::max(1.0, chart->norm_h_);

  // stabilizer actions restricted to harmonic coordinates
  const Eigen::MatrixXd& h1 = pkg.harm1();
  const Eigen::MatrixXd& h2b = pkg.harm2();
  Eigen::MatrixXd ex1 = h1.transpose() * pkg.space_c1().gram();  // coords extractor
  Eigen::MatrixXd ex2 = h2b.transpose() * pkg.space_c2().gram();
  for (const auto& z : chart->stab_.samples) {
    chart->act_h1_.push_back(ex1 * cx.action_c1(z) * h1);
    chart->act_h2_.push_back(ex2 * cx.action_c2(z) * h2b);
  }
  for (const auto& phi : chart->stab_.algebra) {
    Eigen::MatrixXd ad = cx.ctx().ad_matrix(phi);
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(cx.dim_c1(), cx.dim_c1());
    for (int s = 0; s < 2 * cx.genus(); ++s) {
      t.block(s * cx.n(), s * cx.n(), cx.n(), cx.n()) = ad;
    }
    chart->inf_act_h1_.push_back(ex1 * t * h1);
  }
  return chart;
}

Eigen::VectorXd KuranishiChart::curvature_quad(const Eigen::VectorXd& eta) const {
  return k_xi_ + complex_->d1() * eta + 0.5 * complex_->cup_bracket(eta, eta);
}

double KuranishiChart::slice_variety_residual(const Eigen::VectorXd& eta) const {
  return package_->space_c2().norm(package_->p2() * (curvature_quad(eta) - k_xi_));
}

double KuranishiChart::transverse_residual(const Eigen::VectorXd& eta) const {
  return package_->space_c0().norm(package_->d0adj() * eta);
}

Eigen::VectorXd KuranishiChart::j_sharp(const Eigen::VectorXd& eta) const {
  if (slice_variety_residual(eta) > opt_.slice_tol) {
    throw NotInSliceVariety("j_sharp: coboundary part of the curvature exceeds tolerance");
  }
  return package_->alpha2() * curvature_quad(eta);
}

Eigen::VectorXd KuranishiChart::kuranishi_f(const Eigen::VectorXd& eta) const {
  return eta + 0.5 * (package_->h2() * complex_->cup_bracket(eta, eta));
}

InverseResult KuranishiChart::kuranishi_inverse(const Eigen::VectorXd& xi_harmonic) const {
  InverseResult out;
  const auto& s1 = package_->space_c1();
  double xi_norm = s1.norm(xi_harmonic);
  out.inside_certificate = xi_norm <= ball_radius_ * (1.0 + 1e-12);
  Eigen::VectorXd eta = xi_harmonic;
  double tol = opt_.inverse_tol * std::max(1.0, xi_norm);
  for (int it = 0; it < opt_.inverse_max_iter; ++it) {
    Eigen::VectorXd next =
        xi_harmonic - 0.5 * (package_->h2() * complex_->cup_bracket(eta, eta));
    double step = s1.norm(next - eta);
    eta = next;
    out.iterations = it + 1;
    if (step <= tol) {
      out.eta = eta;
      out.fixed_point_residual = s1.norm(kuranishi_f(eta) - xi_harmonic);
      return out;
    }
    if (s1.norm(eta) > 1e3 * std::max(1.0, xi_norm)) break;  // clearly diverging
  }
  throw NoConvergence("kuranishi_inverse: fixed-point iteration did not contract");
}

MomentumValue KuranishiChart::theta(const Eigen::VectorXd& xi) const {
  Eigen::VectorXd value = 0.5 * (package_->alpha2() * complex_->cup_bracket(xi, xi));
  MomentumValue out;
  out.coords.resize(dim_za());
  for (int k = 0; k < dim_za(); ++k) {
    out.coords[k] = complex_->pair02(stab_.algebra[k].coeffs, value);
  }
  return out;
}

std::pair<Eigen::VectorXd, MomentumValue> KuranishiChart::phi_chart(
    const Eigen::VectorXd& eta) const {
  if (transverse_residual(eta) > opt_.slice_tol) {
    throw NotInChart("phi_chart: eta violates the transverse gauge residual");
  }
  if (slice_variety_residual(eta) > opt_.slice_tol) {
    throw NotInChart("phi_chart: eta violates the slice-variety residual");
  }
  Eigen::VectorXd f = kuranishi_f(eta);
  if (package_->space_c1().norm(f) > ball_radius_ * (1.0 + 1e-9)) {
    throw NotInChart("phi_chart: image leaves the certified ball");
  }
  Eigen::VectorXd phi_value = package_->alpha1() * f;
  Eigen::VectorXd dev = package_->alpha2() * curvature_quad(eta) - k_xi_;
  MomentumValue vt;
  vt.coords.resize(dim_za());
  for (int k = 0; k < dim_za(); ++k) {
    vt.coords[k] = complex_->pair02(stab_.algebra[k].coeffs, dev);
  }
  return {phi_value, vt};
}

ConeResult KuranishiChart::cone_test(const Eigen::VectorXd& xi) const {
  ConeResult out;
  out.residual = theta(xi).norm();
  double xn = package_->space_c1().norm(xi);
  out.in_cone = out.residual <= opt_.cone_tol * (1.0 + xn * xn);
  return out;
}

NonsingularResult KuranishiChart::nonsingular_test(RngStream& rng, int theta_samples) const {
  NonsingularResult out;
  for (const auto& m : inf_act_h1_) {
    out.max_infinitesimal_action = std::max(out.max_infinitesimal_action, m.norm());
  }
  for (const auto& m : act_h1_) {
    Eigen::MatrixXd dev = m - Eigen::MatrixXd::Identity(m.rows(), m.cols());
    out.max_group_action_deviation = std::max(out.max_group_action_deviation, dev.norm());
  }
  out.nonsingular =
      out.max_infinitesimal_action <= 1e-10 && out.max_group_action_deviation <= 1e-10;

  if (dim_za() > 0 && dim_h1() > 0) {
    double scale = std::min(ball_radius_, 1.0);
    for (int i = 0; i < theta_samples; ++i) {
      Eigen::VectorXd xi = package_->harm1_embed(rng.gaussian_vector(dim_h1()));
      double nn = package_->space_c1().norm(xi);
      if (nn > 0) xi *= scale / nn;
      out.max_theta_sampled = std::max(out.max_theta_sampled, theta(xi).norm());
    }
    out.theta_zero_sampled = out.max_theta_sampled <= 1e-13 * (1.0 + scale * scale);
  } else {
    out.theta_zero_sampled = true;
  }
  return out;
}

AlgebraElement KuranishiChart::relator_curvature(const Eigen::VectorXd& eta) const {
  const CentralRep& rep = complex_->rep();
  const LieContext& ctx = *rep.ctx;
  const int n = ctx.dim_g();
  std::vector<GroupElement> deformed = rep.images;
  for (int s = 0; s < 2 * rep.genus; ++s) {
    AlgebraElement block{eta.segment(s * n, n)};
    deformed[s].m = deformed[s].m * exp_alg(ctx, block).m;
  }
  GroupElement r = relator_eval(complex_->presentation(), deformed);
  GroupElement d{r.m * rep.c.m.adjoint()};
  AlgebraElement mu = log_group(ctx, d);
  mu.coeffs += rep.x_xi.coeffs;
  return mu;
}

std::pair<Eigen::VectorXd, double> KuranishiChart::max_theta_witness(RngStream& rng,
                                                                     int draws) const {
  Eigen::VectorXd best = Eigen::VectorXd::Zero(complex_->dim_c1());
  double best_norm = 0.0;
  if (dim_h1() == 0 || dim_za() == 0) return {best, best_norm};
  double scale = std::min(ball_radius_, 1.0);
  for (int i = 0; i < draws; ++i) {
    Eigen::VectorXd xi = package_->harm1_embed(rng.gaussian_vector(dim_h1()));
    double nn = package_->space_c1().norm(xi);
    if (nn == 0.0) continue;
    xi *= scale / nn;
    double tn = theta(xi).norm();
    if (tn > best_norm) {
      best_norm = tn;
      best = xi;
    }
  }
  return {best, best_norm};
}

double KuranishiChart::orbit_distance(const Eigen::VectorXd& a_coords,
                                      const Eigen::VectorXd& b_coords) const {
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_idx = 0;
  for (std::size_t i = 0; i < act_h1_.size(); ++i) {
    double d = (act_h1_[i] * a_coords - b_coords).norm();
    if (d < best) {
      best = d;
      best_idx = i;
    }
  }
  if (dim_za() == 0 || best <= 1e-14) return best;

  // refine over the identity component: z(phi) = exp(phi) z_best
  const LieContext& ctx = *complex_->rep().ctx;
  const Eigen::MatrixXd& h1 = package_->harm1();
  Eigen::MatrixXd ex1 = h1.transpose() * package_->space_c1().gram();
  Eigen::MatrixXcd z0 = stab_.samples[best_idx].m;
  const int k = dim_za();

  auto moved = [&](const Eigen::VectorXd& phi) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(ctx.dim_g());
    for (int j = 0; j < k; ++j) full += phi[j] * stab_.algebra[j].coeffs;
    GroupElement z{exp_alg(ctx, AlgebraElement{full}).m * z0};
    return Eigen::VectorXd(ex1 * (complex_->action_c1(z) * (h1 * a_coords)));
  };

  Eigen::VectorXd phi = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd res = moved(phi) - b_coords;
  double value = res.norm();
  const double fd = 1e-6;
  for (int iter = 0; iter < 12 && value > 1e-14; ++iter) {
    Eigen::MatrixXd jac(res.size(), k);
    for (int j = 0; j < k; ++j) {
      Eigen::VectorXd pp = phi, pm = phi;
      pp[j] += fd;
      pm[j] -= fd;
      jac.col(j) = (moved(pp) - moved(pm)) / (2.0 * fd);
    }
    Eigen::VectorXd step = -pinv(jac, 1e-10) * res;
    double scale = 1.0;
    bool improved = false;
    for (int halving = 0; halving < 6; ++halving) {
      Eigen::VectorXd trial = phi + scale * step;
      Eigen::VectorXd tres = moved(trial) - b_coords;
      if (tres.norm() < value) {
        phi = trial;
        res = tres;
        value = tres.norm();
        improved = true;
        break;
      }
      scale *= 0.5;
    }
    if (!improved) break;
  }
  return std::min(best, value);
}

Eigen::VectorXd KuranishiChart::project_to_cone(Eigen::VectorXd xi, RngStream& rng) const {
  (void)rng;
  if (dim_za() == 0) return xi;
  const int h = dim_h1();
  for (int it = 0; it < 40; ++it) {
    MomentumValue th = theta(xi);
    if (th.norm() <= 1e-14 * (1.0 + xi.squaredNorm())) break;
    // exact Jacobian of the quadratic momentum map
    Eigen::MatrixXd jac(dim_za(), h);
    for (int j = 0; j < h; ++j) {
      Eigen::VectorXd dir = package_->harm1().col(j);
      Eigen::VectorXd dv = package_->alpha2() * complex_->cup_bracket(xi, dir);
      for (int k = 0; k < dim_za(); ++k) {
        jac(k, j) = complex_->pair02(stab_.algebra[k].coeffs, dv);
      }
    }
    Eigen::VectorXd delta = -pinv(jac, 1e-10) * th.coords;
    xi += package_->harm1() * delta;
  }
  return xi;
}

SampleReport KuranishiChart::reduced_sample(int count, std::uint64_t seed) const {
  SampleReport report;
  report.sample_scale = std::min(ball_radius_, opt_.sample_scale);
  const int h = dim_h1();
  if (h == 0 || count <= 0) return report;

  const auto& s1 = package_->space_c1();
  const CentralRep& rep = complex_->rep();
  const LieContext& ctx = *rep.ctx;
  const int n = ctx.dim_g();
  const SurfacePresentation& pres = complex_->presentation();

  bool action_nontrivial = false;
  for (const auto& m : act_h1_) {
    if ((m - Eigen::MatrixXd::Identity(m.rows(), m.cols())).norm() > 1e-10) {
      action_nontrivial = true;
      break;
    }
  }

  // Draw schedule: even indices raw Gaussians, odd indices cone-projected;
  // on charts with nontrivial stabilizer action every fourth draw repeats
  // the previous cone draw moved by a sampled stabilizer element, so the
  // clustering sees genuine same-orbit pairs.
  std::vector<Eigen::VectorXd> draws;
  Eigen::VectorXd last_cone = Eigen::VectorXd::Zero(complex_->dim_c1());
  bool have_cone = false;
  for (int i = 0; i < count; ++i) {
    RngStream rng = RngStream::derive(seed, "reduced_sample:" + std::to_string(i));
    if (i % 4 == 3 && action_nontrivial && have_cone && !stab_.samples.empty()) {
      const auto& z = stab_.samples[rng.below(stab_.samples.size())];
      draws.push_back(complex_->action_c1(z) * last_cone);
      continue;
    }
    Eigen::VectorXd xi = package_->harm1_embed(rng.gaussian_vector(h));
    double nn = s1.norm(xi);
    if (nn > 0) xi *= rng.uniform(0.2, 1.0) * report.sample_scale / nn;
    if (i % 2 == 1) {
      xi = project_to_cone(xi, rng);
      double pn = s1.norm(xi);
      if (pn > report.sample_scale && pn > 0) xi *= report.sample_scale / pn;
      last_cone = xi;
      have_cone = true;
    }
    draws.push_back(xi);
  }

  for (const auto& xi : draws) {
    SampleRow row;
    ConeResult cone = cone_test(xi);
    row.kept = cone.in_cone;
    row.cone_residual = cone.residual;
    row.xi_coords = package_->harm1_coords(xi);

    // Newton polish on the exact relator equation, kept and rejected alike;
    // rejected samples must not produce a certified solution at xi.
    InverseResult inv = kuranishi_inverse(xi);
    std::vector<GroupElement> start = rep.images;
    for (int s = 0; s < 2 * rep.genus; ++s) {
      AlgebraElement block{inv.eta.segment(s * n, n)};
      start[s].m = start[s].m * exp_alg(ctx, block).m;
    }
    PolishOutcome polish = polish_to_central(ctx, pres, std::move(start), rep.c,
                                             opt_.polish_target, opt_.polish_max_iter);
    row.polish_defect = polish.defect;
    row.polish_converged = polish.defect <= opt_.polish_accept;

    if (row.polish_converged) {
      // pull the polished tuple back to chart coordinates
      Eigen::VectorXd eta_star(complex_->dim_c1());
      bool pullback_ok = true;
      for (int s = 0; s < 2 * rep.genus && pullback_ok; ++s) {
        GroupElement rel{rep.images[s].m.adjoint() * polish.images[s].m};
        try {
          eta_star.segment(s * n, n) = log_group(ctx, rel).coeffs;
        } catch (const BranchAmbiguity&) {
          pullback_ok = false;
        }
      }
      if (pullback_ok) {
        row.pullback_norm = s1.norm(eta_star);
        Eigen::VectorXd zeta = package_->alpha1() * kuranishi_f(eta_star);
        row.chart_image_distance = s1.norm(zeta - xi);
        row.chart_image_theta = theta(zeta).norm();
      } else {
        row.pullback_norm = std::numeric_limits<double>::infinity();
        row.chart_image_distance = std::numeric_limits<double>::infinity();
        row.chart_image_theta = std::numeric_limits<double>::infinity();
      }
    } else {
      row.chart_image_distance = std::numeric_limits<double>::infinity();
      row.chart_image_theta = std::numeric_limits<double>::infinity();
      row.pullback_norm = std::numeric_limits<double>::infinity();
    }

    if (row.kept) {
      row.polished = polish.images;
      report.max_kept_polish_defect = std::max(report.max_kept_polish_defect, polish.defect);
      report.max_kept_chart_theta = std::max(report.max_kept_chart_theta,
                                             row.chart_image_theta);
      row.contradiction = !row.polish_converged;
    } else {
      double xn = s1.norm(package_->harm1_embed(row.xi_coords));
      bool certifies = row.polish_converged &&
                       row.pullback_norm <= 2.0 * ball_radius_ &&
                       row.chart_image_distance <= opt_.cone_tol * (1.0 + xn * xn);
      row.contradiction = certifies;
    }
    if (row.contradiction) ++report.contradiction_count;
    if (row.kept) ++report.kept_count;
    report.rows.push_back(std::move(row));
  }

  // Greedy orbit clustering of kept samples. Thresholds are relative to the
  // sample scale; clusters closer than separation * radius are merged, since
  // the sampling cannot distinguish orbits inside that band.
  const double merge_radius =
      opt_.cluster_separation * opt_.cluster_radius * report.sample_scale;
  std::vector<int> cluster_rep_index;
  for (std::size_t ri = 0; ri < report.rows.size(); ++ri) {
    auto& row = report.rows[ri];
    if (!row.kept) continue;
    int label = -1;
    for (std::size_t cl = 0; cl < cluster_rep_index.size(); ++cl) {
      const auto& rep_row = report.rows[cluster_rep_index[cl]];
      if (orbit_distance(row.xi_coords, rep_row.xi_coords) <= merge_radius) {
        label = static_cast<int>(cl);
        break;
      }
    }
    if (label < 0) {
      label = static_cast<int>(cluster_rep_index.size());
      cluster_rep_index.push_back(static_cast<int>(ri));
    }
    row.orbit_label = label;
  }
  report.orbit_count = static_cast<int>(cluster_rep_index.size());

  if (report.orbit_count >= 2) {
    double min_orbit = std::numeric_limits<double>::infinity();
    double min_rep = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < cluster_rep_index.size(); ++a) {
      for (std::size_t b = a + 1; b < cluster_rep_index.size(); ++b) {
        const auto& ra = report.rows[cluster_rep_index[a]];
        const auto& rb = report.rows[cluster_rep_index[b]];
        min_orbit = std::min(min_orbit, orbit_distance(ra.xi_coords, rb.xi_coords));
        if (ra.polished.empty() || rb.polished.empty()) continue;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& z : stab_.samples) {
          double d = 0.0;
          for (std::size_t s = 0; s < ra.polished.size(); ++s) {
            d += (z.m * ra.polished[s].m * z.m.adjoint() - rb.polished[s].m).squaredNorm();
          }
          best = std::min(best, std::sqrt(d));
        }
        min_rep = std::min(min_rep, best);
      }
    }
    report.min_intercluster_orbit_distance = std::isfinite(min_orbit) ? min_orbit : 0.0;
    report.min_intercluster_rep_distance = std::isfinite(min_rep) ? min_rep : 0.0;
  }
  return report;
}

}  // namespace ymlab
