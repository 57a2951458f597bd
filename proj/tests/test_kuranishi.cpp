#include <doctest.h>

#include <limits>

#include <Eigen/Dense>

#include "ymlab/errors.hpp"
#include "ymlab/kuranishi.hpp"
#include "ymlab/linalg.hpp"
#include "test_helpers.hpp"

using namespace ymlab;

namespace {
// an exact coboundary direction, which violates the transverse gauge
Eigen::VectorXd coboundary_direction(const ChartBundle& bundle) {
  return bundle.complex->d0() * Eigen::VectorXd::Ones(bundle.complex->n());
}
}  // namespace

TEST_CASE("curvature_quad basics") {
  auto bundle = testing::bundle_for("su2", 2, "trivial");
  const auto& chart = *bundle.chart;
  const int dim1 = bundle.complex->dim_c1();

  CHECK((chart.curvature_quad(Eigen::VectorXd::Zero(dim1)) - chart.k_xi()).norm() == 0.0);

  // abelian: exactly affine
  auto u1 = testing::bundle_for("u1", 2, "diagonal", {0.0});
  RngStream rng(7);
  Eigen::VectorXd eta = rng.gaussian_vector(4);
  Eigen::VectorXd lin = u1.chart->k_xi() + u1.complex->d1() * eta;
  CHECK((u1.chart->curvature_quad(eta) - lin).norm() < 1e-14);

  // finite-difference jacobian at zero matches d1
  const auto& cx = *bundle.complex;
  double h = 1e-5;
  for (int j = 0; j < dim1; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(dim1);
    e[j] = h;
    Eigen::VectorXd col =
        (chart.curvature_quad(e) - chart.curvature_quad(-e)) / (2.0 * h);
    CHECK((col - cx.d1().col(j)).norm() < 1e-6 * std::max(1.0, cx.d1().col(j).norm()));
  }
}

TEST_CASE("j_sharp on the trivial su2 genus-2 chart") {
  auto bundle = testing::bundle_for("su2", 2, "trivial");
  const auto& chart = *bundle.chart;
  const auto& cx = *bundle.complex;

  CHECK((chart.j_sharp(Eigen::VectorXd::Zero(12)) - chart.k_xi()).norm() == 0.0);

  // eta = (e1, e2, 0, 0): deviation is kappa([e1,e2]) = -2 e3
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(12);
  eta[0] = 1.0;
  eta[4] = 1.0;
  Eigen::VectorXd dev = chart.j_sharp(eta) - chart.k_xi();
  Eigen::VectorXd expected = 0.5 * (bundle.package->alpha2() * cx.cup_bracket(eta, eta));
  CHECK((dev - expected).norm() < 1e-12);
  CHECK(dev.norm() > 1.0);

  // abelian chart: j_sharp is constant on harmonic directions
  auto u1 = testing::bundle_for("u1", 3, "diagonal", {0.0});
  RngStream rng(11);
  Eigen::VectorXd xi = u1.package->harm1_embed(rng.gaussian_vector(u1.package->dim_h1()));
  CHECK((u1.chart->j_sharp(xi) - u1.chart->k_xi()).norm() < 1e-12);
}

TEST_CASE("j_sharp rejects points off the slice variety") {
  auto bundle = testing::bundle_for("su2", 1, "diagonal");
  // a coexact direction pushes the curvature off the harmonic complement
  Eigen::VectorXd eta = bundle.package->d1adj() * Eigen::Vector3d(0.5, 0.2, -0.4);
  if (bundle.chart->slice_variety_residual(eta) > 1e-8) {
    CHECK_THROWS_AS(bundle.chart->j_sharp(eta), NotInSliceVariety);
  }
}

TEST_CASE("kuranishi map identities for arbitrary eta") {
  for (const char* strategy : {"diagonal", "random-polish"}) {
    auto bundle = testing::bundle_for("su2", 2, strategy);
    const auto& chart = *bundle.chart;
    const auto& cx = *bundle.complex;
    const auto& pkg = *bundle.package;
    RngStream rng(13);

    CHECK(chart.kuranishi_f(Eigen::VectorXd::Zero(cx.dim_c1())).norm() == 0.0);

    for (int trial = 0; trial < 100; ++trial) {
      Eigen::VectorXd eta = 2.0 * rng.gaussian_vector(cx.dim_c1()).normalized();
      Eigen::VectorXd f = chart.kuranishi_f(eta);
      CHECK((cx.d1() * f - pkg.p2() * chart.curvature_quad(eta)).norm() < 1e-10);
      CHECK((pkg.d0adj() * f - pkg.d0adj() * eta).norm() < 1e-10);
    }
  }

  // abelian: kuranishi map is the identity
  auto u1 = testing::bundle_for("u1", 2, "diagonal", {0.0});
  RngStream rng(17);
  Eigen::VectorXd eta = rng.gaussian_vector(4);
  CHECK((u1.chart->kuranishi_f(eta) - eta).norm() == 0.0);
}

TEST_CASE("kuranishi inverse round trip inside the certified ball") {
  auto bundle = testing::bundle_for("su2", 2, "random-polish");
  const auto& chart = *bundle.chart;
  const auto& pkg = *bundle.package;
  RngStream rng(19);

  CHECK(chart.kuranishi_inverse(Eigen::VectorXd::Zero(pkg.dim_c1())).eta.norm() == 0.0);

  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd xi = pkg.harm1_embed(rng.gaussian_vector(pkg.dim_h1()));
    double nn = pkg.space_c1().norm(xi);
    xi *= rng.uniform(0.05, 1.0) * chart.ball_radius() / nn;
    auto inv = chart.kuranishi_inverse(xi);
    CHECK(inv.inside_certificate);
    CHECK(pkg.space_c1().norm(chart.kuranishi_f(inv.eta) - xi) < 1e-9);
    CHECK(chart.transverse_residual(inv.eta) < 1e-9);
    CHECK(chart.slice_variety_residual(inv.eta) < 1e-9);
  }
}

TEST_CASE("kuranishi inverse outside the ball either diverges or is flagged") {
  auto bundle = testing::bundle_for("su2", 2, "random-polish");
  const auto& chart = *bundle.chart;
  const auto& pkg = *bundle.package;
  REQUIRE(chart.norm_h() > 0.0);
  RngStream rng(23);
  Eigen::VectorXd xi = pkg.harm1_embed(rng.gaussian_vector(pkg.dim_h1()));
  xi *= 10.0 * chart.ball_radius() / pkg.space_c1().norm(xi);
  try {
    auto inv = chart.kuranishi_inverse(xi);
    CHECK_FALSE(inv.inside_certificate);
  } catch (const NoConvergence&) {
    CHECK(true);
  }
}

TEST_CASE("theta momentum values") {
  auto bundle = testing::bundle_for("su2", 2, "trivial");
  const auto& chart = *bundle.chart;

  CHECK(chart.theta(Eigen::VectorXd::Zero(12)).coords.norm() == 0.0);

  // frozen value: xi = (e1, e2, 0, 0) gives kappa([e1,e2]) = -2 e3
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(12);
  xi[0] = 1.0;
  xi[4] = 1.0;
  MomentumValue theta = chart.theta(xi);
  CHECK(theta.coords.size() == 3);
  CHECK(std::abs(theta.norm() - 2.0) < 1e-12);

  // abelian: identically zero
  auto u1 = testing::bundle_for("u1", 2, "diagonal", {0.0});
  RngStream rng(29);
  for (int i = 0; i < 10; ++i) {
    Eigen::VectorXd v = u1.package->harm1_embed(rng.gaussian_vector(4));
    CHECK(u1.chart->theta(v).norm() == 0.0);
  }
}

TEST_CASE("cone test dichotomy") {
  auto bundle = testing::bundle_for("su2", 2, "trivial");
  const auto& chart = *bundle.chart;

  CHECK(chart.cone_test(Eigen::VectorXd::Zero(12)).in_cone);

  // a single abelian direction lies in the cone
  Eigen::VectorXd ab = Eigen::VectorXd::Zero(12);
  ab[2] = 0.3;
  ab[5] = -0.7;  // e3 blocks only
  CHECK(chart.cone_test(ab).in_cone);

  Eigen::VectorXd off = Eigen::VectorXd::Zero(12);
  off[0] = 0.5;
  off[4] = 0.5;
  CHECK_FALSE(chart.cone_test(off).in_cone);
}

TEST_CASE("phi_chart and the momentum intertwining") {
  auto bundle = testing::bundle_for("su2", 2, "random-polish");
  const auto& chart = *bundle.chart;
  const auto& pkg = *bundle.package;
  RngStream rng(31);

  auto [phi0, theta0] = chart.phi_chart(Eigen::VectorXd::Zero(pkg.dim_c1()));
  CHECK(phi0.norm() == 0.0);
  CHECK(theta0.coords.norm() == 0.0);

  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd xi = pkg.harm1_embed(rng.gaussian_vector(pkg.dim_h1()));
    xi *= rng.uniform(0.05, 1.0) * chart.ball_radius() / pkg.space_c1().norm(xi);
    Eigen::VectorXd eta = chart.kuranishi_inverse(xi).eta;
    auto [phi_value, theta_hat] = chart.phi_chart(eta);
    CHECK((phi_value - xi).norm() < 1e-9);
    CHECK((theta_hat.coords - chart.theta(phi_value).coords).norm() < 1e-9);
  }

  // off-slice points are rejected
  Eigen::VectorXd bad = coboundary_direction(bundle);
  if (chart.transverse_residual(bad) > 1e-8) {
    CHECK_THROWS_AS(chart.phi_chart(bad), NotInChart);
  }
}

TEST_CASE("pullback symplectomorphism and coboundary lemmas on chart points") {
  auto bundle = testing::bundle_for("su2", 2, "trivial");
  const auto& chart = *bundle.chart;
  const auto& cx = *bundle.complex;
  const auto& pkg = *bundle.package;
  RngStream rng(37);
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(12, 12) - pkg.p1();

  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd xi = pkg.harm1_embed(rng.gaussian_vector(pkg.dim_h1()));
    xi *= rng.uniform(0.05, 1.0) * chart.ball_radius() / pkg.space_c1().norm(xi);
    Eigen::VectorXd eta = chart.kuranishi_inverse(xi).eta;

    Eigen::VectorXd psi = q * rng.gaussian_vector(12).normalized();
    Eigen::VectorXd tht = q * rng.gaussian_vector(12).normalized();
    Eigen::VectorXd psi2 = psi + pkg.h2() * cx.cup_bracket(eta, psi);
    Eigen::VectorXd tht2 = tht + pkg.h2() * cx.cup_bracket(eta, tht);
    CHECK(std::abs(cx.cup_sigma(psi, tht) - cx.cup_sigma(psi2, tht2)) < 1e-9);

    Eigen::VectorXd q2 = pkg.h2() * cx.cup_bracket(eta, eta);
    CHECK((pkg.alpha2() * cx.cup_bracket(eta, q2)).norm() < 1e-9);
    CHECK((pkg.alpha2() * cx.cup_bracket(q2, q2)).norm() < 1e-9);
  }
}

TEST_CASE("nonsingular dichotomy over the backends") {
  RngStream rng(41);

  auto u1 = testing::bundle_for("u1", 2, "diagonal", {0.0});
  auto r1 = u1.chart->nonsingular_test(rng);
  CHECK(r1.nonsingular);
  CHECK(r1.theta_zero_sampled);
  CHECK(r1.max_theta_sampled == 0.0);

  auto pauli = testing::bundle_for("su2", 1, "pauli-genus1", {}, -1);
  CHECK(pauli.chart->dim_h1() == 0);
  auto r2 = pauli.chart->nonsingular_test(rng);
  CHECK(r2.nonsingular);

  auto trivial = testing::bundle_for("su2", 2, "trivial");
  auto r3 = trivial.chart->nonsingular_test(rng);
  CHECK_FALSE(r3.nonsingular);
  auto [witness, theta_norm] = trivial.chart->max_theta_witness(rng);
  CHECK(theta_norm > 1e-3);
}

TEST_CASE("relator curvature: value, derivative, second order") {
  auto bundle = testing::bundle_for("su2", 2, "random-polish");
  const auto& chart = *bundle.chart;
  const auto& cx = *bundle.complex;
  const auto& pkg = *bundle.package;
  const int dim1 = cx.dim_c1();

  CHECK((chart.relator_curvature(Eigen::VectorXd::Zero(dim1)).coeffs -
         cx.rep().x_xi.coeffs).norm() < 1e-12);

  // first derivative against d1 by central differences
  double h = 1e-5;
  Eigen::MatrixXd jac(cx.n(), dim1);
  for (int j = 0; j < dim1; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(dim1);
    e[j] = h;
    jac.col(j) =
        (chart.relator_curvature(e).coeffs - chart.relator_curvature(-e).coeffs) / (2.0 * h);
  }
  CHECK((jac - cx.d1()).norm() < 1e-6 * std::max(1.0, cx.d1().norm()));

  // cubic remainder after subtracting the quadratic model, for cocycles
  RngStream rng(43);
  Eigen::MatrixXd ker_proj = Eigen::MatrixXd::Identity(dim1, dim1) -
                             pinv(cx.d1(), 1e-8) * cx.d1();
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd eta = ker_proj * rng.gaussian_vector(dim1);
    if (eta.norm() < 1e-10) continue;
    eta.normalize();
    Eigen::VectorXd quad = 0.5 * (pkg.alpha2() * cx.cup_bracket(eta, eta));
    std::vector<double> logt, logr;
    for (int k = 0; k < 7; ++k) {
      double t = std::pow(10.0, -1.0 - 2.0 * k / 6.0);
      Eigen::VectorXd dev = chart.relator_curvature(t * eta).coeffs - cx.rep().x_xi.coeffs;
      double r = (pkg.alpha2() * dev - t * t * quad).norm();
      if (r > 1e-14) {
        logt.push_back(std::log(t));
        logr.push_back(std::log(r));
      }
    }
    if (logt.size() < 3) continue;
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
    CHECK(num / den >= 2.7);
  }
}

TEST_CASE("theta transforms equivariantly and generates the action") {
  auto bundle = testing::bundle_for("su2", 2, "trivial");
  const auto& chart = *bundle.chart;
  const auto& cx = *bundle.complex;
  const auto& pkg = *bundle.package;
  RngStream rng(47);

  for (const auto& z : chart.stab().samples) {
    Eigen::MatrixXd a1 = cx.action_c1(z), a2 = cx.action_c2(z);
    for (int i = 0; i < 5; ++i) {
      Eigen::VectorXd xi = pkg.harm1_embed(rng.gaussian_vector(pkg.dim_h1()));
      Eigen::VectorXd va = 0.5 * (pkg.alpha2() * cx.cup_bracket(a1 * xi, a1 * xi));
      Eigen::VectorXd vb = a2 * (0.5 * (pkg.alpha2() * cx.cup_bracket(xi, xi)));
      CHECK((va - vb).norm() < 1e-9);
    }
  }

  // hamiltonian property: d<theta, phi>(v) = sigma([phi, .] xi, v)
  double step = 1e-5;
  for (int k = 0; k < chart.dim_za(); ++k) {
    Eigen::VectorXd phi = chart.stab().algebra[k].coeffs;
    Eigen::MatrixXd ad = cx.ctx().ad_matrix(AlgebraElement{phi});
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(12, 12);
    for (int s = 0; s < 4; ++s) t.block(3 * s, 3 * s, 3, 3) = ad;
    for (int i = 0; i < 5; ++i) {
      Eigen::VectorXd xi = pkg.harm1_embed(rng.gaussian_vector(pkg.dim_h1()));
      Eigen::VectorXd v = pkg.harm1_embed(rng.gaussian_vector(pkg.dim_h1()));
      double fd = (chart.theta(xi + step * v).coords[k] -
                   chart.theta(xi - step * v).coords[k]) / (2.0 * step);
      double exact = cx.cup_sigma(t * xi, v);
      CHECK(std::abs(fd - exact) <= 1e-5 * std::max(1.0, std::abs(exact)));
    }
  }
}

TEST_CASE("reduced sample on the abelian chart keeps everything") {
  auto bundle = testing::bundle_for("u1", 2, "diagonal", {0.0});
  auto report = bundle.chart->reduced_sample(40, 5);
  CHECK(report.rows.size() == 40);
  CHECK(report.kept_count == 40);
  CHECK(report.contradiction_count == 0);
  CHECK(report.orbit_count == 40);  // trivial action, labels all distinct
  CHECK(report.max_kept_polish_defect < 1e-12);
  CHECK(bundle.chart->dim_h1() == 4);
}

TEST_CASE("reduced sample on the singular trivial chart") {
  auto bundle = testing::bundle_for("su2", 2, "trivial");
  auto report = bundle.chart->reduced_sample(60, 0);
  CHECK(report.rows.size() == 60);
  CHECK(report.kept_count > 0);
  CHECK(report.kept_count < 60);
  CHECK(report.contradiction_count == 0);
  CHECK(report.max_kept_polish_defect <= 1e-8);
  for (const auto& row : report.rows) {
    if (row.kept) {
      CHECK(row.polish_converged);
      CHECK(row.polish_defect <= 1e-8);
      CHECK(row.chart_image_theta <= 1e-8);
      CHECK(row.orbit_label >= 0);
    }
  }
  // same-orbit duplicates force orbit_count < kept_count
  CHECK(report.orbit_count < report.kept_count);
  CHECK(report.min_intercluster_orbit_distance >
        10.0 * 1e-4 * report.sample_scale);
}

TEST_CASE("orbit labels are invariant under a stabilizer move of the inputs") {
  auto bundle = testing::bundle_for("su2", 2, "trivial");
  const auto& chart = *bundle.chart;
  auto report = chart.reduced_sample(40, 3);

  // relabeling oracle: move every kept sample by one sampled stabilizer
  // element and re-run the same greedy clustering
  const auto& mz = chart.action_h1()[chart.action_h1().size() / 2];
  double merge_radius = 10.0 * 1e-4 * report.sample_scale;
  std::vector<int> labels, reps;
  std::vector<Eigen::VectorXd> moved;
  for (const auto& row : report.rows) {
    if (!row.kept) continue;
    moved.push_back(mz * row.xi_coords);
  }
  for (const auto& x : moved) {
    int label = -1;
    for (std::size_t cl = 0; cl < reps.size(); ++cl) {
      if (chart.orbit_distance(x, moved[reps[cl]]) <= merge_radius) {
        label = static_cast<int>(cl);
        break;
      }
    }
    if (label < 0) {
      label = static_cast<int>(reps.size());
      reps.push_back(static_cast<int>(labels.size()));
    }
    labels.push_back(label);
  }
  std::vector<int> original;
  for (const auto& row : report.rows) {
    if (row.kept) original.push_back(row.orbit_label);
  }
  REQUIRE(labels.size() == original.size());
  // the partitions must agree (labels may be permuted)
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = 0; j < labels.size(); ++j) {
      CHECK((labels[i] == labels[j]) == (original[i] == original[j]));
    }
  }
}

TEST_CASE("ball certificate bound") {
  for (const char* strategy : {"trivial", "diagonal", "random-polish"}) {
    auto bundle = testing::bundle_for("su2", 2, strategy);
    CHECK(2.0 * bundle.chart->ball_radius() * bundle.chart->norm_h() <= 0.5 + 1e-12);
  }
}
