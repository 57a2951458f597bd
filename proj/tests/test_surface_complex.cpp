#include <doctest.h>

#include <Eigen/Dense>

#include "ymlab/complex.hpp"
#include "ymlab/errors.hpp"
#include "test_helpers.hpp"

using namespace ymlab;

namespace {

CentralRep trivial_rep(GroupId id, int genus) {
  auto ctx = LieContext::make(id);
  std::vector<GroupElement> images(
      2 * genus, GroupElement{Eigen::MatrixXcd::Identity(ctx->mat_dim(), ctx->mat_dim())});
  AlgebraElement x{Eigen::VectorXd::Zero(ctx->dim_g())};
  GroupElement c = ctx->identity();
  return make_central_rep(ctx, genus, std::move(images), c, x);
}

CentralRep pauli_rep() {
  auto ctx = LieContext::make(GroupId::su2);
  std::vector<GroupElement> images = {GroupElement{ctx->basis()[0]},
                                      GroupElement{ctx->basis()[1]}};
  AlgebraElement x{Eigen::Vector3d::Zero()};
  GroupElement c{-Eigen::MatrixXcd::Identity(2, 2)};
  return make_central_rep(ctx, 1, std::move(images), c, x);
}

}  // namespace

TEST_CASE("presentation shape") {
  SurfacePresentation pres(3);
  CHECK(pres.relator().size() == 12);
  std::vector<int> exponent_sum(6, 0);
  for (const auto& l : pres.relator()) exponent_sum[l.generator] += l.sign;
  for (int e : exponent_sum) CHECK(e == 0);
  CHECK_THROWS_AS(SurfacePresentation(0), Error);
}

TEST_CASE("relator_eval examples") {
  auto ctx = LieContext::make(GroupId::su2);
  SurfacePresentation pres(1);

  std::vector<GroupElement> id_pair(2, ctx->identity());
  CHECK((relator_eval(pres, id_pair).m - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-14);

  // (i s1)(i s2)(i s1)^-1 (i s2)^-1 = -I by direct multiplication
  std::vector<GroupElement> pauli = {GroupElement{ctx->basis()[0]},
                                     GroupElement{ctx->basis()[1]}};
  Eigen::MatrixXcd direct = ctx->basis()[0] * ctx->basis()[1] *
                            ctx->basis()[0].adjoint() * ctx->basis()[1].adjoint();
  CHECK((relator_eval(pres, pauli).m - direct).norm() < 1e-14);
  CHECK((relator_eval(pres, pauli).m + Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-13);

  AlgebraElement t1{Eigen::Vector3d(0, 0, 0.8)}, t2{Eigen::Vector3d(0, 0, -0.3)};
  std::vector<GroupElement> diag = {exp_alg(*ctx, t1), exp_alg(*ctx, t2)};
  CHECK((relator_eval(pres, diag).m - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-13);
}

TEST_CASE("central rep admission") {
  auto ctx = LieContext::make(GroupId::su2);
  RngStream rng(5);
  std::vector<GroupElement> bad = {ctx->random_group(rng), ctx->random_group(rng)};
  AlgebraElement x{Eigen::Vector3d::Zero()};
  CHECK_THROWS_AS(make_central_rep(ctx, 1, bad, ctx->identity(), x), NotCentral);

  // c must commute with everything
  CHECK_THROWS_AS(make_central_rep(ctx, 1, {ctx->identity(), ctx->identity()},
                                   GroupElement{ctx->basis()[0]}, x),
                  Error);
}

TEST_CASE("trivial rep complex: zero differentials, full betti") {
  for (auto id : {GroupId::u1, GroupId::su2, GroupId::u2}) {
    for (int genus : {1, 2, 3}) {
      auto cx = TwistedComplex::build(trivial_rep(id, genus));
      const int n = cx->n();
      CHECK(cx->d0().norm() == 0.0);
      CHECK(cx->d1().norm() == 0.0);
      auto betti = cx->betti();
      CHECK(betti[0] == n);
      CHECK(betti[1] == 2 * genus * n);
      CHECK(betti[2] == n);
    }
  }
}

TEST_CASE("fox blocks of the genus-1 relator by brute-force expansion") {
  // independent expansion of the word a b a^-1 b^-1: a positive letter
  // transports by the prefix through it, an inverse letter by the prefix
  // before it, so the a-block is Ad(a) - Ad(ab) and the b-block is
  // Ad(ab) - Ad(aba^-1)
  auto rep = pauli_rep();
  auto cx = TwistedComplex::build(rep);
  const auto& ctx = *rep.ctx;
  Eigen::MatrixXcd A = rep.images[0].m, B = rep.images[1].m;
  auto ad = [&](const Eigen::MatrixXcd& g) { return adjoint_action(ctx, GroupElement{g}); };
  Eigen::MatrixXd na = ad(A) - ad(A * B);
  Eigen::MatrixXd nb = ad(A * B) - ad(A * B * A.adjoint());
  CHECK((cx->d1().middleCols(0, 3) - na).norm() < 1e-12);
  CHECK((cx->d1().middleCols(3, 3) - nb).norm() < 1e-12);

  // D0 blocks: Ad(g)^-1 - I
  Eigen::MatrixXd d0a = ad(A.adjoint()) - Eigen::MatrixXd::Identity(3, 3);
  CHECK((cx->d0().topRows(3) - d0a).norm() < 1e-12);
}

TEST_CASE("d1 d0 vanishes for central reps and detects defective tuples") {
  RngStream rng(31);
  auto ctx = LieContext::make(GroupId::su2);
  SurfacePresentation pres(1);

  auto bundle = testing::bundle_for("su2", 2, "random-polish");
  CHECK(bundle.complex->d1d0_norm() < 1e-10);

  // defective tuple: perturb one image away from a solution
  auto rep = testing::bundle_for("su2", 1, "diagonal").complex->rep();
  CentralRep broken = rep;
  AlgebraElement kick{Eigen::Vector3d(0.3, 0.0, 0.0)};
  broken.images[0].m = broken.images[0].m * exp_alg(*ctx, kick).m;
  broken.defect = relator_defect(pres, broken.images, broken.c);
  CHECK(broken.defect > 0.1);
  CHECK_THROWS_AS(TwistedComplex::build(broken), NotCentral);
  auto unchecked = TwistedComplex::build_unchecked(broken);
  CHECK(unchecked->d1d0_norm() > 1e-3);
}

TEST_CASE("betti of the generic diagonal su2 pair via an LU rank oracle") {
  auto bundle = testing::bundle_for("su2", 1, "diagonal");
  auto betti = bundle.complex->betti();
  CHECK(betti[0] == 1);
  CHECK(betti[1] == 2);
  CHECK(betti[2] == 1);
  CHECK(testing::lu_rank(bundle.complex->d0()) == 2);
  CHECK(testing::lu_rank(bundle.complex->d1()) == 2);
}

TEST_CASE("euler characteristic over random central reps") {
  // 100 reps per backend across strategies and genera
  int count = 0;
  for (auto group : {std::string("u1"), std::string("su2"), std::string("u2")}) {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      for (int genus : {1, 2}) {
        auto cfg = testing::config_for(
            group, genus, seed % 5 == 0 ? "diagonal" : "random-polish",
            group == "su2" ? std::vector<double>{} : std::vector<double>{0.0}, 1, seed);
        CentralRep rep = find_central_rep(cfg);
        auto cx = TwistedComplex::build(rep);
        auto betti = cx->betti();
        CHECK(betti[0] - betti[1] + betti[2] == (2 - 2 * genus) * cx->n());
        CHECK(betti[0] == betti[2]);
        ++count;
      }
    }
  }
  CHECK(count == 150);
}

TEST_CASE("cup_sigma at the trivial rep is the intersection form") {
  auto cx = TwistedComplex::build(trivial_rep(GroupId::su2, 2));
  const int n = 3;
  RngStream rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd u = rng.gaussian_vector(cx->dim_c1());
    Eigen::VectorXd v = rng.gaussian_vector(cx->dim_c1());
    double expected = 0.0;
    for (int i = 0; i < 2; ++i) {
      Eigen::VectorXd xi = u.segment(2 * i * n, n), yi = u.segment((2 * i + 1) * n, n);
      Eigen::VectorXd xpi = v.segment(2 * i * n, n), ypi = v.segment((2 * i + 1) * n, n);
      expected += xi.dot(cx->ctx().gram() * ypi) - yi.dot(cx->ctx().gram() * xpi);
    }
    CHECK(std::abs(cx->cup_sigma(u, v) - expected) < 1e-12);
    CHECK(std::abs(cx->cup_sigma(u, u)) < 1e-12);
  }
}

TEST_CASE("cup pairings against the matrix oracle on twisted reps") {
  for (const char* strategy : {"diagonal", "random-polish"}) {
    auto bundle = testing::bundle_for("su2", 2, strategy);
    const auto& cx = *bundle.complex;
    testing::MatrixCupOracle oracle(cx.presentation(), cx.rep());
    RngStream rng(41);
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::VectorXd u = rng.gaussian_vector(cx.dim_c1());
      Eigen::VectorXd v = rng.gaussian_vector(cx.dim_c1());
      CHECK(std::abs(cx.cup_sigma(u, v) - oracle.sigma(u, v)) < 1e-11);
      CHECK((cx.cup_bracket(u, v) - oracle.bracket_cup(u, v)).norm() < 1e-11);
      // graded symmetry at chain level
      CHECK((cx.cup_bracket(u, v) - cx.cup_bracket(v, u)).norm() < 1e-12);
    }
  }
}

TEST_CASE("stokes identity with the pinned sign") {
  for (const char* group : {"u1", "su2", "u2"}) {
    auto bundle = testing::bundle_for(
        group, 2, "random-polish",
        std::string(group) == "su2" ? std::vector<double>{} : std::vector<double>{0.0});
    const auto& cx = *bundle.complex;
    RngStream rng(43);
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::VectorXd phi = rng.gaussian_vector(cx.n());
      Eigen::VectorXd psi = rng.gaussian_vector(cx.dim_c1());
      CHECK(std::abs(cx.pair02(phi, cx.d1() * psi) - cx.cup_sigma(cx.d0() * phi, psi)) <
            1e-11);
    }
  }
}

TEST_CASE("cup_bracket trivial-rep diagonal value and abelian collapse") {
  auto cx = TwistedComplex::build(trivial_rep(GroupId::su2, 2));
  auto ctx = cx->rep().ctx;
  // u = (e1, e2, 0, 0) blocks: [u,u] = 2 [e1,e2] = -4 e3
  Eigen::VectorXd u = Eigen::VectorXd::Zero(12);
  u[0] = 1.0;  // e1 in x1
  u[4] = 1.0;  // e2 in y1
  Eigen::VectorXd expected(3);
  expected << 0.0, 0.0, -4.0;
  CHECK((cx->cup_bracket(u, u) - expected).norm() < 1e-12);

  auto u1cx = TwistedComplex::build(trivial_rep(GroupId::u1, 2));
  RngStream rng(47);
  Eigen::VectorXd a = rng.gaussian_vector(4), b = rng.gaussian_vector(4);
  CHECK(u1cx->cup_bracket(a, b).norm() == 0.0);
}

TEST_CASE("pair02 on the orthonormal basis") {
  auto bundle = testing::bundle_for("su2", 1, "diagonal");
  const auto& cx = *bundle.complex;
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) {
      double val = cx.pair02(Eigen::Vector3d::Unit(j), Eigen::Vector3d::Unit(k));
      CHECK(std::abs(val - (j == k ? 1.0 : 0.0)) < 1e-14);
    }
  }
  CHECK(cx.pair02(Eigen::Vector3d::Zero(), Eigen::Vector3d::Random()) == 0.0);
}

TEST_CASE("stabilizer_group dimensions and commutation") {
  RngStream rng(53);

  auto trivial = trivial_rep(GroupId::su2, 1);
  auto s1 = stabilizer_group(trivial, rng);
  CHECK(s1.algebra.size() == 3);

  auto pauli = pauli_rep();
  auto s2 = stabilizer_group(pauli, rng);
  CHECK(s2.algebra.empty());
  // samples are exactly the centre { I, -I }
  REQUIRE(s2.samples.size() == 2);
  for (const auto& z : s2.samples) {
    for (const auto& g : pauli.images) {
      CHECK((z.m * g.m - g.m * z.m).norm() < 1e-12);
    }
  }

  auto diag = testing::bundle_for("su2", 1, "diagonal").complex->rep();
  auto s3 = stabilizer_group(diag, rng);
  CHECK(s3.algebra.size() == 1);
  for (const auto& z : s3.samples) {
    for (const auto& g : diag.images) {
      CHECK((z.m * g.m - g.m * z.m).norm() < 1e-10);
    }
  }
}

TEST_CASE("ker d0 equals the joint centralizer algebra") {
  for (const char* strategy : {"trivial", "diagonal", "random-polish"}) {
    auto bundle = testing::bundle_for("su2", 2, strategy);
    const auto& cx = *bundle.complex;
    auto cz = centralizer_algebra(cx.ctx(), cx.rep().images);
    CHECK(testing::lu_rank(cx.d0()) == 3 - static_cast<int>(cz.size()));
    for (const auto& v : cz) {
      CHECK((cx.d0() * v.coeffs).norm() < 1e-10);
    }
  }
}

TEST_CASE("equivariance of differentials and pairings under the stabilizer") {
  auto bundle = testing::bundle_for("su2", 1, "diagonal");
  const auto& cx = *bundle.complex;
  RngStream rng(59);
  auto stab = stabilizer_group(cx.rep(), rng, 16);
  for (const auto& z : stab.samples) {
    Eigen::MatrixXd a0 = cx.action_c0(z), a1 = cx.action_c1(z), a2 = cx.action_c2(z);
    CHECK((a1 * cx.d0() - cx.d0() * a0).norm() < 1e-10);
    CHECK((a2 * cx.d1() - cx.d1() * a1).norm() < 1e-10);
    CHECK((a1.transpose() * cx.sigma_matrix() * a1 - cx.sigma_matrix()).norm() < 1e-10);
  }
}

TEST_CASE("polish_to_central reaches the target from a rough start") {
  auto ctx = LieContext::make(GroupId::su2);
  SurfacePresentation pres(2);
  RngStream rng(61);
  std::vector<GroupElement> start;
  for (int s = 0; s < 4; ++s) start.push_back(ctx->random_group(rng, 0.35));
  auto outcome = polish_to_central(*ctx, pres, start, ctx->identity());
  CHECK(outcome.converged);
  CHECK(outcome.defect <= 1e-10);
}
