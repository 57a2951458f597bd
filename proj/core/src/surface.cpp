#include "ymlab/surface.hpp"

#include "ymlab/errors.hpp"
#include "ymlab/linalg.hpp"

namespace ymlab {

SurfacePresentation::SurfacePresentation(int genus) : genus_(genus) {
  if (genus < 1) throw Error("SurfacePresentation: genus must be >= 1");
  for (int i = 0; i < genus; ++i) {
    int a = 2 * i, b = 2 * i + 1;
    relator_.push_back({a, +1});
    relator_.push_back({b, +1});
    relator_.push_back({a, -1});
    relator_.push_back({b, -1});
  }
  // relator abelianization is zero by construction; length 4g
}

GroupElement relator_eval(const SurfacePresentation& pres,
                          const std::vector<GroupElement>& images) {
  if (static_cast<int>(images.size()) != pres.num_generators()) {
    throw Error("relator_eval: expected 2*genus images");
  }
  Eigen::MatrixXcd acc =
      Eigen::MatrixXcd::Identity(images[0].m.rows(), images[0].m.cols());
  for (const auto& letter : pres.relator()) {
    const Eigen::MatrixXcd& g = images[letter.generator].m;
    if (letter.sign > 0) {
      acc = acc * g;
    } else {
      acc = acc * g.adjoint();  // unitary inverse
    }
  }
  return GroupElement{acc};
}

double relator_defect(const SurfacePresentation& pres,
                      const std::vector<GroupElement>& images, const GroupElement& c) {
  GroupElement r = relator_eval(pres, images);
  Eigen::MatrixXcd d = r.m * c.m.adjoint() -
                       Eigen::MatrixXcd::Identity(r.m.rows(), r.m.cols());
  return d.norm();
}

CentralRep make_central_rep(LieContextPtr ctx, int genus, std::vector<GroupElement> images,
                            GroupElement c, AlgebraElement x_xi, double defect_tol) {
  SurfacePresentation pres(genus);
  if (static_cast<int>(images.size()) != pres.num_generators()) {
    throw Error("make_central_rep: expected 2*genus images");
  }
  for (const auto& g : images) {
    if (ctx->unitarity_residual(g) > 1e-10 || ctx->det_residual(g) > 1e-10) {
      throw Error("make_central_rep: image violates group constraints");
    }
  }
  if (!is_central(*ctx, c, 1e-10)) {
    throw Error("make_central_rep: c is not central");
  }
  // x_xi must lie in the centre algebra
  for (int k = 0; k < ctx->dim_g(); ++k) {
    bool central_coord = false;
    for (int idx : ctx->center_indices()) central_coord |= (idx == k);
    if (!central_coord && std::abs(x_xi.coeffs[k]) > 1e-12) {
      throw Error("make_central_rep: x_xi has components outside the centre algebra");
    }
  }
  // c equals exp(x_xi) up to a discrete central factor
  GroupElement ex = exp_alg(*ctx, x_xi);
  GroupElement delta{ex.m.adjoint() * c.m};
  if (!is_central(*ctx, delta, 1e-8)) {
    throw Error("make_central_rep: c is not exp(x_xi) times a central element");
  }
  double defect = relator_defect(pres, images, c);
  if (defect > defect_tol) {
    throw NotCentral("make_central_rep: relator defect " + std::to_string(defect) +
                     " exceeds tolerance");
  }
  return CentralRep{std::move(ctx), genus, std::move(images), std::move(c), std::move(x_xi),
                    defect};
}

StabilizerData stabilizer_group(const CentralRep& rep, RngStream& rng, int sample_count) {
  StabilizerData out;
  out.algebra = centralizer_algebra(*rep.ctx, rep.images);
  out.samples.push_back(rep.ctx->identity());

  auto commutes_with_images = [&](const GroupElement& z) {
    for (const auto& g : rep.images) {
      if ((z.m * g.m - g.m * z.m).norm() > 1e-10) return false;
    }
    return true;
  };

  for (const auto& dc : rep.ctx->discrete_center()) {
    GroupElement z{dc};
    if (commutes_with_images(z)) {
      out.samples.push_back(z);
    }
  }

  const int dim_za = static_cast<int>(out.algebra.size());
  if (dim_za > 0) {
    while (static_cast<int>(out.samples.size()) < sample_count) {
      Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(rep.ctx->dim_g());
      for (const auto& basis_vec : out.algebra) {
        coeffs += rng.gaussian() * basis_vec.coeffs;
      }
      GroupElement z = exp_alg(*rep.ctx, AlgebraElement{coeffs});
      out.samples.push_back(z);
      out.samples.push_back(GroupElement{z.m.adjoint()});
    }
  }
  return out;
}

namespace {

// Residual coordinates log(relator(T) c^-1); requires the defect to be in
// the principal branch, which holds along the polish path.
Eigen::VectorXd relator_residual(const LieContext& ctx, const SurfacePresentation& pres,
                                 const std::vector<GroupElement>& images,
                                 const GroupElement& c) {
  GroupElement r = relator_eval(pres, images);
  GroupElement d{r.m * c.m.adjoint()};
  return log_group(ctx, d).coeffs;
}

}  // namespace

PolishOutcome polish_to_central(const LieContext& ctx, const SurfacePresentation& pres,
                                std::vector<GroupElement> start, const GroupElement& c,
                                double target_defect, int max_iter, double fd_step,
                                double pinv_rel_tol) {
  PolishOutcome out;
  out.images = std::move(start);
  const int n = ctx.dim_g();
  const int gens = pres.num_generators();

  auto defect_of = [&](const std::vector<GroupElement>& t) {
    return relator_defect(pres, t, c);
  };

  out.defect = defect_of(out.images);
  for (int iter = 0; iter < max_iter && out.defect > target_defect; ++iter) {
    out.iterations = iter + 1;
    Eigen::VectorXd res;
    try {
      res = relator_residual(ctx, pres, out.images, c);
    } catch (const BranchAmbiguity&) {
      break;  // defect too large for the principal branch; give up
    }

    Eigen::MatrixXd jac(n, gens * n);
    for (int s = 0; s < gens; ++s) {
      for (int k = 0; k < n; ++k) {
        AlgebraElement dir{Eigen::VectorXd::Zero(n)};
        dir.coeffs[k] = fd_step;
        std::vector<GroupElement> plus = out.images;
        std::vector<GroupElement> minus = out.images;
        plus[s].m = plus[s].m * exp_alg(ctx, dir).m;
        dir.coeffs[k] = -fd_step;
        minus[s].m = minus[s].m * exp_alg(ctx, dir).m;
        Eigen::VectorXd rp = relator_residual(ctx, pres, plus, c);
        Eigen::VectorXd rm = relator_residual(ctx, pres, minus, c);
        jac.col(s * n + k) = (rp - rm) / (2.0 * fd_step);
      }
    }

    Eigen::VectorXd step = -pinv(jac, pinv_rel_tol) * res;
    double scale = 1.0;
    bool improved = false;
    for (int halving = 0; halving < 8; ++halving) {
      std::vector<GroupElement> trial = out.images;
      for (int s = 0; s < gens; ++s) {
        AlgebraElement delta{scale * step.segment(s * n, n)};
        trial[s].m = trial[s].m * exp_alg(ctx, delta).m;
      }
      double trial_defect = defect_of(trial);
      if (trial_defect < out.defect) {
        out.images = std::move(trial);
        out.defect = trial_defect;
        improved = true;
        break;
      }
      scale *= 0.5;
    }
    if (!improved) break;
  }
  out.converged = out.defect <= target_defect;
  return out;
}

}  // namespace ymlab
