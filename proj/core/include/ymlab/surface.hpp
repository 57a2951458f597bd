#pragma once

#include <utility>
#include <vector>

#include "ymlab/lie.hpp"

namespace ymlab {

// One-vertex presentation of the genus-g surface group with generators
// a1,b1,...,ag,bg and relator prod_i a_i b_i a_i^-1 b_i^-1.
class SurfacePresentation {
 public:
  explicit SurfacePresentation(int genus);

  int genus() const { return genus_; }
  int num_generators() const { return 2 * genus_; }

  struct Letter {
    int generator;  // index into a1,b1,a2,b2,... ordering
    int sign;       // +1 or -1
  };
  const std::vector<Letter>& relator() const { return relator_; }

 private:
  int genus_;
  std::vector<Letter> relator_;
};

// A tuple of holonomy images whose relator value is the prescribed central
// element c. The curvature class is carried by x_xi in the centre algebra;
// c may additionally differ from exp(x_xi) by a discrete central element
// (the su(2) twisted sector with c = -I).
struct CentralRep {
  LieContextPtr ctx;
  int genus = 1;
  std::vector<GroupElement> images;
  GroupElement c;
  AlgebraElement x_xi;
  double defect = 0.0;
};

GroupElement relator_eval(const SurfacePresentation& pres,
                          const std::vector<GroupElement>& images);

// Frobenius distance between the evaluated relator and c.
double relator_defect(const SurfacePresentation& pres,
                      const std::vector<GroupElement>& images, const GroupElement& c);

// Assembles and validates a CentralRep. Throws NotCentral when the defect
// exceeds defect_tol, Error when c fails centrality or x_xi leaves the
// centre algebra (up to a discrete central factor).
CentralRep make_central_rep(LieContextPtr ctx, int genus, std::vector<GroupElement> images,
                            GroupElement c, AlgebraElement x_xi, double defect_tol = 1e-10);

struct StabilizerData {
  std::vector<AlgebraElement> algebra;   // gram-orthonormal basis of z_A
  std::vector<GroupElement> samples;     // finite sample of Z_A, closed under inverse
};

// Basis of the joint centralizer algebra plus sampled group stabilizer
// elements (exponentials of random z_A vectors, discrete central elements
// that commute with the images, and the identity).
StabilizerData stabilizer_group(const CentralRep& rep, RngStream& rng, int sample_count = 32);

struct PolishOutcome {
  std::vector<GroupElement> images;
  double defect = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Damped Gauss-Newton on the relator residual log(relator(T) c^-1), right
// translation parameterization T_s <- T_s exp(delta_s), finite-difference
// Jacobian with pseudoinverse.
PolishOutcome polish_to_central(const LieContext& ctx, const SurfacePresentation& pres,
                                std::vector<GroupElement> start, const GroupElement& c,
                                double target_defect = 1e-10, int max_iter = 50,
                                double fd_step = 1e-6, double pinv_rel_tol = 1e-8);

}  // namespace ymlab
