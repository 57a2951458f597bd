#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ymlab {

// Deterministic stream generator. One root seed per run; every module draws
// from a stream derived by hashing a purpose string, so parallel consumers
// see stable values regardless of evaluation order.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  // Derive an independent stream for a named purpose.
  static RngStream derive(std::uint64_t root_seed, const std::string& purpose);

  std::uint64_t next_u64();

  // Uniform in [0, 1).
  double uniform();

  // Uniform in [lo, hi).
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller (polar form, cached spare).
  double gaussian();

  // Integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  Eigen::VectorXd gaussian_vector(int dim);

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t fnv1a_hash(const std::string& text);

}  // namespace ymlab
