#include "ymlab/rng.hpp"

#include <cmath>

namespace ymlab {

std::uint64_t fnv1a_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {
std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97f4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace

RngStream RngStream::derive(std::uint64_t root_seed, const std::string& purpose) {
  std::uint64_t s = root_seed ^ fnv1a_hash(purpose);
  // scramble once so neighboring seeds decorrelate
  splitmix64(s);
  return RngStream(s);
}

std::uint64_t RngStream::next_u64() { return splitmix64(state_); }

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double RngStream::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

std::uint64_t RngStream::below(std::uint64_t n) {
  return n == 0 ? 0 : next_u64() % n;
}

Eigen::VectorXd RngStream::gaussian_vector(int dim) {
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = gaussian();
  return v;
}

}  // namespace ymlab
