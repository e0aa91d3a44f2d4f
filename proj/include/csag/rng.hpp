#ifndef CSAG_RNG_HPP
#define CSAG_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace csag {

// Deterministic random stream. mt19937_64 output is pinned by the standard,
// and all distributions below are implemented on top of raw bits, so a seed
// produces the same sequence on every platform and compiler.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_bits() { return engine_(); }

  // Uniform on (0, 1), never exactly 0 or 1.
  double uniform01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; second variate is cached.
  double normal();

  // Uniform integer in [0, n), unbiased (masked rejection).
  std::int64_t uniform_index(std::int64_t n);

  // k distinct indices from [0, n), returned in ascending order.
  std::vector<std::int64_t> sample_distinct(std::int64_t n, std::int64_t k);

  Eigen::VectorXd gaussian_vector(Eigen::Index size);
  Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols);

  // Derives an independent stream; used to give each run its own seed.
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t salt);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace csag

#endif  // CSAG_RNG_HPP
