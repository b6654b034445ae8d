#ifndef GLS_RNG_HPP
#define GLS_RNG_HPP

#include <cstdint>
#include <random>

#include "gls/dense_matrix.hpp"

namespace gls {

// Seedable, splittable random generator.  The generator identity is fixed:
// mt19937_64 for the bit stream, 53-bit uniforms, Box-Muller for normals.
// Two Rng instances built from the same seed produce bitwise identical
// streams, which is the replay contract experiment outputs rely on.
class Rng {
 public:
  static constexpr const char* kGeneratorId = "mt19937_64/box-muller";

  explicit Rng(std::uint64_t seed);

  // Derive an independent stream; deterministic in (seed, stream).
  Rng split(std::uint64_t stream) const;

  std::uint64_t seed() const { return seed_; }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double gaussian(double mean = 0.0, double stddev = 1.0);

  DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, double mean = 0.0,
                              double stddev = 1.0);
  Vector gaussian_vector(std::size_t n, double mean = 0.0, double stddev = 1.0);

  // Fisher-Yates shuffle of indices 0..n-1.
  std::vector<std::size_t> permutation(std::size_t n);

  // Integer in [0, bound) by rejection-free modular reduction on 64 bits
  // (bias negligible for the desk-scale bounds used here).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// One-shot matrix draw; the spec-level operation.
DenseMatrix seeded_gaussian(std::size_t rows, std::size_t cols, double mean,
                            double stddev, std::uint64_t seed);

}  // namespace gls

#endif  // GLS_RNG_HPP
