#include "gls/rng.hpp"

#include <cmath>
#include <numbers>

#include "gls/errors.hpp"

namespace gls {

namespace {

// splitmix64 finalizer; used to derive sub-stream seeds.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

Rng Rng::split(std::uint64_t stream) const {
  return Rng(mix64(seed_ ^ mix64(stream + 1)));
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::gaussian(double mean, double stddev) {
  if (stddev < 0.0) throw Error("gaussian: stddev must be nonnegative");
  if (has_spare_) {
    has_spare_ = false;
    return mean + stddev * spare_;
  }
  // u1 in (0, 1] so the log is finite.
  const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return mean + stddev * radius * std::cos(angle);
}

DenseMatrix Rng::gaussian_matrix(std::size_t rows, std::size_t cols, double mean,
                                 double stddev) {
  DenseMatrix out(rows, cols);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) out(i, j) = gaussian(mean, stddev);
  return out;
}

Vector Rng::gaussian_vector(std::size_t n, double mean, double stddev) {
  Vector out(n);
  for (double& v : out) v = gaussian(mean, stddev);
  return out;
}

std::vector<std::size_t> Rng::permutation(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(below(i));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  return engine_() % bound;
}

DenseMatrix seeded_gaussian(std::size_t rows, std::size_t cols, double mean,
                            double stddev, std::uint64_t seed) {
  Rng rng(seed);
  return rng.gaussian_matrix(rows, cols, mean, stddev);
}

}  // namespace gls
