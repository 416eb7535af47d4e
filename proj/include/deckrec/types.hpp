#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace deckrec {

using Complex = std::complex<double>;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;
using ComplexMatrix = MatrixXc;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Seeded random source shared by all sampling routines.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Standard complex normal: real and imaginary parts i.i.d. N(0, 1/2).
  Complex complex_normal() {
    constexpr double kScale = 0.70710678118654752440;
    return {kScale * normal_(engine_), kScale * normal_(engine_)};
  }

  VectorXc complex_normal_vector(Eigen::Index n) {
    VectorXc v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = complex_normal();
    return v;
  }

  /// Uniform point on the complex unit circle.
  Complex unit_complex() {
    const double theta = uniform_(engine_) * 6.283185307179586476925;
    return std::polar(1.0, theta);
  }

  double uniform() { return uniform_(engine_); }

  std::uint64_t next_seed() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace deckrec
