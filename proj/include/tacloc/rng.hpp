// Deterministic random number generation. All stochastic code in the library
// draws through this wrapper so benchmark outputs are byte-reproducible for a
// fixed seed across platforms: mt19937_64 has a fully specified bit stream,
// and the distributions below avoid the implementation-defined std::
// distribution objects.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>

#include "tacloc/geometry.hpp"

namespace tacloc {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  /// Uniform double in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Rejection-free modulo is fine for our n
  /// (always tiny against 2^64, so bias is unobservable), but rejection
  /// sampling keeps the stream unbiased outright.
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  /// Standard normal via Box-Muller (deterministic, two uniforms per pair).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  Vec3 gaussian_vec3() {
    const double x = gaussian();
    const double y = gaussian();
    const double z = gaussian();
    return {x, y, z};
  }

  /// Uniformly distributed rotation: normalized 4D Gaussian read as a
  /// quaternion.
  Mat3 random_rotation() {
    Eigen::Vector4d q;
    for (int i = 0; i < 4; ++i) q[i] = gaussian();
    while (q.norm() < 1e-12) {
      for (int i = 0; i < 4; ++i) q[i] = gaussian();
    }
    q.normalize();
    return Eigen::Quaterniond(q[0], q[1], q[2], q[3]).toRotationMatrix();
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace tacloc
