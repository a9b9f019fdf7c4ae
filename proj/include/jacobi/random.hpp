#pragma once

#include <cstdint>
#include <random>

#include "jacobi/symplectic.hpp"

namespace jacobi {

// Seeded source for reproducible test instances and CLI sweeps.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

Mat random_matrix(Rng& rng, int rows, int cols);
Mat random_symmetric(Rng& rng, int n);
// Symmetric with eigenvalues in [lo, hi].
Mat random_symmetric_spectrum(Rng& rng, int n, double lo, double hi);
Mat random_orthogonal(Rng& rng, int n);
// Product of shears and a block-diagonal map; symplectic for the standard form.
Mat random_symplectic(Rng& rng, int n);
LagrangianFrame random_lagrangian(Rng& rng, const SymplecticSpace& space);

}  // namespace jacobi
