#include "jacobi/random.hpp"

namespace jacobi {

Mat random_matrix(Rng& rng, int rows, int cols) {
  Mat m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

Mat random_symmetric(Rng& rng, int n) { return symmetrize(random_matrix(rng, n, n)); }

Mat random_orthogonal(Rng& rng, int n) { return orthonormalize(random_matrix(rng, n, n)); }

Mat random_symmetric_spectrum(Rng& rng, int n, double lo, double hi) {
  const Mat q = random_orthogonal(rng, n);
  Vec d(n);
  for (int i = 0; i < n; ++i) d(i) = rng.uniform(lo, hi);
  return symmetrize(q * d.asDiagonal() * q.transpose());
}

Mat random_symplectic(Rng& rng, int n) {
  Mat upper = Mat::Identity(2 * n, 2 * n);
  upper.topRightCorner(n, n) = random_symmetric(rng, n);
  Mat lower = Mat::Identity(2 * n, 2 * n);
  lower.bottomLeftCorner(n, n) = random_symmetric(rng, n);
  Mat m = random_matrix(rng, n, n) + 2.0 * Mat::Identity(n, n);
  Mat block = Mat::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = m;
  block.bottomRightCorner(n, n) = m.transpose().inverse();
  return upper * lower * block;
}

LagrangianFrame random_lagrangian(Rng& rng, const SymplecticSpace& space) {
  const int n = space.n();
  Mat g(2 * n, n);
  g << Mat::Identity(n, n), random_symmetric(rng, n);
  if (!(space == SymplecticSpace::standard(n)))
    fail(ErrorKind::Validation, "random Lagrangian frames need the standard form");
  return LagrangianFrame(space, random_symplectic(rng, n) * g);
}

}  // namespace jacobi
