#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "jacobi/errors.hpp"

namespace jacobi {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

constexpr double kRankTol = 1e-9;
// Frames built from finite differences or long integrations are isotropic only
// up to accumulated rounding.
constexpr double kIsotropyTol = 1e-6;

// R^{2n} with a nondegenerate skew form. Coordinates are (fiber, base): the
// first n entries are the covector part, the last n the base part.
class SymplecticSpace {
 public:
  static SymplecticSpace standard(int n);
  explicit SymplecticSpace(const Mat& form);

  int n() const { return static_cast<int>(form_.rows() / 2); }
  int dim() const { return static_cast<int>(form_.rows()); }
  const Mat& form() const { return form_; }
  double omega(const Vec& u, const Vec& v) const { return u.dot(form_ * v); }
  bool operator==(const SymplecticSpace& other) const { return form_ == other.form_; }

 private:
  Mat form_;
};

// Orthonormal column basis of an n-dimensional isotropic subspace.
class LagrangianFrame {
 public:
  LagrangianFrame(const SymplecticSpace& space, const Mat& columns,
                  double rank_tol = kRankTol, double isotropy_tol = kIsotropyTol);

  static LagrangianFrame vertical(const SymplecticSpace& space);
  static LagrangianFrame horizontal(const SymplecticSpace& space);

  const SymplecticSpace& space() const { return space_; }
  const Mat& basis() const { return basis_; }
  int n() const { return static_cast<int>(basis_.cols()); }
  double isotropy_defect() const;

 private:
  SymplecticSpace space_;
  Mat basis_;
};

// Orthonormal basis for the column span; throws RankDrop below rank_tol.
Mat orthonormalize(const Mat& columns, double rank_tol = kRankTol);

// Orthonormal basis of ker m, singular values below tol * max(1, largest).
Mat null_space(const Mat& m, double tol = kRankTol);

// Smallest singular value of [A | B] for orthonormal frames A, B. Zero iff the
// spans intersect; at most 1.
double transversality_gap(const Mat& a, const Mat& b);
double transversality_gap(const LagrangianFrame& a, const LagrangianFrame& b);
int intersection_dim(const Mat& a, const Mat& b, double tol = kRankTol);
int intersection_dim(const LagrangianFrame& a, const LagrangianFrame& b,
                     double tol = kRankTol);
// Sine of the largest principal angle between equal-dimensional spans.
double subspace_distance(const Mat& a, const Mat& b);
bool same_subspace(const LagrangianFrame& a, const LagrangianFrame& b, double tol = 1e-8);

// Projector onto span(v1) along span(v0), as a 2n x 2n matrix.
Mat projector(const Mat& v0, const Mat& v1);
Mat projector(const LagrangianFrame& v0, const LagrangianFrame& v1);

// Coordinate chart on the Lagrange Grassmannian. pi spans the e-vectors and
// delta the f-vectors of a Darboux basis, omega(e_i, f_j) = delta_ij. A
// Lagrangian subspace transversal to delta is the graph {(z, S z)}, S symmetric.
class Chart {
 public:
  Chart(const LagrangianFrame& pi, const LagrangianFrame& delta);

  const LagrangianFrame& pi() const { return pi_; }
  const LagrangianFrame& delta() const { return delta_; }
  // Columns [e_1..e_n f_1..f_n].
  const Mat& darboux() const { return basis_; }
  const Mat& darboux_inverse() const { return inverse_; }
  int n() const { return pi_.n(); }

 private:
  LagrangianFrame pi_;
  LagrangianFrame delta_;
  Mat basis_;
  Mat inverse_;
};

// S with Lambda = {(z, S z)} in the chart; NotInChart if Lambda meets delta.
Mat chart_coords(const Chart& chart, const Mat& lambda_columns, double rank_tol = kRankTol);
Mat chart_coords(const Chart& chart, const LagrangianFrame& lambda, double rank_tol = kRankTol);
// Columns of the graph basis z -> (z, S z) in ambient coordinates.
Mat graph_basis(const Chart& chart, const Mat& s);
LagrangianFrame frame_from_chart(const Chart& chart, const Mat& s);

struct Inertia {
  int pos = 0;
  int neg = 0;
  int zero = 0;
  bool operator==(const Inertia&) const = default;
};

// Eigenvalue counts with threshold rank_tol * max(max|eigenvalue|, floor); the
// zero matrix is all-zero. A positive floor keeps pure rounding noise from
// being read as signal when the natural scale of the form is known.
Inertia inertia(const Mat& symmetric, double rank_tol = kRankTol, double floor = 0.0);

// Symmetric matrix of a quadratic form together with the ambient basis it is
// expressed in (empty when the form lives on a bare coordinate space).
struct QuadraticForm {
  Mat matrix;
  Mat basis;
};

Mat symmetrize(const Mat& m);

// Lagrangian complement built from the Euclidean orthogonal complement; for the
// vertical subspace of the standard space it is the horizontal one.
LagrangianFrame canonical_complement(const LagrangianFrame& lambda);

struct ComplementSearch {
  double min_gap = kRankTol;
  std::uint64_t seed = 0x5eedULL;
  int scalar_candidates = 8;   // S = kI for k = 1, -1, ..., 8, -8
  int random_candidates = 64;
};

struct ComplementResult {
  LagrangianFrame frame;
  int candidate = 0;
};

// First candidate of a fixed deterministic schedule that is transversal to
// lambda and to every subspace in avoid. SearchExhausted when none qualifies.
ComplementResult transversal_complement_search(const LagrangianFrame& lambda,
                                               const std::vector<LagrangianFrame>& avoid,
                                               const ComplementSearch& opts = {});
LagrangianFrame transversal_complement(const LagrangianFrame& lambda,
                                       const std::vector<LagrangianFrame>& avoid,
                                       const ComplementSearch& opts = {});

// Candidate number k of the schedule above, for inspection and tests.
LagrangianFrame complement_candidate(const LagrangianFrame& lambda, int k,
                                     const ComplementSearch& opts = {});
int complement_schedule_length(const ComplementSearch& opts = {});

}  // namespace jacobi
