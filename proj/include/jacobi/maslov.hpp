#pragma once

#include <optional>
#include <vector>

#include "jacobi/grassmann_curve.hpp"

namespace jacobi {

// 2 * ind_Pi(L0, L1). The index is a half-integer when L0 or L1 meets Pi, so
// the doubled value is what gets stored.
int pair_index_doubled(const LagrangianFrame& pi, const LagrangianFrame& l0,
                       const LagrangianFrame& l1, double rank_tol = kRankTol);
// Integer value; ParityError when the index is a proper half-integer.
int pair_index(const LagrangianFrame& pi, const LagrangianFrame& l0, const LagrangianFrame& l1,
               double rank_tol = kRankTol);

struct MaslovOptions {
  double chart_margin = 0.05;
  // Max principal-angle sine between samples; never above chart_margin / 2.
  double refine_distance = 0.2;
  int max_depth = 32;
  bool prefer_first_chart = false;  // take the first admissible chart, not the longest
  bool parallel = false;
  double rank_tol = kRankTol;
};

struct IndexReport {
  int value = 0;
  std::vector<double> subdivision;  // piece boundaries including both ends
  int charts_used = 0;
  bool endpoint_transversal = true;
  int monotone = 0;                 // +1 / -1 when every piece is monotone
  std::optional<int> pair_index_sum;  // monotone curves only
};

IndexReport maslov_index(const GrassmannCurve& c, const LagrangianFrame& pi,
                         const MaslovOptions& opts = {});
// Same on a subinterval [a, b] of the domain.
IndexReport maslov_index(const GrassmannCurve& c, const LagrangianFrame& pi, double a, double b,
                         const MaslovOptions& opts = {});

struct ConjugatePoint {
  double t = 0.0;
  int multiplicity = 0;
};

struct ConjugateOptions {
  MaslovOptions maslov;
  double time_tol = 1e-10;  // relative to the domain length
  int monotone_samples = 33;
};

// Interior times where Lambda(t) meets pi, for regular monotone curves.
std::vector<ConjugatePoint> conjugate_points(const GrassmannCurve& c, const LagrangianFrame& pi,
                                             const ConjugateOptions& opts = {});
std::vector<ConjugatePoint> conjugate_points(const GrassmannCurve& c, const LagrangianFrame& pi,
                                             double a, double b,
                                             const ConjugateOptions& opts = {});

// Sum of multiplicities of points in (t0, t1) conjugate to t0.
int morse_index_regular_extremal(const GrassmannCurve& jc, const ConjugateOptions& opts = {});

}  // namespace jacobi
