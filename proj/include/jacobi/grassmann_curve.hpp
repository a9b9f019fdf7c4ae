#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "jacobi/symplectic.hpp"

namespace jacobi {

// Linear operator on a subspace, as a matrix acting on coordinates with
// respect to the given ambient basis (columns).
struct CurveOperator {
  Mat matrix;
  Mat basis;

  // Same operator expressed in another basis of the same subspace.
  CurveOperator in_basis(const Mat& new_basis) const;
  // Real parts of the eigenvalues, ascending.
  Vec spectrum() const;
};

struct CurveSettings {
  double fd_step = 0.0;     // 0 selects 1e-3 * domain length
  int grid_points = 401;    // used when grid is empty
  std::vector<double> grid;
  double eval_margin = 0.0; // how far outside [t0, t1] eval stays valid
  double rank_tol = kRankTol;
  double regularity_cap = 1e8;
  double chart_margin = 0.05;
};

// Chart, chart matrices and their derivatives at one parameter value. The chart
// is fixed across the whole stencil.
struct LocalJet {
  Chart chart;
  Mat s, s1, s2, s3;
  Mat basis;  // graph basis of the curve point at t
};

// Smooth curve t -> Lambda(t) in the Lagrange Grassmannian, sampled through a
// re-entrant evaluator returning any column basis of Lambda(t).
class GrassmannCurve {
 public:
  using Eval = std::function<Mat(double)>;

  GrassmannCurve(const SymplecticSpace& space, Eval eval, double t0, double t1,
                 const CurveSettings& settings = {});
  // Curve given by symmetric chart matrices; the chart is preferred for jets.
  static GrassmannCurve from_chart(const Chart& chart, std::function<Mat(double)> s,
                                   double t0, double t1, CurveSettings settings = {});

  const SymplecticSpace& space() const { return space_; }
  int n() const { return space_.n(); }
  double t0() const { return t0_; }
  double t1() const { return t1_; }
  double length() const { return t1_ - t0_; }
  double fd_step() const { return fd_step_; }
  double eval_margin() const { return settings_.eval_margin; }
  const CurveSettings& settings() const { return settings_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::optional<Chart>& preferred_chart() const { return preferred_; }
  void set_preferred_chart(const Chart& chart) { preferred_ = chart; }

  Mat columns(double t) const;
  LagrangianFrame at(double t) const;
  bool evaluable(double t) const;

  // Chart matrices and derivatives up to `order` (1..3) at t, by central
  // differences with step h (0 selects fd_step()).
  LocalJet jet(double t, int order, double h = 0.0) const;
  // Same, in a caller-supplied chart; NotInChart if the stencil leaves it.
  LocalJet jet_in(const Chart& chart, double t, int order, double h = 0.0) const;
  // Frames at the stencil points used by jet(t, order, h), ordered by offset.
  std::vector<LagrangianFrame> stencil_frames(double t, int order, double h = 0.0) const;
  // Chart used by jet(): the preferred chart when it covers the stencil,
  // otherwise one centered at Lambda(t).
  Chart local_chart(const std::vector<LagrangianFrame>& stencil) const;

 private:
  SymplecticSpace space_;
  Eval eval_;
  double t0_, t1_;
  CurveSettings settings_;
  double fd_step_;
  std::vector<double> grid_;
  std::optional<Chart> preferred_;
};

QuadraticForm velocity_form(const GrassmannCurve& c, double t);

// [v0, v1, v2, v3] = pi_{v0 v1} pi_{v2 v3} restricted to v1, in an orthonormal
// basis of v1. Accepts any four n-dimensional frames in R^{2n} with
// v0, v1 and v2, v3 transversal pairs.
CurveOperator cross_ratio(const Mat& v0, const Mat& v1, const Mat& v2, const Mat& v3);
// Same quantity for graphs {(x, S_i x)}: S10^{-1} S03 S32^{-1} S21.
Mat cross_ratio_chart(const Mat& s0, const Mat& s1, const Mat& s2, const Mat& s3);

// [c0'(t0), c1'(t1)] = S01^{-1} S0' S01^{-1} S1' acting on c1(t1).
CurveOperator infinitesimal_cross_ratio(const GrassmannCurve& c0, double t0,
                                        const GrassmannCurve& c1, double t1);

// Chart-level helpers shared by the curve operations.
Mat derivative_curve_generator(const Mat& s1, const Mat& s2);  // -1/2 S'^{-1} S'' S'^{-1}
Mat schwartzian_matrix(const Mat& s1, const Mat& s2, const Mat& s3);

LagrangianFrame derivative_curve(const GrassmannCurve& c, double t);
// The derivative curve as a curve in its own right; fd_step defaults to ten
// times the parent step because every evaluation is already a difference.
GrassmannCurve derivative_curve_of(const GrassmannCurve& c, double fd_step = 0.0);

CurveOperator curvature(const GrassmannCurve& c, double t);
// x -> <R x, x> in the velocity inner product.
QuadraticForm curvature_form(const GrassmannCurve& c, double t);
// Same with an explicit stencil step.
QuadraticForm curvature_form_at(const GrassmannCurve& c, double t, double h);

// Fundamental matrix of x' = -y, y' = A(t) x from t0 to t1 for a symmetric
// coefficient path A.
Mat structural_transport(const std::function<Mat(double)>& a, double t0, double t1, double step);

struct StructuralRun {
  Mat gamma;                  // fundamental matrix at the final time
  std::vector<double> times;  // recorded sample times
  std::vector<Mat> coefficient;  // A(t) in the normalized moving frame
  std::vector<Mat> frame;        // moving frame columns in ambient coordinates
};

// Moving frame with e(t) in Lambda(t), e'(t) in the derivative curve, started
// orthonormal for |velocity form|; A(t) is the curvature in that frame.
StructuralRun structural_run(const GrassmannCurve& c, double t0, double t1, double step = 0.0);
Mat transport(const GrassmannCurve& c, double t0, double t1, double step = 0.0);

struct Reparametrization {
  std::function<double(double)> phi, d1, d2, d3;
  double s0 = 0.0, s1 = 1.0;
  double eval_margin = 0.0;
};

// Schwartzian-type correction phi'''/(2 phi') - 3/4 (phi''/phi')^2.
double schwartzian(const Reparametrization& phi, double s);
GrassmannCurve reparametrize(const GrassmannCurve& c, const Reparametrization& phi);
// Affine map s -> a s + b on [s0, s1].
Reparametrization affine_reparametrization(double a, double b, double s0, double s1);

struct CurveClass {
  bool regular = false;
  int monotone = 0;   // +1 increasing, -1 decreasing, 0 neither
  bool flat = false;
  bool symmetric = false;
  bool double_derivative_checked = false;  // v°° = v check ran (R invertible)
  bool double_derivative_agrees = false;
};

struct ClassifyOptions {
  int samples = 41;
  double flat_tol = 1e-6;
  double symmetric_tol = 1e-4;
  bool parallel = false;
};

CurveClass classify(const GrassmannCurve& c, const ClassifyOptions& opts = {});

}  // namespace jacobi
