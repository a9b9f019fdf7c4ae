#pragma once

#include <functional>
#include <vector>

#include "jacobi/maslov.hpp"
#include "jacobi/symplectic.hpp"

namespace jacobi {

// Minimize J(w) subject to Phi(w) = z, w in R^dim_w, z in R^m. Callbacks must
// be re-entrant. Missing second-derivative callbacks can be replaced by
// differences of the first derivatives when allow_fd is set.
struct FiniteProblem {
  int dim_w = 0;
  int m = 0;
  std::function<double(const Vec&)> j;
  std::function<Vec(const Vec&)> grad_j;
  std::function<Mat(const Vec&)> hess_j;
  std::function<Vec(const Vec&)> phi;
  std::function<Mat(const Vec&)> jac_phi;                // m x dim_w
  std::function<std::vector<Mat>(const Vec&)> hess_phi;  // m matrices, dim_w x dim_w
  bool allow_fd = false;
  double fd_step = 1e-6;  // relative
};

struct LagrangianPoint {
  Vec w;
  Vec zeta;  // multiplier, stored as a column
};

struct LDerivData {
  Mat a;  // D Phi at w
  Mat q;  // D^2 J - zeta D^2 Phi
  bool fd_used = false;
};

constexpr double kNewtonTol = 1e-10;

// |A^T zeta - grad J|.
double stationarity_residual(const FiniteProblem& p, const LagrangianPoint& lp);

// A and Q at a Lagrangian point. Validation when the callbacks have the wrong
// shape, the second derivatives are not symmetric, or the point is not
// stationary to tol * (1 + |grad J|).
LDerivData linearize(const FiniteProblem& p, const LagrangianPoint& lp, double tol = 1e-8);

// Damped Newton on (A^T zeta - grad J, Phi(w) - z). NoConvergence on failure.
LagrangianPoint refine_lagrangian_point(const FiniteProblem& p, const LagrangianPoint& guess,
                                        const Vec& z, double tol = kNewtonTol,
                                        int max_iter = 100);

// Q restricted to an orthonormal basis of ker A; RankDrop if A is not onto.
QuadraticForm kernel_hessian(const LDerivData& d, double rank_tol = kRankTol);
QuadraticForm hessian_on_kernel(const FiniteProblem& p, const LagrangianPoint& lp);

// {(zeta, A v) : A^T zeta + Q v = 0} in the standard space of dimension 2m.
// DimensionDefect when ker A and ker Q meet.
LagrangianFrame l_derivative(const LDerivData& d, double rank_tol = kRankTol);

struct FiberCheck {
  bool hessian_nondegenerate = false;
  bool transversal_to_fiber = false;
};

FiberCheck fiber_check(const LDerivData& d, double rank_tol = kRankTol);

struct FamilyOptions {
  int grid_points = 201;
  MaslovOptions maslov;
};

struct FamilyIndexReport {
  int maslov = 0;          // index of tau -> Lambda(A, Q) against the fiber
  int hessian_delta = 0;   // ind Hess(tau0) - ind Hess(tau1)
  bool agree = false;
  IndexReport detail;
};

// DegenerateEndpoint when a kernel Hessian at tau0 or tau1 is singular.
FamilyIndexReport family_index_report(const std::function<LDerivData(double)>& family,
                                      double tau0, double tau1, const FamilyOptions& opts = {});
int family_index_delta(const std::function<LDerivData(double)>& family, double tau0,
                       double tau1, const FamilyOptions& opts = {});

}  // namespace jacobi
