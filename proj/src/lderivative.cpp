#include "jacobi/lderivative.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jacobi/grassmann_curve.hpp"

namespace jacobi {

namespace {

void check_shape(const Mat& m, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols)
    fail(ErrorKind::Validation, std::string(what) + " has shape " + std::to_string(m.rows()) +
                                    "x" + std::to_string(m.cols()) + ", expected " +
                                    std::to_string(rows) + "x" + std::to_string(cols));
}

void check_symmetric(const Mat& m, const char* what) {
  if ((m - m.transpose()).norm() > 1e-8 * (1.0 + m.norm()))
    fail(ErrorKind::Validation, std::string(what) + " is not symmetric");
}

double fd_step(const FiniteProblem& p, const Vec& w) {
  return p.fd_step * (1.0 + w.lpNorm<Eigen::Infinity>());
}

Mat hess_j(const FiniteProblem& p, const Vec& w, bool& fd) {
  if (p.hess_j) return p.hess_j(w);
  if (!p.allow_fd || !p.grad_j) fail(ErrorKind::Validation, "problem has no Hessian of J");
  fd = true;
  const double h = fd_step(p, w);
  Mat out(p.dim_w, p.dim_w);
  for (int k = 0; k < p.dim_w; ++k) {
    Vec e = Vec::Zero(p.dim_w);
    e(k) = h;
    out.col(k) = (p.grad_j(w + e) - p.grad_j(w - e)) / (2 * h);
  }
  return symmetrize(out);
}

std::vector<Mat> hess_phi(const FiniteProblem& p, const Vec& w, bool& fd) {
  if (p.hess_phi) return p.hess_phi(w);
  if (!p.allow_fd) fail(ErrorKind::Validation, "problem has no second derivative of Phi");
  fd = true;
  const double h = fd_step(p, w);
  std::vector<Mat> out(p.m, Mat(p.dim_w, p.dim_w));
  for (int k = 0; k < p.dim_w; ++k) {
    Vec e = Vec::Zero(p.dim_w);
    e(k) = h;
    const Mat d = (p.jac_phi(w + e) - p.jac_phi(w - e)) / (2 * h);
    for (int i = 0; i < p.m; ++i) out[i].col(k) = d.row(i).transpose();
  }
  for (auto& m : out) m = symmetrize(m);
  return out;
}

Mat second_variation(const FiniteProblem& p, const LagrangianPoint& lp, bool& fd) {
  Mat q = hess_j(p, lp.w, fd);
  check_shape(q, p.dim_w, p.dim_w, "Hessian of J");
  check_symmetric(q, "Hessian of J");
  const auto hp = hess_phi(p, lp.w, fd);
  if (static_cast<int>(hp.size()) != p.m)
    fail(ErrorKind::Validation, "second derivative of Phi has wrong number of components");
  for (int i = 0; i < p.m; ++i) {
    check_shape(hp[i], p.dim_w, p.dim_w, "second derivative of Phi");
    check_symmetric(hp[i], "second derivative of Phi");
    q -= lp.zeta(i) * hp[i];
  }
  return symmetrize(q);
}

int kernel_index(const LDerivData& d, double rank_tol, bool& degenerate) {
  const QuadraticForm h = kernel_hessian(d, rank_tol);
  const Inertia in = inertia(h.matrix, rank_tol, d.q.norm());
  degenerate = in.zero > 0;
  return in.neg;
}

// Where Q turns singular, Lambda swings through the horizontal subspace within
// a window of width about |A u|^2 (u the kernel vector of Q), which can be far
// below the grid spacing. Locate each sign change of det Q by bisection and
// add samples at geometrically shrinking offsets around it.
std::vector<double> family_grid(const std::function<LDerivData(double)>& family, double tau0,
                                double tau1, int points) {
  points = std::max(points, 2);
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = tau0 + (tau1 - tau0) * i / (points - 1);
  auto neg = [&](double t) { return inertia(family(t).q).neg; };
  std::vector<double> extra;
  int prev = neg(grid[0]);
  for (int i = 1; i < points; ++i) {
    const int cur = neg(grid[i]);
    if (cur != prev) {
      double lo = grid[i - 1], hi = grid[i];
      for (int k = 0; k < 60 && hi - lo > 1e-14 * (tau1 - tau0); ++k) {
        const double mid = 0.5 * (lo + hi);
        (neg(mid) == prev ? lo : hi) = mid;
      }
      const double c = 0.5 * (lo + hi), spacing = grid[i] - grid[i - 1];
      for (double d = 0.5 * spacing; d > 1e-12 * spacing; d *= 0.5) {
        if (c - d > grid[i - 1]) extra.push_back(c - d);
        if (c + d < grid[i]) extra.push_back(c + d);
      }
      extra.push_back(c);
    }
    prev = cur;
  }
  grid.insert(grid.end(), extra.begin(), extra.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace

double stationarity_residual(const FiniteProblem& p, const LagrangianPoint& lp) {
  return (p.jac_phi(lp.w).transpose() * lp.zeta - p.grad_j(lp.w)).norm();
}

LDerivData linearize(const FiniteProblem& p, const LagrangianPoint& lp, double tol) {
  if (p.dim_w <= 0 || p.m <= 0) fail(ErrorKind::Validation, "problem dimensions must be positive");
  if (lp.w.size() != p.dim_w || lp.zeta.size() != p.m)
    fail(ErrorKind::Validation, "Lagrangian point has wrong dimensions");
  if (!p.grad_j || !p.jac_phi) fail(ErrorKind::Validation, "problem is missing callbacks");
  LDerivData d;
  d.a = p.jac_phi(lp.w);
  check_shape(d.a, p.m, p.dim_w, "Jacobian of Phi");
  const Vec g = p.grad_j(lp.w);
  if (g.size() != p.dim_w) fail(ErrorKind::Validation, "gradient of J has wrong size");
  const double res = (d.a.transpose() * lp.zeta - g).norm();
  if (res > tol * (1.0 + g.norm()))
    fail(ErrorKind::Validation, "not a Lagrangian point, residual " + std::to_string(res));
  d.q = second_variation(p, lp, d.fd_used);
  return d;
}

LagrangianPoint refine_lagrangian_point(const FiniteProblem& p, const LagrangianPoint& guess,
                                        const Vec& z, double tol, int max_iter) {
  const int nw = p.dim_w, m = p.m;
  auto residual = [&](const LagrangianPoint& x) {
    Vec r(nw + m);
    r.head(nw) = p.jac_phi(x.w).transpose() * x.zeta - p.grad_j(x.w);
    r.tail(m) = p.phi(x.w) - z;
    return r;
  };
  LagrangianPoint x = guess;
  Vec r = residual(x);
  for (int it = 0; it < max_iter; ++it) {
    if (r.norm() <= tol) return x;
    bool fd = false;
    const Mat a = p.jac_phi(x.w);
    const Mat q = second_variation(p, x, fd);
    Mat jac = Mat::Zero(nw + m, nw + m);
    jac.topLeftCorner(nw, nw) = -q;
    jac.topRightCorner(nw, m) = a.transpose();
    jac.bottomLeftCorner(m, nw) = a;
    const Vec step = jac.colPivHouseholderQr().solve(-r);
    double lambda = 1.0;
    bool accepted = false;
    for (int k = 0; k < 30; ++k, lambda *= 0.5) {
      LagrangianPoint y{x.w + lambda * step.head(nw), x.zeta + lambda * step.tail(m)};
      const Vec ry = residual(y);
      if (ry.allFinite() && ry.norm() < (1.0 - 1e-4 * lambda) * r.norm()) {
        x = std::move(y);
        r = ry;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (r.norm() <= tol) return x;
  fail(ErrorKind::NoConvergence,
       "Newton refinement stalled at residual " + std::to_string(r.norm()));
}

QuadraticForm kernel_hessian(const LDerivData& d, double rank_tol) {
  check_shape(d.q, d.a.cols(), d.a.cols(), "Q");
  Eigen::JacobiSVD<Mat> svd(d.a);
  const auto& sv = svd.singularValues();
  if (sv.size() < d.a.rows() || sv(d.a.rows() - 1) <= rank_tol * std::max(1.0, sv(0)))
    fail(ErrorKind::RankDrop, "constraint Jacobian is not onto");
  const Mat k = null_space(d.a, rank_tol);
  return {symmetrize(k.transpose() * d.q * k), k};
}

QuadraticForm hessian_on_kernel(const FiniteProblem& p, const LagrangianPoint& lp) {
  return kernel_hessian(linearize(p, lp));
}

LagrangianFrame l_derivative(const LDerivData& d, double rank_tol) {
  const Eigen::Index m = d.a.rows(), nw = d.a.cols();
  check_shape(d.q, nw, nw, "Q");
  check_symmetric(d.q, "Q");
  Mat lhs(nw, m + nw);
  lhs << d.a.transpose(), d.q;
  const Mat k = null_space(lhs, rank_tol);
  Mat img(2 * m, k.cols());
  img.topRows(m) = k.topRows(m);
  img.bottomRows(m) = d.a * k.bottomRows(nw);
  if (k.cols() < m)
    fail(ErrorKind::DimensionDefect, "linearized constraint system has a kernel of dimension " +
                                         std::to_string(k.cols()) + " < " + std::to_string(m));
  Eigen::JacobiSVD<Mat> svd(img, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rank_tol * std::max(1.0, sv(0))) ++rank;
  if (rank < m)
    fail(ErrorKind::DimensionDefect, "image has dimension " + std::to_string(rank) + " < " +
                                         std::to_string(m) + "; ker A meets ker Q");
  if (rank > m) fail(ErrorKind::DimensionDefect, "image is larger than Lagrangian");
  return LagrangianFrame(SymplecticSpace::standard(static_cast<int>(m)),
                         svd.matrixU().leftCols(m), rank_tol);
}

FiberCheck fiber_check(const LDerivData& d, double rank_tol) {
  FiberCheck out;
  bool degenerate = false;
  kernel_index(d, rank_tol, degenerate);
  out.hessian_nondegenerate = !degenerate;
  const LagrangianFrame lam = l_derivative(d, rank_tol);
  const LagrangianFrame fiber = LagrangianFrame::vertical(lam.space());
  out.transversal_to_fiber = intersection_dim(lam, fiber, rank_tol) == 0;
  return out;
}

FamilyIndexReport family_index_report(const std::function<LDerivData(double)>& family,
                                      double tau0, double tau1, const FamilyOptions& opts) {
  if (!(tau1 > tau0)) fail(ErrorKind::Validation, "family interval must have tau1 > tau0");
  FamilyIndexReport rep;
  bool deg0 = false, deg1 = false;
  const LDerivData d0 = family(tau0), d1 = family(tau1);
  const int i0 = kernel_index(d0, kRankTol, deg0);
  const int i1 = kernel_index(d1, kRankTol, deg1);
  if (deg0 || deg1)
    fail(ErrorKind::DegenerateEndpoint, "kernel Hessian is degenerate at an endpoint");
  rep.hessian_delta = i0 - i1;

  const int m = static_cast<int>(d0.a.rows());
  CurveSettings cs;
  cs.grid = family_grid(family, tau0, tau1, opts.grid_points);
  GrassmannCurve curve(
      SymplecticSpace::standard(m),
      [family](double tau) { return l_derivative(family(tau)).basis(); }, tau0, tau1, cs);
  rep.detail = maslov_index(curve, LagrangianFrame::vertical(curve.space()), opts.maslov);
  rep.maslov = rep.detail.value;
  rep.agree = rep.maslov == rep.hessian_delta;
  return rep;
}

int family_index_delta(const std::function<LDerivData(double)>& family, double tau0,
                       double tau1, const FamilyOptions& opts) {
  return family_index_report(family, tau0, tau1, opts).maslov;
}

}  // namespace jacobi
