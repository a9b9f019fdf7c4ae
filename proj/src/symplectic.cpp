#include "jacobi/symplectic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace jacobi {

SymplecticSpace SymplecticSpace::standard(int n) {
  if (n < 1) fail(ErrorKind::Validation, "dimension must be positive");
  Mat j = Mat::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n).setIdentity();
  j.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
  return SymplecticSpace(j);
}

SymplecticSpace::SymplecticSpace(const Mat& form) : form_(form) {
  if (form.rows() != form.cols() || form.rows() == 0 || form.rows() % 2 != 0)
    fail(ErrorKind::Validation, "form must be square of positive even size");
  const double scale = std::max(1.0, form.cwiseAbs().maxCoeff());
  if ((form + form.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    fail(ErrorKind::Validation, "form is not skew-symmetric");
  Eigen::JacobiSVD<Mat> svd(form);
  if (svd.singularValues().minCoeff() <= kRankTol * svd.singularValues().maxCoeff())
    fail(ErrorKind::Validation, "form is degenerate");
}

Mat orthonormalize(const Mat& columns, double rank_tol) {
  const Eigen::Index k = columns.cols();
  Eigen::HouseholderQR<Mat> qr(columns);
  const Mat r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const double big = r.diagonal().cwiseAbs().maxCoeff();
  Eigen::JacobiSVD<Mat> svd(columns);
  const auto& sv = svd.singularValues();
  if (big == 0.0 || sv(k - 1) <= rank_tol * sv(0))
    fail(ErrorKind::RankDrop, "frame columns are linearly dependent");
  Mat q = qr.householderQ() * Mat::Identity(columns.rows(), k);
  // Fix the sign so the basis is a deterministic function of the input.
  for (Eigen::Index i = 0; i < k; ++i)
    if (r(i, i) < 0) q.col(i) *= -1.0;
  return q;
}

LagrangianFrame::LagrangianFrame(const SymplecticSpace& space, const Mat& columns,
                                 double rank_tol, double isotropy_tol)
    : space_(space) {
  if (columns.rows() != space.dim() || columns.cols() != space.n())
    fail(ErrorKind::Validation, "frame must be " + std::to_string(space.dim()) + " x " +
                                    std::to_string(space.n()));
  basis_ = orthonormalize(columns, rank_tol);
  const double defect = isotropy_defect();
  if (defect > isotropy_tol * std::max(1.0, space.form().norm()))
    fail(ErrorKind::Validation, "frame is not isotropic (defect " + std::to_string(defect) + ")");
}

LagrangianFrame LagrangianFrame::vertical(const SymplecticSpace& space) {
  const int n = space.n();
  Mat z = Mat::Zero(2 * n, n);
  z.topRows(n).setIdentity();
  return LagrangianFrame(space, z);
}

LagrangianFrame LagrangianFrame::horizontal(const SymplecticSpace& space) {
  const int n = space.n();
  Mat z = Mat::Zero(2 * n, n);
  z.bottomRows(n).setIdentity();
  return LagrangianFrame(space, z);
}

double LagrangianFrame::isotropy_defect() const {
  return (basis_.transpose() * space_.form() * basis_).norm();
}

Mat null_space(const Mat& m, double tol) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double scale = std::max(1.0, sv.size() ? sv(0) : 0.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * scale) ++rank;
  return svd.matrixV().rightCols(m.cols() - rank);
}

double transversality_gap(const Mat& a, const Mat& b) {
  Mat m(a.rows(), a.cols() + b.cols());
  m << a, b;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(m.cols() - 1);
}

double transversality_gap(const LagrangianFrame& a, const LagrangianFrame& b) {
  return transversality_gap(a.basis(), b.basis());
}

int intersection_dim(const Mat& a, const Mat& b, double tol) {
  Mat m(a.rows(), a.cols() + b.cols());
  m << a, b;
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * std::max(1.0, sv(0))) ++rank;
  return static_cast<int>(m.cols()) - rank;
}

int intersection_dim(const LagrangianFrame& a, const LagrangianFrame& b, double tol) {
  return intersection_dim(a.basis(), b.basis(), tol);
}

double subspace_distance(const Mat& a, const Mat& b) {
  const Mat qa = orthonormalize(a);
  const Mat qb = orthonormalize(b);
  const Mat resid = qb - qa * (qa.transpose() * qb);
  Eigen::JacobiSVD<Mat> svd(resid);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

bool same_subspace(const LagrangianFrame& a, const LagrangianFrame& b, double tol) {
  return subspace_distance(a.basis(), b.basis()) <= tol;
}

Mat projector(const Mat& v0, const Mat& v1) {
  if (v0.rows() != v1.rows() || v0.cols() + v1.cols() != v0.rows())
    fail(ErrorKind::Validation, "projector needs complementary dimensions");
  Mat m(v0.rows(), v0.rows());
  m << v0, v1;
  Eigen::FullPivLU<Mat> lu(m);
  lu.setThreshold(kRankTol);
  if (!lu.isInvertible()) fail(ErrorKind::NotTransversal, "subspaces are not transversal");
  Mat target = Mat::Zero(v0.rows(), v0.rows());
  target.rightCols(v1.cols()) = v1;
  return target * lu.inverse();
}

Mat projector(const LagrangianFrame& v0, const LagrangianFrame& v1) {
  return projector(v0.basis(), v1.basis());
}

Chart::Chart(const LagrangianFrame& pi, const LagrangianFrame& delta) : pi_(pi), delta_(delta) {
  if (!(pi.space() == delta.space()))
    fail(ErrorKind::Validation, "chart frames live in different spaces");
  const Mat& e = pi.basis();
  const Mat pairing = e.transpose() * pi.space().form() * delta.basis();
  Eigen::FullPivLU<Mat> lu(pairing);
  if (transversality_gap(pi, delta) <= kRankTol || !lu.isInvertible())
    fail(ErrorKind::NotTransversal, "chart subspaces are not transversal");
  const int n = pi.n();
  basis_.resize(2 * n, 2 * n);
  basis_ << e, delta.basis() * lu.inverse();
  inverse_ = basis_.inverse();
}

Mat chart_coords(const Chart& chart, const Mat& lambda_columns, double rank_tol) {
  const int n = chart.n();
  const Mat c = chart.darboux_inverse() * lambda_columns;
  const Mat top = c.topRows(n);
  Eigen::JacobiSVD<Mat> svd(top);
  const auto& sv = svd.singularValues();
  if (sv(0) == 0.0 || sv(n - 1) <= rank_tol * std::max(1.0, c.norm()))
    fail(ErrorKind::NotInChart, "subspace meets the chart complement");
  const Mat s = c.bottomRows(n) * top.inverse();
  return symmetrize(s);
}

Mat chart_coords(const Chart& chart, const LagrangianFrame& lambda, double rank_tol) {
  return chart_coords(chart, lambda.basis(), rank_tol);
}

Mat graph_basis(const Chart& chart, const Mat& s) {
  const int n = chart.n();
  Mat g(2 * n, n);
  g << Mat::Identity(n, n), s;
  return chart.darboux() * g;
}

LagrangianFrame frame_from_chart(const Chart& chart, const Mat& s) {
  const double asym = (s - s.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * std::max(1.0, s.cwiseAbs().maxCoeff()))
    fail(ErrorKind::Validation, "chart matrix must be symmetric");
  return LagrangianFrame(chart.pi().space(), graph_basis(chart, symmetrize(s)));
}

Inertia inertia(const Mat& symmetric, double rank_tol, double floor) {
  Inertia out;
  if (symmetric.size() == 0) return out;
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(symmetric), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double scale = std::max(ev.cwiseAbs().maxCoeff(), floor);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (scale == 0.0 || std::abs(ev(i)) <= rank_tol * scale)
      ++out.zero;
    else if (ev(i) > 0)
      ++out.pos;
    else
      ++out.neg;
  }
  return out;
}

Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

LagrangianFrame canonical_complement(const LagrangianFrame& lambda) {
  const SymplecticSpace& space = lambda.space();
  const Mat& z = lambda.basis();
  const int n = lambda.n();
  Eigen::HouseholderQR<Mat> qr(z);
  const Mat full = qr.householderQ();
  const Mat w = full.rightCols(n);
  const Mat& form = space.form();
  const Mat p = z.transpose() * form * w;
  const Mat m = w.transpose() * form * w;
  // Shift w along lambda so the result is isotropic; zero shift when form is
  // orthogonal (the standard case).
  const Mat k = 0.5 * p.transpose().fullPivLu().solve(m);
  return LagrangianFrame(space, w + z * k);
}

int complement_schedule_length(const ComplementSearch& opts) {
  return 1 + 2 * opts.scalar_candidates + opts.random_candidates;
}

LagrangianFrame complement_candidate(const LagrangianFrame& lambda, int k,
                                     const ComplementSearch& opts) {
  const LagrangianFrame base = canonical_complement(lambda);
  if (k == 0) return base;
  const int n = lambda.n();
  // Graphs over the canonical complement with lambda as the other leg; each is
  // transversal to lambda by construction.
  const Chart chart(base, lambda);
  Mat s(n, n);
  if (k <= 2 * opts.scalar_candidates) {
    const int mag = (k + 1) / 2;
    s = Mat::Identity(n, n) * (k % 2 == 1 ? mag : -mag);
  } else {
    std::mt19937_64 rng(opts.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(k));
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) s(i, j) = s(j, i) = u(rng);
  }
  return frame_from_chart(chart, s);
}

ComplementResult transversal_complement_search(const LagrangianFrame& lambda,
                                               const std::vector<LagrangianFrame>& avoid,
                                               const ComplementSearch& opts) {
  const int total = complement_schedule_length(opts);
  for (int k = 0; k < total; ++k) {
    LagrangianFrame cand = complement_candidate(lambda, k, opts);
    if (transversality_gap(cand, lambda) <= opts.min_gap) continue;
    bool ok = true;
    for (const auto& a : avoid) {
      if (transversality_gap(cand, a) <= opts.min_gap) {
        ok = false;
        break;
      }
    }
    if (ok) return {std::move(cand), k};
  }
  fail(ErrorKind::SearchExhausted, "no transversal complement among " +
                                       std::to_string(total) + " candidates");
}

LagrangianFrame transversal_complement(const LagrangianFrame& lambda,
                                       const std::vector<LagrangianFrame>& avoid,
                                       const ComplementSearch& opts) {
  return transversal_complement_search(lambda, avoid, opts).frame;
}

}  // namespace jacobi
