#include "jacobi/grassmann_curve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jacobi/kernels.hpp"

namespace jacobi {

namespace {

int stencil_reach(int order) {
  if (order < 1 || order > 3) fail(ErrorKind::Validation, "jet order must be 1, 2 or 3");
  return order == 3 ? 3 : 2;
}

Mat solve(const Mat& a, const Mat& b) { return a.fullPivLu().solve(b); }

void check_regular(const Mat& s1, double cap) {
  Eigen::JacobiSVD<Mat> svd(s1);
  const double smin = svd.singularValues()(s1.rows() - 1);
  if (!(smin > 0.0) || 1.0 / smin > cap)
    fail(ErrorKind::NotRegular, "velocity form is degenerate (|S'^{-1}| exceeds cap)");
}

LocalJet assemble_jet(const Chart& chart, const std::vector<Mat>& s, int order, double h) {
  const int reach = stencil_reach(order);
  const int c = reach;
  LocalJet j{chart, s[c], Mat(), Mat(), Mat(), graph_basis(chart, s[c])};
  const Mat& m2 = s[c - 2];
  const Mat& m1 = s[c - 1];
  const Mat& p1 = s[c + 1];
  const Mat& p2 = s[c + 2];
  j.s1 = symmetrize((m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h));
  if (order >= 2)
    j.s2 = symmetrize((-m2 + 16.0 * m1 - 30.0 * s[c] + 16.0 * p1 - p2) / (12.0 * h * h));
  if (order >= 3) {
    const Mat& m3 = s[c - 3];
    const Mat& p3 = s[c + 3];
    // Seven points: the five-point third difference is only second order.
    j.s3 = symmetrize((m3 - 8.0 * m2 + 13.0 * m1 - 13.0 * p1 + 8.0 * p2 - p3) / (8.0 * h * h * h));
  }
  return j;
}

}  // namespace

CurveOperator CurveOperator::in_basis(const Mat& new_basis) const {
  const Mat t = new_basis.colPivHouseholderQr().solve(basis);
  return {t * matrix * t.inverse(), new_basis};
}

Vec CurveOperator::spectrum() const {
  Eigen::EigenSolver<Mat> es(matrix, false);
  Vec ev = es.eigenvalues().real();
  std::sort(ev.data(), ev.data() + ev.size());
  return ev;
}

GrassmannCurve::GrassmannCurve(const SymplecticSpace& space, Eval eval, double t0, double t1,
                               const CurveSettings& settings)
    : space_(space), eval_(std::move(eval)), t0_(t0), t1_(t1), settings_(settings) {
  if (!(t1 > t0)) fail(ErrorKind::Validation, "curve domain must have t1 > t0");
  fd_step_ = settings.fd_step > 0 ? settings.fd_step : 1e-3 * (t1 - t0);
  if (!settings.grid.empty()) {
    grid_ = settings.grid;
  } else {
    const int m = std::max(2, settings.grid_points);
    grid_.resize(m);
    for (int i = 0; i < m; ++i) grid_[i] = t0 + (t1 - t0) * i / (m - 1);
  }
}

GrassmannCurve GrassmannCurve::from_chart(const Chart& chart, std::function<Mat(double)> s,
                                          double t0, double t1, CurveSettings settings) {
  GrassmannCurve c(
      chart.pi().space(),
      [chart, s = std::move(s)](double t) { return graph_basis(chart, symmetrize(s(t))); }, t0,
      t1, settings);
  c.set_preferred_chart(chart);
  return c;
}

bool GrassmannCurve::evaluable(double t) const {
  const double slack = 1e-12 * std::max(1.0, std::abs(t1_ - t0_));
  return t >= t0_ - settings_.eval_margin - slack && t <= t1_ + settings_.eval_margin + slack;
}

Mat GrassmannCurve::columns(double t) const {
  if (!evaluable(t))
    fail(ErrorKind::Validation, "curve evaluated outside its domain at t = " + std::to_string(t));
  return eval_(t);
}

LagrangianFrame GrassmannCurve::at(double t) const { return LagrangianFrame(space_, columns(t)); }

std::vector<LagrangianFrame> GrassmannCurve::stencil_frames(double t, int order, double h) const {
  const int reach = stencil_reach(order);
  if (h <= 0) h = fd_step_;
  if (!evaluable(t - reach * h) || !evaluable(t + reach * h))
    fail(ErrorKind::Validation, "difference stencil at t = " + std::to_string(t) +
                                    " leaves the evaluable range");
  std::vector<LagrangianFrame> out;
  out.reserve(2 * reach + 1);
  for (int k = -reach; k <= reach; ++k) out.push_back(at(t + k * h));
  return out;
}

Chart GrassmannCurve::local_chart(const std::vector<LagrangianFrame>& stencil) const {
  const double margin = settings_.chart_margin;
  if (preferred_) {
    bool covers = true;
    for (const auto& f : stencil)
      if (transversality_gap(preferred_->delta(), f) < margin) covers = false;
    if (covers) return *preferred_;
  }
  const LagrangianFrame& center = stencil[stencil.size() / 2];
  std::vector<LagrangianFrame> avoid;
  for (std::size_t i = 0; i < stencil.size(); ++i)
    if (i != stencil.size() / 2) avoid.push_back(stencil[i]);
  ComplementSearch opts;
  opts.min_gap = margin;
  try {
    return Chart(center, transversal_complement(center, avoid, opts));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::SearchExhausted)
      fail(ErrorKind::ChartFailure, "no chart covers the difference stencil");
    throw;
  }
}

LocalJet GrassmannCurve::jet(double t, int order, double h) const {
  if (h <= 0) h = fd_step_;
  const auto frames = stencil_frames(t, order, h);
  const Chart chart = local_chart(frames);
  std::vector<Mat> s;
  s.reserve(frames.size());
  for (const auto& f : frames) s.push_back(chart_coords(chart, f, settings_.rank_tol));
  return assemble_jet(chart, s, order, h);
}

LocalJet GrassmannCurve::jet_in(const Chart& chart, double t, int order, double h) const {
  if (h <= 0) h = fd_step_;
  const auto frames = stencil_frames(t, order, h);
  std::vector<Mat> s;
  s.reserve(frames.size());
  for (const auto& f : frames) s.push_back(chart_coords(chart, f, settings_.rank_tol));
  return assemble_jet(chart, s, order, h);
}

QuadraticForm velocity_form(const GrassmannCurve& c, double t) {
  LocalJet j = c.jet(t, 1);
  return {j.s1, j.basis};
}

CurveOperator cross_ratio(const Mat& v0, const Mat& v1, const Mat& v2, const Mat& v3) {
  const Mat p01 = projector(v0, v1);
  const Mat p23 = projector(v2, v3);
  const Mat z1 = orthonormalize(v1);
  return {z1.transpose() * p01 * p23 * z1, z1};
}

Mat cross_ratio_chart(const Mat& s0, const Mat& s1, const Mat& s2, const Mat& s3) {
  return solve(s1 - s0, s0 - s3) * solve(s3 - s2, s2 - s1);
}

CurveOperator infinitesimal_cross_ratio(const GrassmannCurve& c0, double t0,
                                        const GrassmannCurve& c1, double t1) {
  auto f0 = c0.stencil_frames(t0, 1);
  auto f1 = c1.stencil_frames(t1, 1);
  const LagrangianFrame center = f1[f1.size() / 2];
  std::vector<LagrangianFrame> avoid = f0;
  avoid.insert(avoid.end(), f1.begin(), f1.end());
  ComplementSearch opts;
  opts.min_gap = std::min(c0.settings().chart_margin, c1.settings().chart_margin);
  LagrangianFrame delta = [&] {
    try {
      return transversal_complement(center, avoid, opts);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::SearchExhausted)
        fail(ErrorKind::ChartFailure, "no common chart for the two curve points");
      throw;
    }
  }();
  const Chart chart(center, delta);
  const LocalJet j0 = c0.jet_in(chart, t0, 1);
  const LocalJet j1 = c1.jet_in(chart, t1, 1);
  const Mat s01 = j0.s - j1.s;
  Eigen::FullPivLU<Mat> lu(s01);
  lu.setThreshold(kRankTol);
  if (!lu.isInvertible()) fail(ErrorKind::NotTransversal, "curve points are not transversal");
  return {lu.solve(j0.s1) * lu.solve(j1.s1), j1.basis};
}

Mat derivative_curve_generator(const Mat& s1, const Mat& s2) {
  return symmetrize(-0.5 * solve(s1, solve(s1, s2).transpose()));
}

Mat schwartzian_matrix(const Mat& s1, const Mat& s2, const Mat& s3) {
  const Mat x = solve(s1, s2);
  return 0.5 * solve(s1, s3) - 0.75 * x * x;
}

LagrangianFrame derivative_curve(const GrassmannCurve& c, double t) {
  const LocalJet j = c.jet(t, 2);
  check_regular(j.s1, c.settings().regularity_cap);
  const int n = c.n();
  const Mat a = derivative_curve_generator(j.s1, j.s2);
  Mat coords(2 * n, n);
  coords << a, Mat::Identity(n, n) + j.s * a;
  return LagrangianFrame(c.space(), j.chart.darboux() * coords);
}

GrassmannCurve derivative_curve_of(const GrassmannCurve& c, double fd_step) {
  CurveSettings st = c.settings();
  st.fd_step = fd_step > 0 ? fd_step : 10.0 * c.fd_step();
  st.eval_margin = std::max(0.0, c.eval_margin() - 2.0 * c.fd_step());
  st.grid = c.grid();
  const GrassmannCurve parent = c;
  return GrassmannCurve(
      c.space(), [parent](double t) { return derivative_curve(parent, t).basis(); }, c.t0(),
      c.t1(), st);
}

CurveOperator curvature(const GrassmannCurve& c, double t) {
  const LocalJet j = c.jet(t, 3);
  check_regular(j.s1, c.settings().regularity_cap);
  return {schwartzian_matrix(j.s1, j.s2, j.s3), j.basis};
}

QuadraticForm curvature_form(const GrassmannCurve& c, double t) {
  return curvature_form_at(c, t, 0.0);
}

QuadraticForm curvature_form_at(const GrassmannCurve& c, double t, double h) {
  const LocalJet j = c.jet(t, 3, h);
  check_regular(j.s1, c.settings().regularity_cap);
  return {symmetrize(j.s1 * schwartzian_matrix(j.s1, j.s2, j.s3)), j.basis};
}

Mat structural_transport(const std::function<Mat(double)>& a, double t0, double t1, double step) {
  if (!(step > 0)) fail(ErrorKind::Validation, "step must be positive");
  const Mat a0 = a(t0);
  const int n = static_cast<int>(a0.rows());
  Mat g = Mat::Identity(2 * n, 2 * n);
  if (t1 == t0) return g;
  const int steps = static_cast<int>(std::ceil(std::abs(t1 - t0) / step - 1e-9));
  const double h = (t1 - t0) / steps;
  auto rhs = [&](double t, const Mat& x) {
    const Mat at = a(t);
    Mat d(2 * n, 2 * n);
    d.topRows(n) = -x.bottomRows(n);
    d.bottomRows(n) = at * x.topRows(n);
    return d;
  };
  for (int k = 0; k < steps; ++k) {
    const double t = t0 + k * h;
    const Mat k1 = rhs(t, g);
    const Mat k2 = rhs(t + 0.5 * h, g + 0.5 * h * k1);
    const Mat k3 = rhs(t + 0.5 * h, g + 0.5 * h * k2);
    const Mat k4 = rhs(t + h, g + h * k3);
    g += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return g;
}

StructuralRun structural_run(const GrassmannCurve& c, double t0, double t1, double step) {
  if (!(t1 >= t0)) fail(ErrorKind::Validation, "transport needs t1 >= t0");
  const int n = c.n();
  if (step <= 0) {
    const auto& g = c.grid();
    step = g.size() > 1 ? (g.back() - g.front()) / (g.size() - 1) : c.length() / 100.0;
  }
  const double cap = c.settings().regularity_cap;

  // Start with a basis orthonormal for |velocity form|.
  const LocalJet j0 = c.jet(t0, 1);
  check_regular(j0.s1, cap);
  Eigen::SelfAdjointEigenSolver<Mat> es(j0.s1);
  const Vec lam = es.eigenvalues();
  const bool definite = lam.minCoeff() > 0 || lam.maxCoeff() < 0;
  const Mat zeta0 = es.eigenvectors() * lam.cwiseAbs().cwiseSqrt().cwiseInverse().asDiagonal();
  Mat e = j0.basis * zeta0;

  struct Deriv {
    Mat de;
    Mat coef;
  };
  auto eval = [&](double t, const Mat& frame) {
    const LocalJet j = c.jet(t, 3);
    check_regular(j.s1, cap);
    const Mat zeta = (j.chart.darboux_inverse() * frame).topRows(n);
    const Mat a = derivative_curve_generator(j.s1, j.s2);
    Mat coords(2 * n, n);
    coords << a * j.s1 * zeta, (Mat::Identity(n, n) + j.s * a) * j.s1 * zeta;
    const Mat r = schwartzian_matrix(j.s1, j.s2, j.s3);
    Mat coef = solve(zeta, r * zeta);
    if (definite) coef = symmetrize(coef);
    return Deriv{j.chart.darboux() * coords, coef};
  };
  auto gamma_rhs = [n](const Mat& coef, const Mat& g) {
    Mat d(2 * n, 2 * n);
    d.topRows(n) = -g.bottomRows(n);
    d.bottomRows(n) = coef * g.topRows(n);
    return d;
  };

  StructuralRun run;
  Mat g = Mat::Identity(2 * n, 2 * n);
  const int steps =
      t1 > t0 ? std::max(1, static_cast<int>(std::ceil((t1 - t0) / step - 1e-9))) : 0;
  const double h = steps ? (t1 - t0) / steps : 0.0;
  for (int k = 0; k < steps; ++k) {
    const double t = t0 + k * h;
    const Deriv d1 = eval(t, e);
    run.times.push_back(t);
    run.coefficient.push_back(d1.coef);
    run.frame.push_back(e);
    const Mat g1 = gamma_rhs(d1.coef, g);
    const Deriv d2 = eval(t + 0.5 * h, e + 0.5 * h * d1.de);
    const Mat g2 = gamma_rhs(d2.coef, g + 0.5 * h * g1);
    const Deriv d3 = eval(t + 0.5 * h, e + 0.5 * h * d2.de);
    const Mat g3 = gamma_rhs(d3.coef, g + 0.5 * h * g2);
    const Deriv d4 = eval(t + h, e + h * d3.de);
    const Mat g4 = gamma_rhs(d4.coef, g + h * g3);
    e += h / 6.0 * (d1.de + 2.0 * d2.de + 2.0 * d3.de + d4.de);
    g += h / 6.0 * (g1 + 2.0 * g2 + 2.0 * g3 + g4);
  }
  const Deriv last = eval(t1, e);
  run.times.push_back(t1);
  run.coefficient.push_back(last.coef);
  run.frame.push_back(e);
  run.gamma = g;
  return run;
}

Mat transport(const GrassmannCurve& c, double t0, double t1, double step) {
  return structural_run(c, t0, t1, step).gamma;
}

double schwartzian(const Reparametrization& phi, double s) {
  const double a = phi.d1(s), b = phi.d2(s), d = phi.d3(s);
  return d / (2.0 * a) - 0.75 * (b / a) * (b / a);
}

GrassmannCurve reparametrize(const GrassmannCurve& c, const Reparametrization& phi) {
  CurveSettings st = c.settings();
  st.fd_step = 0.0;
  st.grid.clear();
  st.eval_margin = phi.eval_margin;
  GrassmannCurve out(
      c.space(), [c, f = phi.phi](double s) { return c.columns(f(s)); }, phi.s0, phi.s1, st);
  return out;
}

Reparametrization affine_reparametrization(double a, double b, double s0, double s1) {
  Reparametrization r;
  r.phi = [a, b](double s) { return a * s + b; };
  r.d1 = [a](double) { return a; };
  r.d2 = [](double) { return 0.0; };
  r.d3 = [](double) { return 0.0; };
  r.s0 = s0;
  r.s1 = s1;
  return r;
}

namespace {

std::vector<double> interior_samples(const GrassmannCurve& c, int count, int reach) {
  const double pad = reach * c.fd_step() * 1.0001;
  const double lo = c.t0() - c.eval_margin() + pad > c.t0() ? c.t0() - c.eval_margin() + pad : c.t0();
  const double hi = c.t1() + c.eval_margin() - pad < c.t1() ? c.t1() + c.eval_margin() - pad : c.t1();
  std::vector<double> ts(count);
  for (int i = 0; i < count; ++i) ts[i] = lo + (hi - lo) * i / std::max(1, count - 1);
  return ts;
}

struct PointClass {
  bool regular;
  Inertia velocity;
  double curvature_size;
  double curvature_smin;
};

}  // namespace

CurveClass classify(const GrassmannCurve& c, const ClassifyOptions& opts) {
  const int n = c.n();
  const auto ts = interior_samples(c, std::max(3, opts.samples), 3);
  const double cap = c.settings().regularity_cap;
  const auto points = map_indices(
      ts.size(),
      [&](std::size_t i) {
        const LocalJet j = c.jet(ts[i], 3);
        Eigen::JacobiSVD<Mat> svd(j.s1);
        const double smin = svd.singularValues()(n - 1);
        PointClass p{smin > 0 && 1.0 / smin <= cap, inertia(j.s1), 0.0, 0.0};
        if (p.regular) {
          const Mat r = schwartzian_matrix(j.s1, j.s2, j.s3);
          p.curvature_size = r.cwiseAbs().maxCoeff();
          Eigen::JacobiSVD<Mat> rs(r);
          p.curvature_smin = rs.singularValues()(n - 1);
        }
        return p;
      },
      opts.parallel ? Exec::Parallel : Exec::Serial);

  CurveClass out;
  out.regular = std::all_of(points.begin(), points.end(), [](const PointClass& p) { return p.regular; });
  const bool inc = std::all_of(points.begin(), points.end(),
                               [n](const PointClass& p) { return p.velocity.pos == n; });
  const bool dec = std::all_of(points.begin(), points.end(),
                               [n](const PointClass& p) { return p.velocity.neg == n; });
  out.monotone = inc ? 1 : (dec ? -1 : 0);
  if (!out.regular) return out;
  out.flat = std::all_of(points.begin(), points.end(),
                         [&](const PointClass& p) { return p.curvature_size <= opts.flat_tol; });
  if (out.monotone == 0) return out;

  const double lo = ts.front(), hi = ts.back();
  const StructuralRun run = structural_run(c, lo, hi, (hi - lo) / 100.0);
  const Mat& a0 = run.coefficient.front();
  double drift = 0.0;
  for (const auto& a : run.coefficient) drift = std::max(drift, (a - a0).cwiseAbs().maxCoeff());
  out.symmetric = drift <= opts.symmetric_tol * (1.0 + a0.cwiseAbs().maxCoeff());

  const PointClass& mid = points[points.size() / 2];
  if (out.symmetric && mid.curvature_smin > 1e-6 * (1.0 + mid.curvature_size)) {
    const double tm = ts[ts.size() / 2];
    const GrassmannCurve d1 = derivative_curve_of(c);
    const LagrangianFrame back = derivative_curve(d1, tm);
    out.double_derivative_checked = true;
    out.double_derivative_agrees = same_subspace(back, c.at(tm), 1e-3);
  }
  return out;
}

}  // namespace jacobi
