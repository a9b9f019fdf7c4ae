#include "jacobi/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace jacobi {

namespace {

Mat standard_form(int n) { return SymplecticSpace::standard(n).form(); }

void check_point(const Vec& z, int n) {
  if (z.size() != 2 * n)
    fail(ErrorKind::Validation, "phase point has size " + std::to_string(z.size()) +
                                    ", expected " + std::to_string(2 * n));
}

struct Step {
  Vec z;
  MatL gamma;
};

// One classical fourth-order step of the flow, and of the variational
// equation when gamma is given. Stage states are identical with or without it.
Step rk4(const HamiltonianSystem& sys, const Vec& z, double h, const MatL* gamma) {
  const PhaseJet j1 = sys.eval(z);
  const Vec k1 = hamiltonian_field(j1.grad);
  const Vec z2 = z + 0.5 * h * k1;
  const PhaseJet j2 = sys.eval(z2);
  const Vec k2 = hamiltonian_field(j2.grad);
  const Vec z3 = z + 0.5 * h * k2;
  const PhaseJet j3 = sys.eval(z3);
  const Vec k3 = hamiltonian_field(j3.grad);
  const Vec z4 = z + h * k3;
  const PhaseJet j4 = sys.eval(z4);
  const Vec k4 = hamiltonian_field(j4.grad);
  Step out;
  out.z = z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (gamma) {
    const long double hl = h;
    const MatL a1 = field_matrix(j1.hess).cast<long double>();
    const MatL a2 = field_matrix(j2.hess).cast<long double>();
    const MatL a3 = field_matrix(j3.hess).cast<long double>();
    const MatL a4 = field_matrix(j4.hess).cast<long double>();
    const MatL g1 = a1 * *gamma;
    const MatL g2 = a2 * (*gamma + (hl / 2) * g1);
    const MatL g3 = a3 * (*gamma + (hl / 2) * g2);
    const MatL g4 = a4 * (*gamma + hl * g3);
    out.gamma = *gamma + (hl / 6) * (g1 + 2 * g2 + 2 * g3 + g4);
  }
  return out;
}

void check_state(const Vec& z, double t, const FlowOptions& opts) {
  if (!z.allFinite() || z.norm() > opts.state_cap)
    fail(ErrorKind::BlowUp, "state norm exceeds cap at t = " + std::to_string(t));
}

MatL identity_l(int d) { return MatL::Identity(d, d); }

Mat hessian_fd(const HamiltonianSystem& sys, const Vec& z, const Vec& v) {
  const double nv = v.norm();
  if (nv == 0.0) return Mat::Zero(z.size(), z.size());
  const double eps = 1e-4 * (1.0 + z.norm());
  const Vec d = v / nv;
  return nv * (sys.eval(z + eps * d).hess - sys.eval(z - eps * d).hess) / (2.0 * eps);
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::Natural: return "natural";
    case Family::Metric: return "metric";
    case Family::Custom: return "custom";
  }
  return "unknown";
}

Potential Potential::quadratic(const Mat& k) {
  if ((k - k.transpose()).norm() > 1e-12 * (1.0 + k.norm()))
    fail(ErrorKind::Validation, "quadratic potential matrix is not symmetric");
  Potential p;
  p.u = [k](const Vec& y) { return 0.5 * y.dot(k * y); };
  p.grad = [k](const Vec& y) -> Vec { return k * y; };
  p.hess = [k](const Vec&) -> Mat { return k; };
  p.hess_derivative = [k](const Vec&, const Vec&) -> Mat {
    return Mat::Zero(k.rows(), k.cols());
  };
  return p;
}

Potential Potential::polynomial(const Polynomial& q) {
  Potential p;
  p.u = [q](const Vec& y) { return q.value(y); };
  p.grad = [q](const Vec& y) { return q.gradient(y); };
  p.hess = [q](const Vec& y) { return q.hessian(y); };
  p.hess_derivative = [q](const Vec& y, const Vec& v) { return q.hessian_derivative(y, v); };
  return p;
}

Potential Potential::pendulum(int n) {
  Potential p;
  p.u = [](const Vec& y) { return -y.array().cos().sum(); };
  p.grad = [](const Vec& y) -> Vec { return y.array().sin().matrix(); };
  p.hess = [](const Vec& y) -> Mat { return Mat(y.array().cos().matrix().asDiagonal()); };
  p.hess_derivative = [](const Vec& y, const Vec& v) -> Mat {
    return Mat((-y.array().sin() * v.array()).matrix().asDiagonal());
  };
  (void)n;
  return p;
}

HamiltonianSystem::HamiltonianSystem(int n, Family family, Eval eval, HessDerivative third,
                                     std::string name)
    : n_(n), family_(family), eval_(std::move(eval)), third_(std::move(third)),
      name_(std::move(name)) {
  if (n < 1) fail(ErrorKind::Validation, "system dimension must be positive");
  if (!eval_) fail(ErrorKind::Validation, "system has no evaluator");
}

HamiltonianSystem HamiltonianSystem::natural(int n, const Potential& u, std::string name) {
  if (!u.u || !u.grad || !u.hess) fail(ErrorKind::Validation, "potential is missing callbacks");
  auto eval = [n, u](const Vec& z) {
    const Vec x = z.head(n), y = z.tail(n);
    PhaseJet j;
    j.h = 0.5 * x.squaredNorm() + u.u(y);
    j.grad.resize(2 * n);
    j.grad << x, u.grad(y);
    j.hess = Mat::Zero(2 * n, 2 * n);
    j.hess.topLeftCorner(n, n).setIdentity();
    j.hess.bottomRightCorner(n, n) = u.hess(y);
    return j;
  };
  HessDerivative third;
  if (u.hess_derivative)
    third = [n, u](const Vec& z, const Vec& v) {
      Mat d = Mat::Zero(2 * n, 2 * n);
      d.bottomRightCorner(n, n) = u.hess_derivative(z.tail(n), v.tail(n));
      return d;
    };
  return HamiltonianSystem(n, Family::Natural, eval, third, std::move(name));
}

HamiltonianSystem HamiltonianSystem::metric(const std::vector<Mat>& g, const Potential& u,
                                            std::string name) {
  if (g.empty()) fail(ErrorKind::Validation, "metric needs at least the constant coefficient");
  const int n = static_cast<int>(g[0].rows());
  if (static_cast<int>(g.size()) != n + 1 && g.size() != 1)
    fail(ErrorKind::Validation, "metric needs 1 or n + 1 coefficient matrices");
  for (const auto& m : g) {
    if (m.rows() != n || m.cols() != n) fail(ErrorKind::Validation, "metric coefficient shape");
    if ((m - m.transpose()).norm() > 1e-12 * (1.0 + m.norm()))
      fail(ErrorKind::Validation, "metric coefficient is not symmetric");
  }
  if (!u.u || !u.grad || !u.hess) fail(ErrorKind::Validation, "potential is missing callbacks");
  std::vector<Mat> gs = g;
  gs.resize(n + 1, Mat::Zero(n, n));
  auto eval = [n, gs, u](const Vec& z) {
    const Vec x = z.head(n), y = z.tail(n);
    Mat gy = gs[0];
    for (int k = 0; k < n; ++k) gy += y(k) * gs[k + 1];
    PhaseJet j;
    j.h = x.dot(gy * x) + u.u(y);
    Vec hy = u.grad(y);
    Mat hxy(n, n);
    for (int k = 0; k < n; ++k) {
      hy(k) += x.dot(gs[k + 1] * x);
      hxy.col(k) = 2.0 * gs[k + 1] * x;
    }
    j.grad.resize(2 * n);
    j.grad << 2.0 * gy * x, hy;
    j.hess.resize(2 * n, 2 * n);
    j.hess << 2.0 * gy, hxy, hxy.transpose(), u.hess(y);
    return j;
  };
  HessDerivative third;
  if (u.hess_derivative)
    third = [n, gs, u](const Vec& z, const Vec& v) {
      const Vec vx = v.head(n), vy = v.tail(n);
      Mat dxx = Mat::Zero(n, n), dxy(n, n);
      for (int k = 0; k < n; ++k) {
        dxx += 2.0 * vy(k) * gs[k + 1];
        dxy.col(k) = 2.0 * gs[k + 1] * vx;
      }
      Mat d(2 * n, 2 * n);
      d << dxx, dxy, dxy.transpose(), u.hess_derivative(z.tail(n), vy);
      return d;
    };
  return HamiltonianSystem(n, Family::Metric, eval, third, std::move(name));
}

HamiltonianSystem HamiltonianSystem::polynomial(int n, const Polynomial& h, std::string name) {
  if (h.vars() != 2 * n)
    fail(ErrorKind::Validation, "Hamiltonian polynomial must have 2n variables");
  auto eval = [h](const Vec& z) { return PhaseJet{h.value(z), h.gradient(z), h.hessian(z)}; };
  auto third = [h](const Vec& z, const Vec& v) { return h.hessian_derivative(z, v); };
  return HamiltonianSystem(n, Family::Custom, eval, third, std::move(name));
}

HamiltonianSystem HamiltonianSystem::free_particle(int n) {
  return natural(n, Potential::quadratic(Mat::Zero(n, n)), "free_particle");
}

HamiltonianSystem HamiltonianSystem::oscillator(int n, double frequency) {
  return natural(n, Potential::quadratic(frequency * frequency * Mat::Identity(n, n)),
                 "oscillator");
}

HamiltonianSystem HamiltonianSystem::inverted_oscillator(int n) {
  return natural(n, Potential::quadratic(-Mat::Identity(n, n)), "inverted_oscillator");
}

HamiltonianSystem HamiltonianSystem::quadratic_potential(const Mat& k) {
  return natural(static_cast<int>(k.rows()), Potential::quadratic(k), "quadratic");
}

HamiltonianSystem HamiltonianSystem::pendulum(int n) {
  return natural(n, Potential::pendulum(n), "pendulum");
}

PhaseJet HamiltonianSystem::eval(const Vec& z) const {
  check_point(z, n_);
  PhaseJet j = eval_(z);
  if (j.grad.size() != 2 * n_ || j.hess.rows() != 2 * n_ || j.hess.cols() != 2 * n_)
    fail(ErrorKind::Validation, "Hamiltonian callback returned wrong shapes");
  if ((j.hess - j.hess.transpose()).norm() > 1e-8 * (1.0 + j.hess.norm()))
    fail(ErrorKind::Validation, "Hamiltonian Hessian is not symmetric");
  return j;
}

Vec HamiltonianSystem::field(const Vec& z) const { return hamiltonian_field(eval(z).grad); }

Mat HamiltonianSystem::hessian_derivative(const Vec& z, const Vec& v) const {
  check_point(z, n_);
  check_point(v, n_);
  if (third_) return third_(z, v);
  return hessian_fd(*this, z, v);
}

Vec hamiltonian_field(const Vec& grad) {
  const Eigen::Index n = grad.size() / 2;
  Vec f(grad.size());
  f << -grad.tail(n), grad.head(n);
  return f;
}

Mat field_matrix(const Mat& hess) {
  const Eigen::Index n = hess.rows() / 2;
  Mat a(hess.rows(), hess.cols());
  a << -hess.bottomRows(n), hess.topRows(n);
  return a;
}

double VariationalFlow::symplectic_defect(std::size_t i) const {
  const MatL& g = matrices[i];
  const int n = static_cast<int>(g.rows() / 2);
  const MatL j = standard_form(n).cast<long double>();
  return static_cast<double>((g.transpose() * j * g - j).norm());
}

double VariationalFlow::max_symplectic_defect() const {
  double m = 0.0;
  for (std::size_t i = 0; i < matrices.size(); ++i) m = std::max(m, symplectic_defect(i));
  return m;
}

Trajectory flow(const HamiltonianSystem& sys, const Vec& z0, double t0, double t1, double step,
                const FlowOptions& opts) {
  check_point(z0, sys.n());
  if (!(step > 0.0) || !std::isfinite(step)) fail(ErrorKind::Validation, "step must be positive");
  if (!std::isfinite(t0) || !std::isfinite(t1)) fail(ErrorKind::Validation, "non-finite time");
  const long steps = std::max(1L, static_cast<long>(std::ceil(std::abs(t1 - t0) / step - 1e-9)));
  Trajectory tr;
  tr.step = (t1 - t0) / steps;
  tr.times.reserve(steps + 1);
  tr.states.reserve(steps + 1);
  tr.times.push_back(t0);
  tr.states.push_back(z0);
  tr.energies.push_back(sys.energy(z0));
  check_state(z0, t0, opts);
  for (long k = 1; k <= steps; ++k) {
    Vec z = rk4(sys, tr.states.back(), tr.step, nullptr).z;
    const double t = k == steps ? t1 : t0 + k * tr.step;
    check_state(z, t, opts);
    tr.energies.push_back(sys.energy(z));
    tr.energy_drift = std::max(tr.energy_drift, std::abs(tr.energies.back() - tr.energies[0]));
    tr.times.push_back(t);
    tr.states.push_back(std::move(z));
  }
  return tr;
}

Trajectory flow(const HamiltonianSystem& sys, const Vec& z0, double horizon, double step,
                const FlowOptions& opts) {
  return flow(sys, z0, 0.0, horizon, step, opts);
}

VariationalFlow variational_flow(const HamiltonianSystem& sys, const Trajectory& traj) {
  if (traj.states.empty()) fail(ErrorKind::Validation, "empty trajectory");
  VariationalFlow vf;
  vf.times = traj.times;
  vf.matrices.reserve(traj.states.size());
  vf.matrices.push_back(identity_l(2 * sys.n()));
  for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
    MatL g = rk4(sys, traj.states[k], traj.step, &vf.matrices.back()).gamma;
    if (!g.allFinite())
      fail(ErrorKind::BlowUp, "variational flow overflow at t = " + std::to_string(traj.times[k]));
    vf.matrices.push_back(std::move(g));
  }
  return vf;
}

DenseFlow::DenseFlow(const HamiltonianSystem& sys, const Vec& z0, double t_lo, double t_hi,
                     double step, const FlowOptions& opts)
    : sys_(sys), t_lo_(t_lo), t_hi_(t_hi) {
  if (!(t_lo <= 0.0 && t_hi >= 0.0 && t_hi > t_lo))
    fail(ErrorKind::Validation, "dense flow interval must contain 0");
  if (t_hi > 0.0) {
    fwd_ = flow(sys, z0, 0.0, t_hi, step, opts);
    fwd_var_ = variational_flow(sys, fwd_);
  }
  if (t_lo < 0.0) {
    bwd_ = flow(sys, z0, 0.0, t_lo, step, opts);
    bwd_var_ = variational_flow(sys, bwd_);
  }
}

namespace {

std::size_t grid_index(const Trajectory& tr, double t) {
  const long last = static_cast<long>(tr.times.size()) - 1;
  long k = static_cast<long>(std::floor((t - tr.times[0]) / tr.step));
  return static_cast<std::size_t>(std::clamp(k, 0L, std::max(0L, last - 1)));
}

}  // namespace

Vec DenseFlow::state(double t) const {
  if (t < t_lo_ || t > t_hi_) fail(ErrorKind::Validation, "time outside dense flow");
  const Trajectory& tr = t >= 0.0 || bwd_.states.empty() ? fwd_ : bwd_;
  if (tr.states.size() < 2) return tr.states.empty() ? bwd_.states[0] : tr.states[0];
  const std::size_t k = grid_index(tr, t);
  const double d = t - tr.times[k];
  if (d == 0.0) return tr.states[k];
  return rk4(sys_, tr.states[k], d, nullptr).z;
}

MatL DenseFlow::gamma(double t) const {
  if (t < t_lo_ || t > t_hi_) fail(ErrorKind::Validation, "time outside dense flow");
  const bool use_fwd = t >= 0.0 || bwd_.states.empty();
  const Trajectory& tr = use_fwd ? fwd_ : bwd_;
  const VariationalFlow& vf = use_fwd ? fwd_var_ : bwd_var_;
  if (tr.states.size() < 2) return identity_l(2 * sys_.n());
  const std::size_t k = grid_index(tr, t);
  const double d = t - tr.times[k];
  if (d == 0.0) return vf.matrices[k];
  return rk4(sys_, tr.states[k], d, &vf.matrices[k]).gamma;
}

namespace {

GrassmannCurve curve_from_flow(std::shared_ptr<const DenseFlow> df, int n, double horizon,
                               const CurveSettings& st) {
  MatL vertical = MatL::Zero(2 * n, n);
  vertical.topRows(n).setIdentity();
  return GrassmannCurve(
      SymplecticSpace::standard(n),
      [df, vertical](double t) -> Mat {
        return df->gamma(t).partialPivLu().solve(vertical).cast<double>();
      },
      0.0, horizon, st);
}

CurveSettings jacobi_settings(double horizon, double step, const JacobiOptions& opts) {
  CurveSettings st;
  st.fd_step = opts.fd_step > 0.0 ? opts.fd_step : 1e-3 * horizon;
  st.grid_points =
      opts.grid_points > 0 ? opts.grid_points
                           : std::max(401, static_cast<int>(std::ceil(horizon / 0.01)) + 1);
  // Room for the derivative curve's wider stencils at the ends.
  st.eval_margin = 40.0 * st.fd_step + 2.0 * step;
  return st;
}

}  // namespace

GrassmannCurve jacobi_curve(const HamiltonianSystem& sys, const Vec& z0, double horizon,
                            double step, const JacobiOptions& opts) {
  if (!(horizon > 0.0)) fail(ErrorKind::Validation, "horizon must be positive");
  const CurveSettings st = jacobi_settings(horizon, step, opts);
  auto df = std::make_shared<const DenseFlow>(sys, z0, -st.eval_margin, horizon + st.eval_margin,
                                              step, opts.flow);
  return curve_from_flow(df, sys.n(), horizon, st);
}

GrassmannCurve jacobi_curve(std::shared_ptr<const DenseFlow> df, double horizon,
                            const JacobiOptions& opts) {
  const double step = df->forward().step;
  const CurveSettings st = jacobi_settings(horizon, step, opts);
  if (df->t_lo() > -st.eval_margin || df->t_hi() < horizon + st.eval_margin)
    fail(ErrorKind::Validation, "dense flow does not cover the curve and its margin");
  const int n = static_cast<int>(df->forward().states[0].size() / 2);
  return curve_from_flow(std::move(df), n, horizon, st);
}

Vec Reduction::coordinates(const Vec& v) const {
  const Eigen::Index m = darboux.cols() / 2;
  const Mat j = standard_form(static_cast<int>(darboux.rows() / 2));
  Vec c(2 * m);
  // For a Darboux basis, v = sum a_i e_i + b_i f_i with a_i = omega(v, f_i)
  // and b_i = omega(e_i, v); the gamma component drops out.
  c.head(m) = -darboux.rightCols(m).transpose() * j * v;
  c.tail(m) = darboux.leftCols(m).transpose() * j * v;
  return c;
}

Mat Reduction::reduce(const Mat& lambda) const {
  const Eigen::Index n = lambda.cols();
  const Mat j = standard_form(static_cast<int>(lambda.rows() / 2));
  // gamma^angle = {v : omega(v, field) = 0}.
  const Mat constraint = (j * field).transpose() * lambda;
  const Mat k = lambda * null_space(constraint);
  Mat c(2 * (n - 1), k.cols());
  for (Eigen::Index i = 0; i < k.cols(); ++i) c.col(i) = coordinates(k.col(i));
  Eigen::JacobiSVD<Mat> svd(c, Eigen::ComputeThinU);
  return svd.matrixU().leftCols(n - 1);
}

Reduction energy_reduction(const HamiltonianSystem& sys, const Vec& z0) {
  const int n = sys.n();
  if (n < 2) fail(ErrorKind::ReductionRefused, "reduction by the energy needs n >= 2");
  const PhaseJet jet = sys.eval(z0);
  const double gn = jet.grad.norm();
  if (!(gn > 0.0)) fail(ErrorKind::ReductionRefused, "dH vanishes at the base point");
  if (jet.grad.head(n).norm() <= 1e-8 * gn)
    fail(ErrorKind::TangentFiber, "Hamiltonian vector is tangent to the fiber");
  const Mat j = standard_form(n);
  Reduction r;
  r.field = hamiltonian_field(jet.grad);
  r.dual = -jet.grad / (gn * gn);
  // W = skew-orthogonal of span(field, dual): a symplectic copy of the quotient.
  Mat cons(2, 2 * n);
  cons.row(0) = (j * r.field).transpose();
  cons.row(1) = (j * r.dual).transpose();
  const Mat bw = null_space(cons);
  Mat omega = bw.transpose() * j * bw;
  omega = 0.5 * (omega - omega.transpose());
  const SymplecticSpace ws(omega);
  // Reduced vertical first: the fiber vectors skew-orthogonal to the field,
  // projected into W along the field.
  Mat fiber = Mat::Zero(2 * n, n);
  fiber.topRows(n).setIdentity();
  const Mat kv = fiber * null_space((j * r.field).transpose() * fiber);
  Mat proj(2 * n, kv.cols());
  for (Eigen::Index i = 0; i < kv.cols(); ++i) {
    const Vec v = kv.col(i);
    proj.col(i) = v - v.dot(j * r.dual) * r.field;
  }
  const LagrangianFrame e(ws, bw.transpose() * proj);
  const Chart chart(e, canonical_complement(e));
  r.darboux = bw * chart.darboux();
  return r;
}

ReducedJacobi reduced_jacobi_curve(const HamiltonianSystem& sys, const Vec& z0, double horizon,
                                   double step, const JacobiOptions& opts) {
  Reduction red = energy_reduction(sys, z0);
  GrassmannCurve full = jacobi_curve(sys, z0, horizon, step, opts);
  auto shared_full = std::make_shared<const GrassmannCurve>(full);
  auto shared_red = std::make_shared<const Reduction>(red);
  CurveSettings st = full.settings();
  st.grid = full.grid();
  GrassmannCurve reduced(
      SymplecticSpace::standard(sys.n() - 1),
      [shared_full, shared_red](double t) { return shared_red->reduce(shared_full->columns(t)); },
      0.0, horizon, st);
  return {std::move(red), std::move(full), std::move(reduced)};
}

Mat connection_ode2(const SecondOrderField& field, const Vec& x, const Vec& y) {
  if (x.size() != field.n || y.size() != field.n)
    fail(ErrorKind::Validation, "second-order field point has wrong size");
  if (field.jac_x) return 0.5 * field.jac_x(x, y);
  Mat d(field.n, field.n);
  for (int k = 0; k < field.n; ++k) {
    const double h = 1e-6 * (1.0 + std::abs(x(k)));
    Vec xp = x, xm = x;
    xp(k) += h;
    xm(k) -= h;
    d.col(k) = (field.f(xp, y) - field.f(xm, y)) / (2.0 * h);
  }
  return 0.5 * d;
}

namespace {

Mat connection_from(const HamiltonianSystem& sys, const Vec& z, const PhaseJet& jet) {
  const int n = sys.n();
  const Mat hxx = jet.hess.topLeftCorner(n, n);
  const Mat hxy = jet.hess.topRightCorner(n, n);
  Eigen::JacobiSVD<Mat> svd(hxx);
  const auto& sv = svd.singularValues();
  if (!(sv(n - 1) > kRankTol * std::max(1.0, sv(0))))
    fail(ErrorKind::NotRegular, "Hxx is singular; the field is not regular");
  // {H, Hxx} is the derivative of Hxx along the field.
  const Mat bracket =
      sys.hessian_derivative(z, hamiltonian_field(jet.grad)).topLeftCorner(n, n);
  const Mat rhs = bracket - hxy * hxx - hxx * hxy.transpose();
  const auto lu = hxx.partialPivLu();
  const Mat left = lu.solve(rhs);
  return 0.5 * lu.solve(left.transpose()).transpose();
}

}  // namespace

Mat connection_hamiltonian(const HamiltonianSystem& sys, const Vec& z) {
  return connection_from(sys, z, sys.eval(z));
}

Mat curvature_operator_field(const HamiltonianSystem& sys, const Vec& z) {
  const int n = sys.n();
  const PhaseJet jet = sys.eval(z);
  const Mat c = connection_from(sys, z, jet);
  const Mat b = jet.hess.topLeftCorner(n, n);
  const Mat hxy = jet.hess.topRightCorner(n, n);
  const Mat hyy = jet.hess.bottomRightCorner(n, n);
  // Derivative of C along the field by central differences.
  const Vec v = hamiltonian_field(jet.grad);
  Mat cdot = Mat::Zero(n, n);
  if (v.norm() > 0.0) {
    const double eps = 1e-3 * (1.0 + z.norm()) / v.norm();
    cdot = (connection_hamiltonian(sys, z + eps * v) - connection_hamiltonian(sys, z - eps * v)) /
           (2.0 * eps);
  }
  // With a = -H_y and b = H_x the components of the field:
  // R = (C' - a_x C - a_y + C b_x C + C b_y) b_x.
  const Mat ax = -hxy.transpose(), ay = -hyy, by = hxy;
  return (cdot - ax * c - ay + c * b * c + c * by) * b;
}

MonotonicityReport monotonicity_test(const HamiltonianSystem& sys, const Trajectory& traj,
                                     double rank_tol) {
  const int n = sys.n();
  MonotonicityReport rep;
  bool pos = true, neg = true;
  rep.min_eigenvalue = std::numeric_limits<double>::infinity();
  rep.max_eigenvalue = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const Mat hxx = sys.eval(traj.states[i]).hess.topLeftCorner(n, n);
    const Inertia in = inertia(hxx, rank_tol);
    Eigen::SelfAdjointEigenSolver<Mat> es(hxx);
    rep.min_eigenvalue = std::min(rep.min_eigenvalue, es.eigenvalues()(0));
    rep.max_eigenvalue = std::max(rep.max_eigenvalue, es.eigenvalues()(n - 1));
    if (in.zero > 0) rep.regular = false;
    if (in.pos != n) pos = false;
    if (in.neg != n) neg = false;
    if (in.pos != n && in.neg != n) rep.indefinite.push_back(i);
    rep.samples.push_back(in);
  }
  rep.sign = pos ? 1 : (neg ? -1 : 0);
  return rep;
}

}  // namespace jacobi
