#include "jacobi/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace jacobi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::size_t> strided(std::size_t count, int samples) {
  std::vector<std::size_t> idx;
  if (count == 0) return idx;
  const std::size_t m = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(samples, 2)));
  for (std::size_t k = 0; k < m; ++k)
    idx.push_back(m == 1 ? 0 : (k * (count - 1) + (m - 1) / 2) / (m - 1));
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

std::vector<double> linspace(double a, double b, int count) {
  std::vector<double> ts(static_cast<std::size_t>(std::max(count, 2)));
  for (std::size_t i = 0; i < ts.size(); ++i)
    ts[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(ts.size() - 1);
  ts.back() = b;
  return ts;
}

double spectral_norm(const Mat& sym) {
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(sym), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

MonotonicityReport require_monotone(const HamiltonianSystem& sys, const Trajectory& traj,
                                    double rank_tol) {
  MonotonicityReport rep = monotonicity_test(sys, traj, rank_tol);
  if (rep.sign == 0)
    fail(ErrorKind::NotMonotone, "Hxx is not definite along the orbit (Legendre condition fails)");
  return rep;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

CurvatureSamples sample_field_curvature(const HamiltonianSystem& sys, const Trajectory& traj,
                                        int samples, Exec exec) {
  struct Row {
    Vec spectrum;
    double mean;
    double hess;
  };
  const auto idx = strided(traj.states.size(), samples);
  const int n = sys.n();
  const auto rows = map_indices(
      idx.size(),
      [&](std::size_t k) {
        const Vec& z = traj.states[idx[k]];
        const Mat r = curvature_operator_field(sys, z);
        return Row{CurveOperator{r, Mat()}.spectrum(), r.trace() / n,
                   spectral_norm(sys.eval(z).hess)};
      },
      exec);
  CurvatureSamples out;
  out.max_eig = -kInf;
  out.min_eig = kInf;
  out.min_mean = kInf;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    out.times.push_back(traj.times[idx[k]]);
    out.spectra.push_back(rows[k].spectrum);
    out.max_eig = std::max(out.max_eig, rows[k].spectrum.maxCoeff());
    out.min_eig = std::min(out.min_eig, rows[k].spectrum.minCoeff());
    out.min_mean = std::min(out.min_mean, rows[k].mean);
    out.hess_norm = std::max(out.hess_norm, rows[k].hess);
  }
  return out;
}

ComparisonReport comparison_check(const HamiltonianSystem& sys, const Vec& z0, double horizon,
                                  double step, const ComparisonOptions& opts) {
  if (!(horizon > 0)) fail(ErrorKind::Validation, "horizon must be positive");
  if (opts.base_times < 1) fail(ErrorKind::Validation, "need at least one base time");
  const Trajectory traj = flow(sys, z0, horizon, step, opts.base.jacobi.flow);
  require_monotone(sys, traj, opts.base.rank_tol);
  const GrassmannCurve jc = jacobi_curve(sys, z0, horizon, step, opts.base.jacobi);

  ComparisonReport rep;
  rep.curvature = sample_field_curvature(sys, traj, opts.base.curvature_samples, opts.base.exec);
  rep.eig_upper = rep.curvature.max_eig;
  rep.trace_lower = rep.curvature.min_mean;
  rep.bound_gap = rep.eig_upper > 0 ? std::numbers::pi / std::sqrt(rep.eig_upper) : kInf;
  rep.bound_hit = rep.trace_lower > 0 ? std::numbers::pi / std::sqrt(rep.trace_lower) : kInf;

  for (int k = 0; k < opts.base_times; ++k)
    rep.base_times.push_back(horizon * k / opts.base_times);
  const auto per_base = map_indices(
      rep.base_times.size(),
      [&](std::size_t k) {
        const double s = rep.base_times[k];
        return conjugate_points(jc, jc.at(s), s, horizon, opts.base.conjugate);
      },
      opts.base.exec);
  rep.conjugate = per_base.front();
  rep.min_gap = kInf;
  for (std::size_t k = 0; k < per_base.size(); ++k) {
    const double s = rep.base_times[k];
    const auto& pts = per_base[k];
    const double first = pts.empty() ? kInf : pts.front().t - s;
    double prev = s, longest = 0.0;
    for (const auto& p : pts) {
      longest = std::max(longest, p.t - prev);
      prev = p.t;
    }
    longest = std::max(longest, horizon - prev);
    rep.first_gap.push_back(first);
    rep.longest_free.push_back(longest);
    rep.min_gap = std::min(rep.min_gap, first);
    // A free stretch only violates the window bound when a full window fits.
    if (std::isfinite(rep.bound_hit) && longest > rep.bound_hit + step)
      rep.window_bound_holds = false;
  }
  rep.gap_bound_holds = rep.min_gap >= rep.bound_gap - step;
  return rep;
}

EquilibriumReport analyze_equilibrium(const HamiltonianSystem& sys, const Vec& guess,
                                      double rank_tol) {
  Vec z = guess;
  bool converged = false;
  for (int it = 0; it < 50 && !converged; ++it) {
    const PhaseJet jet = sys.eval(z);
    if (jet.grad.norm() <= 1e-14 * (1.0 + z.norm())) {
      converged = true;
      break;
    }
    Eigen::FullPivLU<Mat> lu(jet.hess);
    if (!lu.isInvertible()) fail(ErrorKind::NotRegular, "Hessian is singular at the equilibrium");
    const Vec dz = lu.solve(jet.grad);
    z -= dz;
    if (dz.norm() <= 1e-15 * (1.0 + z.norm())) converged = true;
  }
  if (!converged) fail(ErrorKind::NoConvergence, "equilibrium Newton iteration did not converge");

  EquilibriumReport rep;
  rep.z = z;
  const Mat hess = sys.eval(z).hess;
  const Mat a = field_matrix(hess);
  Eigen::EigenSolver<Mat> es(a);
  const auto& ev = es.eigenvalues();
  rep.min_real_gap = kInf;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    rep.eigenvalues.push_back(ev(i));
    rep.min_real_gap = std::min(rep.min_real_gap, std::abs(ev(i).real()));
  }
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(), [](auto x, auto y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  const double tol = rank_tol * (1.0 + spectral_norm(hess));
  rep.hyperbolic = rep.min_real_gap > tol;
  Mat cols(a.rows(), 0);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i).real() >= -tol) continue;
    const Eigen::VectorXcd v = es.eigenvectors().col(i);
    cols.conservativeResize(Eigen::NoChange, cols.cols() + 1);
    cols.rightCols(1) = v.real();
    if (ev(i).imag() != 0.0) {
      cols.conservativeResize(Eigen::NoChange, cols.cols() + 1);
      cols.rightCols(1) = v.imag();
    }
  }
  rep.stable_basis = cols.cols() > 0 ? orthonormalize(cols) : cols;
  return rep;
}

std::string to_string(CertificateKind k) {
  return k == CertificateKind::ReducedFlow ? "reduced_flow" : "equilibrium_set";
}

HyperbolicityCertificate certify_negative_curvature(const HamiltonianSystem& sys, const Vec& z0,
                                                    double horizon, double step, bool reduced,
                                                    const AnalysisOptions& opts) {
  HyperbolicityCertificate cert;
  cert.kind = reduced ? CertificateKind::ReducedFlow : CertificateKind::EquilibriumSet;
  const Trajectory traj = flow(sys, z0, horizon, step, opts.jacobi.flow);

  std::vector<double> times;
  std::vector<Vec> spectra;
  double hess_norm = 0.0;
  if (reduced) {
    const ReducedJacobi rj = reduced_jacobi_curve(sys, z0, horizon, step, opts.jacobi);
    times = linspace(0.0, horizon, opts.curvature_samples);
    spectra = curvature_spectra(rj.reduced, times, opts.exec);
    for (std::size_t i : strided(traj.states.size(), opts.curvature_samples))
      hess_norm = std::max(hess_norm, spectral_norm(sys.eval(traj.states[i]).hess));
  } else {
    CurvatureSamples cs = sample_field_curvature(sys, traj, opts.curvature_samples, opts.exec);
    times = std::move(cs.times);
    spectra = std::move(cs.spectra);
    hess_norm = cs.hess_norm;
  }
  cert.samples = times.size();
  cert.times = times;
  for (const Vec& sp : spectra) cert.max_eigs.push_back(sp.maxCoeff());
  cert.margin = std::max(1e-6 * (1.0 + hess_norm), opts.rank_tol);
  cert.max_eig = -kInf;
  std::size_t worst = 0;
  for (std::size_t i = 0; i < spectra.size(); ++i)
    if (spectra[i].maxCoeff() > cert.max_eig) {
      cert.max_eig = spectra[i].maxCoeff();
      worst = i;
    }
  bool ok = cert.max_eig < -cert.margin;
  if (!ok)
    cert.diagnostics.push_back("curvature eigenvalue " + fmt(cert.max_eig) + " at t = " +
                               fmt(times[worst]) + " is not below -" + fmt(cert.margin));

  if (!reduced) {
    for (const Vec& z : traj.states) {
      if (sys.field(z).norm() >= 1e-8 * (1.0 + z.norm())) continue;
      bool known = false;
      for (const auto& e : cert.equilibria)
        known = known || (e.z - z).norm() <= 1e-6 * (1.0 + z.norm());
      if (known) continue;
      cert.equilibria.push_back(analyze_equilibrium(sys, z, opts.rank_tol));
      const auto& e = cert.equilibria.back();
      cert.alpha_estimate = std::min(cert.alpha_estimate.value_or(kInf), e.min_real_gap);
      if (!e.hyperbolic) {
        ok = false;
        cert.diagnostics.push_back("equilibrium with linearization spectrum on the imaginary axis");
      }
    }
  }
  cert.verdict = ok;
  return cert;
}

DecayFit fit_decay_rate(const Trajectory& traj, const Vec& target, double floor) {
  std::vector<double> ts, ls;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const double d = (traj.states[i] - target).norm();
    if (d > floor) {
      ts.push_back(traj.times[i]);
      ls.push_back(std::log(d));
    }
  }
  if (ts.size() < 2) fail(ErrorKind::Validation, "too few points for a decay fit");
  const auto m = static_cast<Eigen::Index>(ts.size());
  Mat a(m, 2);
  Vec b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = ts[i];
    b(i) = ls[i];
  }
  const Vec coef = a.colPivHouseholderQr().solve(b);
  DecayFit fit;
  fit.rate = -coef(1);
  fit.residual = std::sqrt((a * coef - b).squaredNorm() / static_cast<double>(m));
  fit.points = ts.size();
  return fit;
}

MorseRecord morse_pipeline(const HamiltonianSystem& sys, const Vec& z0, double horizon,
                           double step, const MorseOptions& opts) {
  if (!(horizon > 0)) fail(ErrorKind::Validation, "horizon must be positive");
  MorseRecord rec;
  const Trajectory traj = flow(sys, z0, horizon, step, opts.base.jacobi.flow);
  rec.legendre = require_monotone(sys, traj, opts.base.rank_tol);
  const GrassmannCurve jc = jacobi_curve(sys, z0, horizon, step, opts.base.jacobi);
  rec.index = morse_index_regular_extremal(jc, opts.base.conjugate);
  const LagrangianFrame start = jc.at(0.0);
  rec.conjugate_points = conjugate_points(jc, start, opts.base.conjugate);
  const double first = rec.conjugate_points.empty() ? horizon : rec.conjugate_points.front().t;
  rec.trim = opts.trim > 0 ? opts.trim : 0.1 * first;
  if (!(rec.trim < first))
    fail(ErrorKind::Validation, "trim must lie before the first conjugate time");
  rec.trimmed_maslov = maslov_index(jc, start, rec.trim, horizon, opts.base.conjugate.maslov).value;
  rec.index_from_maslov = -rec.legendre.sign * rec.trimmed_maslov;
  rec.agree = rec.index_from_maslov == rec.index;
  return rec;
}

ReductionBoundReport reduction_bounds(const HamiltonianSystem& sys, const Vec& z0, double horizon,
                                      double step, const ReductionBoundOptions& opts) {
  if (!(opts.trim > 0 && opts.trim < horizon))
    fail(ErrorKind::Validation, "trim must lie inside (0, horizon)");
  const Trajectory traj = flow(sys, z0, horizon, step, opts.base.jacobi.flow);
  const MonotonicityReport mono = require_monotone(sys, traj, opts.base.rank_tol);
  const int n = sys.n();
  // gamma lies in Lambda(t) exactly when the field at z_t is vertical.
  double closest = kInf;
  for (const Vec& z : traj.states) {
    const PhaseJet jet = sys.eval(z);
    closest = std::min(closest, jet.grad.head(n).norm() / jet.grad.norm());
  }
  if (!(closest > 1e-8))
    fail(ErrorKind::TangentFiber, "the Hamiltonian direction enters Lambda(t) along the orbit");
  const ReducedJacobi rj = reduced_jacobi_curve(sys, z0, horizon, step, opts.base.jacobi);
  // Jacobi curves decrease when Hxx > 0; reversing time makes them increasing,
  // which flips Maslov indices and curvature forms.
  const int flip = -mono.sign;
  const auto& red = rj.reduction;

  ReductionBoundReport rep;
  rep.min_transversality = closest;
  const LagrangianFrame pi = LagrangianFrame::vertical(rj.full.space());
  const LagrangianFrame pi_red(rj.reduced.space(), red.reduce(pi.basis()));
  const auto& mo = opts.base.conjugate.maslov;
  rep.mu_full = flip * maslov_index(rj.full, pi, opts.trim, horizon, mo).value;
  rep.mu_reduced = flip * maslov_index(rj.reduced, pi_red, opts.trim, horizon, mo).value;
  rep.index_bound_holds = rep.mu_reduced - rep.mu_full >= 0 && rep.mu_reduced - rep.mu_full <= 1;

  rep.sample_times = linspace(opts.trim, horizon, opts.samples);
  const Mat j = rj.full.space().form();
  struct Pair {
    Mat full, reduced;
  };
  auto forms_at = [&](double t, double h) {
    // Shared basis: Lambda(t) ∩ field^angle, and its image in the quotient.
    const Mat lam = rj.full.columns(t);
    const Mat k = orthonormalize(lam * null_space((j * red.field).transpose() * lam));
    Mat kr(2 * (n - 1), k.cols());
    for (Eigen::Index c = 0; c < k.cols(); ++c) kr.col(c) = red.coordinates(k.col(c));
    const QuadraticForm qf = curvature_form_at(rj.full, t, h);
    const QuadraticForm qr = curvature_form_at(rj.reduced, t, h);
    const Mat tf = qf.basis.colPivHouseholderQr().solve(k);
    const Mat tr = qr.basis.colPivHouseholderQr().solve(kr);
    return Pair{symmetrize(tf.transpose() * qf.matrix * tf),
                symmetrize(tr.transpose() * qr.matrix * tr)};
  };
  const auto pairs = map_indices(
      rep.sample_times.size(),
      [&](std::size_t i) {
        // Near a point where gamma almost lies in Lambda(t) the reduced curve
        // turns quickly; halve the stencil until the forms settle.
        double h = rj.full.fd_step();
        Pair cur = forms_at(rep.sample_times[i], h);
        double last = kInf;
        for (int r = 0; r < 5; ++r) {
          Pair next = forms_at(rep.sample_times[i], 0.5 * h);
          const double size = 1.0 + next.full.norm() + next.reduced.norm();
          const double change = (next.full - cur.full).norm() + (next.reduced - cur.reduced).norm();
          if (change > last) break;  // rounding noise has taken over
          cur = std::move(next);
          h *= 0.5;
          last = change;
          if (change <= 1e-6 * size) break;
        }
        return cur;
      },
      opts.base.exec);
  rep.scale = 1.0;
  for (const auto& p : pairs)
    rep.scale = std::max({rep.scale, p.full.cwiseAbs().maxCoeff(), p.reduced.cwiseAbs().maxCoeff()});
  rep.min_dominance = kInf;
  for (const auto& p : pairs) {
    const Mat d = flip * (p.reduced - p.full);
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(d), Eigen::EigenvaluesOnly);
    const Vec ev = es.eigenvalues();
    rep.differences.push_back(ev);
    int rank = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
      if (std::abs(ev(i)) > opts.tol * rep.scale) ++rank;
    rep.max_rank = std::max(rep.max_rank, rank);
    rep.min_dominance = std::min(rep.min_dominance, ev.minCoeff() / rep.scale);
  }
  rep.rank_bound_holds = rep.max_rank <= 1;
  rep.dominance_holds = rep.min_dominance >= -opts.tol;
  return rep;
}

}  // namespace jacobi
