#include "jacobi/maslov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jacobi/kernels.hpp"

namespace jacobi {

namespace {

int triple_intersection_dim(const Mat& a, const Mat& b, const Mat& c, double tol) {
  const Eigen::Index d = a.rows(), n = a.cols();
  Mat m = Mat::Zero(2 * d, 3 * n);
  m.block(0, 0, d, n) = a;
  m.block(0, n, d, n) = -b;
  m.block(d, 0, d, n) = a;
  m.block(d, 2 * n, d, n) = -c;
  return static_cast<int>(null_space(m, tol).cols());
}

struct Samples {
  std::vector<double> t;
  std::vector<LagrangianFrame> f;
};

void refine(const GrassmannCurve& c, double tl, const LagrangianFrame& fl, double tr,
            const LagrangianFrame& fr, int depth, const MaslovOptions& opts, Samples& out) {
  // Neighbours closer than half the chart margin cannot straddle a complement
  // that both of them clear by the margin.
  const double limit = std::min(opts.refine_distance, 0.5 * opts.chart_margin);
  if (subspace_distance(fl.basis(), fr.basis()) <= limit) {
    out.t.push_back(tr);
    out.f.push_back(fr);
    return;
  }
  if (depth >= opts.max_depth)
    fail(ErrorKind::SubdivisionFailure, "curve moves too fast near t = " + std::to_string(tl));
  const double tm = 0.5 * (tl + tr);
  const LagrangianFrame fm = c.at(tm);
  refine(c, tl, fl, tm, fm, depth + 1, opts, out);
  refine(c, tm, fm, tr, fr, depth + 1, opts, out);
}

Samples sample_curve(const GrassmannCurve& c, double a, double b, const MaslovOptions& opts) {
  std::vector<double> ts{a};
  for (double g : c.grid())
    if (g > a && g < b) ts.push_back(g);
  ts.push_back(b);
  const auto frames = sample_frames(c, ts, opts.parallel ? Exec::Parallel : Exec::Serial);
  Samples out;
  out.t.push_back(ts[0]);
  out.f.push_back(frames[0]);
  for (std::size_t k = 0; k + 1 < ts.size(); ++k)
    refine(c, ts[k], frames[k], ts[k + 1], frames[k + 1], 0, opts, out);
  return out;
}

struct Piece {
  int i0, i1;
  Chart chart;
  std::vector<Mat> s;  // chart matrices at samples i0..i1
};

bool on_train(const LagrangianFrame& f, const LagrangianFrame& pi, double tol) {
  return intersection_dim(f, pi, tol) > 0;
}

int reach(const Samples& sm, int i, const LagrangianFrame& delta, double margin) {
  if (transversality_gap(delta, sm.f[i]) < margin) return i;
  int j = i;
  const int last = static_cast<int>(sm.t.size()) - 1;
  while (j < last && transversality_gap(delta, sm.f[j + 1]) >= margin) ++j;
  return j;
}

std::vector<Piece> cover(const Samples& sm, const LagrangianFrame& pi, const MaslovOptions& opts) {
  std::vector<Piece> pieces;
  const int last = static_cast<int>(sm.t.size()) - 1;
  const ComplementSearch schedule;
  const int scalar = 1 + 2 * schedule.scalar_candidates;
  const int total = complement_schedule_length(schedule);
  int i = 0;
  while (i < last) {
    int best = i;
    std::optional<LagrangianFrame> best_delta;
    for (int k = 0; k < total; ++k) {
      if (k == scalar && best > i) break;  // random candidates only as a fallback
      LagrangianFrame cand = complement_candidate(pi, k, schedule);
      const int j = reach(sm, i, cand, opts.chart_margin);
      if (j > best) {
        best = j;
        best_delta = std::move(cand);
        if (opts.prefer_first_chart || best == last) break;
      }
    }
    if (!best_delta)
      fail(ErrorKind::SubdivisionFailure,
           "no chart covers the curve beyond t = " + std::to_string(sm.t[i]));
    int end = best;
    if (end < last) {
      while (end > i && on_train(sm.f[end], pi, opts.rank_tol)) --end;
      if (end == i)
        fail(ErrorKind::SubdivisionFailure,
             "cannot place a piece boundary off the train near t = " + std::to_string(sm.t[i]));
    }
    Piece p{i, end, Chart(pi, *best_delta), {}};
    for (int k = i; k <= end; ++k) p.s.push_back(chart_coords(p.chart, sm.f[k], opts.rank_tol));
    pieces.push_back(std::move(p));
    i = end;
  }
  return pieces;
}

int monotone_direction(const std::vector<Piece>& pieces, int n, double tol) {
  bool inc = true, dec = true;
  for (const auto& p : pieces) {
    for (std::size_t k = 0; k + 1 < p.s.size(); ++k) {
      const Inertia d = inertia(p.s[k + 1] - p.s[k], tol);
      if (d.pos != n) inc = false;
      if (d.neg != n) dec = false;
      if (!inc && !dec) return 0;
    }
  }
  return inc ? 1 : (dec ? -1 : 0);
}

void check_range(const GrassmannCurve& c, double a, double b) {
  if (!(b > a) || !c.evaluable(a) || !c.evaluable(b))
    fail(ErrorKind::Validation, "index interval must be an increasing subinterval of the domain");
}

}  // namespace

int pair_index_doubled(const LagrangianFrame& pi, const LagrangianFrame& l0,
                       const LagrangianFrame& l1, double rank_tol) {
  const Mat& form = pi.space().form();
  const int n = pi.n();
  Mat both(2 * n, 2 * n);
  both << l0.basis(), l1.basis();
  // (a, b) with Z0 a + Z1 b in Pi, i.e. omega-orthogonal to Pi.
  const Mat k = null_space(pi.basis().transpose() * form * both, rank_tol);
  int ind_q = 0;
  if (k.cols() > 0) {
    const Mat m = l1.basis().transpose() * form * l0.basis();
    Mat g = Mat::Zero(2 * n, 2 * n);
    g.topRightCorner(n, n) = 0.5 * m.transpose();
    g.bottomLeftCorner(n, n) = 0.5 * m;
    // Frames are orthonormal, so the form has unit natural scale.
    ind_q = inertia(k.transpose() * g * k, rank_tol, form.norm()).neg;
  }
  const int d0 = intersection_dim(pi, l0, rank_tol);
  const int d1 = intersection_dim(pi, l1, rank_tol);
  const int d01 = triple_intersection_dim(pi.basis(), l0.basis(), l1.basis(), rank_tol);
  return 2 * ind_q + d0 + d1 - 2 * d01;
}

int pair_index(const LagrangianFrame& pi, const LagrangianFrame& l0, const LagrangianFrame& l1,
               double rank_tol) {
  const int d = pair_index_doubled(pi, l0, l1, rank_tol);
  if (d % 2 != 0) fail(ErrorKind::ParityError, "pair index is a half-integer");
  return d / 2;
}

IndexReport maslov_index(const GrassmannCurve& c, const LagrangianFrame& pi,
                         const MaslovOptions& opts) {
  return maslov_index(c, pi, c.t0(), c.t1(), opts);
}

IndexReport maslov_index(const GrassmannCurve& c, const LagrangianFrame& pi, double a, double b,
                         const MaslovOptions& opts) {
  check_range(c, a, b);
  const Samples sm = sample_curve(c, a, b, opts);
  if (on_train(sm.f.front(), pi, opts.rank_tol) || on_train(sm.f.back(), pi, opts.rank_tol))
    fail(ErrorKind::EndpointOnTrain, "curve endpoint meets the reference subspace");
  const auto pieces = cover(sm, pi, opts);

  IndexReport rep;
  rep.charts_used = static_cast<int>(pieces.size());
  rep.subdivision.push_back(sm.t.front());
  for (const auto& p : pieces) {
    rep.value += inertia(p.s.front(), opts.rank_tol).neg - inertia(p.s.back(), opts.rank_tol).neg;
    rep.subdivision.push_back(sm.t[p.i1]);
  }
  rep.monotone = monotone_direction(pieces, c.n(), opts.rank_tol);
  if (rep.monotone != 0) {
    int doubled = 0;
    for (const auto& p : pieces) {
      if (rep.monotone > 0)
        doubled += pair_index_doubled(pi, sm.f[p.i0], sm.f[p.i1], opts.rank_tol);
      else
        doubled -= pair_index_doubled(pi, sm.f[p.i1], sm.f[p.i0], opts.rank_tol);
    }
    if (doubled % 2 != 0) fail(ErrorKind::ParityError, "pair-index sum is a half-integer");
    rep.pair_index_sum = doubled / 2;
  }
  return rep;
}

std::vector<ConjugatePoint> conjugate_points(const GrassmannCurve& c, const LagrangianFrame& pi,
                                             const ConjugateOptions& opts) {
  return conjugate_points(c, pi, c.t0(), c.t1(), opts);
}

std::vector<ConjugatePoint> conjugate_points(const GrassmannCurve& c, const LagrangianFrame& pi,
                                             double a, double b, const ConjugateOptions& opts) {
  check_range(c, a, b);
  const MaslovOptions& mo = opts.maslov;
  const int n = c.n();

  // Monotonicity from the velocity form at interior samples. Definiteness is
  // judged relative to the form's own scale: a curve settling onto a fixed
  // subspace (inverted oscillator) has |S'| ~ e^{-2t} without being singular.
  std::vector<double> probe;
  const double pad = 2.0 * c.fd_step() * 1.0001;
  const double lo = std::max(a, c.t0() - c.eval_margin() + pad);
  const double hi = std::min(b, c.t1() + c.eval_margin() - pad);
  const int m = std::max(2, opts.monotone_samples);
  for (int i = 0; i < m; ++i) probe.push_back(lo + (hi - lo) * i / (m - 1));
  const auto vel = map_indices(
      probe.size(),
      [&](std::size_t i) {
        const LocalJet j = c.jet(probe[i], 1);
        return inertia(j.s1, mo.rank_tol);
      },
      mo.parallel ? Exec::Parallel : Exec::Serial);
  const bool inc = std::all_of(vel.begin(), vel.end(), [n](const Inertia& x) { return x.pos == n; });
  const bool dec = std::all_of(vel.begin(), vel.end(), [n](const Inertia& x) { return x.neg == n; });
  if (!inc && !dec) fail(ErrorKind::NotMonotone, "velocity form is not definite along the curve");

  Samples sm = sample_curve(c, a, b, mo);
  // Endpoint crossings are not interior; start and stop at samples off the train.
  int first = 0, last = static_cast<int>(sm.t.size()) - 1;
  while (first < last && on_train(sm.f[first], pi, mo.rank_tol)) ++first;
  while (last > first && on_train(sm.f[last], pi, mo.rank_tol)) --last;
  if (first >= last) return {};
  Samples inner;
  inner.t.assign(sm.t.begin() + first, sm.t.begin() + last + 1);
  inner.f.assign(sm.f.begin() + first, sm.f.begin() + last + 1);
  const auto pieces = cover(inner, pi, mo);

  const double tol = opts.time_tol * (b - a);
  std::vector<ConjugatePoint> out;
  for (const auto& p : pieces) {
    auto index_at = [&](double t) {
      return inertia(chart_coords(p.chart, c.columns(t), mo.rank_tol), mo.rank_tol).neg;
    };
    for (int k = p.i0; k < p.i1; ++k) {
      double ta = inner.t[k], tb = inner.t[k + 1];
      int ia = inertia(p.s[k - p.i0], mo.rank_tol).neg;
      const int ib_end = inertia(p.s[k + 1 - p.i0], mo.rank_tol).neg;
      // Peel off crossings one at a time; the index is monotone in t.
      while (ia != ib_end) {
        double l = ta, r = tb;
        int ir = ib_end;
        while (r - l > tol) {
          const double mid = 0.5 * (l + r);
          const int im = index_at(mid);
          if (im == ia) {
            l = mid;
          } else {
            r = mid;
            ir = im;
          }
        }
        out.push_back({0.5 * (l + r), std::abs(ir - ia)});
        ta = r;
        ia = ir;
      }
    }
  }
  return out;
}

int morse_index_regular_extremal(const GrassmannCurve& jc, const ConjugateOptions& opts) {
  const LagrangianFrame start = jc.at(jc.t0());
  if (intersection_dim(jc.at(jc.t1()), start, opts.maslov.rank_tol) > 0)
    fail(ErrorKind::DegenerateEndpoint, "final subspace meets the initial one");
  int total = 0;
  for (const auto& p : conjugate_points(jc, start, opts)) total += p.multiplicity;
  return total;
}

}  // namespace jacobi
