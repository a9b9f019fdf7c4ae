#include <gtest/gtest.h>

#include <cmath>

#include "curve_fixtures.hpp"
#include "jacobi/maslov.hpp"
#include "jacobi/random.hpp"

using namespace jacobi;
using namespace jacobi::testing;

namespace {

// Lambda(t) = span (cos(w t) I, -w sin(w t) I): the Jacobi curve of the
// isotropic oscillator with frequency w, chart matrix -w tan(w t).
GrassmannCurve oscillator_curve(int n, double w, double t0, double t1, int grid = 2001) {
  CurveSettings st;
  st.grid_points = grid;
  st.eval_margin = 1.0;
  return GrassmannCurve(
      SymplecticSpace::standard(n),
      [n, w](double t) {
        Mat z(2 * n, n);
        z << std::cos(w * t) * Mat::Identity(n, n), -w * std::sin(w * t) * Mat::Identity(n, n);
        return z;
      },
      t0, t1, st);
}

Mat diag_curve(int n, double t) {
  Mat s = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) s(i, i) = t - (i + 1);
  return s;
}

}  // namespace

TEST(PairIndex, ChartCaseMatchesInverseDifference) {
  Rng rng(41);
  for (int n = 1; n <= 4; ++n) {
    const auto sp = SymplecticSpace::standard(n);
    const Chart chart(LagrangianFrame::vertical(sp), LagrangianFrame::horizontal(sp));
    for (int k = 0; k < 100; ++k) {
      const Mat s0 = random_symmetric(rng, n), s1 = random_symmetric(rng, n);
      const int expect = inertia(s0.inverse() - s1.inverse()).neg;
      EXPECT_EQ(pair_index(chart.pi(), frame_from_chart(chart, s0), frame_from_chart(chart, s1)),
                expect);
    }
  }
}

TEST(PairIndex, EqualSubspacesGiveZero) {
  Rng rng(42);
  const auto sp = SymplecticSpace::standard(3);
  for (int k = 0; k < 20; ++k) {
    const auto pi = random_lagrangian(rng, sp);
    const auto l = random_lagrangian(rng, sp);
    EXPECT_EQ(pair_index_doubled(pi, l, l), 0);
  }
}

TEST(PairIndex, HalfIntegerWhenOneLegIsPi) {
  const auto sp = SymplecticSpace::standard(1);
  const auto pi = LagrangianFrame::vertical(sp);
  Mat g(2, 1);
  g << 1, 2;
  const LagrangianFrame l1(sp, g);
  EXPECT_EQ(pair_index_doubled(pi, pi, l1), 1);
  EXPECT_THROW(pair_index(pi, pi, l1), Error);
}

TEST(PairIndex, ExerciseIdentityOnOrderedPairs) {
  Rng rng(43);
  int checked = 0;
  while (checked < 300) {
    const int n = 1 + checked % 4;
    const Mat s0 = random_symmetric(rng, n);
    const Mat b = random_matrix(rng, n, 1 + checked % n);
    const Mat s1 = s0 + b * b.transpose();
    if (inertia(s0).zero || inertia(s1).zero) continue;
    EXPECT_EQ(inertia(s0).neg - inertia(s1).neg, inertia(s0.inverse() - s1.inverse()).neg);
    ++checked;
  }
}

TEST(PairIndex, TriangleInequality) {
  Rng rng(44);
  for (int k = 0; k < 300; ++k) {
    const auto sp = SymplecticSpace::standard(1 + k % 4);
    const auto pi = random_lagrangian(rng, sp);
    const auto a = random_lagrangian(rng, sp);
    const auto b = random_lagrangian(rng, sp);
    const auto c = random_lagrangian(rng, sp);
    EXPECT_LE(pair_index_doubled(pi, a, c), pair_index_doubled(pi, a, b) + pair_index_doubled(pi, b, c));
  }
}

TEST(Maslov, DiagonalSampleCurve) {
  for (int n = 1; n <= 5; ++n) {
    const auto c = chart_curve(n, [n](double t) { return diag_curve(n, t); }, 0.0, n + 1.0);
    const auto pi = LagrangianFrame::vertical(c.space());
    const auto rep = maslov_index(c, pi);
    EXPECT_EQ(rep.value, n);
    EXPECT_EQ(rep.monotone, 1);
    ASSERT_TRUE(rep.pair_index_sum.has_value());
    EXPECT_EQ(*rep.pair_index_sum, n);
    const auto pts = conjugate_points(c, pi);
    ASSERT_EQ(static_cast<int>(pts.size()), n);
    for (int i = 0; i < n; ++i) {
      EXPECT_NEAR(pts[i].t, i + 1.0, 1e-8);
      EXPECT_EQ(pts[i].multiplicity, 1);
    }
  }
}

TEST(Maslov, ConstantCurveIsZero) {
  Mat s(2, 2);
  s << 1, 0.5, 0.5, 2;
  const auto c = chart_curve(2, [s](double) { return s; }, 0, 1);
  EXPECT_EQ(maslov_index(c, LagrangianFrame::vertical(c.space())).value, 0);
}

TEST(Maslov, EndpointOnTrainIsRejected) {
  const auto c = chart_curve(1, [](double t) { return Mat::Constant(1, 1, t); }, 0, 1);
  try {
    maslov_index(c, LagrangianFrame::vertical(c.space()));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EndpointOnTrain);
  }
}

TEST(Maslov, OscillatorJacobiCurveCountsHalfTurns) {
  // Decreasing curve: the index is minus the number of crossings.
  const double eps = 0.1;
  for (int k = 1; k <= 3; ++k) {
    const auto c = oscillator_curve(1, 1.0, eps, k * M_PI + eps);
    const auto rep = maslov_index(c, LagrangianFrame::vertical(c.space()));
    EXPECT_EQ(rep.value, -k);
    EXPECT_EQ(rep.monotone, -1);
    ASSERT_TRUE(rep.pair_index_sum.has_value());
    EXPECT_EQ(*rep.pair_index_sum, -k);
    EXPECT_GE(rep.charts_used, 2);
  }
}

TEST(Maslov, ChartScheduleDoesNotMatter) {
  Rng rng(45);
  const auto c = oscillator_curve(2, 1.3, 0.2, 9.0);
  const auto pi = random_lagrangian(rng, c.space());
  MaslovOptions first;
  first.prefer_first_chart = true;
  const auto a = maslov_index(c, pi);
  const auto b = maslov_index(c, pi, first);
  EXPECT_EQ(a.value, b.value);
}

TEST(Maslov, ConcatenationAdditivity) {
  const auto c = oscillator_curve(2, 1.0, 0.1, 10.0);
  const auto pi = LagrangianFrame::vertical(c.space());
  const double mid = 5.0;
  EXPECT_EQ(maslov_index(c, pi, 0.1, mid).value + maslov_index(c, pi, mid, 10.0).value,
            maslov_index(c, pi).value);
}

TEST(Maslov, SmallSymplecticPerturbationKeepsIndex) {
  Rng rng(46);
  const int n = 2;
  const auto base = oscillator_curve(n, 1.0, 0.3, 8.0);
  const auto pi = LagrangianFrame::vertical(base.space());
  const int reference = maslov_index(base, pi).value;
  for (int k = 0; k < 5; ++k) {
    Mat upper = Mat::Identity(2 * n, 2 * n), lower = Mat::Identity(2 * n, 2 * n);
    upper.topRightCorner(n, n) = 3e-4 * random_symmetric(rng, n);
    lower.bottomLeftCorner(n, n) = 3e-4 * random_symmetric(rng, n);
    const Mat t = upper * lower;
    const GrassmannCurve moved(base.space(), [base, t](double s) { return Mat(t * base.columns(s)); },
                               base.t0(), base.t1(), base.settings());
    EXPECT_EQ(maslov_index(moved, pi).value, reference);
  }
}

TEST(Maslov, NonMonotoneCurveUsesChartsOnly) {
  // S(t) = (t - 1)(t - 3) dips below zero and returns.
  const auto c = chart_curve(1, [](double t) { return Mat::Constant(1, 1, (t - 1) * (t - 3)); }, 0, 4);
  const auto rep = maslov_index(c, LagrangianFrame::vertical(c.space()));
  EXPECT_EQ(rep.value, 0);
  EXPECT_EQ(rep.monotone, 0);
  EXPECT_FALSE(rep.pair_index_sum.has_value());
  const auto half = maslov_index(c, LagrangianFrame::vertical(c.space()), 0.0, 2.0);
  EXPECT_EQ(half.value, -1);
}

TEST(Maslov, SimpleMonotonePieceEqualsPairIndex) {
  Rng rng(47);
  for (int k = 0; k < 10; ++k) {
    const auto poly = random_cubic_curve(rng, 3, true);
    const auto c = chart_curve(3, as_function(poly), 0.0, 0.5);
    const auto pi = random_lagrangian(rng, c.space());
    const auto rep = maslov_index(c, pi);
    EXPECT_EQ(rep.value, pair_index(pi, c.at(0.0), c.at(0.5)));
  }
}

TEST(ConjugatePoints, OscillatorCrossings) {
  const auto c = oscillator_curve(1, 1.0, 0.0, 3.5 * M_PI);
  const auto pts = conjugate_points(c, LagrangianFrame::vertical(c.space()));
  ASSERT_EQ(pts.size(), 3u);
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(pts[k].t, (k + 1) * M_PI, 1e-8);
    EXPECT_EQ(pts[k].multiplicity, 1);
  }
}

TEST(ConjugatePoints, SpacingForConstantCurvature) {
  const double c2 = 2.5;
  const auto c = oscillator_curve(1, std::sqrt(c2), 0.0, 10.0);
  const auto pts = conjugate_points(c, LagrangianFrame::vertical(c.space()));
  ASSERT_GE(pts.size(), 3u);
  for (std::size_t k = 0; k + 1 < pts.size(); ++k)
    EXPECT_NEAR(pts[k + 1].t - pts[k].t, M_PI / std::sqrt(c2), 1e-8);
}

TEST(ConjugatePoints, IsotropicMultiplicity) {
  const auto c = oscillator_curve(3, 1.0, 0.0, 1.5 * M_PI);
  const auto pts = conjugate_points(c, LagrangianFrame::vertical(c.space()));
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0].multiplicity, 3);
}

TEST(ConjugatePoints, FreeParticleHasNone) {
  const auto c = chart_curve(2, [](double t) { return Mat(-t * Mat::Identity(2, 2)); }, 0, 5);
  EXPECT_TRUE(conjugate_points(c, LagrangianFrame::vertical(c.space())).empty());
}

TEST(ConjugatePoints, SumMatchesMaslovForMonotoneCurves) {
  Rng rng(48);
  for (int k = 0; k < 5; ++k) {
    const auto c = oscillator_curve(2, 0.7 + 0.2 * k, 0.05, 9.0);
    const auto pi = random_lagrangian(rng, c.space());
    int total = 0;
    for (const auto& p : conjugate_points(c, pi)) total += p.multiplicity;
    EXPECT_EQ(total, -maslov_index(c, pi).value);
  }
}

TEST(ConjugatePoints, RejectsNonMonotone) {
  const auto c = chart_curve(1, [](double t) { return Mat::Constant(1, 1, (t - 1) * (t - 3)); }, 0, 4);
  try {
    conjugate_points(c, LagrangianFrame::vertical(c.space()));
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.kind() == ErrorKind::NotMonotone || e.kind() == ErrorKind::NotRegular);
  }
}

TEST(Morse, OscillatorHorizons) {
  const double h[] = {0.5 * M_PI, 1.5 * M_PI, 2.5 * M_PI};
  for (int k = 0; k < 3; ++k)
    EXPECT_EQ(morse_index_regular_extremal(oscillator_curve(1, 1.0, 0.0, h[k])), k);
  for (int n = 1; n <= 3; ++n)
    EXPECT_EQ(morse_index_regular_extremal(oscillator_curve(n, 1.0, 0.0, 1.5 * M_PI)), n);
  const auto free = chart_curve(2, [](double t) { return Mat(-t * Mat::Identity(2, 2)); }, 0, 7);
  EXPECT_EQ(morse_index_regular_extremal(free), 0);
}

TEST(Morse, DegenerateEndpoint) {
  try {
    morse_index_regular_extremal(oscillator_curve(1, 1.0, 0.0, M_PI));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateEndpoint);
  }
}
