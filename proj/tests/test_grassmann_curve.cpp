#include <gtest/gtest.h>

#include <cmath>

#include "jacobi/grassmann_curve.hpp"
#include "jacobi/kernels.hpp"
#include "jacobi/random.hpp"
#include "curve_fixtures.hpp"

using namespace jacobi;
using namespace jacobi::testing;

TEST(VelocityForm, LinearCurveGivesIdentity) {
  const auto c = chart_curve(3, [](double t) { return Mat(t * Mat::Identity(3, 3)); }, -1, 1);
  const auto q = velocity_form(c, 0.2);
  EXPECT_LT((q.matrix - Mat::Identity(3, 3)).norm(), 1e-9);
}

TEST(VelocityForm, MatchesAnalyticDerivative) {
  Rng rng(21);
  for (int k = 0; k < 10; ++k) {
    const auto poly = random_cubic_curve(rng, 3, false);
    const auto c = chart_curve(3, as_function(poly), -1, 2);
    const auto q = velocity_form(c, 0.4);
    EXPECT_LT((q.matrix - poly.s1(0.4)).norm(), 1e-8 * (1 + poly.s1(0.4).norm()));
  }
}

TEST(Curvature, TangentCurveHasUnitCurvature) {
  for (double sign : {1.0, -1.0}) {
    const auto c = chart_curve(1, [sign](double t) { return Mat::Constant(1, 1, sign * std::tan(t)); },
                               -1.2, 1.2);
    for (double t : {-0.7, 0.0, 0.3, 0.9})
      EXPECT_NEAR(curvature(c, t).matrix(0, 0), 1.0, 1e-7) << "t=" << t;
  }
}

TEST(Curvature, LinearCurveIsFlat) {
  const auto c = chart_curve(2, [](double t) { return Mat(t * Mat::Identity(2, 2)); }, -1, 1);
  EXPECT_LT(curvature(c, 0.1).matrix.norm(), 1e-6);
}

TEST(Curvature, SchwartzianOfScaledTangent) {
  // S = diag(tan t, tan 2t): the scalar Schwartzian gives diag(1, 4).
  const auto c = chart_curve(
      2,
      [](double t) {
        Mat s = Mat::Zero(2, 2);
        s(0, 0) = std::tan(t);
        s(1, 1) = std::tan(2 * t);
        return s;
      },
      -0.6, 0.6);
  const Vec spec = curvature(c, 0.2).spectrum();
  EXPECT_NEAR(spec(0), 1.0, 1e-6);
  EXPECT_NEAR(spec(1), 4.0, 1e-6);
}

TEST(Curvature, MatchesClosedFormOnPolynomialCurves) {
  Rng rng(22);
  for (int k = 0; k < 10; ++k) {
    const auto poly = random_cubic_curve(rng, 3, true);
    const auto c = chart_curve(3, as_function(poly), -1, 2);
    const double t = 0.5;
    const Mat x = poly.s1(t).inverse() * poly.s2(t);
    const Mat expect = 0.5 * poly.s1(t).inverse() * poly.s3(t) - 0.75 * x * x;
    EXPECT_LT((curvature(c, t).matrix - expect).norm(), 1e-6 * (1 + expect.norm()));
  }
}

TEST(Curvature, IndependentOfChart) {
  // The same curve seen through an unrelated chart has a similar curvature.
  Rng rng(23);
  const int n = 2;
  const auto sp = SymplecticSpace::standard(n);
  const auto poly = random_cubic_curve(rng, n, true);
  const auto c = chart_curve(n, as_function(poly), -1, 2);
  const Mat g = random_symplectic(rng, n);
  const GrassmannCurve moved(sp, [c, g](double t) { return Mat(g * c.columns(t)); }, -1, 2,
                             c.settings());
  const Vec a = curvature(c, 0.5).spectrum();
  const Vec b = curvature(moved, 0.5).spectrum();
  EXPECT_LT((a - b).norm(), 1e-5 * (1 + a.norm()));
}

TEST(CrossRatio, FourScalarGraphs) {
  // Projector products by hand: (1,1) -> -(1,3) -> -3 (1,1).
  Mat v[4];
  for (int i = 0; i < 4; ++i) {
    v[i].resize(2, 1);
    v[i] << 1, i;
  }
  const auto cr = cross_ratio(v[0], v[1], v[2], v[3]);
  EXPECT_NEAR(cr.matrix(0, 0), -3.0, 1e-12);
  const Mat s[4] = {Mat::Constant(1, 1, 0), Mat::Constant(1, 1, 1), Mat::Constant(1, 1, 2),
                    Mat::Constant(1, 1, 3)};
  EXPECT_NEAR(cross_ratio_chart(s[0], s[1], s[2], s[3])(0, 0), -3.0, 1e-12);
}

TEST(CrossRatio, ProjectorAndChartFormulasAgree) {
  Rng rng(24);
  const int n = 3;
  for (int k = 0; k < 50; ++k) {
    Mat s[4], v[4];
    for (int i = 0; i < 4; ++i) {
      s[i] = random_symmetric(rng, n);
      v[i].resize(2 * n, n);
      v[i] << Mat::Identity(n, n), s[i];
    }
    const auto cr = cross_ratio(v[0], v[1], v[2], v[3]);
    const CurveOperator chart{cross_ratio_chart(s[0], s[1], s[2], s[3]), v[1]};
    const Mat in_orth = chart.in_basis(cr.basis).matrix;
    EXPECT_LT((cr.matrix - in_orth).norm(), 1e-7 * (1 + cr.matrix.norm()));
  }
}

TEST(CrossRatio, GeneralFramesNotLagrangian) {
  // v0..v3 need not be isotropic.
  Rng rng(25);
  const Mat v0 = random_matrix(rng, 4, 2), v1 = random_matrix(rng, 4, 2);
  const Mat v2 = random_matrix(rng, 4, 2), v3 = random_matrix(rng, 4, 2);
  const auto cr = cross_ratio(v0, v1, v2, v3);
  const Mat p = projector(v0, v1) * projector(v2, v3);
  EXPECT_LT((p * cr.basis - cr.basis * cr.matrix).norm(), 1e-9 * (1 + p.norm()));
}

TEST(InfinitesimalCrossRatio, ChartFormulaAndRankBound) {
  Rng rng(26);
  const int n = 3;
  for (int k = 0; k < 10; ++k) {
    const auto p0 = random_cubic_curve(rng, n, false);
    const auto p1 = random_cubic_curve(rng, n, false);
    const auto c0 = chart_curve(n, as_function(p0), -1, 2);
    const auto c1 = chart_curve(n, [&p1](double t) { return Mat(p1.s(t) + 5 * Mat::Identity(3, 3)); },
                                -1, 2);
    const auto op = infinitesimal_cross_ratio(c0, 0.3, c1, 0.7);
    const Mat s01 = p0.s(0.3) - p1.s(0.7) - 5 * Mat::Identity(n, n);
    const Mat expect = s01.inverse() * p0.s1(0.3) * s01.inverse() * p1.s1(0.7);
    const Vec a = op.spectrum();
    Eigen::EigenSolver<Mat> es(expect, false);
    Vec b = es.eigenvalues().real();
    std::sort(b.data(), b.data() + b.size());
    EXPECT_LT((a - b).norm(), 1e-6 * (1 + b.norm()));
  }
  // Rank-one velocity bounds the rank.
  const auto r1 = chart_curve(
      2,
      [](double t) {
        Mat s = Mat::Identity(2, 2);
        s(0, 0) = t;
        return s;
      },
      -1, 1);
  const auto r2 = chart_curve(2, [](double t) { return Mat(t * Mat::Identity(2, 2) + 4 * Mat::Identity(2, 2)); }, -1, 1);
  const auto op = infinitesimal_cross_ratio(r1, 0.1, r2, 0.2);
  Eigen::JacobiSVD<Mat> svd(op.matrix);
  EXPECT_LT(svd.singularValues()(1), 1e-8 * svd.singularValues()(0));
}

TEST(DerivativeCurve, TangentCurveGivesMinusCotangent) {
  const auto c = chart_curve(1, [](double t) { return Mat::Constant(1, 1, std::tan(t)); }, -1.2, 1.2);
  const Chart chart = *c.preferred_chart();
  for (double t : {0.3, 0.8, -0.5}) {
    const Mat s = chart_coords(chart, derivative_curve(c, t));
    EXPECT_NEAR(s(0, 0), -1.0 / std::tan(t), 1e-7);
  }
}

TEST(DerivativeCurve, LinearCurveGivesHorizontal) {
  const int n = 2;
  const auto sp = SymplecticSpace::standard(n);
  const auto c = chart_curve(n, [](double t) { return Mat(t * Mat::Identity(2, 2)); }, -1, 1);
  EXPECT_TRUE(same_subspace(derivative_curve(c, 0.3), LagrangianFrame::horizontal(sp), 1e-8));
}

TEST(DerivativeCurve, TransversalAndIndependentOfParametrizationShift) {
  Rng rng(27);
  const auto poly = random_cubic_curve(rng, 2, true);
  const auto c = chart_curve(2, as_function(poly), -1, 2);
  const auto shifted = reparametrize(c, affine_reparametrization(1.0, 0.25, -1.0, 1.5));
  const auto a = derivative_curve(c, 0.75);
  const auto b = derivative_curve(shifted, 0.5);
  EXPECT_TRUE(same_subspace(a, b, 1e-7));
  EXPECT_GT(transversality_gap(a, c.at(0.75)), 1e-3);
}

TEST(CurvatureRoutes, SchwartzianMatchesDerivativeCurveCrossRatio) {
  Rng rng(28);
  for (int k = 0; k < 5; ++k) {
    const auto poly = random_cubic_curve(rng, 2, true);
    const auto c = chart_curve(2, as_function(poly), -1, 2);
    const auto d = derivative_curve_of(c);
    const double t = 0.5;
    const auto r = curvature(c, t);
    const auto cr = infinitesimal_cross_ratio(d, t, c, t).in_basis(r.basis);
    EXPECT_LT((r.matrix - cr.matrix).norm(), 1e-5 * (1 + r.matrix.norm()));
  }
}

TEST(CurvatureForm, SelfAdjointAndCongruentToDerivativeVelocity) {
  Rng rng(29);
  for (int k = 0; k < 5; ++k) {
    const auto poly = random_cubic_curve(rng, 3, true);
    const auto c = chart_curve(3, as_function(poly), -1, 2);
    const double t = 0.5;
    const auto j = c.jet(t, 3);
    const Mat r = curvature(c, t).matrix;
    EXPECT_LT((j.s1 * r - (j.s1 * r).transpose()).norm(), 1e-6 * (1 + r.norm()));
    const auto form = curvature_form(c, t);
    const auto vd = velocity_form(derivative_curve_of(c), t);
    EXPECT_EQ(inertia(form.matrix, 1e-6), inertia(vd.matrix, 1e-6));
  }
}

TEST(AsymptoticExpansion, LeadingTermsAndSlope) {
  Rng rng(30);
  const auto poly = random_cubic_curve(rng, 2, true);
  const auto c = chart_curve(2, as_function(poly), -1, 2);
  const double t = 0.5;
  const auto r = curvature(c, t);
  const auto fit = asymptotic_slope(c, t);
  EXPECT_NEAR(fit, 3.0, 0.05);
}

TEST(ChainRule, PolynomialAndArctanMaps) {
  Rng rng(31);
  const auto poly = random_cubic_curve(rng, 2, true);
  const auto c = chart_curve(2, as_function(poly), -3, 4, 10.0);
  EXPECT_LT(chain_rule_residual(c, quadratic_map(), 0.4), 1e-5);
  const double cc = 2.0;
  EXPECT_LT(chain_rule_residual(c, arctan_map(cc, -0.5), 0.3), 1e-5);
}

TEST(ChainRule, TraceFreePartScalesBySquaredSpeed) {
  Rng rng(32);
  const auto poly = random_cubic_curve(rng, 3, true);
  const auto c = chart_curve(3, as_function(poly), -3, 4, 10.0);
  const auto phi = quadratic_map();
  const auto re = reparametrize(c, phi);
  const double s = 0.4;
  const auto a = curvature(re, s);
  const auto b = curvature(c, phi.phi(s)).in_basis(a.basis);
  auto trace_free = [](const Mat& m) {
    return Mat(m - m.trace() / m.rows() * Mat::Identity(m.rows(), m.rows()));
  };
  const double speed = phi.d1(s);
  EXPECT_LT((trace_free(a.matrix) - speed * speed * trace_free(b.matrix)).norm(), 1e-5);
}

TEST(Transport, FlatCurveGivesShear) {
  const auto c = chart_curve(2, [](double t) { return Mat(t * Mat::Identity(2, 2)); }, -1, 2);
  const Mat g = transport(c, 0.0, 1.0, 0.01);
  Mat expect = Mat::Identity(4, 4);
  expect.topRightCorner(2, 2) = -Mat::Identity(2, 2);
  EXPECT_LT((g - expect).norm(), 1e-7);
}

TEST(Transport, UnitCurvatureGivesRotation) {
  const auto c = chart_curve(1, [](double t) { return Mat::Constant(1, 1, std::tan(t)); }, -1.5, 1.5);
  const double t1 = 1.0;
  const Mat g = transport(c, 0.0, t1, 0.01);
  Mat expect(2, 2);
  expect << std::cos(t1), -std::sin(t1), std::sin(t1), std::cos(t1);
  EXPECT_LT((g - expect).norm(), 1e-6);
}

TEST(Transport, StructuralTransportIsSymplectic) {
  Rng rng(33);
  const auto sp = SymplecticSpace::standard(3);
  for (int k = 0; k < 5; ++k) {
    const Mat a0 = random_symmetric_spectrum(rng, 3, 1.0, 2.0);
    const Mat a1 = random_symmetric_spectrum(rng, 3, -0.3, 0.3);
    const Mat g = structural_transport([&](double t) { return Mat(a0 + std::sin(t) * a1); }, 0.0,
                                       10.0, 1e-3);
    EXPECT_LT((g.transpose() * sp.form() * g - sp.form()).norm(), 1e-8);
  }
  const Mat c = structural_transport([](double) { return Mat(4.0 * Mat::Identity(2, 2)); }, 0.0, 1.0, 1e-3);
  EXPECT_NEAR(c(0, 0), std::cos(2.0), 1e-10);
  EXPECT_NEAR(c(0, 2), -std::sin(2.0) / 2.0, 1e-10);
}

TEST(Classify, ReferenceCurves) {
  const auto flat = chart_curve(2, [](double t) { return Mat(-t * Mat::Identity(2, 2)); }, 0, 1, 0.5);
  const auto fc = classify(flat);
  EXPECT_TRUE(fc.regular);
  EXPECT_EQ(fc.monotone, -1);
  EXPECT_TRUE(fc.flat);
  EXPECT_TRUE(fc.symmetric);
  EXPECT_FALSE(fc.double_derivative_checked);

  const auto osc = chart_curve(1, [](double t) { return Mat::Constant(1, 1, std::tan(t)); }, -1, 1, 0.3);
  const auto oc = classify(osc);
  EXPECT_TRUE(oc.regular);
  EXPECT_EQ(oc.monotone, 1);
  EXPECT_FALSE(oc.flat);
  EXPECT_TRUE(oc.symmetric);
  EXPECT_TRUE(oc.double_derivative_checked);
  EXPECT_TRUE(oc.double_derivative_agrees);

  Rng rng(34);
  const auto poly = random_cubic_curve(rng, 2, true);
  const auto pc = classify(chart_curve(2, as_function(poly), 0, 1, 0.5));
  EXPECT_TRUE(pc.regular);
  EXPECT_EQ(pc.monotone, 1);
  EXPECT_FALSE(pc.symmetric);

  const auto degenerate = chart_curve(
      2,
      [](double t) {
        Mat s = Mat::Zero(2, 2);
        s(0, 0) = t;
        return s;
      },
      0, 1, 0.5);
  EXPECT_FALSE(classify(degenerate).regular);
}

TEST(Kernels, ParallelMatchesSerial) {
  Rng rng(35);
  const auto poly = random_cubic_curve(rng, 3, true);
  const auto c = chart_curve(3, as_function(poly), -1, 2);
  std::vector<double> ts;
  for (int i = 0; i < 64; ++i) ts.push_back(-0.9 + 2.8 * i / 63.0);
  const auto a = curvature_spectra(c, ts, Exec::Serial);
  const auto b = curvature_spectra(c, ts, Exec::Parallel);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
  const auto ia = velocity_inertia(c, ts, Exec::Serial);
  const auto ib = velocity_inertia(c, ts, Exec::Parallel);
  EXPECT_EQ(ia, ib);
}

TEST(Kernels, LowestIndexErrorIsRethrown) {
  auto f = [](std::size_t i) -> int {
    if (i >= 5) fail(i == 5 ? ErrorKind::NotRegular : ErrorKind::BlowUp, "x");
    return static_cast<int>(i);
  };
  for (Exec e : {Exec::Serial, Exec::Parallel}) {
    try {
      map_indices(40, f, e);
      FAIL();
    } catch (const Error& err) {
      EXPECT_EQ(err.kind(), ErrorKind::NotRegular);
    }
  }
}
