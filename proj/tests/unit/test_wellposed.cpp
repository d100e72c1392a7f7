#include <gtest/gtest.h>

#include "convid/error.hpp"
#include "convid/wellposed.hpp"
#include "support.hpp"

using namespace convid;
using namespace testing_support;

namespace {

// antiderivative of (1+t^2)^-3
double inv_cube_primitive(double t) {
  const double q = 1.0 + t * t;
  return t / (4.0 * q * q) + 3.0 * t / (8.0 * q) + 3.0 / 8.0 * std::atan(t);
}

TailClassParams tail(double lambda, double B = 1.0) {
  TailClassParams p;
  p.B = B;
  p.Lambda[0][0] = lambda;
  return p;
}

const GridSpec& fit_grid() {
  static const GridSpec g = make_grid(-8.0, 8.0, 1024);
  return g;
}

LogMagnitude gaussian_cf(double var) {
  return [var](const Point& t) { return -0.5 * var * t[0] * t[0]; };
}

}  // namespace

TEST(PhiMV, InverseSquareAgainstQuadrature) {
  ClassParams p;
  p.m = {2.0};
  PhiOptions o;
  o.radii = {10.0, 20.0, 40.0};
  const Diagnosis d = check_phi_mV([](const Point& t) { return -std::log1p(t[0] * t[0]); }, 1, p, o);
  ASSERT_EQ(d.trace.size(), 3u);
  for (const auto& e : d.trace) {
    const double exact = inv_cube_primitive(e.radius) - inv_cube_primitive(-e.radius);
    EXPECT_NEAR(e.value, exact, 1e-6) << e.radius;
  }
  EXPECT_EQ(d.verdict, Verdict::member);
}

TEST(PhiMV, ReciprocalLaplaceIsMember) {
  ClassParams p;
  const Diagnosis d = check_phi_mV([](const Point& t) { return std::log1p(t[0] * t[0]); }, 1, p);
  EXPECT_EQ(d.verdict, Verdict::member);
  EXPECT_NEAR(d.trace.back().value, kPi, 0.02);
}

TEST(PhiMV, GaussianGrowthIsNonmember) {
  for (double m : {0.0, 2.0, 10.0}) {
    ClassParams p;
    p.m = {m};
    p.V = 1e6;
    EXPECT_EQ(check_phi_mV([](const Point& t) { return t[0] * t[0]; }, 1, p).verdict, Verdict::nonmember) << m;
  }
}

TEST(PhiMV, ZeroIsMember) {
  ClassParams p;
  p.V = 1e-9;
  const Diagnosis d = check_phi_mV([](const Point&) { return -std::numeric_limits<double>::infinity(); }, 1, p);
  EXPECT_EQ(d.verdict, Verdict::member);
  const Diagnosis g = check_phi_mV(GridFn(fit_grid()), p);
  EXPECT_EQ(g.verdict, Verdict::member);
}

TEST(PhiMV, TraceRadiiIncrease) {
  ClassParams p;
  const Diagnosis d = check_phi_mV([](const Point&) { return 0.0; }, 2, p);
  ASSERT_EQ(d.trace.size(), 6u);
  for (std::size_t i = 1; i < d.trace.size(); ++i) EXPECT_GT(d.trace[i].radius, d.trace[i - 1].radius);
  EXPECT_DOUBLE_EQ(d.trace.front().radius, 8.0);
  // (pi/2)^2 in the limit
  EXPECT_EQ(d.verdict, Verdict::member);
  EXPECT_NEAR(d.trace.back().value, kPi * kPi / 4.0, 0.05);
}

TEST(PhiMV, RejectsBadParams) {
  ClassParams p;
  p.V = 0.0;
  EXPECT_THROW(check_phi_mV([](const Point&) { return 0.0; }, 1, p), ConfigError);
  p.V = 1.0;
  p.m = {-1.0};
  EXPECT_THROW(check_phi_mV([](const Point&) { return 0.0; }, 1, p), ConfigError);
  p.m = {1.0, 2.0, 3.0};
  EXPECT_THROW(check_phi_mV([](const Point&) { return 0.0; }, 2, p), ConfigError);
  PhiOptions o;
  o.radii = {2.0, 1.0};
  EXPECT_THROW(check_phi_mV([](const Point&) { return 0.0; }, 1, ClassParams{}, o), ConfigError);
}

TEST(JudgeTrace, Rules) {
  EXPECT_EQ(judge_trace({}, 1.0), Verdict::inconclusive);
  EXPECT_EQ(judge_trace({{1, 0.5}}, 1.0), Verdict::inconclusive);
  EXPECT_EQ(judge_trace({{1, 2.0}}, 1.0), Verdict::nonmember);
  EXPECT_EQ(judge_trace({{1, 0.5}, {2, 0.501}}, 1.0), Verdict::member);
  EXPECT_EQ(judge_trace({{1, 0.1}, {2, 0.2}, {4, 0.4}}, 1.0), Verdict::nonmember);
  EXPECT_EQ(judge_trace({{1, 0.1}, {2, 0.3}, {4, 0.4}}, 1.0), Verdict::inconclusive);
  EXPECT_EQ(judge_trace({{1, 0.1}, {2, std::numeric_limits<double>::infinity()}}, 1.0), Verdict::nonmember);
}

TEST(TailFit, PureGaussian) {
  const GridFn b = GridFn::sample(fit_grid(), [](const Point& t) { return std::exp(-t[0] * t[0]); });
  const TailGaussianFit f = fit_tail_gaussian(b, 1.0);
  EXPECT_NEAR(f.Lambda[0][0], 1.0, 1e-6);
  EXPECT_LT(sup_error(f.bbar, [](const Point&) { return cplx(1.0); }, 1e9), 1e-6);
}

TEST(TailFit, GaussianTimesPolynomial) {
  const GridFn b =
      GridFn::sample(fit_grid(), [](const Point& t) { return std::exp(-2.0 * t[0] * t[0]) / (1.0 + t[0] * t[0]); });
  const TailGaussianFit f = fit_tail_gaussian(b, 1.0);
  EXPECT_NEAR(f.Lambda[0][0], 2.0, 1e-6);
  for (std::size_t k = 0; k < b.size(); ++k) {
    const double t = fit_grid().point(k)[0];
    const double ref = 1.0 / (1.0 + t * t);
    EXPECT_NEAR(f.bbar[k].real(), ref, 1e-4 * ref);
  }
}

TEST(TailFit, PolynomialOnly) {
  const GridFn b = GridFn::sample(fit_grid(), [](const Point& t) { return 1.0 / (1.0 + t[0] * t[0]); });
  const TailGaussianFit f = fit_tail_gaussian(b, 1.0);
  EXPECT_NEAR(f.Lambda[0][0], 0.0, 1e-8);
  EXPECT_LT(f.residual, 1e-8);
  EXPECT_LT((f.bbar - b).sup_norm(), 1e-8);
}

TEST(TailFit, VanishingTailIsAnError) {
  const GridFn b = GridFn::sample(fit_grid(), [](const Point& t) { return std::abs(t[0]) < 0.5 ? 1.0 : 0.0; });
  EXPECT_THROW(fit_tail_gaussian(b, 1.0), NumericalError);
}

TEST(TailFit, TwoDimensionalCrossTerm) {
  const GridSpec s = make_grid(Point{-4.0, -4.0}, Point{4.0, 4.0}, {64, 64});
  const GridFn b = GridFn::sample(s, [](const Point& t) {
    return std::exp(-(0.5 * t[0] * t[0] + 2.0 * 0.2 * t[0] * t[1] + 0.8 * t[1] * t[1]));
  });
  const TailGaussianFit f = fit_tail_gaussian(b, 1.0);
  EXPECT_NEAR(f.Lambda[0][0], 0.5, 1e-8);
  EXPECT_NEAR(f.Lambda[0][1], 0.2, 1e-8);
  EXPECT_NEAR(f.Lambda[1][0], 0.2, 1e-8);
  EXPECT_NEAR(f.Lambda[1][1], 0.8, 1e-8);
}

TEST(TailClass, GaussianMatchingLambda) {
  const Diagnosis d = check_tail_class(gaussian_cf(1.0), 1, tail(0.5), fit_grid());
  EXPECT_EQ(d.verdict, Verdict::member) << d.note;
  ASSERT_TRUE(d.fitted_lambda);
  EXPECT_NEAR((*d.fitted_lambda)[0][0], 0.5, 1e-9);
  EXPECT_EQ(d.parts.size(), 2u);
}

TEST(TailClass, GaussianWrongLambda) {
  const Diagnosis d = check_tail_class(gaussian_cf(1.0), 1, tail(1.0), fit_grid());
  EXPECT_EQ(d.verdict, Verdict::nonmember);
  EXPECT_FALSE(d.note.empty());
}

TEST(TailClass, LaplaceWithZeroLambda) {
  const Diagnosis d =
      check_tail_class([](const Point& t) { return -std::log1p(t[0] * t[0]); }, 1, tail(0.0), fit_grid());
  EXPECT_EQ(d.verdict, Verdict::member) << d.note;
}

TEST(TailClass, TenPercentRigidity) {
  for (double f : {0.9, 1.1})
    EXPECT_EQ(check_tail_class(gaussian_cf(1.0), 1, tail(0.5 * f), fit_grid()).verdict, Verdict::nonmember) << f;
}

TEST(TailClass, GridVersionDetectsMismatch) {
  const GridFn b = GridFn::sample(fit_grid(), [](const Point& t) { return std::exp(-0.5 * t[0] * t[0]); });
  EXPECT_EQ(check_tail_class(b, tail(1.0)).verdict, Verdict::nonmember);
  EXPECT_NE(check_tail_class(b, tail(0.5)).verdict, Verdict::nonmember);
}

TEST(TailClass, RejectsAsymmetricLambda) {
  TailClassParams p;
  p.Lambda = {{{1.0, 0.2}, {0.1, 1.0}}};
  const GridSpec s = make_grid(Point{-4.0, -4.0}, Point{4.0, 4.0}, {32, 32});
  EXPECT_THROW(check_tail_class(GridFn::sample(s, [](const Point&) { return 1.0; }), p), ConfigError);
}

TEST(Bump, ProfileOfSecondMember) {
  const GridSpec s = make_grid(-16.0, 16.0, 2048);
  const GridFn b = build_bn(2, s);
  double sup = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double x = s.point(k)[0];
    const double v = b[k].real();
    sup = std::max(sup, v);
    if (v > 0.0) {
      EXPECT_GT(x, 1.0);
      EXPECT_LT(x, 3.0);
    }
  }
  EXPECT_DOUBLE_EQ(sup, std::exp(-2.0));
}

TEST(Bump, IntegralBound) {
  const GridSpec s = make_grid(-16.0, 16.0, 4096);
  for (int n = 2; n <= 10; ++n) {
    const double integral = pair(build_bn(n, s), TestFunction{"one", [](const Point&) { return 1.0; }}).real();
    EXPECT_LE(integral, 4.0 / n * std::exp(-n)) << n;
  }
}

TEST(Bump, PlateauAndRange) {
  const GridSpec s = make_grid(-16.0, 16.0, 2048);
  const double h = s.step(0);
  for (int n = 2; n <= 10; ++n) {
    const GridFn b = build_bn(n, s);
    const double top = std::exp(-static_cast<double>(n));
    for (std::size_t k = 0; k < s.size(); ++k) {
      const double x = s.point(k)[0];
      const double v = b[k].real();
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, top);
      if (x >= n - 1.0 / n + h && x <= n + 1.0 / n - h) EXPECT_EQ(v, top) << n << " " << x;
    }
  }
}

TEST(Bump, DerivativeMatchesDifferences) {
  Gen gen(3);
  for (int i = 0; i < 50; ++i) {
    const int n = gen.integer(2, 9);
    const double x = gen.uniform(n - 2.0 / n, n + 2.0 / n);
    const double h = 1e-7;
    const double fd = (bn_value(n, x + h) - bn_value(n, x - h)) / (2.0 * h);
    EXPECT_NEAR(bn_derivative(n, x), fd, 1e-6 * std::exp(-n) * n * n) << n << " " << x;
    if (bn_value(n, x) > 0.0) EXPECT_NEAR(bn_log_value(n, x), std::log(bn_value(n, x)), 1e-12);
  }
}

TEST(Bump, ShortGridIsRejected) {
  EXPECT_THROW(build_bn(8, make_grid(-8.0, 8.0, 256)), ConfigError);
  EXPECT_THROW(build_bn(0, make_grid(-8.0, 8.0, 256)), ConfigError);
}

TEST(Bump, PairWithTaperBelowBound) {
  const GridSpec s = make_grid(-16.0, 16.0, 2048);
  const double v = pair(build_bn(5, s), exponential_taper()).real();
  EXPECT_GT(v, 0.0);
  EXPECT_LE(v, 0.8 * std::exp(-5.0) * std::exp(-(5.0 - 0.4)));
}

TEST(Illposed, BoundArithmetic) {
  const IllposedTable t = illposed_demo({2, 6});
  EXPECT_NEAR(t.rows[0].bound, -1.75, 1e-12);
  // log(1/3) - 12 + (35/6)^2
  EXPECT_NEAR(t.rows[1].bound, std::log(1.0 / 3.0) - 12.0 + 35.0 * 35.0 / 36.0, 1e-12);
  EXPECT_NEAR(t.rows[1].bound, 20.93, 0.01);
  EXPECT_TRUE(t.all_bounds_hold);
}

TEST(Illposed, PairingsDecreaseUnderTheirBound) {
  const IllposedTable t = illposed_demo({2, 4, 6});
  EXPECT_TRUE(t.pair_decreasing);
  for (const auto& r : t.rows) {
    const double n = r.n;
    EXPECT_LT(r.log_pair, std::log(4.0 / n) - n - (n - 2.0 / n)) << r.n;
  }
}

TEST(Illposed, FullTable) {
  std::vector<int> ns;
  for (int n = 2; n <= 10; ++n) ns.push_back(n);
  const IllposedTable t = illposed_demo(ns);
  ASSERT_EQ(t.rows.size(), 9u);
  for (const auto& r : t.rows) {
    EXPECT_GE(r.log_ratio, r.bound) << r.n;
    EXPECT_TRUE(std::isfinite(r.log_ratio));
  }
  EXPECT_TRUE(t.bank_decreasing);
  EXPECT_LT(t.rows[6].bank_max, 1e-3);  // n = 8
}

TEST(Illposed, LargeIndexStaysFinite) {
  const IllposedTable t = illposed_demo({30}, make_grid(-32.0, 32.0, 8192));
  EXPECT_TRUE(std::isfinite(t.rows[0].log_ratio));
  EXPECT_GT(t.rows[0].log_ratio, 700.0);  // would overflow as a plain double
  EXPECT_TRUE(t.rows[0].bound_holds);
}

TEST(Illposed, RejectsSmallIndex) { EXPECT_THROW(illposed_demo({1}), ConfigError); }

TEST(Stability, ZeroScaleGivesZeroDistance) {
  const Law g = parse_law("gaussian(0,1)", 1), f = parse_law("gaussian(0,1)", 1);
  const StabilityReport r = stability_experiment(g, f, tail(1.0), {0.0});
  for (const auto& row : r.rows) {
    EXPECT_FALSE(row.failed);
    EXPECT_EQ(row.distance, 0.0);
  }
}

TEST(Stability, ConsistentVanishesAndContrastIsLarge) {
  const Law g = parse_law("gaussian(0,1)", 1), f = parse_law("gaussian(0,1)", 1);
  const StabilityReport r = stability_experiment(g, f, tail(1.0), {0.1, 0.01, 0.001});
  EXPECT_TRUE(r.consistent_vanishing);
  std::vector<double> d;
  for (const auto& row : r.rows)
    if (row.kind == PerturbationKind::consistent) d.push_back(row.distance);
  ASSERT_EQ(d.size(), 3u);
  for (std::size_t i = 1; i < d.size(); ++i) {
    const double ratio = d[i] / d[i - 1];
    EXPECT_GE(ratio, 0.05);
    EXPECT_LE(ratio, 0.2);
  }
  EXPECT_GT(r.contrast, 100.0);
}
