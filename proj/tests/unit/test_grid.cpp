#include <gtest/gtest.h>

#include "convid/error.hpp"
#include "convid/grid.hpp"
#include "convid/wellposed.hpp"
#include "support.hpp"

using namespace convid;
using namespace testing_support;

TEST(MakeGrid, StepFromBounds) {
  const GridSpec s = make_grid(-8.0, 8.0, 1024);
  EXPECT_EQ(s.dim, 1);
  EXPECT_DOUBLE_EQ(s.step(0), 0.015625);
  EXPECT_EQ(s.origin(0), 512u);
  EXPECT_DOUBLE_EQ(s.coord(0, s.origin(0)), 0.0);
}

TEST(MakeGrid, RejectsNonPowerOfTwo) { EXPECT_THROW(make_grid(-8.0, 8.0, 1000), ConfigError); }

TEST(MakeGrid, RejectsBoundsWithoutOrigin) {
  EXPECT_THROW(make_grid(1.0, 8.0, 64), ConfigError);
  EXPECT_THROW(make_grid(-8.0, -1.0, 64), ConfigError);
}

TEST(MakeGrid, RejectsSmallOrInvertedGrids) {
  EXPECT_THROW(make_grid(-1.0, 1.0, 8), ConfigError);
  EXPECT_THROW(make_grid(2.0, -2.0, 64), ConfigError);
  // 0 between nodes
  EXPECT_THROW(make_grid(-1.0, 2.0, 16), ConfigError);
}

TEST(MakeGrid, TwoDimensionalOrigin) {
  const GridSpec s = make_grid(Point{-4.0, -4.0}, Point{4.0, 4.0}, {256, 256});
  EXPECT_EQ(s.origin(0), 128u);
  EXPECT_EQ(s.origin(1), 128u);
  EXPECT_EQ(s.size(), 256u * 256u);
  const Point o = s.point(s.origin_flat());
  EXPECT_EQ(o[0], 0.0);
  EXPECT_EQ(o[1], 0.0);
}

TEST(MakeGrid, DualGridsRoundTrip) {
  const GridSpec x = make_grid(-8.0, 8.0, 1024);
  const GridSpec f = frequency_grid(x);
  EXPECT_NEAR(f.step(0), 2.0 * kPi / 16.0, 1e-15);
  EXPECT_TRUE(f.centered());
  EXPECT_TRUE(spatial_grid(f).same_as(x));
  const GridSpec p = padded(f, 4);
  EXPECT_EQ(p.n[0], 4096u);
  EXPECT_NEAR(p.step(0), f.step(0), 1e-15);
}

TEST(GridFnTest, ArithmeticNeedsIdenticalGrids) {
  GridFn a(make_grid(-1.0, 1.0, 16));
  GridFn b(make_grid(-2.0, 2.0, 16));
  EXPECT_THROW(a += b, ConfigError);
  EXPECT_THROW((void)(a * b), ConfigError);
}

TEST(GridFnTest, RejectsNonFiniteValues) {
  const GridSpec s = make_grid(-1.0, 1.0, 16);
  std::vector<cplx> v(16, 0.0);
  v[3] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(GridFn(s, v), NumericalError);
  EXPECT_THROW(GridFn(s, std::vector<cplx>(15)), ConfigError);
}

TEST(Fourier, GaussianDensityMatchesCharacteristicFunction) {
  const GridSpec s = make_grid(-8.0, 8.0, 1024);
  const GridFn f = GridFn::sample(s, [](const Point& x) { return normal_pdf(x[0], 0.0, 1.0); });
  const GridFn F = fourier_forward(f);
  EXPECT_TRUE(F.spec().same_as(frequency_grid(s)));
  EXPECT_LT(sup_error(F, [](const Point& t) { return cplx(std::exp(-0.5 * t[0] * t[0])); }, 8.0), 1e-8);
}

TEST(Fourier, SignConventionOnShiftedDensity) {
  // kernel exp(+i zeta x): a shift by mu multiplies by exp(+i mu zeta)
  const GridSpec s = make_grid(-16.0, 16.0, 1024);
  const GridFn f = GridFn::sample(s, [](const Point& x) { return normal_pdf(x[0], 1.5, 0.5); });
  const GridFn F = fourier_forward(f);
  const double e = sup_error(
      F, [](const Point& t) { return std::exp(cplx(-0.25 * t[0] * t[0], 1.5 * t[0])); }, 8.0);
  EXPECT_LT(e, 1e-10);
}

TEST(Fourier, ZeroMapsToZero) {
  const GridFn z(make_grid(-8.0, 8.0, 64));
  EXPECT_EQ(fourier_forward(z).sup_norm(), 0.0);
  EXPECT_EQ(fourier_inverse(fourier_forward(z)).sup_norm(), 0.0);
}

TEST(Fourier, RoundTripGaussian) {
  const GridSpec s = make_grid(-8.0, 8.0, 1024);
  const GridFn f = GridFn::sample(s, [](const Point& x) { return normal_pdf(x[0], 0.0, 1.0); });
  const GridFn back = fourier_inverse(fourier_forward(f));
  EXPECT_TRUE(back.spec().same_as(s));
  EXPECT_LT((back - f).sup_norm(), 1e-10);
}

TEST(Fourier, NonCentredSpatialGrid) {
  const GridSpec s = make_grid(-4.0, 12.0, 256);
  const GridFn f = GridFn::sample(s, [](const Point& x) { return normal_pdf(x[0], 2.0, 1.0); });
  const GridFn F = fourier_forward(f);
  EXPECT_LT(sup_error(F, [](const Point& t) { return std::exp(cplx(-0.5 * t[0] * t[0], 2.0 * t[0])); }, 6.0), 1e-9);
  EXPECT_LT((fourier_inverse(F, s) - f).sup_norm(), 1e-12);
}

TEST(Fourier, TwoDimensionalSeparableGaussian) {
  const GridSpec s = make_grid(Point{-8.0, -8.0}, Point{8.0, 8.0}, {128, 128});
  const GridFn f = GridFn::sample(
      s, [](const Point& x) { return normal_pdf(x[0], 0.5, 1.0) * normal_pdf(x[1], -1.0, 0.64); });
  const GridFn F = fourier_forward(f);
  const double e = sup_error(
      F,
      [](const Point& t) {
        return std::exp(cplx(-0.5 * t[0] * t[0] - 0.32 * t[1] * t[1], 0.5 * t[0] - 1.0 * t[1]));
      },
      6.0);
  EXPECT_LT(e, 1e-9);
  EXPECT_LT((fourier_inverse(F) - f).sup_norm(), 1e-12);
}

TEST(Fourier, InverseRejectsNonDualTarget) {
  const GridFn F(frequency_grid(make_grid(-8.0, 8.0, 64)));
  EXPECT_THROW(fourier_inverse(F, make_grid(-4.0, 4.0, 64)), ConfigError);
}

TEST(Pair, ConstantOnUnitInterval) {
  const GridSpec s = make_grid(-1.0, 1.0, 16);
  const GridFn one = GridFn::sample(s, [](const Point&) { return 1.0; });
  const TestFunction psi{"one", [](const Point&) { return 1.0; }};
  EXPECT_NEAR(pair(one, psi).real(), 2.0, s.step(0));
}

TEST(Pair, OddAgainstEvenVanishes) {
  const GridSpec s = make_grid(-8.0, 8.0, 512);
  const GridFn odd = GridFn::sample(s, [](const Point& x) { return x[0] * std::exp(-x[0] * x[0]); });
  EXPECT_NEAR(std::abs(pair(odd, gaussian_test_function(1.0))), 0.0, 1e-12);
}

TEST(Pair, BumpAgainstExponentialTaperObeysBound) {
  const GridSpec s = make_grid(-8.0, 8.0, 1024);
  const GridFn b5 = build_bn(5, s);
  const double v = pair(b5, exponential_taper()).real();
  EXPECT_GT(v, 0.0);
  EXPECT_LE(v, 0.8 * std::exp(-5.0) * std::exp(-(5.0 - 0.4)));
}

TEST(LineIntegral, ZeroIntegrand) {
  const GridFn k(make_grid(-4.0, 4.0, 64));
  EXPECT_EQ(line_integral_cumulative(k, 0).sup_norm(), 0.0);
}

TEST(LineIntegral, ConstantGivesIdentity) {
  const GridSpec s = make_grid(-8.0, 8.0, 1024);
  const GridFn one = GridFn::sample(s, [](const Point&) { return 1.0; });
  const GridFn r = line_integral_cumulative(one, 0);
  EXPECT_LT(sup_error(r, [](const Point& t) { return cplx(t[0]); }, 1e9), 1e-12);
}

TEST(LineIntegral, LinearGivesQuadratic) {
  const GridSpec s = make_grid(-8.0, 8.0, 1024);
  const GridFn k = GridFn::sample(s, [](const Point& x) { return -x[0]; });
  const GridFn r = line_integral_cumulative(k, 0);
  const double h = s.step(0);
  EXPECT_LT(sup_error(r, [](const Point& t) { return cplx(-0.5 * t[0] * t[0]); }, 1e9), h * h);
}

TEST(LineIntegral, SecondAxisInTwoDimensions) {
  const GridSpec s = make_grid(Point{-2.0, -2.0}, Point{2.0, 2.0}, {32, 64});
  const GridFn k = GridFn::sample(s, [](const Point& x) { return cplx(x[0], 3.0 * x[1] * x[1]); });
  const GridFn r = line_integral_cumulative(k, 1);
  EXPECT_LT(sup_error(r, [](const Point& t) { return cplx(t[0] * t[1], std::pow(t[1], 3)); }, 1e9), 1e-12);
}

TEST(WeakDistance, IdenticalArgumentsGiveZero) {
  const GridSpec s = make_grid(-8.0, 8.0, 256);
  const GridFn a = GridFn::sample(s, [](const Point& x) { return std::cos(x[0]); });
  EXPECT_EQ(weak_distance(a, a), 0.0);
}

TEST(WeakDistance, BumpSequenceDecreases) {
  const GridSpec s = make_grid(-16.0, 16.0, 2048);
  const GridFn zero(s);
  double prev = std::numeric_limits<double>::infinity();
  for (int n : {2, 4, 8}) {
    const double d = weak_distance(build_bn(n, s), zero);
    EXPECT_LT(d, prev) << "n=" << n;
    prev = d;
  }
}

TEST(WeakDistance, ConstantAgainstUnitGaussian) {
  const GridSpec s = make_grid(-16.0, 16.0, 1024);
  const GridFn one = GridFn::sample(s, [](const Point&) { return 1.0; });
  const TestBank bank{{gaussian_test_function(1.0)}};
  EXPECT_NEAR(weak_distance(one, GridFn(s), bank), std::sqrt(2.0 * kPi), 1e-6);
}

TEST(TestBankTest, StandardMembersArePositiveAndBounded) {
  const TestBank bank = TestBank::standard();
  ASSERT_EQ(bank.members.size(), 5u);
  Gen gen(7);
  for (const auto& m : bank.members)
    for (int i = 0; i < 100; ++i) {
      const Point x{gen.uniform(-20, 20), gen.uniform(-20, 20)};
      const double v = m.fn(x);
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
}
