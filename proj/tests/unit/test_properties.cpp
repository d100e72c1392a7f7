#include <gtest/gtest.h>

#include "convid/ecf.hpp"
#include "convid/error.hpp"
#include "convid/ident.hpp"
#include "convid/wellposed.hpp"
#include "support.hpp"

using namespace convid;
using namespace testing_support;

namespace {

constexpr int kCases = 25;

// random finite sum of shifted Gaussians
std::function<double(const Point&)> random_bumps(Gen& gen, bool even) {
  const int k = gen.integer(1, 4);
  std::vector<std::array<double, 3>> p;
  for (int i = 0; i < k; ++i) p.push_back({gen.uniform(-0.5, 1.0), even ? 0.0 : gen.uniform(-2.0, 2.0), gen.uniform(0.3, 1.5)});
  return [p, even](const Point& x) {
    double v = 0.0;
    for (const auto& [a, m, s] : p) {
      v += a * std::exp(-0.5 * (x[0] - m) * (x[0] - m) / (s * s));
      if (even) v += a * std::exp(-0.5 * (x[0] + m) * (x[0] + m) / (s * s));
    }
    return v;
  };
}

Law1d random_law(Gen& gen) {
  switch (gen.integer(0, 2)) {
    case 0: return Gaussian{gen.uniform(-1.0, 1.0), gen.uniform(0.1, 1.0)};
    case 1: return Laplace{gen.uniform(-1.0, 1.0), gen.uniform(0.2, 1.0)};
    default:
      return GaussianMixture{gen.uniform(0.2, 0.4), {gen.uniform(-1.5, -0.5), gen.uniform(0.1, 0.5)},
                             {gen.uniform(0.5, 1.5), gen.uniform(0.1, 0.5)}};
  }
}

Law as_law(const Law1d& l) { return replicate(l, 1); }

}  // namespace

TEST(Property, FourierRoundTrip) {
  Gen gen(101);
  const GridSpec s = make_grid(-16.0, 16.0, 512);
  for (int i = 0; i < kCases; ++i) {
    const GridFn f = GridFn::sample(s, random_bumps(gen, false));
    const GridFn back = fourier_inverse(fourier_forward(f));
    double e = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) e = std::max(e, std::abs(back[k] - f[k]));
    EXPECT_LT(e, 1e-12 * std::max(1.0, f.sup_norm())) << i;
  }
}

TEST(Property, RealEvenTransformIsReal) {
  Gen gen(102);
  const GridSpec s = make_grid(-16.0, 16.0, 512);
  for (int i = 0; i < kCases; ++i) {
    const GridFn F = fourier_forward(GridFn::sample(s, random_bumps(gen, true)));
    EXPECT_LT(F.sup_imag(), 1e-12 * std::max(1.0, F.sup_norm())) << i;
  }
}

TEST(Property, PairIsLinear) {
  Gen gen(103);
  const GridSpec s = make_grid(-8.0, 8.0, 256);
  const TestBank bank = TestBank::standard();
  for (int i = 0; i < kCases; ++i) {
    const GridFn a = GridFn::sample(s, random_bumps(gen, false));
    const GridFn b = GridFn::sample(s, random_bumps(gen, false));
    const cplx alpha(gen.normal(), gen.normal());
    const TestFunction& psi = bank.members[static_cast<std::size_t>(gen.integer(0, 4))];
    const cplx lhs = pair(a * alpha + b, psi);
    const cplx rhs = alpha * pair(a, psi) + pair(b, psi);
    EXPECT_LT(std::abs(lhs - rhs), 1e-12 * (1.0 + std::abs(lhs))) << i;
  }
}

TEST(Property, LineIntegralExactForQuintics) {
  Gen gen(104);
  const GridSpec s = make_grid(-4.0, 4.0, 64);
  for (int i = 0; i < kCases; ++i) {
    std::array<cplx, 6> c;
    for (auto& v : c) v = cplx(gen.normal(), gen.normal());
    const GridFn k = GridFn::sample(s, [&](const Point& t) {
      cplx v = 0.0;
      for (int j = 5; j >= 0; --j) v = v * t[0] + c[static_cast<std::size_t>(j)];
      return v;
    });
    const GridFn I = line_integral_cumulative(k, 0);
    const double e = sup_error(I, [&](const Point& t) {
      cplx v = 0.0;
      for (int j = 5; j >= 0; --j) v = v * t[0] + c[static_cast<std::size_t>(j)] / double(j + 1);
      return v * t[0];
    }, 1e9);
    EXPECT_LT(e, 1e-9) << i;
  }
}

TEST(Property, EcfHermitian) {
  Gen gen(105);
  const GridSpec f = make_grid(-8.0, 8.0, 128);
  for (int i = 0; i < kCases; ++i) {
    std::vector<Point> z(static_cast<std::size_t>(gen.integer(2, 200)));
    for (auto& p : z) p = {gen.normal() * 2.0, 0.0};
    const GridFn e = ecf(z, f);
    const std::size_t o = f.origin(0);
    for (std::size_t j = 1; j < o; ++j) ASSERT_LT(std::abs(e[o + j] - std::conj(e[o - j])), 1e-12);
    EXPECT_EQ(e.at_origin(), cplx(1.0));
  }
}

TEST(Property, ReconstructionCrossCaseAndAnchor) {
  Gen gen(106);
  // fine enough to resolve log-derivatives near small mixture transforms
  const GridSpec f = make_grid(-8.0, 8.0, 4096);
  const double tau = 1e-3;
  for (int i = 0; i < kCases; ++i) {
    const Law g = as_law(random_law(gen)), u = as_law(random_law(gen));
    const cplx c = std::polar(gen.uniform(0.5, 2.0), gen.uniform(-1.0, 1.0));
    const MomentSet m = oracle_moments(g, u, f);
    const Solution a = solve_case_a(m, tau, c);
    const Solution b = solve_case_b(m, tau, 1.0 / c);
    const std::string what = g.describe() + " / " + u.describe();
    // anchor
    EXPECT_EQ(a.gamma.at_origin(), c) << what;
    EXPECT_EQ(b.phi.at_origin(), 1.0 / c) << what;
    // gamma phi = eps1 on the mask
    EXPECT_LT(a.residual, 1e-8) << what;
    EXPECT_LT(b.residual, 1e-8) << what;
    // both cases recover the scaled latent transform
    const auto scaled = [&](const Point& t) { return c * g.cf(t); };
    EXPECT_LT(sup_error_on_mask(a.gamma, scaled, a.mask), 1e-6 * std::abs(c)) << what;
    double gap = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k)
      if (a.mask.contains(k)) gap = std::max(gap, std::abs(a.gamma[k] - b.gamma[k]));
    EXPECT_LT(gap, 1e-6 * std::abs(c)) << what;
  }
}

TEST(Property, ClassMembershipMonotoneInV) {
  Gen gen(107);
  for (int i = 0; i < 10; ++i) {
    const double a = gen.uniform(-1.5, 2.0);
    const LogMagnitude lb = [a](const Point& t) { return -a * std::log1p(t[0] * t[0]); };
    ClassParams lo, hi;
    lo.m = {gen.uniform(0.5, 3.0)};
    hi.m = lo.m;
    lo.V = gen.uniform(0.5, 5.0);
    hi.V = lo.V * gen.uniform(1.5, 20.0);
    const Verdict vl = check_phi_mV(lb, 1, lo).verdict, vh = check_phi_mV(lb, 1, hi).verdict;
    if (vl == Verdict::member) EXPECT_EQ(vh, Verdict::member) << a << " " << lo.m[0];
    if (vh == Verdict::nonmember) EXPECT_EQ(vl, Verdict::nonmember) << a << " " << lo.m[0];
  }
}

TEST(Property, BumpBounds) {
  Gen gen(108);
  for (int i = 0; i < 2000; ++i) {
    const int n = gen.integer(2, 12);
    const double x = gen.uniform(n - 3.0 / n, n + 3.0 / n);
    const double v = bn_value(n, x);
    const double top = std::exp(-double(n));
    ASSERT_GE(v, 0.0);
    ASSERT_LE(v, top * (1.0 + 1e-15));
    if (std::abs(x - n) <= 1.0 / n) ASSERT_NEAR(v, top, 1e-15 * top) << n << " " << x;
    if (std::abs(x - n) >= 2.0 / n) ASSERT_EQ(v, 0.0) << n << " " << x;
    if (v > 0.0) ASSERT_NEAR(bn_log_value(n, x), std::log(v), 1e-9);
  }
}
