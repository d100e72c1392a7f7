#pragma once

// Shared helpers for the test binaries: independent closed forms, error
// norms and small hand-rolled random generators.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "convid/grid.hpp"
#include "convid/ident.hpp"

namespace testing_support {

using convid::cplx;
using convid::GridFn;
using convid::GridSpec;
using convid::Point;

inline constexpr double kPi = std::numbers::pi;

// Sup of |a - ref(t)| over grid nodes with max_k |t_k| <= radius that
// also satisfy `keep`.
inline double sup_error(const GridFn& a, const std::function<cplx(const Point&)>& ref, double radius,
                        const std::function<bool(std::size_t)>& keep = nullptr) {
  const GridSpec& s = a.spec();
  double e = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const Point t = s.point(k);
    if (std::abs(t[0]) > radius || (s.dim > 1 && std::abs(t[1]) > radius)) continue;
    if (keep && !keep(k)) continue;
    e = std::max(e, std::abs(a[k] - ref(t)));
  }
  return e;
}

inline double sup_error_on_mask(const GridFn& a, const std::function<cplx(const Point&)>& ref,
                                const convid::SupportMask& m, double radius = 1e300) {
  return sup_error(a, ref, radius, [&](std::size_t k) { return m.contains(k); });
}

// Periodic-trapezoid L1 distance to a density.
inline double l1_to(const GridFn& a, const std::function<double(const Point&)>& dens) {
  const GridSpec& s = a.spec();
  double e = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) e += std::abs(a[k].real() - dens(s.point(k)));
  return e * s.cell_volume();
}

inline double normal_pdf(double x, double mu, double var) {
  return std::exp(-0.5 * (x - mu) * (x - mu) / var) / std::sqrt(2.0 * kPi * var);
}

inline double laplace_pdf(double x, double b) { return std::exp(-std::abs(x) / b) / (2.0 * b); }

// Deterministic stream of random test inputs.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng); }
  bool coin() { return integer(0, 1) == 1; }
};

}  // namespace testing_support
