// Continuous Fourier transforms with kernel exp(+i zeta.x), approximated by
// the periodic trapezoid rule and evaluated with FFTW.
//
// Spatial node j on an axis sits at (j - j0) h; frequency node k at
// (k - n/2) d with h d n = 2 pi. The phase bookkeeping below reduces
//   sum_j f_j exp(+2 pi i (k - n/2)(j - j0) / n)
// to a plain unnormalised DFT with per-axis pre/post multipliers.

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

#include "convid/error.hpp"
#include "convid/grid.hpp"

namespace convid {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

// In-place unnormalised DFT of `values` (row-major, dims n0 x n1) with the
// given FFTW sign.
void dft(std::vector<cplx>& values, const GridSpec& s, int sign) {
  const std::size_t total = s.size();
  std::unique_ptr<fftw_complex, FftwFree> buf(fftw_alloc_complex(total));
  if (!buf) throw NumericalError("fftw allocation failed");
  auto* raw = reinterpret_cast<cplx*>(buf.get());
  std::copy(values.begin(), values.end(), raw);
  int dims[kMaxDim] = {static_cast<int>(s.n[0]), static_cast<int>(s.n[1])};
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft(s.dim, dims, buf.get(), buf.get(), sign, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw NumericalError("fftw planning failed");
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  std::copy(raw, raw + total, values.begin());
}

// Per-axis multiplier tables.
std::vector<cplx> alternating(std::size_t n, std::size_t shift) {
  std::vector<cplx> t(n);
  for (std::size_t j = 0; j < n; ++j) t[j] = ((j + shift) % 2 == 0) ? 1.0 : -1.0;
  return t;
}

std::vector<cplx> twiddle(std::size_t n, std::size_t origin, double sign) {
  std::vector<cplx> t(n);
  for (std::size_t k = 0; k < n; ++k) {
    // reduce k*origin mod n exactly before converting to an angle
    const std::size_t r = (k * origin) % n;
    const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n);
    t[k] = std::polar(1.0, ang);
  }
  return t;
}

void apply_axis_factors(std::vector<cplx>& v, const GridSpec& s,
                        const std::array<std::vector<cplx>, kMaxDim>& fac) {
  for (std::size_t k = 0; k < v.size(); ++k) {
    const auto idx = s.unflat(k);
    cplx m = fac[0][idx[0]];
    if (s.dim > 1) m *= fac[1][idx[1]];
    v[k] *= m;
  }
}

}  // namespace

GridFn fourier_forward(const GridFn& f) {
  const GridSpec& s = f.spec();
  const GridSpec out_spec = frequency_grid(s);
  std::vector<cplx> v(f.values().begin(), f.values().end());

  std::array<std::vector<cplx>, kMaxDim> pre, post;
  for (int a = 0; a < s.dim; ++a) {
    pre[a] = alternating(s.n[a], 0);
    const std::size_t j0 = s.origin(a);
    post[a] = twiddle(s.n[a], j0, -1.0);
    const double sgn = (j0 % 2 == 0) ? 1.0 : -1.0;
    for (auto& x : post[a]) x *= sgn;
  }
  apply_axis_factors(v, s, pre);
  dft(v, s, FFTW_BACKWARD);
  apply_axis_factors(v, s, post);
  const double scale = s.cell_volume();
  for (auto& x : v) x *= scale;
  return GridFn(out_spec, std::move(v), f.label().empty() ? "" : "Ft " + f.label());
}

GridFn fourier_inverse(const GridFn& F) { return fourier_inverse(F, spatial_grid(F.spec())); }

GridFn fourier_inverse(const GridFn& F, const GridSpec& target) {
  const GridSpec& s = F.spec();
  if (!s.centered()) throw ConfigError("fourier_inverse: frequency grid must be centred");
  if (target.dim != s.dim) throw ConfigError("fourier_inverse: dimension mismatch");
  for (int a = 0; a < s.dim; ++a) {
    if (target.n[a] != s.n[a]) throw ConfigError("fourier_inverse: size mismatch");
    const double prod = target.step(a) * s.step(a) * static_cast<double>(s.n[a]);
    if (std::abs(prod / (2.0 * std::numbers::pi) - 1.0) > 1e-9)
      throw ConfigError("fourier_inverse: target grid is not dual to the frequency grid");
  }
  std::vector<cplx> v(F.values().begin(), F.values().end());
  std::array<std::vector<cplx>, kMaxDim> pre, post;
  for (int a = 0; a < s.dim; ++a) {
    const std::size_t j0 = target.origin(a);
    pre[a] = twiddle(s.n[a], j0, +1.0);
    post[a] = alternating(s.n[a], j0);
  }
  apply_axis_factors(v, s, pre);
  dft(v, target, FFTW_FORWARD);
  apply_axis_factors(v, target, post);
  double scale = 1.0;
  for (int a = 0; a < s.dim; ++a) scale *= s.step(a) / (2.0 * std::numbers::pi);
  for (auto& x : v) x *= scale;
  return GridFn(target, std::move(v), F.label().empty() ? "" : "Ft^-1 " + F.label());
}

}  // namespace convid
