#pragma once

// Uniform rectangular grids in one or two dimensions, complex grid
// functions, continuous Fourier transforms approximated by scaled FFTs,
// weak pairings against a bank of test functions and cumulative line
// integrals.

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace convid {

using cplx = std::complex<double>;

inline constexpr int kMaxDim = 2;

/// A point of R^d; coordinates beyond `dim` are zero.
using Point = std::array<double, kMaxDim>;

/// Uniform grid: axis k holds n[k] nodes lo[k] + i*h[k], i = 0..n[k]-1 with
/// h[k] = (hi[k]-lo[k])/n[k]. The upper bound is not a node (the grid is
/// periodic in the discrete-transform sense). The origin is always a node.
struct GridSpec {
  int dim = 1;
  std::array<double, kMaxDim> lo{0.0, 0.0};
  std::array<double, kMaxDim> hi{0.0, 0.0};
  std::array<std::size_t, kMaxDim> n{1, 1};

  double step(int axis) const { return (hi[axis] - lo[axis]) / static_cast<double>(n[axis]); }
  double coord(int axis, std::size_t i) const { return lo[axis] + static_cast<double>(i) * step(axis); }
  std::size_t origin(int axis) const;
  std::size_t size() const { return n[0] * n[1]; }
  std::size_t flat(std::size_t i0, std::size_t i1 = 0) const { return i0 * n[1] + i1; }
  std::array<std::size_t, kMaxDim> unflat(std::size_t k) const { return {k / n[1], k % n[1]}; }
  std::size_t origin_flat() const { return flat(origin(0), dim > 1 ? origin(1) : 0); }
  Point point(std::size_t k) const;
  double cell_volume() const;
  /// True when the origin sits at index n/2 on every axis.
  bool centered() const;
  bool same_as(const GridSpec& other, double rel_tol = 1e-9) const;
};

inline bool operator==(const GridSpec& a, const GridSpec& b) { return a.same_as(b); }

/// Validating constructor. Rejects n not a power of two, n < 16, lo >= hi,
/// bounds excluding 0 and grids on which 0 is not a node.
GridSpec make_grid(int dim, std::span<const double> lo, std::span<const double> hi,
                   std::span<const std::size_t> n);
GridSpec make_grid(double lo, double hi, std::size_t n);
GridSpec make_grid(Point lo, Point hi, std::array<std::size_t, kMaxDim> n);

/// Symmetric (centred) grid [-half_width, half_width) per axis.
GridSpec centered_grid(int dim, double half_width, std::size_t n);

/// Frequency grid dual to a spatial grid: spacing 2*pi/(hi-lo), centred.
GridSpec frequency_grid(const GridSpec& spatial);
/// Spatial grid dual to a centred frequency grid.
GridSpec spatial_grid(const GridSpec& frequency);
/// Same spacing, `factor` times as many nodes (factor a power of two).
GridSpec padded(const GridSpec& spec, std::size_t factor);

/// Complex function sampled on a GridSpec, row-major (axis 0 slowest).
class GridFn {
 public:
  GridFn() = default;
  explicit GridFn(GridSpec spec, std::string label = {});
  GridFn(GridSpec spec, std::vector<cplx> values, std::string label = {});

  template <class F>
  static GridFn sample(const GridSpec& spec, F&& f, std::string label = {}) {
    std::vector<cplx> v(spec.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = cplx(f(spec.point(k)));
    return GridFn(spec, std::move(v), std::move(label));
  }

  const GridSpec& spec() const { return spec_; }
  std::span<const cplx> values() const { return values_; }
  std::span<cplx> data() { return values_; }
  std::size_t size() const { return values_.size(); }
  const std::string& label() const { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  cplx operator[](std::size_t k) const { return values_[k]; }
  cplx& operator[](std::size_t k) { return values_[k]; }
  cplx at(std::size_t i0, std::size_t i1 = 0) const { return values_[spec_.flat(i0, i1)]; }
  cplx at_origin() const { return values_[spec_.origin_flat()]; }

  GridFn& operator+=(const GridFn& other);
  GridFn& operator-=(const GridFn& other);
  GridFn& operator*=(const GridFn& other);
  GridFn& operator*=(cplx s);

  double sup_norm() const;
  double sup_imag() const;
  bool all_finite() const;
  std::vector<double> real_part() const;

  void require_same_spec(const GridFn& other) const;

 private:
  GridSpec spec_{};
  std::vector<cplx> values_;
  std::string label_;
};

GridFn operator+(GridFn a, const GridFn& b);
GridFn operator-(GridFn a, const GridFn& b);
GridFn operator*(GridFn a, const GridFn& b);
GridFn operator*(GridFn a, cplx s);
GridFn operator*(cplx s, GridFn a);

/// F(zeta) ~ int exp(+i zeta.x) f(x) dx on frequency_grid(f.spec()).
GridFn fourier_forward(const GridFn& f);
/// f(x) ~ (2 pi)^-d int exp(-i zeta.x) F(zeta) d zeta on spatial_grid(F.spec()).
GridFn fourier_inverse(const GridFn& F);
/// Inverse onto an explicit spatial grid with matching size and spacing.
GridFn fourier_inverse(const GridFn& F, const GridSpec& target);

/// Named bounded positive integrable function used for weak pairings.
struct TestFunction {
  std::string name;
  std::function<double(const Point&)> fn;
};

/// Finite stand-in for the space of rapidly decreasing test functions.
struct TestBank {
  std::vector<TestFunction> members;

  /// Centred Gaussians exp(-|x|^2/(2 s^2)), s in {0.5, 1, 2, 4}, and the
  /// taper exp(-|x|_1).
  static TestBank standard();
};

TestFunction gaussian_test_function(double scale);
TestFunction exponential_taper();

/// Periodic trapezoid quadrature of b*psi over the grid.
cplx pair(const GridFn& b, const TestFunction& psi);
cplx pair(const GridFn& b, const GridFn& psi);

/// max over the bank of |<a - b, psi>|.
double weak_distance(const GridFn& a, const GridFn& b, const TestBank& bank = TestBank::standard());
/// max over the bank of |<a, psi>|.
double weak_norm(const GridFn& a, const TestBank& bank = TestBank::standard());

/// Cumulative integral along `axis`, anchored to 0 at the origin index of
/// that axis and integrating outward in both directions. Exact for
/// polynomials of degree <= 5 on lines with at least six nodes.
GridFn line_integral_cumulative(const GridFn& kappa, int axis);

}  // namespace convid
