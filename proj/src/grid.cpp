#include "convid/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "convid/error.hpp"
#include "convid/quadrature.hpp"

namespace convid {
namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

double origin_offset(const GridSpec& s, int axis) { return -s.lo[axis] / s.step(axis); }

}  // namespace

std::size_t GridSpec::origin(int axis) const {
  if (axis >= dim) return 0;
  return static_cast<std::size_t>(std::llround(origin_offset(*this, axis)));
}

Point GridSpec::point(std::size_t k) const {
  const auto idx = unflat(k);
  Point p{0.0, 0.0};
  p[0] = coord(0, idx[0]);
  if (dim > 1) p[1] = coord(1, idx[1]);
  return p;
}

double GridSpec::cell_volume() const {
  double v = step(0);
  if (dim > 1) v *= step(1);
  return v;
}

bool GridSpec::centered() const {
  for (int a = 0; a < dim; ++a)
    if (origin(a) != n[a] / 2) return false;
  return true;
}

bool GridSpec::same_as(const GridSpec& o, double rel_tol) const {
  if (dim != o.dim) return false;
  for (int a = 0; a < dim; ++a) {
    if (n[a] != o.n[a]) return false;
    const double scale = std::max(1.0, hi[a] - lo[a]);
    if (std::abs(lo[a] - o.lo[a]) > rel_tol * scale) return false;
    if (std::abs(hi[a] - o.hi[a]) > rel_tol * scale) return false;
  }
  return true;
}

GridSpec make_grid(int dim, std::span<const double> lo, std::span<const double> hi,
                   std::span<const std::size_t> n) {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("grid dimension must be 1 or 2");
  if (lo.size() < static_cast<std::size_t>(dim) || hi.size() < static_cast<std::size_t>(dim) ||
      n.size() < static_cast<std::size_t>(dim))
    throw ConfigError("grid bounds/sizes shorter than the dimension");
  GridSpec s;
  s.dim = dim;
  s.lo = {0.0, 0.0};
  s.hi = {0.0, 0.0};
  s.n = {1, 1};
  for (int a = 0; a < dim; ++a) {
    std::ostringstream where;
    where << "axis " << a << ": ";
    if (!is_power_of_two(n[a])) throw ConfigError(where.str() + "n must be a power of two");
    if (n[a] < 16) throw ConfigError(where.str() + "n must be at least 16");
    if (!(lo[a] < hi[a])) throw ConfigError(where.str() + "lo must be below hi");
    if (!(lo[a] <= 0.0 && hi[a] > 0.0)) throw ConfigError(where.str() + "bounds must contain 0");
    s.lo[a] = lo[a];
    s.hi[a] = hi[a];
    s.n[a] = n[a];
    const double off = origin_offset(s, a);
    if (std::abs(off - std::round(off)) > 1e-9 * std::max(1.0, off))
      throw ConfigError(where.str() + "origin is not a grid node");
  }
  return s;
}

GridSpec make_grid(double lo, double hi, std::size_t n) {
  const double l[] = {lo};
  const double h[] = {hi};
  const std::size_t m[] = {n};
  return make_grid(1, l, h, m);
}

GridSpec make_grid(Point lo, Point hi, std::array<std::size_t, kMaxDim> n) {
  return make_grid(2, lo, hi, n);
}

GridSpec centered_grid(int dim, double half_width, std::size_t n) {
  const Point lo{-half_width, -half_width};
  const Point hi{half_width, half_width};
  const std::array<std::size_t, kMaxDim> m{n, n};
  return make_grid(dim, lo, hi, m);
}

GridSpec frequency_grid(const GridSpec& spatial) {
  GridSpec f = spatial;
  for (int a = 0; a < spatial.dim; ++a) {
    const double d = 2.0 * std::numbers::pi / (spatial.hi[a] - spatial.lo[a]);
    const double half = static_cast<double>(spatial.n[a] / 2);
    f.lo[a] = -half * d;
    f.hi[a] = half * d;
  }
  return f;
}

GridSpec spatial_grid(const GridSpec& frequency) {
  if (!frequency.centered()) throw ConfigError("spatial_grid: frequency grid must be centred");
  return frequency_grid(frequency);
}

GridSpec padded(const GridSpec& spec, std::size_t factor) {
  if (!is_power_of_two(factor)) throw ConfigError("padding factor must be a power of two");
  if (!spec.centered()) throw ConfigError("padding requires a centred grid");
  GridSpec p = spec;
  for (int a = 0; a < spec.dim; ++a) {
    const double h = spec.step(a);
    p.n[a] = spec.n[a] * factor;
    const double half = static_cast<double>(p.n[a] / 2);
    p.lo[a] = -half * h;
    p.hi[a] = half * h;
  }
  return p;
}

// ---------------------------------------------------------------------------

GridFn::GridFn(GridSpec spec, std::string label)
    : spec_(spec), values_(spec.size(), cplx(0.0, 0.0)), label_(std::move(label)) {}

GridFn::GridFn(GridSpec spec, std::vector<cplx> values, std::string label)
    : spec_(spec), values_(std::move(values)), label_(std::move(label)) {
  if (values_.size() != spec_.size())
    throw ConfigError("GridFn: value count does not match grid size");
  if (!all_finite()) throw NumericalError("GridFn '" + label_ + "': non-finite values");
}

void GridFn::require_same_spec(const GridFn& other) const {
  if (!spec_.same_as(other.spec_))
    throw ConfigError("GridFn arithmetic requires identical grids ('" + label_ + "' vs '" +
                      other.label_ + "')");
}

GridFn& GridFn::operator+=(const GridFn& other) {
  require_same_spec(other);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

GridFn& GridFn::operator-=(const GridFn& other) {
  require_same_spec(other);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

GridFn& GridFn::operator*=(const GridFn& other) {
  require_same_spec(other);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] *= other.values_[k];
  return *this;
}

GridFn& GridFn::operator*=(cplx s) {
  for (auto& v : values_) v *= s;
  return *this;
}

double GridFn::sup_norm() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

double GridFn::sup_imag() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v.imag()));
  return m;
}

bool GridFn::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

std::vector<double> GridFn::real_part() const {
  std::vector<double> r(values_.size());
  std::transform(values_.begin(), values_.end(), r.begin(), [](const cplx& v) { return v.real(); });
  return r;
}

GridFn operator+(GridFn a, const GridFn& b) { return a += b; }
GridFn operator-(GridFn a, const GridFn& b) { return a -= b; }
GridFn operator*(GridFn a, const GridFn& b) { return a *= b; }
GridFn operator*(GridFn a, cplx s) { return a *= s; }
GridFn operator*(cplx s, GridFn a) { return a *= s; }

// ---------------------------------------------------------------------------

TestFunction gaussian_test_function(double scale) {
  std::ostringstream name;
  name << "gauss(" << scale << ")";
  const double inv = 1.0 / (2.0 * scale * scale);
  return {name.str(), [inv](const Point& x) { return std::exp(-(x[0] * x[0] + x[1] * x[1]) * inv); }};
}

TestFunction exponential_taper() {
  return {"exp(-|x|)", [](const Point& x) { return std::exp(-(std::abs(x[0]) + std::abs(x[1]))); }};
}

TestBank TestBank::standard() {
  TestBank bank;
  for (double s : {0.5, 1.0, 2.0, 4.0}) bank.members.push_back(gaussian_test_function(s));
  bank.members.push_back(exponential_taper());
  return bank;
}

cplx pair(const GridFn& b, const TestFunction& psi) {
  const GridSpec& s = b.spec();
  cplx acc = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) acc += b[k] * psi.fn(s.point(k));
  return acc * s.cell_volume();
}

cplx pair(const GridFn& b, const GridFn& psi) {
  b.require_same_spec(psi);
  cplx acc = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) acc += b[k] * psi[k];
  return acc * b.spec().cell_volume();
}

double weak_norm(const GridFn& a, const TestBank& bank) {
  double m = 0.0;
  for (const auto& psi : bank.members) m = std::max(m, std::abs(pair(a, psi)));
  return m;
}

double weak_distance(const GridFn& a, const GridFn& b, const TestBank& bank) {
  return weak_norm(a - b, bank);
}

GridFn line_integral_cumulative(const GridFn& kappa, int axis) {
  const GridSpec& s = kappa.spec();
  if (axis < 0 || axis >= s.dim) throw ConfigError("line_integral_cumulative: bad axis");
  GridFn out(s, kappa.label().empty() ? std::string{} : "int " + kappa.label());
  const std::size_t len = s.n[axis];
  const std::size_t lines = s.size() / len;
  const std::size_t stride = axis == 0 ? s.n[1] : 1;
  const double h = s.step(axis);
  const std::size_t anchor = s.origin(axis);
  std::vector<cplx> line(len), acc(len);
  for (std::size_t l = 0; l < lines; ++l) {
    const std::size_t base = axis == 0 ? l : l * s.n[1];
    for (std::size_t i = 0; i < len; ++i) line[i] = kappa[base + i * stride];
    quad::cumulative_from(line, h, anchor, acc);
    for (std::size_t i = 0; i < len; ++i) out[base + i * stride] = acc[i];
  }
  return out;
}

}  // namespace convid
