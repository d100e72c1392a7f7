#include "convid/laws.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "convid/error.hpp"

namespace convid {
namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

cplx gaussian_cf(const Gaussian& g, double t) {
  return std::exp(cplx(-0.5 * g.variance * t * t, g.mean * t));
}

cplx gaussian_dcf(const Gaussian& g, double t) {
  return cplx(-g.variance * t, g.mean) * gaussian_cf(g, t);
}

double gaussian_density(const Gaussian& g, double x) {
  const double d = x - g.mean;
  return std::exp(-0.5 * d * d / g.variance) / std::sqrt(2.0 * kPi * g.variance);
}

// E X^k for X ~ U(lo, hi).
double uniform_moment(const Uniform& u, int k) {
  return (std::pow(u.hi, k + 1) - std::pow(u.lo, k + 1)) / ((k + 1) * (u.hi - u.lo));
}

cplx uniform_cf(const Uniform& u, double t) {
  const double r = std::max(std::abs(u.lo), std::abs(u.hi));
  if (std::abs(t) * r < 1e-2) {
    cplx acc = 0.0, term = 1.0;
    for (int k = 0; k <= 10; ++k) {
      acc += term * uniform_moment(u, k);
      term *= kI * t / static_cast<double>(k + 1);
    }
    return acc;
  }
  return (std::exp(kI * (u.hi * t)) - std::exp(kI * (u.lo * t))) / (kI * t * (u.hi - u.lo));
}

cplx uniform_dcf(const Uniform& u, double t) {
  const double r = std::max(std::abs(u.lo), std::abs(u.hi));
  if (std::abs(t) * r < 1e-2) {
    // d/dt sum (it)^k/k! m_k = sum_{k>=1} i^k t^{k-1}/(k-1)! m_k
    cplx acc = 0.0, term = kI;
    for (int k = 1; k <= 11; ++k) {
      acc += term * uniform_moment(u, k);
      term *= kI * t / static_cast<double>(k);
    }
    return acc;
  }
  const double len = u.hi - u.lo;
  const cplx eb = std::exp(kI * (u.hi * t));
  const cplx ea = std::exp(kI * (u.lo * t));
  return ((kI * u.hi * eb - kI * u.lo * ea) * t - (eb - ea)) / (kI * len * t * t);
}

std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\n");
  return std::string(s.substr(b, e - b + 1));
}

struct Call {
  std::string name;
  std::vector<double> args;
};

Call parse_call(std::string_view text) {
  const std::string t = trim(text);
  const auto open = t.find('(');
  if (open == std::string::npos || t.back() != ')')
    throw ConfigError("expected name(args...) but got '" + t + "'");
  Call c;
  c.name = trim(std::string_view(t).substr(0, open));
  std::transform(c.name.begin(), c.name.end(), c.name.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  const std::string inner = t.substr(open + 1, t.size() - open - 2);
  std::stringstream ss(inner);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string v = trim(item);
    if (v.empty()) continue;
    try {
      std::size_t used = 0;
      c.args.push_back(std::stod(v, &used));
      if (used != v.size()) throw std::invalid_argument(v);
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + v + "' in '" + t + "'");
    }
  }
  return c;
}

void expect_args(const Call& c, std::size_t n) {
  if (c.args.size() != n)
    throw ConfigError(c.name + " expects " + std::to_string(n) + " argument(s)");
}

void require_positive(double v, const std::string& what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(what + " must be positive");
}

}  // namespace

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double standard_normal(Rng& rng) {
  const double u1 = 1.0 - uniform01(rng);  // (0, 1]
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

cplx cf(const Law1d& law, double t) {
  return std::visit(
      overloaded{
          [&](const PointMass& p) { return std::exp(kI * (p.at * t)); },
          [&](const Gaussian& g) { return gaussian_cf(g, t); },
          [&](const Laplace& l) {
            return std::exp(kI * (l.location * t)) / (1.0 + l.scale * l.scale * t * t);
          },
          [&](const Uniform& u) { return uniform_cf(u, t); },
          [&](const GaussianMixture& m) {
            return m.weight * gaussian_cf(m.first, t) + (1.0 - m.weight) * gaussian_cf(m.second, t);
          },
          [&](const Fejer& f) { return cplx(std::max(0.0, 1.0 - std::abs(t) / f.width)); },
      },
      law);
}

double log_abs_cf(const Law1d& law, double t) {
  return std::visit(
      overloaded{
          [&](const PointMass&) { return 0.0; },
          [&](const Gaussian& g) { return -0.5 * g.variance * t * t; },
          [&](const Laplace& l) { return -std::log1p(l.scale * l.scale * t * t); },
          [&](const Uniform& u) { return std::log(std::abs(uniform_cf(u, t))); },
          [&](const GaussianMixture& m) {
            // factor out the slower Gaussian envelope
            const double v = std::min(m.first.variance, m.second.variance);
            auto part = [&](const Gaussian& g) {
              return std::exp(cplx(-0.5 * (g.variance - v) * t * t, g.mean * t));
            };
            const cplx r = m.weight * part(m.first) + (1.0 - m.weight) * part(m.second);
            return -0.5 * v * t * t + std::log(std::abs(r));
          },
          [&](const Fejer& f) { return std::log(std::max(0.0, 1.0 - std::abs(t) / f.width)); },
      },
      law);
}

cplx dcf(const Law1d& law, double t) {
  return std::visit(
      overloaded{
          [&](const PointMass& p) { return kI * p.at * std::exp(kI * (p.at * t)); },
          [&](const Gaussian& g) { return gaussian_dcf(g, t); },
          [&](const Laplace& l) {
            const double b2 = l.scale * l.scale;
            const double q = 1.0 + b2 * t * t;
            return std::exp(kI * (l.location * t)) * (kI * l.location * q - 2.0 * b2 * t) / (q * q);
          },
          [&](const Uniform& u) { return uniform_dcf(u, t); },
          [&](const GaussianMixture& m) {
            return m.weight * gaussian_dcf(m.first, t) + (1.0 - m.weight) * gaussian_dcf(m.second, t);
          },
          [&](const Fejer& f) {
            if (t == 0.0 || std::abs(t) >= f.width) return cplx(0.0);
            return cplx(t > 0.0 ? -1.0 / f.width : 1.0 / f.width);
          },
      },
      law);
}

double density(const Law1d& law, double x) {
  return std::visit(
      overloaded{
          [&](const PointMass&) -> double {
            throw ConfigError("point mass has no density");
          },
          [&](const Gaussian& g) { return gaussian_density(g, x); },
          [&](const Laplace& l) { return std::exp(-std::abs(x - l.location) / l.scale) / (2.0 * l.scale); },
          [&](const Uniform& u) { return (x >= u.lo && x <= u.hi) ? 1.0 / (u.hi - u.lo) : 0.0; },
          [&](const GaussianMixture& m) {
            return m.weight * gaussian_density(m.first, x) + (1.0 - m.weight) * gaussian_density(m.second, x);
          },
          [&](const Fejer& f) {
            const double wx = f.width * x;
            if (std::abs(wx) < 1e-4) return f.width / (2.0 * kPi) * (1.0 - wx * wx / 12.0);
            return (1.0 - std::cos(wx)) / (kPi * f.width * x * x);
          },
      },
      law);
}

double sample(const Law1d& law, Rng& rng) {
  return std::visit(
      overloaded{
          [&](const PointMass& p) { return p.at; },
          [&](const Gaussian& g) { return g.mean + std::sqrt(g.variance) * standard_normal(rng); },
          [&](const Laplace& l) {
            const double u = uniform01(rng) - 0.5;
            const double s = u < 0.0 ? -1.0 : 1.0;
            return l.location - l.scale * s * std::log1p(-2.0 * std::abs(u));
          },
          [&](const Uniform& u) { return u.lo + (u.hi - u.lo) * uniform01(rng); },
          [&](const GaussianMixture& m) {
            const Gaussian& c = uniform01(rng) < m.weight ? m.first : m.second;
            return c.mean + std::sqrt(c.variance) * standard_normal(rng);
          },
          [&](const Fejer& f) {
            // Rejection from a standard Cauchy proposal; the density ratio is
            // bounded by 4.
            for (;;) {
              const double x = std::tan(kPi * (uniform01(rng) - 0.5));
              const double target = x == 0.0 ? 0.5 / kPi : (1.0 - std::cos(x)) / (kPi * x * x);
              const double proposal = 1.0 / (kPi * (1.0 + x * x));
              if (uniform01(rng) * 4.0 * proposal <= target) return x / f.width;
            }
          },
      },
      law);
}

double mean(const Law1d& law) {
  return std::visit(overloaded{
                        [](const PointMass& p) { return p.at; },
                        [](const Gaussian& g) { return g.mean; },
                        [](const Laplace& l) { return l.location; },
                        [](const Uniform& u) { return 0.5 * (u.lo + u.hi); },
                        [](const GaussianMixture& m) {
                          return m.weight * m.first.mean + (1.0 - m.weight) * m.second.mean;
                        },
                        [](const Fejer&) { return std::numeric_limits<double>::quiet_NaN(); },
                    },
                    law);
}

double variance(const Law1d& law) {
  return std::visit(overloaded{
                        [](const PointMass&) { return 0.0; },
                        [](const Gaussian& g) { return g.variance; },
                        [](const Laplace& l) { return 2.0 * l.scale * l.scale; },
                        [](const Uniform& u) { return (u.hi - u.lo) * (u.hi - u.lo) / 12.0; },
                        [](const GaussianMixture& m) {
                          const double mu = m.weight * m.first.mean + (1.0 - m.weight) * m.second.mean;
                          const double s1 = m.first.variance + m.first.mean * m.first.mean;
                          const double s2 = m.second.variance + m.second.mean * m.second.mean;
                          return m.weight * s1 + (1.0 - m.weight) * s2 - mu * mu;
                        },
                        [](const Fejer&) { return std::numeric_limits<double>::infinity(); },
                    },
                    law);
}

std::string describe(const Law1d& law) {
  return std::visit(
      overloaded{
          [](const PointMass& p) { return "point(" + fmt_num(p.at) + ")"; },
          [](const Gaussian& g) { return "gaussian(" + fmt_num(g.mean) + "," + fmt_num(g.variance) + ")"; },
          [](const Laplace& l) { return "laplace(" + fmt_num(l.location) + "," + fmt_num(l.scale) + ")"; },
          [](const Uniform& u) { return "uniform(" + fmt_num(u.lo) + "," + fmt_num(u.hi) + ")"; },
          [](const GaussianMixture& m) {
            return "mixture(" + fmt_num(m.weight) + "," + fmt_num(m.first.mean) + "," +
                   fmt_num(m.first.variance) + "," + fmt_num(m.second.mean) + "," +
                   fmt_num(m.second.variance) + ")";
          },
          [](const Fejer& f) { return "fejer(" + fmt_num(f.width) + ")"; },
      },
      law);
}

Law1d parse_law1d(std::string_view text) {
  const Call c = parse_call(text);
  if (c.name == "point" || c.name == "delta") {
    expect_args(c, 1);
    return PointMass{c.args[0]};
  }
  if (c.name == "gaussian" || c.name == "normal") {
    expect_args(c, 2);
    require_positive(c.args[1], "gaussian variance");
    return Gaussian{c.args[0], c.args[1]};
  }
  if (c.name == "laplace") {
    expect_args(c, 2);
    require_positive(c.args[1], "laplace scale");
    return Laplace{c.args[0], c.args[1]};
  }
  if (c.name == "uniform") {
    expect_args(c, 2);
    if (!(c.args[0] < c.args[1])) throw ConfigError("uniform needs lo < hi");
    return Uniform{c.args[0], c.args[1]};
  }
  if (c.name == "mixture") {
    expect_args(c, 5);
    if (!(c.args[0] >= 0.0 && c.args[0] <= 1.0)) throw ConfigError("mixture weight must lie in [0,1]");
    require_positive(c.args[2], "mixture variance");
    require_positive(c.args[4], "mixture variance");
    return GaussianMixture{c.args[0], {c.args[1], c.args[2]}, {c.args[3], c.args[4]}};
  }
  if (c.name == "fejer") {
    expect_args(c, 1);
    require_positive(c.args[0], "fejer width");
    return Fejer{c.args[0]};
  }
  throw ConfigError("unsupported law family '" + c.name + "'");
}

// ---------------------------------------------------------------------------

cplx Law::cf(const Point& t) const {
  cplx v = 1.0;
  for (int a = 0; a < dim(); ++a) v *= convid::cf(axes[a], t[a]);
  return v;
}

double Law::log_abs_cf(const Point& t) const {
  double v = 0.0;
  for (int a = 0; a < dim(); ++a) v += convid::log_abs_cf(axes[a], t[a]);
  return v;
}

cplx Law::dcf(const Point& t, int axis) const {
  cplx v = 1.0;
  for (int a = 0; a < dim(); ++a) v *= (a == axis) ? convid::dcf(axes[a], t[a]) : convid::cf(axes[a], t[a]);
  return v;
}

double Law::density(const Point& x) const {
  double v = 1.0;
  for (int a = 0; a < dim(); ++a) v *= convid::density(axes[a], x[a]);
  return v;
}

Point Law::sample(Rng& rng) const {
  Point p{0.0, 0.0};
  for (int a = 0; a < dim(); ++a) p[a] = convid::sample(axes[a], rng);
  return p;
}

bool Law::singular() const {
  return std::any_of(axes.begin(), axes.end(),
                     [](const Law1d& l) { return std::holds_alternative<PointMass>(l); });
}

std::string Law::describe() const {
  std::string s;
  for (int a = 0; a < dim(); ++a) {
    if (a) s += "*";
    s += convid::describe(axes[a]);
  }
  return s;
}

Law replicate(const Law1d& law, int dim) { return Law{std::vector<Law1d>(static_cast<std::size_t>(dim), law)}; }

Law parse_law(std::string_view text, int dim) {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("law dimension must be 1 or 2");
  std::vector<Law1d> parts;
  std::size_t start = 0;
  int depth = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i < text.size() && text[i] == '(') ++depth;
    if (i < text.size() && text[i] == ')') --depth;
    if (i == text.size() || (text[i] == '*' && depth == 0)) {
      parts.push_back(parse_law1d(text.substr(start, i - start)));
      start = i + 1;
    }
  }
  if (parts.size() == 1) return replicate(parts.front(), dim);
  if (static_cast<int>(parts.size()) != dim)
    throw ConfigError("law '" + std::string(text) + "' has the wrong number of factors");
  return Law{std::move(parts)};
}

// ---------------------------------------------------------------------------

double RegressionFn::operator()(double t) const {
  switch (kind) {
    case Kind::constant: return coef[0];
    case Kind::linear: return coef[0] + coef[1] * t;
    case Kind::quadratic: return coef[0] + coef[1] * t + coef[2] * t * t;
    case Kind::step: return t > coef[0] ? 1.0 : 0.0;
  }
  return 0.0;
}

double RegressionFn::operator()(const Point& t, int dim) const {
  double v = 0.0;
  for (int a = 0; a < dim; ++a) v += (*this)(t[a]);
  return v;
}

std::string RegressionFn::describe() const {
  std::string name;
  switch (kind) {
    case Kind::constant: name = "constant"; break;
    case Kind::linear: name = "linear"; break;
    case Kind::quadratic: name = "quadratic"; break;
    case Kind::step: name = "step"; break;
  }
  name += "(";
  for (std::size_t i = 0; i < coef.size(); ++i) name += (i ? "," : "") + fmt_num(coef[i]);
  return name + ")";
}

RegressionFn parse_regression(std::string_view text) {
  const Call c = parse_call(text);
  RegressionFn g;
  g.coef = c.args;
  if (c.name == "constant") {
    expect_args(c, 1);
    g.kind = RegressionFn::Kind::constant;
  } else if (c.name == "linear") {
    expect_args(c, 2);
    g.kind = RegressionFn::Kind::linear;
  } else if (c.name == "quadratic") {
    expect_args(c, 3);
    g.kind = RegressionFn::Kind::quadratic;
  } else if (c.name == "step") {
    expect_args(c, 1);
    g.kind = RegressionFn::Kind::step;
  } else {
    throw ConfigError("unsupported regression family '" + c.name + "'");
  }
  return g;
}

}  // namespace convid
