#pragma once

// Closed-form probability laws (characteristic function, its derivative,
// density, sampler) and regression-function families. These supply the
// ground truth for oracle moments, simulation and acceptance checks.

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "convid/grid.hpp"

namespace convid {

using Rng = std::mt19937_64;

/// Uniform on [0, 1) with 53 random bits; identical on every platform.
double uniform01(Rng& rng);
double standard_normal(Rng& rng);

struct PointMass {
  double at = 0.0;
};
struct Gaussian {
  double mean = 0.0;
  double variance = 1.0;
};
struct Laplace {
  double location = 0.0;
  double scale = 1.0;
};
struct Uniform {
  double lo = -1.0;
  double hi = 1.0;
};
struct GaussianMixture {
  double weight = 0.5;  // of the first component
  Gaussian first;
  Gaussian second;
};
/// Density (1 - cos(W x)) / (pi W x^2); its characteristic function is the
/// triangle max(0, 1 - |t|/W), supported in [-W, W].
struct Fejer {
  double width = 1.0;
};

using Law1d = std::variant<PointMass, Gaussian, Laplace, Uniform, GaussianMixture, Fejer>;

cplx cf(const Law1d& law, double t);
cplx dcf(const Law1d& law, double t);
/// log |cf|, computed without underflow far out in the tails.
double log_abs_cf(const Law1d& law, double t);
/// Throws ConfigError for a point mass.
double density(const Law1d& law, double x);
double sample(const Law1d& law, Rng& rng);
double mean(const Law1d& law);
double variance(const Law1d& law);
std::string describe(const Law1d& law);
/// Parses e.g. "gaussian(1,0.25)", "laplace(0,1)", "uniform(-1,1)",
/// "mixture(0.5,-1,0.5,1,0.5)", "point(0)", "fejer(1)".
Law1d parse_law1d(std::string_view text);

/// Product of independent one-dimensional laws, one per axis.
struct Law {
  std::vector<Law1d> axes;

  int dim() const { return static_cast<int>(axes.size()); }
  cplx cf(const Point& t) const;
  /// Partial derivative of the characteristic function along `axis`.
  cplx dcf(const Point& t, int axis) const;
  double log_abs_cf(const Point& t) const;
  double density(const Point& x) const;
  Point sample(Rng& rng) const;
  bool singular() const;
  std::string describe() const;
};

/// "gaussian(0,1)" (replicated over `dim` axes) or
/// "gaussian(0,1)*laplace(0,1)" (one factor per axis).
Law parse_law(std::string_view text, int dim);
Law replicate(const Law1d& law, int dim);

/// Regression function g of the errors-in-variables model; additive over
/// axes in two dimensions.
struct RegressionFn {
  enum class Kind { constant, linear, quadratic, step };
  Kind kind = Kind::linear;
  std::vector<double> coef;  // constant: c; linear: a,b; quadratic: a,b,c; step: t0

  double operator()(double t) const;
  double operator()(const Point& t, int dim) const;
  std::string describe() const;
};

/// Parses "constant(1)", "linear(0,1)", "quadratic(0,0,1)", "step(0)".
RegressionFn parse_regression(std::string_view text);

}  // namespace convid
