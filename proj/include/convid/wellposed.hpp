#pragma once

// Class-membership diagnostics for the weighted-integrability classes,
// the bump sequence and its log-space divergence table, and
// the perturbation experiment contrasting in-class and out-of-class
// perturbations.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "convid/grid.hpp"
#include "convid/ident.hpp"
#include "convid/laws.hpp"

namespace convid {

struct ClassParams {
  std::vector<double> m{2.0};  // per-axis exponents; one value is replicated
  double V = 10.0;

  double exponent(int axis) const { return m.size() == 1 ? m[0] : m.at(static_cast<std::size_t>(axis)); }
  void validate(int dim) const;
};

using Matrix2 = std::array<std::array<double, kMaxDim>, kMaxDim>;

struct TailClassParams {
  double B = 1.0;
  Matrix2 Lambda{{{0.0, 0.0}, {0.0, 0.0}}};
  ClassParams cls;

  void validate(int dim) const;
};

enum class Verdict { member, nonmember, inconclusive };
std::string to_string(Verdict v);

struct TraceEntry {
  double radius = 0.0;
  double value = 0.0;  // may be +inf
};

struct Diagnosis {
  int dim = 1;
  Verdict verdict = Verdict::inconclusive;
  std::vector<TraceEntry> trace;
  std::optional<Matrix2> fitted_lambda;
  double fit_residual = 0.0;
  std::string note;
  /// For the tail class: the checks on the compensated function and on
  /// its reciprocal.
  std::vector<Diagnosis> parts;
};

/// log|b(t)|; -inf where b vanishes.
using LogMagnitude = std::function<double(const Point&)>;

struct PhiOptions {
  std::vector<double> radii;     // empty: R0 * 2^j, j = 0..5
  double tail_radius = 0.0;      // integrate only over ||t|| > tail_radius
  std::size_t points_1d = 24;  // closed-form Gauss nodes per graded panel
  std::size_t points_2d = 8;
};

/// Verdict from a trace of truncated integrals: member when the last
/// increment is below 1% of the value and the value is below V,
/// nonmember when the value reaches V (or is infinite) or the increments
/// grow, inconclusive otherwise.
Verdict judge_trace(const std::vector<TraceEntry>& trace, double V);

/// int prod (1+t_i^2)^(-m_i) |b(t)| dt over the cube [-R,R]^d for each R
/// of the schedule (default R0 = 8); b given in closed form.
Diagnosis check_phi_mV(const LogMagnitude& log_b, int dim, const ClassParams& p, const PhiOptions& opt = {});
/// Same on the nodes of a grid (default R0 = half-width / 32).
Diagnosis check_phi_mV(const GridFn& b, const ClassParams& p, const PhiOptions& opt = {});

struct TailFit {
  Matrix2 Lambda{{{0.0, 0.0}, {0.0, 0.0}}};
  std::vector<double> coefficients;  // [offset, log(1+|t|^2) power, quadratic terms...]
  double residual = 0.0;             // rms of the log-magnitude fit
  std::size_t points = 0;
};

/// Least squares of log|b| on 1, log(1+|t|^2) and -t'Lambda t over the
/// grid nodes with ||t|| > B.
TailFit fit_tail_log_magnitude(const LogMagnitude& log_b, const GridSpec& grid, double B);

struct TailGaussianFit {
  Matrix2 Lambda{{{0.0, 0.0}, {0.0, 0.0}}};
  GridFn bbar;  // b * exp(t'Lambda t)
  double residual = 0.0;
};

TailGaussianFit fit_tail_gaussian(const GridFn& b, double B);

/// |Lambda_fit - Lambda| (max entry) allowed before a mismatch is declared.
double lambda_tolerance(const Matrix2& target, int dim);

/// Fitted Lambda matches params.Lambda, and the compensated function and
/// its reciprocal both belong to the (m,V) class over ||t|| > B. The closed
/// form version fits on `fit_grid` and integrates beyond it.
Diagnosis check_tail_class(const LogMagnitude& log_b, int dim, const TailClassParams& p,
                           const GridSpec& fit_grid, const PhiOptions& opt = {});
Diagnosis check_tail_class(const GridFn& b, const TailClassParams& p, const PhiOptions& opt = {});

/// Profile of the bump b_n: e^-n on [n-1/n, n+1/n] with raised
/// cosine shoulders over the neighbouring intervals of width 1/n.
double bn_value(int n, double x);
double bn_derivative(int n, double x);
/// log bn(x); -inf off the support.
double bn_log_value(int n, double x);
GridFn build_bn(int n, const GridSpec& spec);

struct IllposedRow {
  int n = 0;
  double log_pair = 0.0;    // log <bn, psi>
  double log_ratio = 0.0;   // log <bn / phi, psi>
  double bound = 0.0;       // log(2/n) - 2n + (n - 1/n)^2
  double bank_max = 0.0;    // max over the test bank of |<bn, psi>|
  bool bound_holds = false;
};

struct IllposedTable {
  std::vector<IllposedRow> rows;
  bool pair_decreasing = false;
  bool bank_decreasing = false;
  bool all_bounds_hold = false;
};

/// phi(x) = exp(-x^2), psi(x) = exp(-|x|); all sums in log space.
IllposedTable illposed_demo(const std::vector<int>& ns, const GridSpec& grid = make_grid(-16.0, 16.0, 2048));

enum class PerturbationKind { consistent, wrong_lambda };
std::string to_string(PerturbationKind k);

struct StabilityRow {
  PerturbationKind kind = PerturbationKind::consistent;
  double scale = 0.0;
  double distance = 0.0;
  bool failed = false;
  std::string note;
};

struct StabilityOptions {
  GridSpec grid = make_grid(-8.0, 8.0, 1024);
  double tau = 1e-12;
  Case which = Case::a;
  double wrong_factor = 0.25;  // Lambda multiplier of the out-of-class perturbation
};

struct StabilityReport {
  std::vector<StabilityRow> rows;
  bool consistent_vanishing = false;  // distances strictly decrease with the scale
  double contrast = 0.0;              // wrong / consistent distance at the middle scale
};

/// Perturbs the oracle observables of (g, f) by moments of a latent
/// perturbation q/phi, with q = (1+|t|^2)^-1 exp(-t'Lambda t) (in class)
/// or the same with Lambda scaled by wrong_factor (out of class), re-solves
/// and records the weak
/// distance of the recovered gamma from the unperturbed one.
StabilityReport stability_experiment(const Law& g, const Law& f, const TailClassParams& p,
                                     const std::vector<double>& scales, const StabilityOptions& opt = {});

}  // namespace convid
