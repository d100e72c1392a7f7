#include "convid/wellposed.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "convid/error.hpp"

namespace convid {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

// Streaming log-sum-exp.
struct LogSum {
  double max = -kInf;
  double scaled = 0.0;  // sum exp(x - max)

  void add(double x) {
    if (x == -kInf) return;
    if (x == kInf || std::isnan(x)) {
      max = kInf;
      return;
    }
    if (max == kInf) return;
    if (x <= max) {
      scaled += std::exp(x - max);
    } else {
      scaled = scaled * std::exp(max - x) + 1.0;
      max = x;
    }
  }
  double log() const {
    if (max == -kInf) return -kInf;
    if (max == kInf) return kInf;
    return max + std::log(scaled);
  }
};

double log_weight(const Point& t, int dim, const ClassParams& p) {
  double w = 0.0;
  for (int a = 0; a < dim; ++a) w -= p.exponent(a) * std::log1p(t[a] * t[a]);
  return w;
}

double norm2(const Point& t, int dim) {
  double s = 0.0;
  for (int a = 0; a < dim; ++a) s += t[a] * t[a];
  return s;
}

double quadratic(const Matrix2& L, const Point& t, int dim) {
  if (dim == 1) return L[0][0] * t[0] * t[0];
  return L[0][0] * t[0] * t[0] + 2.0 * L[0][1] * t[0] * t[1] + L[1][1] * t[1] * t[1];
}

struct Rule1 {
  std::vector<double> t, logw;
};

// Gauss-Legendre nodes and weights on [-1, 1]
void gauss_legendre(std::size_t n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double z = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

// composite rule on [-R, R]; panels double in width away from the origin
// so peaks near zero and long tails are both resolved
Rule1 graded_rule(double R, std::size_t per_panel, double cut) {
  std::vector<double> br{0.0};
  for (double b = 0.125; b < R; b *= 2.0) br.push_back(b);
  br.push_back(R);
  if (cut > 0.0 && cut < R) br.push_back(cut);
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  std::vector<double> gx, gw;
  gauss_legendre(per_panel, gx, gw);
  Rule1 r;
  for (std::size_t k = 0; k + 1 < br.size(); ++k) {
    const double mid = 0.5 * (br[k] + br[k + 1]), half = 0.5 * (br[k + 1] - br[k]);
    for (std::size_t q = 0; q < gx.size(); ++q) {
      const double lw = std::log(half * gw[q]);
      for (double s : {-1.0, 1.0}) {
        r.t.push_back(s * (mid + half * gx[q]));
        r.logw.push_back(lw);
      }
    }
  }
  return r;
}

std::vector<double> schedule(const PhiOptions& opt, double r0) {
  if (!opt.radii.empty()) {
    for (std::size_t i = 1; i < opt.radii.size(); ++i)
      if (!(opt.radii[i] > opt.radii[i - 1])) throw ConfigError("radii must be strictly increasing");
    return opt.radii;
  }
  std::vector<double> r;
  for (int j = 0; j <= 5; ++j) r.push_back(r0 * std::ldexp(1.0, j));
  return r;
}

Diagnosis finish(std::vector<TraceEntry> trace, double V, int dim) {
  Diagnosis d;
  d.dim = dim;
  d.verdict = judge_trace(trace, V);
  d.trace = std::move(trace);
  return d;
}

// Trace over grid nodes given log-magnitudes at every node.
Diagnosis grid_trace(const GridSpec& s, const std::vector<double>& logb, const ClassParams& p,
                     const PhiOptions& opt) {
  p.validate(s.dim);
  double half = kInf;
  for (int a = 0; a < s.dim; ++a) half = std::min(half, std::min(-s.lo[a], s.hi[a]));
  const auto radii = schedule(opt, half / 32.0);
  const double tail2 = opt.tail_radius * opt.tail_radius;
  std::vector<TraceEntry> trace;
  const double lvol = std::log(s.cell_volume());
  for (double R : radii) {
    LogSum acc;
    for (std::size_t k = 0; k < s.size(); ++k) {
      const Point t = s.point(k);
      bool inside = true;
      for (int a = 0; a < s.dim; ++a) inside = inside && std::abs(t[a]) <= R * (1.0 + 1e-12);
      if (!inside || (tail2 > 0.0 && norm2(t, s.dim) <= tail2)) continue;
      acc.add(log_weight(t, s.dim, p) + logb[k]);
    }
    trace.push_back({R, std::exp(acc.log() + lvol)});
  }
  return finish(std::move(trace), p.V, s.dim);
}

Matrix2 lambda_from(const Eigen::VectorXd& c, int dim) {
  Matrix2 L{{{0.0, 0.0}, {0.0, 0.0}}};
  if (dim == 1) {
    L[0][0] = c[2];
  } else {
    L[0][0] = c[2];
    L[0][1] = L[1][0] = c[3];
    L[1][1] = c[4];
  }
  return L;
}

double lambda_gap(const Matrix2& a, const Matrix2& b, int dim) {
  double g = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g = std::max(g, std::abs(a[i][j] - b[i][j]));
  return g;
}

Diagnosis combine_tail(const Matrix2& fitted, double residual, const TailClassParams& p, int dim,
                       Diagnosis bbar, Diagnosis inverse) {
  Diagnosis d;
  d.dim = dim;
  d.fitted_lambda = fitted;
  d.fit_residual = residual;
  const double gap = lambda_gap(fitted, p.Lambda, dim);
  const bool lambda_ok = gap <= lambda_tolerance(p.Lambda, dim);
  if (!lambda_ok) {
    d.verdict = Verdict::nonmember;
    d.note = "fitted Lambda differs from the class Lambda by " + std::to_string(gap);
  } else if (bbar.verdict == Verdict::member && inverse.verdict == Verdict::member) {
    d.verdict = Verdict::member;
  } else if (bbar.verdict == Verdict::nonmember || inverse.verdict == Verdict::nonmember) {
    d.verdict = Verdict::nonmember;
    d.note = bbar.verdict == Verdict::nonmember ? "compensated function fails the (m,V) check"
                                               : "reciprocal of the compensated function fails the (m,V) check";
  } else {
    d.verdict = Verdict::inconclusive;
  }
  d.trace = bbar.trace;
  d.parts.push_back(std::move(bbar));
  d.parts.push_back(std::move(inverse));
  return d;
}

}  // namespace

void ClassParams::validate(int dim) const {
  if (m.empty() || (m.size() != 1 && static_cast<int>(m.size()) != dim))
    throw ConfigError("class exponents: give one value or one per axis");
  for (double v : m)
    if (!(v >= 0.0)) throw ConfigError("class exponents must be non-negative");
  if (!(V > 0.0)) throw ConfigError("class bound V must be positive");
}

void TailClassParams::validate(int dim) const {
  cls.validate(dim);
  if (!(B > 0.0)) throw ConfigError("tail radius B must be positive");
  if (dim == 2 && Lambda[0][1] != Lambda[1][0]) throw ConfigError("Lambda must be symmetric");
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::member: return "member";
    case Verdict::nonmember: return "nonmember";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Verdict judge_trace(const std::vector<TraceEntry>& trace, double V) {
  if (trace.empty()) return Verdict::inconclusive;
  const double last = trace.back().value;
  if (!std::isfinite(last) || last >= V) return Verdict::nonmember;
  if (trace.size() < 2) return Verdict::inconclusive;
  const double inc = last - trace[trace.size() - 2].value;
  if (inc <= 0.01 * last) return Verdict::member;
  if (trace.size() >= 3) {
    const double prev = trace[trace.size() - 2].value - trace[trace.size() - 3].value;
    if (inc > prev) return Verdict::nonmember;
  }
  return Verdict::inconclusive;
}

Diagnosis check_phi_mV(const LogMagnitude& log_b, int dim, const ClassParams& p, const PhiOptions& opt) {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("dimension must be 1 or 2");
  p.validate(dim);
  const auto radii = schedule(opt, 8.0);
  const std::size_t np = dim == 1 ? opt.points_1d : opt.points_2d;
  if (np < 2) throw ConfigError("too few quadrature points");
  const double tail2 = opt.tail_radius * opt.tail_radius;
  std::vector<TraceEntry> trace;
  for (double R : radii) {
    const Rule1 r = graded_rule(R, np, opt.tail_radius);
    LogSum acc;
    const std::size_t n1 = dim == 1 ? 1 : r.t.size();
    for (std::size_t i = 0; i < r.t.size(); ++i) {
      for (std::size_t j = 0; j < n1; ++j) {
        const Point t{r.t[i], dim == 1 ? 0.0 : r.t[j]};
        if (tail2 > 0.0 && norm2(t, dim) <= tail2) continue;
        const double lw = r.logw[i] + (dim == 2 ? r.logw[j] : 0.0);
        acc.add(lw + log_weight(t, dim, p) + log_b(t));
      }
    }
    trace.push_back({R, std::exp(acc.log())});
  }
  return finish(std::move(trace), p.V, dim);
}

Diagnosis check_phi_mV(const GridFn& b, const ClassParams& p, const PhiOptions& opt) {
  std::vector<double> logb(b.size());
  for (std::size_t k = 0; k < b.size(); ++k) logb[k] = std::log(std::abs(b[k]));
  return grid_trace(b.spec(), logb, p, opt);
}

TailFit fit_tail_log_magnitude(const LogMagnitude& log_b, const GridSpec& grid, double B) {
  const int d = grid.dim;
  const int cols = d == 1 ? 3 : 5;
  std::vector<std::array<double, 5>> rows;
  std::vector<double> rhs;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Point t = grid.point(k);
    const double r2 = norm2(t, d);
    if (r2 <= B * B) continue;
    const double v = log_b(t);
    if (!std::isfinite(v)) continue;
    if (d == 1)
      rows.push_back({1.0, std::log1p(r2), -t[0] * t[0], 0.0, 0.0});
    else
      rows.push_back({1.0, std::log1p(r2), -t[0] * t[0], -2.0 * t[0] * t[1], -t[1] * t[1]});
    rhs.push_back(v);
  }
  if (rows.size() < static_cast<std::size_t>(cols))
    throw NumericalError("tail fit: the function vanishes on the tail region");
  Eigen::MatrixXd A(static_cast<Eigen::Index>(rows.size()), cols);
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int c = 0; c < cols; ++c) A(static_cast<Eigen::Index>(i), c) = rows[i][static_cast<std::size_t>(c)];
    y[static_cast<Eigen::Index>(i)] = rhs[i];
  }
  const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(y);
  TailFit fit;
  fit.Lambda = lambda_from(coef, d);
  fit.coefficients.assign(coef.data(), coef.data() + coef.size());
  fit.residual = std::sqrt((A * coef - y).squaredNorm() / static_cast<double>(rows.size()));
  fit.points = rows.size();
  return fit;
}

TailGaussianFit fit_tail_gaussian(const GridFn& b, double B) {
  if (!(B > 0.0)) throw ConfigError("tail radius B must be positive");
  const GridSpec& s = b.spec();
  const int d = s.dim;
  std::vector<double> logb(b.size());
  for (std::size_t k = 0; k < b.size(); ++k) logb[k] = std::log(std::abs(b[k]));
  // the fit evaluates only at grid nodes; map each back to its index
  auto exact = [&](const Point& t) {
    std::array<std::size_t, kMaxDim> idx{0, 0};
    for (int a = 0; a < d; ++a)
      idx[a] = static_cast<std::size_t>(std::llround((t[a] - s.lo[a]) / s.step(a)));
    return logb[s.flat(idx[0], idx[1])];
  };
  const TailFit fit = fit_tail_log_magnitude(exact, s, B);
  TailGaussianFit out;
  out.Lambda = fit.Lambda;
  out.residual = fit.residual;
  std::vector<cplx> v(b.size());
  for (std::size_t k = 0; k < b.size(); ++k) {
    if (b[k] == cplx(0.0)) continue;
    const Point t = s.point(k);
    v[k] = std::polar(std::exp(logb[k] + quadratic(fit.Lambda, t, d)), std::arg(b[k]));
  }
  out.bbar = GridFn(s, std::move(v), "bbar");
  return out;
}

double lambda_tolerance(const Matrix2& target, int dim) {
  double m = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m = std::max(m, std::abs(target[i][j]));
  return 1e-3 + 0.01 * m;
}

Diagnosis check_tail_class(const LogMagnitude& log_b, int dim, const TailClassParams& p, const GridSpec& fit_grid,
                           const PhiOptions& opt) {
  p.validate(dim);
  if (fit_grid.dim != dim) throw ConfigError("fit grid dimension differs");
  const TailFit fit = fit_tail_log_magnitude(log_b, fit_grid, p.B);
  const Matrix2 L = fit.Lambda;
  PhiOptions o = opt;
  o.tail_radius = p.B;
  const LogMagnitude bbar = [&](const Point& t) { return log_b(t) + quadratic(L, t, dim); };
  const LogMagnitude inv = [&](const Point& t) { return -(log_b(t) + quadratic(L, t, dim)); };
  return combine_tail(L, fit.residual, p, dim, check_phi_mV(bbar, dim, p.cls, o), check_phi_mV(inv, dim, p.cls, o));
}

Diagnosis check_tail_class(const GridFn& b, const TailClassParams& p, const PhiOptions& opt) {
  const GridSpec& s = b.spec();
  p.validate(s.dim);
  const TailGaussianFit fit = fit_tail_gaussian(b, p.B);
  PhiOptions o = opt;
  o.tail_radius = p.B;
  std::vector<double> lb(s.size()), li(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    lb[k] = std::log(std::abs(fit.bbar[k]));
    li[k] = -lb[k];
  }
  return combine_tail(fit.Lambda, fit.residual, p, s.dim, grid_trace(s, lb, p.cls, o), grid_trace(s, li, p.cls, o));
}

// ---------------------------------------------------------------------------

double bn_value(int n, double x) {
  const double w = 1.0 / n;
  const double a = n - 2 * w, b = n - w, c = n + w, d = n + 2 * w;
  const double top = std::exp(-static_cast<double>(n));
  if (x <= a || x >= d) return 0.0;
  if (x >= b && x <= c) return top;
  const double u = x < b ? (x - a) / w : (d - x) / w;
  const double s = std::sin(0.5 * kPi * u);
  return top * s * s;
}

double bn_derivative(int n, double x) {
  const double w = 1.0 / n;
  const double a = n - 2 * w, b = n - w, c = n + w, d = n + 2 * w;
  const double top = std::exp(-static_cast<double>(n));
  if (x <= a || x >= d || (x >= b && x <= c)) return 0.0;
  const double k = 0.5 * kPi / w;
  if (x < b) return top * std::sin(2.0 * k * (x - a)) * k;
  return -top * std::sin(2.0 * k * (d - x)) * k;
}

double bn_log_value(int n, double x) {
  const double w = 1.0 / n;
  const double a = n - 2 * w, b = n - w, c = n + w, d = n + 2 * w;
  if (x <= a || x >= d) return -kInf;
  if (x >= b && x <= c) return -static_cast<double>(n);
  const double u = x < b ? (x - a) / w : (d - x) / w;
  return -static_cast<double>(n) + 2.0 * std::log(std::sin(0.5 * kPi * u));
}

GridFn build_bn(int n, const GridSpec& spec) {
  if (n < 1) throw ConfigError("bump index must be positive");
  if (spec.dim != 1) throw ConfigError("the bump sequence is one-dimensional");
  const double w = 1.0 / n;
  if (spec.lo[0] > n - 2 * w || spec.hi[0] <= n + 2 * w)
    throw ConfigError("grid does not cover the support of b_" + std::to_string(n));
  return GridFn::sample(spec, [n](const Point& x) { return bn_value(n, x[0]); }, "b_" + std::to_string(n));
}

IllposedTable illposed_demo(const std::vector<int>& ns, const GridSpec& grid) {
  if (ns.empty()) throw ConfigError("illposed demo needs at least one n");
  const TestBank bank = TestBank::standard();
  IllposedTable t;
  const double lh = std::log(grid.step(0));
  for (int n : ns) {
    if (n < 2) throw ConfigError("illposed demo needs n >= 2");
    const GridFn bn = build_bn(n, grid);
    LogSum pair, ratio;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double x = grid.coord(0, k);
      const double lb = bn_log_value(n, x);
      // psi = exp(-|x|), 1/phi = exp(x^2)
      pair.add(lb - std::abs(x));
      ratio.add(lb + x * x - std::abs(x));
    }
    IllposedRow r;
    r.n = n;
    r.log_pair = pair.log() + lh;
    r.log_ratio = ratio.log() + lh;
    const double dn = n;
    r.bound = std::log(2.0 / dn) - 2.0 * dn + (dn - 1.0 / dn) * (dn - 1.0 / dn);
    r.bank_max = weak_norm(bn, bank);
    r.bound_holds = r.log_ratio >= r.bound;
    t.rows.push_back(r);
  }
  t.all_bounds_hold = std::all_of(t.rows.begin(), t.rows.end(), [](const IllposedRow& r) { return r.bound_holds; });
  t.pair_decreasing = t.bank_decreasing = true;
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    t.pair_decreasing = t.pair_decreasing && t.rows[i].log_pair < t.rows[i - 1].log_pair;
    t.bank_decreasing = t.bank_decreasing && t.rows[i].bank_max < t.rows[i - 1].bank_max;
  }
  return t;
}

// ---------------------------------------------------------------------------

std::string to_string(PerturbationKind k) { return k == PerturbationKind::consistent ? "consistent" : "wrong_lambda"; }

namespace {

struct Perturbation {
  std::function<double(const Point&)> q;
  std::function<double(const Point&, int)> dq;
};

Perturbation consistent_perturbation(const Matrix2& L, int dim) {
  Perturbation p;
  p.q = [L, dim](const Point& t) { return std::exp(-quadratic(L, t, dim)) / (1.0 + norm2(t, dim)); };
  p.dq = [L, dim, q = p.q](const Point& t, int k) {
    double lt = L[k][0] * t[0];
    if (dim > 1) lt += L[k][1] * t[1];
    return q(t) * (-2.0 * t[k] / (1.0 + norm2(t, dim)) - 2.0 * lt);
  };
  return p;
}

Matrix2 scaled(Matrix2 L, double r) {
  for (auto& row : L)
    for (double& v : row) v *= r;
  return L;
}

// Moments of the latent perturbation q/phi observed through phi.
MomentSet perturbed(const MomentSet& base, const Law& f, const Perturbation& pert, double s) {
  MomentSet m = base;
  const GridSpec& spec = base.spec();
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const Point t = spec.point(k);
    const double q = pert.q(t);
    m.eps1[k] += s * q;
    std::array<double, kMaxDim> dq{0.0, 0.0};
    bool zero = q == 0.0;
    for (int a = 0; a < base.dim(); ++a) {
      dq[a] = pert.dq(t, a);
      zero = zero && dq[a] == 0.0;
    }
    if (zero) continue;
    const cplx phi = f.cf(t);
    for (int a = 0; a < base.dim(); ++a) {
      const cplx dlogphi = f.dcf(t, a) / phi;
      m.eps2[a][k] += -kI * s * (dq[a] - q * dlogphi);
      if (m.has_deps1()) m.deps1[a][k] += s * dq[a];
    }
  }
  return m;
}

}  // namespace

StabilityReport stability_experiment(const Law& g, const Law& f, const TailClassParams& p,
                                     const std::vector<double>& scales, const StabilityOptions& opt) {
  const int dim = opt.grid.dim;
  p.validate(dim);
  if (!(opt.wrong_factor > 0.0) || opt.wrong_factor == 1.0) throw ConfigError("wrong_factor must be positive and not 1");
  if (scales.empty()) throw ConfigError("stability experiment needs scales");
  const MomentSet base = oracle_moments(g, f, opt.grid);
  SolveOptions so;
  so.tau = opt.tau;
  const Solution ref = solve(base, opt.which, so);
  const TestBank bank = TestBank::standard();

  std::vector<double> sorted = scales;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  StabilityReport rep;
  const std::pair<PerturbationKind, Perturbation> kinds[] = {
      {PerturbationKind::consistent, consistent_perturbation(p.Lambda, dim)},
      {PerturbationKind::wrong_lambda, consistent_perturbation(scaled(p.Lambda, opt.wrong_factor), dim)},
  };
  for (const auto& [kind, pert] : kinds) {
    for (double s : sorted) {
      StabilityRow row;
      row.kind = kind;
      row.scale = s;
      try {
        const MomentSet m = perturbed(base, f, pert, s);
        const Solution sol = solve(m, opt.which, so);
        if (!sol.identified) {
          row.failed = true;
          row.note = "support mask collapsed to the origin";
        } else {
          row.distance = weak_distance(sol.gamma, ref.gamma, bank);
        }
      } catch (const NumericalError& e) {
        row.failed = true;
        row.note = e.what();
      }
      rep.rows.push_back(row);
    }
  }
  auto dist = [&](PerturbationKind k, double s) {
    for (const auto& r : rep.rows)
      if (r.kind == k && r.scale == s && !r.failed) return r.distance;
    return std::numeric_limits<double>::quiet_NaN();
  };
  rep.consistent_vanishing = true;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double d = dist(PerturbationKind::consistent, sorted[i]);
    if (std::isnan(d)) rep.consistent_vanishing = false;
    if (i > 0 && !(d < dist(PerturbationKind::consistent, sorted[i - 1]))) rep.consistent_vanishing = false;
  }
  const double mid = sorted[sorted.size() / 2];
  rep.contrast = dist(PerturbationKind::wrong_lambda, mid) / dist(PerturbationKind::consistent, mid);
  return rep;
}

}  // namespace convid
