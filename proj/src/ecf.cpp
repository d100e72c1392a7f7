#include "convid/ecf.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "convid/error.hpp"
#include "convid/parallel.hpp"

namespace convid {
namespace {

const cplx kI{0.0, 1.0};

// exp(i zeta_k t) along one frequency axis. The recurrence runs outward
// from the origin node and is re-anchored every 32 steps; the negative
// side is the exact conjugate of the positive side.
void axis_phases(const GridSpec& freq, int axis, double t, std::vector<cplx>& out) {
  const std::size_t n = freq.n[axis];
  const std::size_t o = freq.origin(axis);
  const double d = freq.step(axis);
  out.resize(n);
  const std::size_t reach = std::max(o, n - 1 - o);
  const cplx r = std::polar(1.0, d * t);
  cplx w = 1.0;
  out[o] = 1.0;
  for (std::size_t j = 1; j <= reach; ++j) {
    w = (j % 32 == 0) ? std::polar(1.0, static_cast<double>(j) * d * t) : w * r;
    if (o + j < n) out[o + j] = w;
    if (j <= o) out[o - j] = std::conj(w);
  }
}

// sum_j weight_m(j) * exp(i zeta.z_j) for several real weight columns at
// once, divided by the sample count.
std::vector<GridFn> weighted_sums(std::span<const Point> z, int dim, const GridSpec& freq,
                                  const std::vector<std::function<double(std::size_t)>>& weights) {
  if (z.empty()) throw ConfigError("empirical characteristic function of an empty sample");
  if (freq.dim != dim) throw ConfigError("sample and grid dimensions differ");
  const std::size_t total = freq.size();
  const std::size_t m = weights.size();
  const std::size_t acc_bytes = total * m * sizeof(cplx);
  const std::size_t chunks =
      std::clamp<std::size_t>((std::size_t{64} << 20) / std::max<std::size_t>(acc_bytes, 1), 1, 32);
  std::vector<std::vector<cplx>> partial(chunks, std::vector<cplx>());
  parallel_chunks(z.size(), chunks, [&](std::size_t c, std::size_t b, std::size_t e) {
    auto& acc = partial[c];
    acc.assign(total * m, cplx(0.0));
    std::vector<cplx> e0, e1;
    std::vector<double> wv(m);
    for (std::size_t j = b; j < e; ++j) {
      for (std::size_t q = 0; q < m; ++q) wv[q] = weights[q](j);
      axis_phases(freq, 0, z[j][0], e0);
      if (dim == 1) {
        for (std::size_t k = 0; k < total; ++k)
          for (std::size_t q = 0; q < m; ++q) acc[q * total + k] += wv[q] * e0[k];
      } else {
        axis_phases(freq, 1, z[j][1], e1);
        const std::size_t n1 = freq.n[1];
        for (std::size_t k0 = 0; k0 < freq.n[0]; ++k0)
          for (std::size_t k1 = 0; k1 < n1; ++k1) {
            const cplx t = e0[k0] * e1[k1];
            const std::size_t k = k0 * n1 + k1;
            for (std::size_t q = 0; q < m; ++q) acc[q * total + k] += wv[q] * t;
          }
      }
    }
  });
  const double n = static_cast<double>(z.size());
  std::vector<GridFn> out;
  for (std::size_t q = 0; q < m; ++q) {
    std::vector<cplx> v(total, cplx(0.0));
    for (const auto& acc : partial) {
      if (acc.empty()) continue;
      for (std::size_t k = 0; k < total; ++k) v[k] += acc[q * total + k];
    }
    for (auto& x : v) x /= n;
    out.emplace_back(freq, std::move(v));
  }
  return out;
}

void check_axis(int k, int dim) {
  if (k < 0 || k >= dim) throw ConfigError("axis index out of range");
}

void check_aligned(std::span<const Point> x, std::span<const Point> z) {
  if (x.size() != z.size()) throw ConfigError("x and z have different lengths");
}

double gaussian_kernel(double u) { return std::exp(-0.5 * u * u); }

void require_identity(const GridFn& lhs, const GridFn& rhs, const char* what) {
  double err = 0.0, scale = 1.0;
  for (std::size_t k = 0; k < lhs.size(); ++k) {
    err = std::max(err, std::abs(lhs[k] - rhs[k]));
    scale = std::max(scale, std::abs(rhs[k]));
  }
  if (err > 1e-10 * scale) throw NumericalError(std::string("oracle identity violated: ") + what);
}

}  // namespace

std::string to_string(Model m) {
  switch (m) {
    case Model::example1: return "example1";
    case Model::example2: return "example2";
    case Model::example3: return "example3";
  }
  return "example1";
}

Model parse_model(std::string_view text) {
  if (text == "example1" || text == "1") return Model::example1;
  if (text == "example2" || text == "2") return Model::example2;
  if (text == "example3" || text == "3") return Model::example3;
  throw ConfigError("unknown model '" + std::string(text) + "'");
}

void SampleSet::validate() const {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("sample dimension must be 1 or 2");
  if (z.size() < 2) throw ConfigError("sample needs at least two rows");
  if (x.size() != z.size()) throw ConfigError("x and z columns have different lengths");
  if (model == Model::example2 && y.size() != z.size())
    throw ConfigError("example2 requires a y column aligned with z");
  auto finite = [this](const Point& p) {
    for (int a = 0; a < dim; ++a)
      if (!std::isfinite(p[a])) return false;
    return true;
  };
  if (!std::all_of(z.begin(), z.end(), finite) || !std::all_of(x.begin(), x.end(), finite))
    throw ConfigError("sample contains non-finite values");
  if (!std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); }))
    throw ConfigError("sample contains non-finite values");
}

void MomentSet::validate() const {
  const int d = dim();
  if (static_cast<int>(eps2.size()) != d) throw ConfigError("moment set needs one eps2 per axis");
  if (!deps1.empty() && static_cast<int>(deps1.size()) != d)
    throw ConfigError("moment set needs one d eps1 per axis");
  for (const auto& g : eps2) eps1.require_same_spec(g);
  for (const auto& g : deps1) eps1.require_same_spec(g);
}

GridFn ecf(std::span<const Point> z, const GridSpec& freq) {
  auto r = weighted_sums(z, freq.dim, freq, {[](std::size_t) { return 1.0; }});
  r[0].set_label("eps1");
  return std::move(r[0]);
}

GridFn moment_ecf(std::span<const Point> x, std::span<const Point> z, int k, const GridSpec& freq) {
  check_aligned(x, z);
  check_axis(k, freq.dim);
  auto r = weighted_sums(z, freq.dim, freq, {[&](std::size_t j) { return x[j][k]; }});
  r[0].set_label("eps2_" + std::to_string(k + 1));
  return std::move(r[0]);
}

GridFn ecf_derivative(std::span<const Point> z, int k, const GridSpec& freq) {
  check_axis(k, freq.dim);
  auto r = weighted_sums(z, freq.dim, freq, {[&](std::size_t j) { return z[j][k]; }});
  r[0] *= kI;
  r[0].set_label("deps1_" + std::to_string(k + 1));
  return std::move(r[0]);
}

cplx ecf_at(std::span<const Point> z, const Point& zeta) {
  if (z.empty()) throw ConfigError("empirical characteristic function of an empty sample");
  cplx acc = 0.0;
  for (const auto& p : z) acc += std::polar(1.0, zeta[0] * p[0] + zeta[1] * p[1]);
  return acc / static_cast<double>(z.size());
}

MomentSet empirical_moments(std::span<const Point> x, std::span<const Point> z, int dim,
                            const GridSpec& freq) {
  check_aligned(x, z);
  std::vector<std::function<double(std::size_t)>> w{[](std::size_t) { return 1.0; }};
  for (int k = 0; k < dim; ++k) w.emplace_back([&x, k](std::size_t j) { return x[j][k]; });
  for (int k = 0; k < dim; ++k) w.emplace_back([&z, k](std::size_t j) { return z[j][k]; });
  auto r = weighted_sums(z, dim, freq, w);
  MomentSet m;
  m.eps1 = std::move(r[0]);
  m.eps1.set_label("eps1");
  for (int k = 0; k < dim; ++k) {
    r[1 + k].set_label("eps2_" + std::to_string(k + 1));
    m.eps2.push_back(std::move(r[1 + k]));
  }
  for (int k = 0; k < dim; ++k) {
    GridFn d = std::move(r[1 + dim + k]);
    d *= kI;
    d.set_label("deps1_" + std::to_string(k + 1));
    m.deps1.push_back(std::move(d));
  }
  m.source = Source::empirical;
  m.n_samples = z.size();
  return m;
}

double silverman_bandwidth(std::span<const Point> z, int dim) {
  if (z.size() < 2) throw ConfigError("bandwidth rule needs at least two rows");
  double sd = 0.0;
  for (int a = 0; a < dim; ++a) {
    double mu = 0.0;
    for (const auto& p : z) mu += p[a];
    mu /= static_cast<double>(z.size());
    double ss = 0.0;
    for (const auto& p : z) ss += (p[a] - mu) * (p[a] - mu);
    sd += std::sqrt(ss / static_cast<double>(z.size() - 1));
  }
  sd /= dim;
  return 1.06 * sd * std::pow(static_cast<double>(z.size()), -1.0 / (4.0 + dim));
}

GridFn boundary_window(const GridSpec& spatial, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("window fraction must lie in (0,1)");
  auto axis_weight = [&](int a, double x) {
    const double half = 0.5 * (spatial.hi[a] - spatial.lo[a]);
    const double flat = (1.0 - fraction) * half;
    const double r = std::abs(x);
    if (r <= flat) return 1.0;
    if (r >= half) return 0.0;
    const double c = std::cos(0.5 * std::numbers::pi * (r - flat) / (fraction * half));
    return c * c;
  };
  return GridFn::sample(
      spatial,
      [&](const Point& p) {
        double w = axis_weight(0, p[0]);
        if (spatial.dim > 1) w *= axis_weight(1, p[1]);
        return w;
      },
      "window");
}

RegressionEstimate regression_moments(std::span<const double> y, std::span<const Point> x,
                                      std::span<const Point> z, int dim, const GridSpec& freq,
                                      const RegressionOptions& opt) {
  check_aligned(x, z);
  if (y.size() != z.size()) throw ConfigError("y and z have different lengths");
  if (z.size() < 2) throw ConfigError("regression moments need at least two rows");
  if (freq.dim != dim) throw ConfigError("sample and grid dimensions differ");
  if (opt.bandwidth < 0.0) throw ConfigError("bandwidth must be positive");
  const double h = opt.bandwidth > 0.0 ? opt.bandwidth : silverman_bandwidth(z, dim);
  const GridSpec spatial = spatial_grid(freq);
  const std::size_t nresp = 1 + static_cast<std::size_t>(dim);

  // sort rows by the first coordinate for window lookups
  std::vector<std::size_t> order(z.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return z[a][0] < z[b][0]; });
  std::vector<double> key(z.size());
  for (std::size_t i = 0; i < order.size(); ++i) key[i] = z[order[i]][0];

  Point zmin{0.0, 0.0}, zmax{0.0, 0.0};
  for (int a = 0; a < dim; ++a) {
    zmin[a] = zmax[a] = z[0][a];
    for (const auto& p : z) {
      zmin[a] = std::min(zmin[a], p[a]);
      zmax[a] = std::max(zmax[a], p[a]);
    }
  }

  const double reach = 3.0 * h;
  const std::size_t cells = spatial.size();
  std::vector<std::vector<cplx>> est(nresp, std::vector<cplx>(cells, cplx(0.0)));
  std::vector<unsigned char> outside(cells, 0);

  std::vector<std::size_t> neighbours(cells, 0);
  parallel_for(cells, [&](std::size_t c) {
    const Point p = spatial.point(c);
    for (int a = 0; a < dim; ++a)
      if (p[a] < zmin[a] || p[a] > zmax[a]) {
        outside[c] = 1;
        return;
      }
    const auto lo = std::lower_bound(key.begin(), key.end(), p[0] - reach) - key.begin();
    const auto hi = std::upper_bound(key.begin(), key.end(), p[0] + reach) - key.begin();
    const int q = dim + 1;
    const auto nr = static_cast<Eigen::Index>(nresp);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(q, q);
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(q, nr);
    Eigen::VectorXd basis(q);
    Eigen::RowVectorXd resp(nr);
    std::size_t count = 0;
    for (auto i = lo; i < hi; ++i) {
      const std::size_t j = order[static_cast<std::size_t>(i)];
      double w = 1.0;
      bool inside = true;
      basis[0] = 1.0;
      for (int a = 0; a < dim; ++a) {
        const double d = z[j][a] - p[a];
        if (std::abs(d) > reach) {
          inside = false;
          break;
        }
        w *= gaussian_kernel(d / h);
        basis[1 + a] = d;
      }
      if (!inside) continue;
      ++count;
      resp[0] = y[j];
      for (int k = 0; k < dim; ++k) resp[1 + k] = x[j][k] * y[j];
      S.noalias() += w * basis * basis.transpose();
      T.noalias() += w * basis * resp;
    }
    neighbours[c] = count;
    if (count == 0) return;
    // local linear when the design is well conditioned, local constant otherwise
    Eigen::RowVectorXd fit = T.row(0) / S(0, 0);
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
    if (count > static_cast<std::size_t>(dim) && ldlt.info() == Eigen::Success && ldlt.rcond() > 1e-10) {
      const Eigen::MatrixXd beta = ldlt.solve(T);
      if (beta.allFinite()) fit = beta.row(0);
    }
    for (std::size_t r = 0; r < nresp; ++r) est[r][c] = fit[static_cast<Eigen::Index>(r)];
  });

  RegressionEstimate out;
  for (std::size_t c = 0; c < cells; ++c) {
    if (outside[c]) {
      ++out.cells_outside_hull;
    } else if (neighbours[c] == 0) {
      const Point p = spatial.point(c);
      throw NumericalError("bandwidth " + std::to_string(h) + " leaves the grid cell at z = " +
                           std::to_string(p[0]) + (dim > 1 ? "," + std::to_string(p[1]) : "") +
                           " without kernel neighbours");
    }
  }
  out.bandwidth = h;
  out.window = boundary_window(spatial, opt.window_fraction);
  out.w1 = GridFn(spatial, std::move(est[0]), "w1");
  for (int k = 0; k < dim; ++k) out.w2.emplace_back(spatial, std::move(est[1 + k]), "w2_" + std::to_string(k + 1));

  MomentSet& m = out.moments;
  const GridFn w1w = out.w1 * out.window;
  m.eps1 = fourier_forward(w1w);
  m.eps1.set_label("eps1");
  for (int k = 0; k < dim; ++k) {
    GridFn e = fourier_forward(out.w2[k] * out.window);
    e.set_label("eps2_" + std::to_string(k + 1));
    m.eps2.push_back(std::move(e));
    // d/dzeta_k Ft(w) = Ft(i x_k w)
    GridFn ixw = w1w;
    for (std::size_t c = 0; c < cells; ++c) ixw[c] *= kI * spatial.point(c)[k];
    GridFn d = fourier_forward(ixw);
    d.set_label("deps1_" + std::to_string(k + 1));
    m.deps1.push_back(std::move(d));
  }
  m.source = Source::empirical;
  m.n_samples = z.size();
  return out;
}

MomentSet estimate_moments(const SampleSet& s, const GridSpec& freq, const RegressionOptions& opt) {
  s.validate();
  if (s.model == Model::example2) return regression_moments(s.y, s.x, s.z, s.dim, freq, opt).moments;
  return empirical_moments(s.x, s.z, s.dim, freq);
}

MomentSet oracle_moments(const Law& g, const Law& f, const GridSpec& freq) {
  if (g.dim() != freq.dim || f.dim() != freq.dim) throw ConfigError("law and grid dimensions differ");
  const int d = freq.dim;
  MomentSet m;
  m.source = Source::oracle;
  const GridFn gamma = GridFn::sample(freq, [&](const Point& t) { return g.cf(t); });
  const GridFn phi = GridFn::sample(freq, [&](const Point& t) { return f.cf(t); });
  m.eps1 = gamma * phi;
  m.eps1.set_label("eps1");
  for (int k = 0; k < d; ++k) {
    const GridFn dg = GridFn::sample(freq, [&](const Point& t) { return g.dcf(t, k); });
    const GridFn df = GridFn::sample(freq, [&](const Point& t) { return f.dcf(t, k); });
    GridFn e2 = (-kI) * (dg * phi);
    e2.set_label("eps2_" + std::to_string(k + 1));
    GridFn de = dg * phi + gamma * df;
    de.set_label("deps1_" + std::to_string(k + 1));
    // system identities, checked against an independent evaluation
    const GridFn lhs_b = de - kI * e2;
    const GridFn rhs_b = GridFn::sample(freq, [&](const Point& t) { return g.cf(t) * f.dcf(t, k); });
    require_identity(lhs_b, rhs_b, "d eps1 - i eps2 = gamma d phi");
    const GridFn rhs_a = GridFn::sample(freq, [&](const Point& t) { return -kI * g.dcf(t, k) * f.cf(t); });
    require_identity(e2, rhs_a, "eps2 = -i d gamma phi");
    m.eps2.push_back(std::move(e2));
    m.deps1.push_back(std::move(de));
  }
  const GridFn direct = GridFn::sample(freq, [&](const Point& t) { return g.cf(t) * f.cf(t); });
  require_identity(m.eps1, direct, "eps1 = gamma phi");
  return m;
}

}  // namespace convid
