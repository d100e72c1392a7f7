#include "convid/ident.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "convid/error.hpp"
#include "convid/quadrature.hpp"

namespace convid {
namespace {

const cplx kI{0.0, 1.0};

// Contiguous run [b, e) of masked nodes through `anchor` on the line
// base + i*stride, i = 0..len-1.
std::pair<std::size_t, std::size_t> masked_run(const SupportMask& mask, std::size_t base,
                                               std::size_t stride, std::size_t len,
                                               std::size_t anchor) {
  if (!mask.contains(base + anchor * stride)) return {anchor, anchor};
  std::size_t b = anchor, e = anchor + 1;
  while (b > 0 && mask.contains(base + (b - 1) * stride)) --b;
  while (e < len && mask.contains(base + e * stride)) ++e;
  return {b, e};
}

// Line geometry along `axis` through the node with the other coordinate
// fixed at `other`.
struct Line {
  std::size_t base, stride, len;
};

Line line_along(const GridSpec& s, int axis, std::size_t other) {
  if (s.dim == 1) return {0, 1, s.n[0]};
  if (axis == 0) return {other, s.n[1], s.n[0]};
  return {other * s.n[1], 1, s.n[1]};
}

// Cumulative integral of kappa over a masked run, anchored at `anchor`.
void integrate_run(const GridFn& kappa, const SupportMask& mask, const Line& L, std::size_t b, std::size_t e,
                   std::size_t anchor, double h, std::vector<cplx>& out) {
  std::vector<cplx> f(e - b);
  for (std::size_t i = b; i < e; ++i) f[i - b] = kappa[L.base + i * L.stride];
  out.assign(e - b, cplx(0.0));
  if (mask.rough.empty()) {
    quad::cumulative_from(f, h, anchor - b, out);
    return;
  }
  std::vector<std::uint8_t> rough(e - b);
  for (std::size_t i = b; i < e; ++i) rough[i - b] = mask.rough[L.base + i * L.stride];
  quad::cumulative_from(f, h, anchor - b, rough, out);
}

std::vector<GridFn> ratio(const MomentSet& m, const SupportMask& mask, RatioOptions opt, bool case_b,
                          const char* name) {
  m.validate();
  if (case_b && !m.has_deps1()) throw ConfigError("case b needs the derivative of eps1");
  if (!mask.spec.same_as(m.spec())) throw ConfigError("mask and moments live on different grids");
  const int d = m.dim();
  const double eps = std::numeric_limits<double>::epsilon();
  std::vector<GridFn> out;
  std::size_t floored = 0;
  for (int k = 0; k < d; ++k) out.emplace_back(m.spec(), std::string(name) + "_" + std::to_string(k + 1));
  for (std::size_t i = 0; i < m.eps1.size(); ++i) {
    if (!mask.contains(i)) continue;
    cplx den = m.eps1[i];
    const double mod = std::abs(den);
    if (opt.floor > 0.0 && mod < opt.floor) {
      den = mod > 0.0 ? den * (opt.floor / mod) : cplx(opt.floor);
      ++floored;
    } else if (mod <= eps) {
      throw NumericalError("eps1 vanishes inside the support mask");
    }
    for (int k = 0; k < d; ++k) {
      const cplx num = case_b ? m.deps1[k][i] - kI * m.eps2[k][i] : kI * m.eps2[k][i];
      out[k][i] = num / den;
    }
  }
  if (opt.floored) *opt.floored = floored;
  return out;
}

double mask_residual(const GridFn& gamma, const GridFn& phi, const GridFn& eps1, const SupportMask& mask) {
  double r = 0.0;
  for (std::size_t i = 0; i < eps1.size(); ++i)
    if (mask.contains(i)) r = std::max(r, std::abs(gamma[i] * phi[i] - eps1[i]));
  return r;
}

// Ratio num/den on the mask, zero elsewhere.
GridFn masked_quotient(const GridFn& num, const GridFn& den, const SupportMask& mask, const char* label) {
  GridFn out(num.spec(), label);
  for (std::size_t i = 0; i < num.size(); ++i)
    if (mask.contains(i)) {
      if (den[i] == cplx(0.0)) throw NumericalError(std::string("zero denominator building ") + label);
      out[i] = num[i] / den[i];
    }
  return out;
}

}  // namespace

std::size_t SupportMask::count() const {
  return static_cast<std::size_t>(std::count(in.begin(), in.end(), std::uint8_t{1}));
}

GridFn SupportMask::as_gridfn() const {
  std::vector<cplx> v(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) v[i] = in[i] ? 1.0 : 0.0;
  return GridFn(spec, std::move(v), "mask");
}

double default_tau(std::size_t n_samples) {
  if (n_samples == 0) return 1e-6;
  return std::max(1e-6, 2.5 / std::sqrt(static_cast<double>(n_samples)));
}

SupportMask threshold_support(const GridFn& eps1, double tau) {
  if (!(tau > 0.0)) throw ConfigError("support threshold must be positive");
  if (tau >= 1.0) throw ConfigError("support threshold >= 1 leaves an empty mask");
  const GridSpec& s = eps1.spec();
  SupportMask m{s, std::vector<std::uint8_t>(s.size(), 0), tau, {}};
  const std::size_t o = s.origin_flat();
  if (!(std::abs(eps1[o]) > tau)) {
    // the origin is kept regardless; it is the anchor of every path
    m.in[o] = 1;
    return m;
  }
  std::deque<std::size_t> queue{o};
  m.in[o] = 1;
  while (!queue.empty()) {
    const std::size_t k = queue.front();
    queue.pop_front();
    const auto idx = s.unflat(k);
    for (int a = 0; a < s.dim; ++a)
      for (int step : {-1, 1}) {
        auto j = idx;
        if (step < 0 && j[a] == 0) continue;
        if (step > 0 && j[a] + 1 >= s.n[a]) continue;
        j[a] = step < 0 ? j[a] - 1 : j[a] + 1;
        const std::size_t q = s.flat(j[0], j[1]);
        if (!m.in[q] && std::abs(eps1[q]) > tau) {
          m.in[q] = 1;
          queue.push_back(q);
        }
      }
  }
  return m;
}

SupportMask full_support(const GridSpec& spec, double tau) {
  return SupportMask{spec, std::vector<std::uint8_t>(spec.size(), 1), tau, {}};
}

std::string to_string(Case c) { return c == Case::a ? "a" : "b"; }

std::vector<GridFn> kappa_a(const MomentSet& m, const SupportMask& mask, RatioOptions opt) {
  return ratio(m, mask, opt, false, "kappa");
}

std::vector<GridFn> kappa_b(const MomentSet& m, const SupportMask& mask, RatioOptions opt) {
  return ratio(m, mask, opt, true, "kappa_tilde");
}

PathIntegral path_integral(const std::vector<GridFn>& kappas, const SupportMask& mask, PathOrder order) {
  const GridSpec& s = mask.spec;
  if (static_cast<int>(kappas.size()) != s.dim) throw ConfigError("need one kappa per axis");
  for (const auto& k : kappas)
    if (!k.spec().same_as(s)) throw ConfigError("kappa and mask live on different grids");
  const std::size_t o = s.origin_flat();
  if (!mask.contains(o)) throw ConfigError("the origin must lie in the support mask");

  PathIntegral r{GridFn(s, "log path integral"), SupportMask{s, std::vector<std::uint8_t>(s.size(), 0), mask.tau, {}}, 0};
  std::vector<cplx> first, second;
  const int a = s.dim == 1 ? 0 : order[0];
  const int b = s.dim == 1 ? 0 : order[1];
  if (s.dim == 2 && (a == b || a < 0 || a > 1 || b < 0 || b > 1)) throw ConfigError("bad path order");

  const Line La = line_along(s, a, s.dim == 1 ? 0 : s.origin(b));
  const std::size_t oa = s.origin(a);
  const auto [ab, ae] = masked_run(mask, La.base, La.stride, La.len, oa);
  integrate_run(kappas[a], mask, La, ab, ae, oa, s.step(a), first);
  for (std::size_t i = ab; i < ae; ++i) {
    if (s.dim == 1) {
      const std::size_t q = La.base + i * La.stride;
      r.log_value[q] = first[i - ab];
      r.mask.in[q] = 1;
      continue;
    }
    const Line Lb = line_along(s, b, i);
    const std::size_t ob = s.origin(b);
    const auto [bb, be] = masked_run(mask, Lb.base, Lb.stride, Lb.len, ob);
    integrate_run(kappas[b], mask, Lb, bb, be, ob, s.step(b), second);
    for (std::size_t j = bb; j < be; ++j) {
      const std::size_t q = Lb.base + j * Lb.stride;
      r.log_value[q] = first[i - ab] + second[j - bb];
      r.mask.in[q] = 1;
    }
  }
  r.dropped = mask.count() - r.mask.count();
  return r;
}

ExpPath exp_path_integral(const std::vector<GridFn>& kappas, cplx c, const SupportMask& mask, PathOrder order) {
  PathIntegral p = path_integral(kappas, mask, order);
  GridFn v(mask.spec, "exp path integral");
  for (std::size_t i = 0; i < v.size(); ++i)
    if (p.mask.contains(i)) v[i] = c * std::exp(p.log_value[i]);
  // exactly c at the anchor
  v[mask.spec.origin_flat()] = c;
  if (!v.all_finite()) throw NumericalError("path integral overflowed");
  return {std::move(v), std::move(p.mask), p.dropped};
}

double path_independence_check(const std::vector<GridFn>& kappas, const SupportMask& mask) {
  if (mask.spec.dim == 1) return 0.0;
  const PathIntegral p01 = path_integral(kappas, mask, {0, 1});
  const PathIntegral p10 = path_integral(kappas, mask, {1, 0});
  double worst = 0.0;
  for (std::size_t i = 0; i < mask.spec.size(); ++i)
    if (p01.mask.contains(i) && p10.mask.contains(i))
      worst = std::max(worst, std::abs(p01.log_value[i] - p10.log_value[i]));
  return worst;
}

Solution solve(const MomentSet& m, Case which, const SolveOptions& opt) {
  m.validate();
  SupportMask mask = opt.mask_override ? *opt.mask_override : threshold_support(m.eps1, opt.tau);
  if (opt.restrict_to) {
    if (!opt.restrict_to->spec.same_as(mask.spec)) throw ConfigError("restriction mask on a different grid");
    for (std::size_t i = 0; i < mask.in.size(); ++i) mask.in[i] = mask.in[i] && opt.restrict_to->in[i];
    mask.in[mask.spec.origin_flat()] = 1;
  }
  mask.tau = opt.tau;

  Solution s;
  s.which = which;
  s.c = opt.c;
  s.tau = opt.tau;
  if (opt.c == cplx(0.0)) throw ConfigError("anchor c must be nonzero");

  const GridSpec& spec = m.spec();
  const std::size_t o = spec.origin_flat();
  if (mask.single_point()) {
    s.identified = false;
    s.gamma = GridFn(spec, "gamma");
    s.phi = GridFn(spec, "phi");
    if (which == Case::a) {
      s.gamma[o] = opt.c;
      s.phi[o] = m.eps1[o] / opt.c;
    } else {
      s.phi[o] = opt.c;
      s.gamma[o] = m.eps1[o] / opt.c;
    }
    s.mask = std::move(mask);
    s.residual = mask_residual(s.gamma, s.phi, m.eps1, s.mask);
    return s;
  }

  RatioOptions ro{opt.floor, &s.floored};
  if (opt.floor > 0.0) {
    mask.rough.assign(mask.in.size(), 0);
    for (std::size_t i = 0; i < mask.in.size(); ++i)
      mask.rough[i] = mask.in[i] && std::abs(m.eps1[i]) < opt.floor;
  }
  if (which == Case::a) {
    const auto kappas = kappa_a(m, mask, ro);
    ExpPath g = exp_path_integral(kappas, opt.c, mask);
    s.mask = std::move(g.mask);
    s.dropped = g.dropped;
    s.gamma = std::move(g.value);
    s.phi = masked_quotient(m.eps1, s.gamma, s.mask, "phi");
  } else {
    const auto kappas = kappa_b(m, mask, ro);
    ExpPath f = exp_path_integral(kappas, opt.c, mask);
    s.mask = std::move(f.mask);
    s.dropped = f.dropped;
    s.phi = std::move(f.value);
    s.gamma = masked_quotient(m.eps1, s.phi, s.mask, "gamma");
  }
  s.gamma.set_label("gamma");
  s.phi.set_label("phi");
  s.residual = mask_residual(s.gamma, s.phi, m.eps1, s.mask);
  return s;
}

Solution solve_case_a(const MomentSet& m, double tau, cplx c) {
  SolveOptions o;
  o.tau = tau;
  o.c = c;
  return solve(m, Case::a, o);
}

Solution solve_case_b(const MomentSet& m, double tau, cplx c) {
  SolveOptions o;
  o.tau = tau;
  o.c = c;
  return solve(m, Case::b, o);
}

double roughness(const std::vector<GridFn>& kappas, const SupportMask& mask) {
  const GridSpec& s = mask.spec;
  double total = 0.0;
  for (int a = 0; a < static_cast<int>(kappas.size()); ++a) {
    double second = 0.0, level = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      const auto idx = s.unflat(k);
      if (idx[a] == 0 || idx[a] + 1 >= s.n[a]) continue;
      auto lo = idx, hi = idx;
      --lo[a];
      ++hi[a];
      const std::size_t kl = s.flat(lo[0], lo[1]), kh = s.flat(hi[0], hi[1]);
      if (!mask.contains(k) || !mask.contains(kl) || !mask.contains(kh)) continue;
      second += std::abs(kappas[a][kh] - 2.0 * kappas[a][k] + kappas[a][kl]);
      level += std::abs(kappas[a][k]);
      ++count;
    }
    if (count > 0 && level > 0.0) total += second / level;
  }
  return total;
}

Case choose_case(const MomentSet& m, double tau) {
  if (!m.has_deps1()) return Case::a;
  const SupportMask mask = threshold_support(m.eps1, tau);
  if (mask.single_point()) return Case::a;
  const double ra = roughness(kappa_a(m, mask), mask);
  const double rb = roughness(kappa_b(m, mask), mask);
  return rb <= ra ? Case::b : Case::a;
}

GridFn recover_real(const GridFn& transform, const RecoverOptions& opt) {
  const GridSpec& fs = transform.spec();
  GridFn F = transform;
  if (opt.pad > 1) {
    const GridSpec ps = padded(fs, opt.pad);
    GridFn big(ps, transform.label());
    for (std::size_t k = 0; k < fs.size(); ++k) {
      const auto idx = fs.unflat(k);
      std::array<std::size_t, kMaxDim> j{idx[0] + (ps.n[0] - fs.n[0]) / 2, 0};
      if (fs.dim > 1) j[1] = idx[1] + (ps.n[1] - fs.n[1]) / 2;
      big[ps.flat(j[0], j[1])] = transform[k];
    }
    F = std::move(big);
  }
  GridFn x = fourier_inverse(F);
  double re = 0.0, im = 0.0;
  for (const auto& v : x.values()) {
    re = std::max(re, std::abs(v.real()));
    im = std::max(im, std::abs(v.imag()));
  }
  if (im > opt.imag_tolerance * re)
    throw NumericalError("inverse transform has a large imaginary part (" + std::to_string(im) + " vs " +
                         std::to_string(re) + ")");
  std::vector<cplx> v(x.size());
  double mass = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    double r = x[k].real();
    if (opt.density) r = std::max(0.0, r);
    v[k] = r;
    mass += r;
  }
  mass *= x.spec().cell_volume();
  if (opt.density) {
    if (!(mass > 0.0)) throw NumericalError("recovered density has no positive mass");
    for (auto& q : v) q /= mass;
  }
  return GridFn(x.spec(), std::move(v), transform.label().empty() ? "real" : "Ft^-1 " + transform.label());
}

GridFn recover_real(const Solution& s, Target which, const RecoverOptions& opt) {
  GridFn r = recover_real(which == Target::g ? s.gamma : s.phi, opt);
  r.set_label(which == Target::g ? "g_real" : "f_real");
  return r;
}

}  // namespace convid
