#include "convid/regular.hpp"

#include <cmath>
#include <numbers>

#include "convid/error.hpp"

namespace convid {

std::string to_string(Profile p) { return p == Profile::bump ? "bump" : "raised_cosine"; }

Profile parse_profile(std::string_view text) {
  if (text == "bump") return Profile::bump;
  if (text == "raised_cosine" || text == "cosine") return Profile::raised_cosine;
  throw ConfigError("unknown weight profile '" + std::string(text) + "'");
}

double profile_value(Profile p, double C, double t) {
  const double r = std::abs(t) / C;
  if (r >= 1.0) return 0.0;
  if (p == Profile::bump) return std::exp(1.0 - 1.0 / (1.0 - r * r));
  if (r <= 0.8) return 1.0;
  const double c = std::cos(0.5 * std::numbers::pi * (r - 0.8) / 0.2);
  return c * c;
}

SupportMask RegWeight::support() const {
  SupportMask m{psi.spec(), std::vector<std::uint8_t>(psi.size(), 0), 0.0, {}};
  for (std::size_t k = 0; k < psi.size(); ++k) m.in[k] = psi[k].real() > 0.0 ? 1 : 0;
  return m;
}

RegWeight make_weight(double C, Profile profile, const GridSpec& spec) {
  if (!(C > 0.0)) throw ConfigError("weight cutoff must be positive");
  for (int a = 0; a < spec.dim; ++a)
    if (C > -spec.lo[a] || C > spec.hi[a]) throw ConfigError("weight cutoff exceeds the frequency grid");
  RegWeight w;
  w.cutoff = C;
  w.profile = profile;
  w.psi = GridFn::sample(
      spec,
      [&](const Point& t) {
        double v = profile_value(profile, C, t[0]);
        if (spec.dim > 1) v *= profile_value(profile, C, t[1]);
        return v;
      },
      "psi");
  return w;
}

Solution solve_regularized(const MomentSet& m, const RegWeight& w, Case which, const RegularizedOptions& opt) {
  m.validate();
  m.eps1.require_same_spec(w.psi);
  if (!(opt.tau > 0.0)) throw ConfigError("denominator floor must be positive");
  // psi cancels from kappa and kappa~, so the ratios are taken on the raw
  // observables over supp(psi); the floor then marks points where eps1
  // itself vanishes, not where psi is small.
  const SupportMask supp = w.support();
  SolveOptions so;
  so.tau = opt.tau;
  so.c = opt.c;
  so.mask_override = &supp;
  so.floor = opt.tau;
  Solution s = solve(m, which, so);
  s.gamma *= w.psi;
  const GridFn weighted = m.eps1 * w.psi;
  s.regularization = RegularizationInfo{w.cutoff, to_string(w.profile)};
  double r = 0.0;
  for (std::size_t k = 0; k < s.gamma.size(); ++k)
    if (s.mask.contains(k) && s.gamma[k] != cplx(0.0)) r = std::max(r, std::abs(s.gamma[k] * s.phi[k] - weighted[k]));
  s.residual = r;
  return s;
}

double bandlimit_diagnostic(const GridFn& gamma, double C) {
  const GridSpec& s = gamma.spec();
  double total = 0.0, outside = 0.0;
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    const double v = std::abs(gamma[k]);
    total += v;
    const Point t = s.point(k);
    double inf_norm = std::abs(t[0]);
    if (s.dim > 1) inf_norm = std::max(inf_norm, std::abs(t[1]));
    // nodes on the cube boundary split evenly, as in the trapezoid rule
    if (inf_norm > C) outside += v;
    else if (inf_norm == C) outside += 0.5 * v;
  }
  if (!(total > 0.0)) throw NumericalError("bandlimit diagnostic of a function with zero mass");
  return outside / total;
}

}  // namespace convid
