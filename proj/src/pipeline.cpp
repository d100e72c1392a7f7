#include "convid/pipeline.hpp"

#include <cmath>

#include "convid/error.hpp"

namespace convid {

Estimate solve_moments(MomentSet m, const EstimateConfig& cfg) {
  Estimate out;
  const double tau = cfg.tau > 0.0 ? cfg.tau : (m.n_samples > 0 ? default_tau(m.n_samples) : 1e-6);
  const Case which = cfg.which ? *cfg.which : choose_case(m, tau);
  out.case_auto = !cfg.which;
  cplx c = cfg.c;
  if (cfg.anchor_auto && which == Case::a) c = m.eps1.at_origin();
  if (cfg.reg_cutoff) {
    const RegWeight w = make_weight(*cfg.reg_cutoff, cfg.reg_profile, m.spec());
    out.solution = solve_regularized(m, w, which, {tau, c});
  } else {
    SolveOptions so;
    so.tau = tau;
    so.c = c;
    out.solution = solve(m, which, so);
  }
  RecoverOptions ro;
  ro.pad = cfg.pad;
  for (Target t : {Target::g, Target::f}) {
    try {
      GridFn r = recover_real(out.solution, t, ro);
      (t == Target::g ? out.solution.g_real : out.solution.f_real) = std::move(r);
    } catch (const NumericalError& e) {
      out.note += std::string(t == Target::g ? "g" : "f") + " not recovered: " + e.what() + "; ";
    }
  }
  out.moments = std::move(m);
  return out;
}

Estimate estimate(const SampleSet& s, const EstimateConfig& cfg) {
  s.validate();
  return solve_moments(estimate_moments(s, cfg.freq, cfg.regression), cfg);
}

double l1_distance(const GridFn& a, const Law& truth) {
  const GridSpec& s = a.spec();
  double e = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) e += std::abs(a[k].real() - truth.density(s.point(k)));
  return e * s.cell_volume();
}

}  // namespace convid
