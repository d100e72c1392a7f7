#pragma once

// Regularised solution with a compactly supported Fourier-domain weight
// psi: the system is multiplied by psi and solved on supp(psi). The
// recovered latent function is the smoothed g * Ft^-1(psi), which equals g
// only when gamma already vanishes outside the cube |zeta_k| < C.

#include <string>

#include "convid/ecf.hpp"
#include "convid/grid.hpp"
#include "convid/ident.hpp"

namespace convid {

enum class Profile { bump, raised_cosine };
std::string to_string(Profile p);
Profile parse_profile(std::string_view text);

/// One-dimensional profile on [-C, C]: 1 at the origin, 0 at and beyond C.
double profile_value(Profile p, double C, double t);

struct RegWeight {
  double cutoff = 2.0;
  Profile profile = Profile::bump;
  GridFn psi;

  /// {psi > 0}.
  SupportMask support() const;
};

/// Product weight prod_k profile(zeta_k) on a frequency grid. Throws when
/// C exceeds the grid range.
RegWeight make_weight(double C, Profile profile, const GridSpec& spec);

struct RegularizedOptions {
  double tau = 1e-6;  // denominator floor inside supp(psi)
  cplx c = 1.0;
};

/// Multiplies eps1, eps2_k and d_k eps1 by psi and solves on supp(psi).
/// The returned gamma is psi * gamma; the floored count is recorded.
Solution solve_regularized(const MomentSet& m, const RegWeight& w, Case which,
                           const RegularizedOptions& opt = {});

/// Fraction of the L1 mass of gamma outside the cube max_k |zeta_k| <= C.
double bandlimit_diagnostic(const GridFn& gamma, double C);

}  // namespace convid
