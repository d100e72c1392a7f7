#pragma once

// Constructive solution of the Fourier-domain system
//   gamma phi = eps1,   -i d_k gamma phi = eps2_k
// for gamma (transform of the latent function) and phi (error
// characteristic function) by integrating log-derivatives from the origin.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "convid/ecf.hpp"
#include "convid/grid.hpp"

namespace convid {

/// Boolean region of a frequency grid on which the observables are
/// trusted. Always contains the origin.
struct SupportMask {
  GridSpec spec;
  std::vector<std::uint8_t> in;
  double tau = 0.0;
  /// Optional: nodes whose denominator was floored. Path integrals keep
  /// their high-order stencils off these nodes.
  std::vector<std::uint8_t> rough;

  bool contains(std::size_t k) const { return in[k] != 0; }
  std::size_t count() const;
  bool single_point() const { return count() == 1; }
  GridFn as_gridfn() const;
};

/// max(1e-6, 2.5/sqrt(n)).
double default_tau(std::size_t n_samples);

/// Origin-connected component (4-neighbour in 2-d) of {|eps1| > tau}.
SupportMask threshold_support(const GridFn& eps1, double tau);
/// The whole grid.
SupportMask full_support(const GridSpec& spec, double tau = 0.0);

enum class Case { a, b };
std::string to_string(Case c);

/// Denominator control for the log-derivative ratios. With floor > 0,
/// values of |eps1| below floor are replaced by floor * eps1/|eps1| and
/// counted instead of rejected.
struct RatioOptions {
  double floor = 0.0;
  std::size_t* floored = nullptr;
};

/// kappa_k = i eps2_k / eps1 on the mask, zero outside.
std::vector<GridFn> kappa_a(const MomentSet& m, const SupportMask& mask, RatioOptions opt = {});
/// kappa~_k = (d_k eps1 - i eps2_k) / eps1 on the mask, zero outside.
std::vector<GridFn> kappa_b(const MomentSet& m, const SupportMask& mask, RatioOptions opt = {});

/// Axis order of the staircase path: {0,1} goes along axis 0 first.
using PathOrder = std::array<int, kMaxDim>;

struct PathIntegral {
  GridFn log_value;      // int_0^zeta sum_k kappa_k d xi_k, zero off mask
  SupportMask mask;      // points whose path stays inside the input mask
  std::size_t dropped = 0;
};

PathIntegral path_integral(const std::vector<GridFn>& kappas, const SupportMask& mask,
                           PathOrder order = {0, 1});

struct ExpPath {
  GridFn value;
  SupportMask mask;
  std::size_t dropped = 0;
};

/// c * exp(path integral) on the reachable part of the mask, zero outside.
ExpPath exp_path_integral(const std::vector<GridFn>& kappas, cplx c, const SupportMask& mask,
                          PathOrder order = {0, 1});

/// max over points reachable by both paths of the difference between the
/// (0,1) and (1,0) staircase integrals. Zero in one dimension.
double path_independence_check(const std::vector<GridFn>& kappas, const SupportMask& mask);

struct RegularizationInfo {
  double cutoff = 0.0;
  std::string profile;
};

struct Solution {
  GridFn gamma;
  GridFn phi;
  Case which = Case::a;
  cplx c = 1.0;
  SupportMask mask;
  double tau = 0.0;
  bool identified = true;       // false for a one-point mask
  std::size_t dropped = 0;      // mask points unreachable along the path
  std::size_t floored = 0;      // denominators raised to the floor
  double residual = 0.0;        // sup over the mask of |gamma phi - eps1|
  std::optional<RegularizationInfo> regularization;
  std::optional<GridFn> g_real;
  std::optional<GridFn> f_real;
};

struct SolveOptions {
  double tau = 1e-6;
  cplx c = 1.0;
  /// Extra restriction intersected with the threshold mask.
  const SupportMask* restrict_to = nullptr;
  /// Used instead of the threshold mask when set.
  const SupportMask* mask_override = nullptr;
  double floor = 0.0;
};

/// Case a: gamma = c exp int kappa, phi = eps1 / gamma.
Solution solve_case_a(const MomentSet& m, double tau, cplx c = 1.0);
/// Case b: phi = c exp int kappa~, gamma = eps1 / phi.
Solution solve_case_b(const MomentSet& m, double tau, cplx c = 1.0);
Solution solve(const MomentSet& m, Case which, const SolveOptions& opt);

/// Relative second-difference roughness of a set of log-derivatives on the
/// mask (mean |Delta^2 kappa| / mean |kappa|, summed over axes).
double roughness(const std::vector<GridFn>& kappas, const SupportMask& mask);

/// Picks case b when d eps1 is present and kappa~ is no rougher than kappa.
Case choose_case(const MomentSet& m, double tau);

enum class Target { g, f };

struct RecoverOptions {
  std::size_t pad = 1;   // zero-padding factor of the frequency grid
  bool density = true;   // clip negatives and renormalise
  double imag_tolerance = 0.01;
};

/// Inverse transform of gamma (Target::g) or phi (Target::f) onto the
/// dual spatial grid. Throws NumericalError when the imaginary part
/// exceeds imag_tolerance times the real sup norm.
GridFn recover_real(const Solution& s, Target which, const RecoverOptions& opt = {});
GridFn recover_real(const GridFn& transform, const RecoverOptions& opt = {});

}  // namespace convid
