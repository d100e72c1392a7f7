#pragma once

// Samples to recovered transforms and densities: moments, case choice,
// solve (plain or regularised) and inverse transforms.

#include <optional>
#include <string>

#include "convid/ecf.hpp"
#include "convid/ident.hpp"
#include "convid/regular.hpp"

namespace convid {

struct EstimateConfig {
  GridSpec freq = make_grid(-8.0, 8.0, 64);
  std::optional<Case> which;  // empty: choose_case
  double tau = 0.0;           // 0: default_tau(n)
  cplx c = 1.0;
  bool anchor_auto = false;   // case a: c = eps1(0)
  std::optional<double> reg_cutoff;
  Profile reg_profile = Profile::bump;
  std::size_t pad = 8;
  RegressionOptions regression;
};

struct Estimate {
  MomentSet moments;
  Solution solution;
  bool case_auto = false;
  std::string note;
};

/// Solves an existing MomentSet and fills g_real and f_real. Recovery of a
/// transform is skipped (with a note) when it fails.
Estimate solve_moments(MomentSet m, const EstimateConfig& cfg);
Estimate estimate(const SampleSet& s, const EstimateConfig& cfg);

/// Sum |a - density| * cell volume over the grid of a.
double l1_distance(const GridFn& a, const Law& truth);

}  // namespace convid
