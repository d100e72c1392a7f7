#pragma once

// Fourier-domain observables: empirical characteristic functions and their
// weighted variants, the smoothed regression observables of the Berkson
// model, and closed-form oracle moments.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "convid/grid.hpp"
#include "convid/laws.hpp"

namespace convid {

enum class Model { example1, example2, example3 };

std::string to_string(Model m);
Model parse_model(std::string_view text);

/// Observed data. Rows are aligned across z, x and y.
struct SampleSet {
  Model model = Model::example1;
  int dim = 1;
  std::vector<Point> z;
  std::vector<Point> x;
  std::vector<double> y;  // example2 only
  std::uint64_t seed = 0;
  std::string meta;

  std::size_t size() const { return z.size(); }
  /// Throws ConfigError when the invariants do not hold.
  void validate() const;
};

enum class Source { empirical, oracle };

struct MomentSet {
  GridFn eps1;
  std::vector<GridFn> eps2;   // one per axis
  std::vector<GridFn> deps1;  // one per axis, may be empty
  Source source = Source::empirical;
  std::size_t n_samples = 0;

  int dim() const { return eps1.spec().dim; }
  const GridSpec& spec() const { return eps1.spec(); }
  bool has_deps1() const { return !deps1.empty(); }
  void validate() const;
};

/// (1/n) sum_j exp(i zeta.z_j) on freq.
GridFn ecf(std::span<const Point> z, const GridSpec& freq);
/// (1/n) sum_j x_jk exp(i zeta.z_j).
GridFn moment_ecf(std::span<const Point> x, std::span<const Point> z, int k, const GridSpec& freq);
/// (1/n) sum_j i z_jk exp(i zeta.z_j), the exact derivative of ecf along k.
GridFn ecf_derivative(std::span<const Point> z, int k, const GridSpec& freq);
/// Direct evaluation of the ecf at one frequency.
cplx ecf_at(std::span<const Point> z, const Point& zeta);

/// ecf, moment_ecf and ecf_derivative for every axis in one pass. Used for
/// the example1 and example3 models.
MomentSet empirical_moments(std::span<const Point> x, std::span<const Point> z, int dim,
                            const GridSpec& freq);

struct RegressionOptions {
  double bandwidth = 0.0;        // 0 selects 1.06 sd n^(-1/(4+d))
  double window_fraction = 0.1;  // outer part of each axis that is tapered
};

struct RegressionEstimate {
  MomentSet moments;
  GridFn w1;               // E(y|z) on the spatial grid, before windowing
  std::vector<GridFn> w2;  // E(x_k y|z)
  GridFn window;
  double bandwidth = 0.0;
  std::size_t cells_outside_hull = 0;
};

double silverman_bandwidth(std::span<const Point> z, int dim);

/// Local-linear estimates of w1 = E(y|z) and w2k = E(x_k y|z) on
/// spatial_grid(freq), tapered by a raised-cosine window and transformed.
/// Cells outside the bounding box of z are set to 0 and counted. A cell
/// inside the box with too few kernel neighbours is a NumericalError.
RegressionEstimate regression_moments(std::span<const double> y, std::span<const Point> x,
                                      std::span<const Point> z, int dim, const GridSpec& freq,
                                      const RegressionOptions& opt = {});

/// Dispatches on the model.
MomentSet estimate_moments(const SampleSet& s, const GridSpec& freq, const RegressionOptions& opt = {});

/// Closed-form moments from g and f: eps1 = gamma phi,
/// eps2k = -i d_k gamma phi, d_k eps1 = d_k gamma phi + gamma d_k phi.
/// The system identities are checked on every build.
MomentSet oracle_moments(const Law& g, const Law& f, const GridSpec& freq);

/// Tapered window on a spatial grid: 1 on the inner part of each axis and
/// a cos^2 rolloff to 0 over the outer `fraction`.
GridFn boundary_window(const GridSpec& spatial, double fraction);

}  // namespace convid
