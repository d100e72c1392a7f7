#pragma once

// Synthetic samples for the three observation models with known ground
// truth. Every draw comes from one mt19937_64 stream seeded by spec.seed,
// consumed row by row, so a seed fixes the sample bit for bit.

#include <cstdint>
#include <optional>
#include <string>

#include "convid/ecf.hpp"
#include "convid/laws.hpp"

namespace convid {

struct ModelSpec {
  Model model = Model::example1;
  int dim = 1;
  Law g = replicate(Gaussian{1.0, 0.25}, 1);   // latent law (example1/3)
  RegressionFn regression{RegressionFn::Kind::linear, {0.0, 1.0}};  // example2
  Law z_law = replicate(Gaussian{0.0, 1.0}, 1);  // law of z (example2)
  Law f = replicate(Laplace{0.0, 1.0}, 1);       // error u
  Law ux = replicate(PointMass{0.0}, 1);         // extra noise on x, mean zero
  Law uy = replicate(PointMass{0.0}, 1);         // noise on y (example2)
  std::size_t n = 1000;
  std::uint64_t seed = 1;

  /// Throws ConfigError on dimension mismatches, n < 2 or non-centred
  /// extra-noise laws.
  void validate() const;
  std::string describe() const;
};

/// x = x* + u_x, z = x* + u with x* ~ g, u ~ f, u_x ~ ux.
SampleSet gen_example1(const ModelSpec& spec);
/// z ~ z_law, x* = z - u, y = g(x*) + u_y, x = x* + u_x.
SampleSet gen_example2(const ModelSpec& spec);
/// Two periods of the example1 structure at a fixed covariate:
/// x = x* + u_1 (u_1 ~ ux), z = x* + u_2 (u_2 ~ f).
SampleSet gen_example3(const ModelSpec& spec);
SampleSet generate(const ModelSpec& spec);

}  // namespace convid
