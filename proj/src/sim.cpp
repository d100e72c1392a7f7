#include "convid/sim.hpp"

#include <cmath>

#include "convid/error.hpp"

namespace convid {
namespace {

void check_dim(const Law& l, int dim, const char* what) {
  if (l.dim() != dim) throw ConfigError(std::string(what) + " has the wrong dimension");
}

bool centred(const Law& l) {
  for (const auto& a : l.axes) {
    const double m = mean(a);
    if (!(std::abs(m) < 1e-12)) return false;
  }
  return true;
}

SampleSet empty_set(const ModelSpec& s) {
  SampleSet out;
  out.model = s.model;
  out.dim = s.dim;
  out.seed = s.seed;
  out.meta = s.describe();
  out.z.reserve(s.n);
  out.x.reserve(s.n);
  return out;
}

}  // namespace

void ModelSpec::validate() const {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("model dimension must be 1 or 2");
  if (n < 2) throw ConfigError("sample size must be at least 2");
  check_dim(f, dim, "error law f");
  check_dim(ux, dim, "noise law u_x");
  if (model == Model::example2) {
    check_dim(z_law, dim, "law of z");
    check_dim(uy, 1, "noise law u_y");
    if (!centred(uy)) throw ConfigError("u_y must have mean zero");
  } else {
    check_dim(g, dim, "latent law g");
  }
  if (!centred(ux)) throw ConfigError("u_x must have mean zero");
}

std::string ModelSpec::describe() const {
  std::string s = to_string(model) + " dim=" + std::to_string(dim) + " n=" + std::to_string(n) +
                  " seed=" + std::to_string(seed);
  if (model == Model::example2)
    s += " g=" + regression.describe() + " z=" + z_law.describe() + " uy=" + uy.describe();
  else
    s += " g=" + g.describe();
  return s + " f=" + f.describe() + " ux=" + ux.describe();
}

SampleSet gen_example1(const ModelSpec& spec) {
  spec.validate();
  if (spec.model == Model::example2) throw ConfigError("gen_example1 called with an example2 spec");
  Rng rng(spec.seed);
  SampleSet out = empty_set(spec);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const Point xs = spec.g.sample(rng);
    const Point u = spec.f.sample(rng);
    const Point ux = spec.ux.sample(rng);
    Point x{0.0, 0.0}, z{0.0, 0.0};
    for (int a = 0; a < spec.dim; ++a) {
      x[a] = xs[a] + ux[a];
      z[a] = xs[a] + u[a];
    }
    out.x.push_back(x);
    out.z.push_back(z);
  }
  return out;
}

SampleSet gen_example2(const ModelSpec& spec) {
  spec.validate();
  if (spec.model != Model::example2) throw ConfigError("gen_example2 needs an example2 spec");
  Rng rng(spec.seed);
  SampleSet out = empty_set(spec);
  out.y.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const Point z = spec.z_law.sample(rng);
    const Point u = spec.f.sample(rng);
    const Point ux = spec.ux.sample(rng);
    const double uy = spec.uy.sample(rng)[0];
    Point xs{0.0, 0.0}, x{0.0, 0.0};
    for (int a = 0; a < spec.dim; ++a) {
      xs[a] = z[a] - u[a];
      x[a] = xs[a] + ux[a];
    }
    out.z.push_back(z);
    out.x.push_back(x);
    out.y.push_back(spec.regression(xs, spec.dim) + uy);
  }
  return out;
}

SampleSet gen_example3(const ModelSpec& spec) {
  if (spec.model != Model::example3) throw ConfigError("gen_example3 needs an example3 spec");
  return gen_example1(spec);
}

SampleSet generate(const ModelSpec& spec) {
  switch (spec.model) {
    case Model::example1: return gen_example1(spec);
    case Model::example2: return gen_example2(spec);
    case Model::example3: return gen_example3(spec);
  }
  throw ConfigError("unknown model");
}

}  // namespace convid
