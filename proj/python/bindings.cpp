#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "convid/error.hpp"
#include "convid/io.hpp"
#include "convid/pipeline.hpp"
#include "convid/wellposed.hpp"

namespace py = pybind11;
using namespace convid;

namespace {

py::array_t<cplx> values(const GridFn& f) {
  const GridSpec& s = f.spec();
  std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(s.n[0])};
  if (s.dim > 1) shape.push_back(static_cast<py::ssize_t>(s.n[1]));
  py::array_t<cplx> out(shape);
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

py::array_t<double> axis(const GridSpec& s, int a) {
  py::array_t<double> out(static_cast<py::ssize_t>(s.n[a]));
  for (std::size_t i = 0; i < s.n[a]; ++i) out.mutable_data()[i] = s.lo[a] + static_cast<double>(i) * s.step(a);
  return out;
}

py::dict grid_dict(const GridFn& f) {
  py::dict d;
  d["values"] = values(f);
  py::list axes;
  for (int a = 0; a < f.spec().dim; ++a) axes.append(axis(f.spec(), a));
  d["axes"] = axes;
  return d;
}

py::array_t<double> points(const std::vector<Point>& p, int dim) {
  py::array_t<double> out({static_cast<py::ssize_t>(p.size()), static_cast<py::ssize_t>(dim)});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < p.size(); ++i)
    for (int a = 0; a < dim; ++a) m(static_cast<py::ssize_t>(i), a) = p[i][a];
  return out;
}

std::vector<Point> to_points(const py::array_t<double, py::array::c_style | py::array::forcecast>& a, int dim) {
  if (a.ndim() == 1 && dim == 1) {
    std::vector<Point> p(static_cast<std::size_t>(a.shape(0)));
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = {a.data()[i], 0.0};
    return p;
  }
  if (a.ndim() != 2 || a.shape(1) != dim) throw ConfigError("expected an (n, dim) array");
  std::vector<Point> p(static_cast<std::size_t>(a.shape(0)));
  for (std::size_t i = 0; i < p.size(); ++i)
    for (int k = 0; k < dim; ++k) p[i][k] = a.data()[i * dim + k];
  return p;
}

ModelSpec model(const std::string& which, std::size_t n, std::uint64_t seed, const std::string& g,
                const std::string& f, const std::string& ux, const std::string& uy, const std::string& z) {
  ModelSpec m;
  m.model = parse_model(which);
  m.n = n;
  m.seed = seed;
  m.f = parse_law(f, 1);
  m.ux = parse_law(ux, 1);
  m.uy = parse_law(uy, 1);
  m.z_law = parse_law(z, 1);
  if (m.model == Model::example2) m.regression = parse_regression(g.empty() ? "linear(0,1)" : g);
  else m.g = parse_law(g.empty() ? "gaussian(1,0.25)" : g, 1);
  return m;
}

py::dict solution_dict(const Estimate& e) {
  const Solution& s = e.solution;
  py::dict d;
  d["case"] = to_string(s.which);
  d["case_auto"] = e.case_auto;
  d["gamma"] = grid_dict(s.gamma);
  d["phi"] = grid_dict(s.phi);
  d["residual"] = s.residual;
  d["mask_count"] = s.mask.count();
  d["identified"] = s.identified;
  d["floored"] = s.floored;
  d["g_real"] = s.g_real ? py::object(grid_dict(*s.g_real)) : py::none();
  d["f_real"] = s.f_real ? py::object(grid_dict(*s.f_real)) : py::none();
  d["note"] = e.note;
  return d;
}

EstimateConfig config(std::tuple<double, double, std::size_t> grid, const std::string& which, double tau,
                      std::optional<double> reg, const std::string& profile, std::size_t pad) {
  EstimateConfig c;
  c.freq = make_grid(std::get<0>(grid), std::get<1>(grid), std::get<2>(grid));
  if (which == "a") c.which = Case::a;
  else if (which == "b") c.which = Case::b;
  else if (which != "auto") throw ConfigError("case must be a, b or auto");
  c.tau = tau;
  c.reg_cutoff = reg;
  c.reg_profile = parse_profile(profile);
  c.pad = pad;
  return c;
}

}  // namespace

PYBIND11_MODULE(_convid, m) {
  m.doc() = "Deconvolution by the constructive Fourier-domain solution";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def(
      "simulate",
      [](const std::string& which, std::size_t n, std::uint64_t seed, const std::string& g, const std::string& f,
         const std::string& ux, const std::string& uy, const std::string& z) {
        const SampleSet s = generate(model(which, n, seed, g, f, ux, uy, z));
        py::dict d;
        d["z"] = points(s.z, 1);
        d["x"] = points(s.x, 1);
        if (!s.y.empty()) d["y"] = py::array_t<double>(static_cast<py::ssize_t>(s.y.size()), s.y.data());
        return d;
      },
      py::arg("model") = "example1", py::arg("n") = 1000, py::arg("seed") = 1, py::arg("g") = "",
      py::arg("f") = "laplace(0,1)", py::arg("ux") = "point(0)", py::arg("uy") = "point(0)",
      py::arg("z") = "gaussian(0,1)");

  m.def(
      "ecf",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> z, double lo, double hi, std::size_t n) {
        return grid_dict(ecf(to_points(z, 1), make_grid(lo, hi, n)));
      },
      py::arg("z"), py::arg("lo") = -8.0, py::arg("hi") = 8.0, py::arg("n") = 64);

  m.def(
      "estimate",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> z,
         py::array_t<double, py::array::c_style | py::array::forcecast> x, std::tuple<double, double, std::size_t> grid,
         const std::string& which, double tau, std::optional<double> reg, const std::string& profile, std::size_t pad) {
        SampleSet s;
        s.model = Model::example1;
        s.z = to_points(z, 1);
        s.x = to_points(x, 1);
        const EstimateConfig c = config(grid, which, tau, reg, profile, pad);
        Estimate e;
        {
          py::gil_scoped_release nogil;
          e = estimate(s, c);
        }
        return solution_dict(e);
      },
      py::arg("z"), py::arg("x"), py::arg("grid") = std::make_tuple(-8.0, 8.0, std::size_t{64}),
      py::arg("case") = "auto", py::arg("tau") = 0.0, py::arg("reg") = py::none(), py::arg("profile") = "bump",
      py::arg("pad") = 8);

  m.def(
      "solve_oracle",
      [](const std::string& g, const std::string& f, std::tuple<double, double, std::size_t> grid,
         const std::string& which, double tau, std::optional<double> reg, const std::string& profile) {
        const EstimateConfig c = config(grid, which, tau > 0.0 ? tau : 1e-6, reg, profile, 1);
        return solution_dict(solve_moments(oracle_moments(parse_law(g, 1), parse_law(f, 1), c.freq), c));
      },
      py::arg("g"), py::arg("f"), py::arg("grid") = std::make_tuple(-8.0, 8.0, std::size_t{1024}),
      py::arg("case") = "a", py::arg("tau") = 0.0, py::arg("reg") = py::none(), py::arg("profile") = "bump");

  m.def(
      "illposed_demo",
      [](const std::vector<int>& ns) { return to_json(illposed_demo(ns)).dump(); },
      py::arg("ns"), "JSON table");

  m.def(
      "check_tail_class",
      [](const std::string& law, double lambda, double B, double m_exp, double V, bool reciprocal) {
        const Law l = parse_law(law, 1);
        TailClassParams p;
        p.B = B;
        p.Lambda[0][0] = lambda;
        p.cls.m = {m_exp};
        p.cls.V = V;
        const double sign = reciprocal ? -1.0 : 1.0;
        const Diagnosis d = check_tail_class([&](const Point& t) { return sign * l.log_abs_cf(t); }, 1, p,
                                             make_grid(-8.0, 8.0, 1024));
        return to_string(d.verdict);
      },
      py::arg("law"), py::arg("Lambda"), py::arg("B") = 1.0, py::arg("m") = 2.0, py::arg("V") = 10.0,
      py::arg("reciprocal") = false);

  m.def("config_hash", [](const std::string& text) { return config_hash(json::parse(text)); });
}
