// convid: simulate, estimate, diagnose, illposed-demo, stability.
// Exit codes: 0 success, 2 configuration or input error, 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "convid/error.hpp"
#include "convid/io.hpp"
#include "convid/parallel.hpp"
#include "convid/pipeline.hpp"
#include "convid/wellposed.hpp"

using namespace convid;

namespace {

// Flag values by long name; only flags given on the command line are kept.
using Flags = std::map<std::string, std::string>;

void add(CLI::App* app, Flags& flags, const std::string& name, const std::string& help) {
  app->add_option_function<std::string>("--" + name, [&flags, name](const std::string& v) { flags[name] = v; }, help);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

double to_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": not a number '" + s + "'");
  }
}

// Typed access to the merged config: JSON numbers and strings both accepted.
struct Config {
  json j = json::object();

  bool has(const std::string& k) const { return j.contains(k) && !j[k].is_null(); }
  std::string str(const std::string& k, const std::string& def = "") const {
    if (!has(k)) return def;
    return j[k].is_string() ? j[k].get<std::string>() : j[k].dump();
  }
  double num(const std::string& k, double def) const {
    if (!has(k)) return def;
    return j[k].is_number() ? j[k].get<double>() : to_number(j[k].get<std::string>(), "--" + k);
  }
  std::uint64_t uint(const std::string& k, std::uint64_t def) const {
    const double v = num(k, static_cast<double>(def));
    if (v < 0 || v != std::floor(v)) throw ConfigError("--" + k + " must be a non-negative integer");
    return static_cast<std::uint64_t>(v);
  }
  // where results go is not part of what was computed
  std::string hash() const {
    json k = j;
    k.erase("out");
    return config_hash(k);
  }
};

Config merge(const Flags& flags) {
  Config c;
  for (const auto& [k, v] : flags) c.j[k] = v;
  if (c.has("config")) {
    json file;
    try {
      file = json::parse(read_text(c.str("config")));
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config file: ") + e.what());
    }
    if (!file.is_object()) throw ConfigError("config file must hold a JSON object");
    c.j.update(file);  // the file overrides flags
  }
  c.j.erase("config");
  return c;
}

// lo:hi:n, or lo:hi:n,lo:hi:n for two axes; one axis is replicated to dim.
GridSpec parse_grid(const std::string& text, int dim) {
  const auto axes = split(text, ',');
  if (axes.empty() || axes.size() > 2) throw ConfigError("--grid: expected lo:hi:n[,lo:hi:n]");
  std::vector<double> lo, hi;
  std::vector<std::size_t> n;
  for (const auto& a : axes) {
    const auto p = split(a, ':');
    if (p.size() != 3) throw ConfigError("--grid: expected lo:hi:n, got '" + a + "'");
    lo.push_back(to_number(p[0], "--grid"));
    hi.push_back(to_number(p[1], "--grid"));
    const double k = to_number(p[2], "--grid");
    if (k < 1 || k != std::floor(k)) throw ConfigError("--grid: node count must be a positive integer");
    n.push_back(static_cast<std::size_t>(k));
  }
  if (static_cast<int>(axes.size()) != dim) {
    if (axes.size() != 1) throw ConfigError("--grid has the wrong number of axes");
    lo.push_back(lo[0]);
    hi.push_back(hi[0]);
    n.push_back(n[0]);
  }
  return make_grid(dim, lo, hi, n);
}

// m:V[:B:Lambda]
TailClassParams parse_class(const std::string& text, int dim, bool* has_tail) {
  const auto p = split(text, ':');
  if (p.size() != 2 && p.size() != 4) throw ConfigError("--class: expected m:V or m:V:B:Lambda");
  TailClassParams t;
  t.cls.m = {to_number(p[0], "--class m")};
  t.cls.V = to_number(p[1], "--class V");
  *has_tail = p.size() == 4;
  if (*has_tail) {
    t.B = to_number(p[2], "--class B");
    const double l = to_number(p[3], "--class Lambda");
    for (int a = 0; a < dim; ++a) t.Lambda[a][a] = l;
  }
  t.validate(dim);
  return t;
}

std::optional<Case> parse_case(const std::string& s) {
  if (s == "a") return Case::a;
  if (s == "b") return Case::b;
  if (s == "auto") return std::nullopt;
  throw ConfigError("--case must be a, b or auto");
}

Case parse_fixed_case(const std::string& s) {
  const auto c = parse_case(s);
  if (!c) throw ConfigError("--case auto is not available here");
  return *c;
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const auto& p : split(s, ',')) out.push_back(to_number(p, what));
  if (out.empty()) throw ConfigError(what + " is empty");
  return out;
}

// "2..10" or "2,4,6"
std::vector<int> parse_ns(const std::string& s) {
  std::vector<int> out;
  const auto dots = s.find("..");
  if (dots != std::string::npos) {
    const int a = static_cast<int>(to_number(s.substr(0, dots), "--ns"));
    const int b = static_cast<int>(to_number(s.substr(dots + 2), "--ns"));
    for (int n = a; n <= b; ++n) out.push_back(n);
  } else {
    for (double v : parse_list(s, "--ns")) out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw ConfigError("--ns is empty");
  return out;
}

void emit(const json& j, const Config& c, const std::string& file) {
  std::cout << j.dump(2) << "\n";
  if (c.has("out")) {
    fs::create_directories(c.str("out"));
    write_text(fs::path(c.str("out")) / file, j.dump(2) + "\n");
  }
}

ModelSpec model_from(const Config& c) {
  ModelSpec m;
  m.model = parse_model(c.str("model", "example1"));
  m.dim = static_cast<int>(c.uint("dim", 1));
  m.n = c.uint("n", m.n);
  m.seed = c.uint("seed", m.seed);
  const int d = m.dim;
  m.g = parse_law(c.str("g", "gaussian(1,0.25)"), d);
  m.f = parse_law(c.str("f", "laplace(0,1)"), d);
  m.ux = parse_law(c.str("ux", "point(0)"), d);
  m.uy = parse_law(c.str("uy", "point(0)"), 1);
  m.z_law = parse_law(c.str("z", "gaussian(0,1)"), d);
  if (m.model == Model::example2) m.regression = parse_regression(c.str("g", "linear(0,1)"));
  m.validate();
  return m;
}

int cmd_simulate(const Config& c) {
  if (!c.has("out")) throw ConfigError("simulate needs --out <file.csv>");
  const ModelSpec m = model_from(c);
  const SampleSet s = generate(m);
  const json extra = {{"config", c.j}, {"config_hash", c.hash()}, {"truth", model_to_json(m)}};
  const fs::path out = c.str("out");
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_samples(s, out, extra);
  std::cout << json{{"samples", out.string()}, {"n", s.size()}, {"config_hash", c.hash()}}.dump(2) << "\n";
  return 0;
}

double l2_distance(const GridFn& a, const Law& truth) {
  const GridSpec& s = a.spec();
  double e = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k].real() - truth.density(s.point(k));
    e += d * d;
  }
  return std::sqrt(e * s.cell_volume());
}

int cmd_estimate(const Config& c) {
  if (!c.has("in")) throw ConfigError("estimate needs --in <samples.csv>");
  if (!c.has("out")) throw ConfigError("estimate needs --out <dir>");
  const fs::path in = c.str("in");
  const SampleSet s = read_samples(in, parse_model(c.str("model", "example1")));
  EstimateConfig e;
  e.freq = parse_grid(c.str("grid", "-8:8:64"), s.dim);
  e.which = parse_case(c.str("case", "auto"));
  e.tau = c.num("tau", 0.0);
  e.pad = c.uint("pad", 8);
  e.regression.bandwidth = c.num("bandwidth", 0.0);
  const std::string anchor = c.str("anchor", "1");
  if (anchor == "auto") e.anchor_auto = true;
  else e.c = to_number(anchor, "--anchor");
  const std::string reg = c.str("reg", "off");
  if (reg != "off") {
    const auto p = split(reg, ':');
    if (p.empty() || p.size() > 2) throw ConfigError("--reg: expected C:profile or off");
    e.reg_cutoff = to_number(p[0], "--reg C");
    if (p.size() == 2) e.reg_profile = parse_profile(p[1]);
  }
  const Estimate est = estimate(s, e);
  const Solution& sol = est.solution;
  const std::string hash = c.hash();

  json summary = solution_manifest(sol);
  summary["format"] = "convid.estimate";
  summary["case_auto"] = est.case_auto;
  summary["n_samples"] = s.size();
  summary["config_hash"] = hash;
  if (!est.note.empty()) summary["note"] = est.note;

  // distances to the ground truth recorded by simulate
  const fs::path side(in.string() + ".json");
  if (fs::exists(side) && s.model != Model::example2) {
    const json truth = json::parse(read_text(side)).value("truth", json::object());
    if (truth.contains("g") && truth.contains("f")) {
      json dist;
      if (sol.g_real) {
        const Law g = parse_law(truth["g"].get<std::string>(), s.dim);
        dist["g"] = {{"l1", l1_distance(*sol.g_real, g)}, {"l2", l2_distance(*sol.g_real, g)}};
      }
      const Law f = parse_law(truth["f"].get<std::string>(), s.dim);
      if (sol.f_real && !f.singular())
        dist["f"] = {{"l1", l1_distance(*sol.f_real, f)}, {"l2", l2_distance(*sol.f_real, f)}};
      summary["truth_distance"] = dist;
    }
  }
  write_solution(sol, c.str("out"), {{"config", c.j}, {"config_hash", hash}, {"case_auto", est.case_auto}});
  write_text(fs::path(c.str("out")) / "summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_diagnose(const Config& c) {
  const int dim = static_cast<int>(c.uint("dim", 1));
  bool tail = false;
  const TailClassParams p = parse_class(c.str("class", "2:10"), dim, &tail);
  const bool reciprocal = c.str("reciprocal", "false") == "true";
  const double sign = reciprocal ? -1.0 : 1.0;
  Diagnosis d;
  std::string subject;
  if (c.has("in")) {
    GridFn b = read_gridfn(c.str("in"));
    if (reciprocal)
      for (auto& v : b.data()) v = v == cplx(0.0) ? cplx(0.0) : 1.0 / v;
    subject = c.str("in");
    d = tail ? check_tail_class(b, p) : check_phi_mV(b, p.cls);
  } else {
    const Law law = parse_law(c.str("law", "laplace(0,1)"), dim);
    subject = (reciprocal ? "1/cf " : "cf ") + law.describe();
    const LogMagnitude lb = [&](const Point& t) { return sign * law.log_abs_cf(t); };
    const GridSpec fit = parse_grid(c.str("grid", "-8:8:1024"), dim);
    d = tail ? check_tail_class(lb, dim, p, fit) : check_phi_mV(lb, dim, p.cls);
  }
  json j = to_json(d);
  j["format"] = "convid.diagnosis";
  j["version"] = kFormatVersion;
  j["subject"] = subject;
  j["config_hash"] = c.hash();
  emit(j, c, "diagnosis.json");
  return 0;
}

int cmd_illposed(const Config& c) {
  const IllposedTable t = illposed_demo(parse_ns(c.str("ns", "2..10")), parse_grid(c.str("grid", "-16:16:2048"), 1));
  json j = to_json(t);
  j["config_hash"] = c.hash();
  emit(j, c, "illposed.json");
  if (c.has("out")) write_text(fs::path(c.str("out")) / "illposed.csv", to_csv(t));
  if (!t.all_bounds_hold) throw NumericalError("the lower bound fails for some n");
  return 0;
}

int cmd_stability(const Config& c) {
  const Law g = parse_law(c.str("g", "gaussian(0,1)"), 1);
  const Law f = parse_law(c.str("f", "gaussian(0,1)"), 1);
  bool tail = false;
  TailClassParams p = parse_class(c.str("class", "2:10:1:1"), 1, &tail);
  if (!tail) throw ConfigError("stability needs --class m:V:B:Lambda");
  StabilityOptions o;
  o.grid = parse_grid(c.str("grid", "-8:8:1024"), 1);
  o.tau = c.num("tau", o.tau);
  o.which = parse_fixed_case(c.str("case", "a"));
  const StabilityReport r = stability_experiment(g, f, p, parse_list(c.str("scales", "0.1,0.01,0.001"), "--scales"), o);
  json j = to_json(r);
  j["config_hash"] = c.hash();
  emit(j, c, "stability.json");
  if (c.has("out")) write_text(fs::path(c.str("out")) / "stability.csv", to_csv(r));
  return 0;
}

int fail(const char* kind, const std::string& msg, int code) {
  std::cerr << json{{"error", kind}, {"message", msg}, {"exit_code", code}}.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deconvolution and identification toolkit"};
  app.require_subcommand(1);
  Flags flags;
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (0: all cores)");

  auto common = [&](CLI::App* s) {
    add(s, flags, "config", "JSON file; its keys override flags");
    add(s, flags, "out", "output file or directory");
  };
  auto model = [&](CLI::App* s) {
    add(s, flags, "model", "example1, example2 or example3");
    add(s, flags, "n", "sample size");
    add(s, flags, "seed", "random seed");
    add(s, flags, "dim", "dimension, 1 or 2");
    add(s, flags, "g", "latent law, or regression function for example2");
    add(s, flags, "f", "law of the error u");
    add(s, flags, "ux", "law of the error on x");
    add(s, flags, "uy", "law of the error on y (example2)");
    add(s, flags, "z", "law of z (example2)");
  };
  const char* grid_help = "frequency grid lo:hi:n[,lo:hi:n]";

  CLI::App* sim = app.add_subcommand("simulate", "draw a synthetic sample");
  common(sim);
  model(sim);

  CLI::App* est = app.add_subcommand("estimate", "recover gamma and phi from a sample");
  common(est);
  add(est, flags, "in", "sample csv");
  add(est, flags, "model", "example2 reads the y column");
  add(est, flags, "grid", grid_help);
  add(est, flags, "case", "a, b or auto");
  add(est, flags, "tau", "support threshold on |eps1| (default from n)");
  add(est, flags, "reg", "C:profile (bump or raised_cosine) or off");
  add(est, flags, "anchor", "value at the origin, or auto");
  add(est, flags, "pad", "zero-padding factor for the inverse transform");
  add(est, flags, "bandwidth", "local-linear bandwidth (example2)");

  CLI::App* dia = app.add_subcommand("diagnose", "class membership of a characteristic function");
  common(dia);
  add(dia, flags, "law", "closed-form law");
  add(dia, flags, "in", "grid function file instead of a law");
  add(dia, flags, "class", "m:V or m:V:B:Lambda");
  add(dia, flags, "grid", grid_help);
  add(dia, flags, "dim", "dimension, 1 or 2");
  add(dia, flags, "reciprocal", "test 1/cf instead of cf");

  CLI::App* ill = app.add_subcommand("illposed-demo", "bump sequence table");
  common(ill);
  add(ill, flags, "ns", "indices, 2..10 or a comma list");
  add(ill, flags, "grid", "spatial grid lo:hi:n");

  CLI::App* stab = app.add_subcommand("stability", "perturbation experiment");
  common(stab);
  add(stab, flags, "g", "latent law");
  add(stab, flags, "f", "error law");
  add(stab, flags, "class", "m:V:B:Lambda");
  add(stab, flags, "scales", "comma list of perturbation scales");
  add(stab, flags, "grid", grid_help);
  add(stab, flags, "case", "a or b");
  add(stab, flags, "tau", "support threshold on |eps1|");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("config", e.what(), 2);
  }

  try {
    set_thread_count(threads);
    const Config c = merge(flags);
    if (sim->parsed()) return cmd_simulate(c);
    if (est->parsed()) return cmd_estimate(c);
    if (dia->parsed()) return cmd_diagnose(c);
    if (ill->parsed()) return cmd_illposed(c);
    return cmd_stability(c);
  } catch (const ConfigError& e) {
    return fail("config", e.what(), 2);
  } catch (const IoError& e) {
    return fail("io", e.what(), 2);
  } catch (const json::exception& e) {
    return fail("config", e.what(), 2);
  } catch (const NumericalError& e) {
    return fail("numerical", e.what(), 3);
  } catch (const std::exception& e) {
    return fail("numerical", e.what(), 3);
  }
}
