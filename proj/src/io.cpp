#include "convid/io.hpp"

#include <bit>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "convid/error.hpp"

namespace convid {
namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void require_format(const json& j, const char* name, const fs::path& where) {
  if (!j.is_object() || j.value("format", "") != name)
    throw IoError(where.string() + ": not a " + std::string(name) + " document");
  if (j.value("version", 0) != kFormatVersion)
    throw IoError(where.string() + ": unsupported version");
}

json read_json(const fs::path& p) {
  try {
    return json::parse(read_text(p));
  } catch (const json::parse_error& e) {
    throw IoError(p.string() + ": " + e.what());
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, sep)) {
    while (!cur.empty() && (cur.back() == '\r' || cur.back() == ' ')) cur.pop_back();
    std::size_t b = 0;
    while (b < cur.size() && cur[b] == ' ') ++b;
    out.push_back(cur.substr(b));
  }
  return out;
}

double parse_double(const std::string& s, const fs::path& where, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw IoError(where.string() + ":" + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

json complex_to_json(cplx c) { return json::array({c.real(), c.imag()}); }

json matrix_to_json(const Matrix2& m, int dim) {
  json j = json::array();
  for (int i = 0; i < dim; ++i) {
    json row = json::array();
    for (int k = 0; k < dim; ++k) row.push_back(m[i][k]);
    j.push_back(row);
  }
  return j;
}

json trace_to_json(const std::vector<TraceEntry>& t) {
  json j = json::array();
  for (const auto& e : t) {
    // JSON has no infinity
    j.push_back({{"radius", e.radius}, {"value", std::isfinite(e.value) ? json(e.value) : json("inf")}});
  }
  return j;
}

}  // namespace

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json spec_to_json(const GridSpec& s) {
  json j;
  j["dim"] = s.dim;
  j["lo"] = json::array();
  j["hi"] = json::array();
  j["n"] = json::array();
  for (int a = 0; a < s.dim; ++a) {
    j["lo"].push_back(s.lo[a]);
    j["hi"].push_back(s.hi[a]);
    j["n"].push_back(s.n[a]);
  }
  return j;
}

GridSpec spec_from_json(const json& j) {
  try {
    const int dim = j.at("dim").get<int>();
    const auto lo = j.at("lo").get<std::vector<double>>();
    const auto hi = j.at("hi").get<std::vector<double>>();
    const auto n = j.at("n").get<std::vector<std::size_t>>();
    return make_grid(dim, lo, hi, n);
  } catch (const json::exception& e) {
    throw IoError(std::string("bad grid spec: ") + e.what());
  }
}

void write_gridfn(const GridFn& f, const fs::path& path, Payload payload) {
  fs::path data = path;
  data.replace_extension(payload == Payload::binary ? ".bin" : ".csv");
  json h;
  h["format"] = "convid.gridfn";
  h["version"] = kFormatVersion;
  h["label"] = f.label();
  h["spec"] = spec_to_json(f.spec());
  h["payload"] = payload == Payload::binary ? "f64le" : "csv";
  h["data"] = data.filename().string();
  write_text(path, h.dump(2) + "\n");
  if (payload == Payload::csv) {
    std::string text;
    text.reserve(f.size() * 48);
    for (const auto& v : f.values()) text += num(v.real()) + "," + num(v.imag()) + "\n";
    write_text(data, text);
    return;
  }
  static_assert(std::endian::native == std::endian::little, "binary payload assumes little endian");
  std::ofstream out(data, std::ios::binary);
  if (!out) throw IoError("cannot write " + data.string());
  out.write(reinterpret_cast<const char*>(f.values().data()),
            static_cast<std::streamsize>(f.size() * sizeof(cplx)));
  if (!out) throw IoError("write failed: " + data.string());
}

GridFn read_gridfn(const fs::path& path) {
  const json h = read_json(path);
  require_format(h, "convid.gridfn", path);
  const GridSpec spec = spec_from_json(h.at("spec"));
  const fs::path data = path.parent_path() / h.at("data").get<std::string>();
  std::vector<cplx> v(spec.size());
  const std::string kind = h.at("payload").get<std::string>();
  if (kind == "f64le") {
    const std::string raw = read_text(data);
    if (raw.size() != v.size() * sizeof(cplx)) throw IoError(data.string() + ": payload size mismatch");
    std::memcpy(v.data(), raw.data(), raw.size());
  } else if (kind == "csv") {
    std::istringstream in(read_text(data));
    std::string line;
    std::size_t i = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto cols = split(line, ',');
      if (cols.size() != 2 || i >= v.size()) throw IoError(data.string() + ": malformed payload");
      v[i] = cplx(parse_double(cols[0], data, i + 1), parse_double(cols[1], data, i + 1));
      ++i;
    }
    if (i != v.size()) throw IoError(data.string() + ": payload size mismatch");
  } else {
    throw IoError(path.string() + ": unknown payload '" + kind + "'");
  }
  return GridFn(spec, std::move(v), h.value("label", ""));
}

void write_samples(const SampleSet& s, const fs::path& path, const json& extra) {
  s.validate();
  std::string text;
  for (int a = 0; a < s.dim; ++a) text += (a ? ",z" : "z") + std::to_string(a + 1);
  for (int a = 0; a < s.dim; ++a) text += ",x" + std::to_string(a + 1);
  const bool has_y = !s.y.empty();
  if (has_y) text += ",y";
  text += "\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (int a = 0; a < s.dim; ++a) text += (a ? "," : "") + num(s.z[i][a]);
    for (int a = 0; a < s.dim; ++a) text += "," + num(s.x[i][a]);
    if (has_y) text += "," + num(s.y[i]);
    text += "\n";
  }
  write_text(path, text);
  json side = extra;
  side["format"] = "convid.samples";
  side["version"] = kFormatVersion;
  side["model"] = to_string(s.model);
  side["dim"] = s.dim;
  side["n"] = s.size();
  side["seed"] = s.seed;
  side["meta"] = s.meta;
  write_text(fs::path(path.string() + ".json"), side.dump(2) + "\n");
}

SampleSet read_samples(const fs::path& path, Model fallback) {
  SampleSet s;
  s.model = fallback;
  const fs::path side(path.string() + ".json");
  if (fs::exists(side)) {
    const json j = read_json(side);
    require_format(j, "convid.samples", side);
    s.model = parse_model(j.at("model").get<std::string>());
    s.seed = j.value("seed", std::uint64_t{0});
    s.meta = j.value("meta", "");
  }
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  const auto header = split(line, ',');
  int zc[kMaxDim] = {-1, -1}, xc[kMaxDim] = {-1, -1}, yc = -1;
  for (int c = 0; c < static_cast<int>(header.size()); ++c) {
    const std::string& h = header[static_cast<std::size_t>(c)];
    if (h == "z1" || h == "z") zc[0] = c;
    else if (h == "z2") zc[1] = c;
    else if (h == "x1" || h == "x") xc[0] = c;
    else if (h == "x2") xc[1] = c;
    else if (h == "y") yc = c;
    else throw ConfigError(path.string() + ": unknown column '" + h + "'");
  }
  if (zc[0] < 0) throw ConfigError(path.string() + ": missing column z1");
  if (xc[0] < 0) throw ConfigError(path.string() + ": missing column x1");
  s.dim = zc[1] >= 0 ? 2 : 1;
  if ((s.dim == 2) != (xc[1] >= 0)) throw ConfigError(path.string() + ": z and x columns disagree in dimension");
  if (s.model == Model::example2 && yc < 0) throw ConfigError(path.string() + ": example2 needs a y column");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cols = split(line, ',');
    if (cols.size() != header.size()) throw IoError(path.string() + ":" + std::to_string(lineno) + ": wrong column count");
    Point z{0.0, 0.0}, x{0.0, 0.0};
    for (int a = 0; a < s.dim; ++a) {
      z[a] = parse_double(cols[static_cast<std::size_t>(zc[a])], path, lineno);
      x[a] = parse_double(cols[static_cast<std::size_t>(xc[a])], path, lineno);
    }
    s.z.push_back(z);
    s.x.push_back(x);
    if (yc >= 0) s.y.push_back(parse_double(cols[static_cast<std::size_t>(yc)], path, lineno));
  }
  if (s.model != Model::example2) s.y.clear();
  s.validate();
  return s;
}

json solution_manifest(const Solution& s) {
  json j;
  j["format"] = "convid.solution";
  j["version"] = kFormatVersion;
  j["case"] = to_string(s.which);
  j["c"] = complex_to_json(s.c);
  j["tau"] = s.tau;
  j["identified"] = s.identified;
  j["dropped"] = s.dropped;
  j["floored"] = s.floored;
  j["residual"] = s.residual;
  j["mask_count"] = s.mask.count();
  j["mask_fraction"] = static_cast<double>(s.mask.count()) / static_cast<double>(s.mask.spec.size());
  j["spec"] = spec_to_json(s.gamma.spec());
  if (s.regularization)
    j["regularization"] = {{"cutoff", s.regularization->cutoff}, {"profile", s.regularization->profile}};
  else
    j["regularization"] = nullptr;
  return j;
}

void write_solution(const Solution& s, const fs::path& dir, const json& extra) {
  fs::create_directories(dir);
  json j = solution_manifest(s);
  json files = {{"gamma", "gamma.json"}, {"phi", "phi.json"}, {"mask", "mask.json"}};
  write_gridfn(s.gamma, dir / "gamma.json");
  write_gridfn(s.phi, dir / "phi.json");
  write_gridfn(s.mask.as_gridfn(), dir / "mask.json");
  if (s.g_real) {
    write_gridfn(*s.g_real, dir / "g_real.json");
    files["g_real"] = "g_real.json";
  }
  if (s.f_real) {
    write_gridfn(*s.f_real, dir / "f_real.json");
    files["f_real"] = "f_real.json";
  }
  j["files"] = files;
  j.update(extra);
  write_text(dir / "manifest.json", j.dump(2) + "\n");
}

void write_moments(const MomentSet& m, const fs::path& dir, const json& extra) {
  fs::create_directories(dir);
  json j;
  j["format"] = "convid.moments";
  j["version"] = kFormatVersion;
  j["source"] = m.source == Source::oracle ? "oracle" : "empirical";
  j["n_samples"] = m.n_samples;
  j["dim"] = m.dim();
  j["spec"] = spec_to_json(m.spec());
  json files;
  write_gridfn(m.eps1, dir / "eps1.json");
  files["eps1"] = "eps1.json";
  files["eps2"] = json::array();
  files["deps1"] = json::array();
  for (int k = 0; k < m.dim(); ++k) {
    const std::string e2 = "eps2_" + std::to_string(k + 1) + ".json";
    write_gridfn(m.eps2[static_cast<std::size_t>(k)], dir / e2);
    files["eps2"].push_back(e2);
    if (m.has_deps1()) {
      const std::string d1 = "deps1_" + std::to_string(k + 1) + ".json";
      write_gridfn(m.deps1[static_cast<std::size_t>(k)], dir / d1);
      files["deps1"].push_back(d1);
    }
  }
  j["files"] = files;
  j.update(extra);
  write_text(dir / "manifest.json", j.dump(2) + "\n");
}

MomentSet read_moments(const fs::path& dir) {
  const json j = read_json(dir / "manifest.json");
  require_format(j, "convid.moments", dir / "manifest.json");
  MomentSet m;
  m.source = j.at("source").get<std::string>() == "oracle" ? Source::oracle : Source::empirical;
  m.n_samples = j.value("n_samples", std::size_t{0});
  const json& files = j.at("files");
  m.eps1 = read_gridfn(dir / files.at("eps1").get<std::string>());
  for (const auto& f : files.at("eps2")) m.eps2.push_back(read_gridfn(dir / f.get<std::string>()));
  for (const auto& f : files.at("deps1")) m.deps1.push_back(read_gridfn(dir / f.get<std::string>()));
  m.validate();
  return m;
}

json to_json(const Diagnosis& d) {
  json j;
  j["verdict"] = to_string(d.verdict);
  j["trace"] = trace_to_json(d.trace);
  if (d.fitted_lambda) {
    j["fitted_lambda"] = matrix_to_json(*d.fitted_lambda, d.dim);
    j["fit_residual"] = d.fit_residual;
  }
  if (!d.note.empty()) j["note"] = d.note;
  if (!d.parts.empty()) {
    j["bbar"] = to_json(d.parts[0]);
    if (d.parts.size() > 1) j["bbar_inverse"] = to_json(d.parts[1]);
  }
  return j;
}

json to_json(const IllposedTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"n", r.n},
                    {"log_pair", r.log_pair},
                    {"log_ratio", r.log_ratio},
                    {"bound", r.bound},
                    {"bank_max", r.bank_max},
                    {"bound_holds", r.bound_holds}});
  return {{"format", "convid.illposed"},
          {"version", kFormatVersion},
          {"rows", rows},
          {"pair_decreasing", t.pair_decreasing},
          {"bank_decreasing", t.bank_decreasing},
          {"all_bounds_hold", t.all_bounds_hold}};
}

json to_json(const StabilityReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json e = {{"kind", to_string(row.kind)}, {"scale", row.scale}, {"distance", row.distance}, {"failed", row.failed}};
    if (!row.note.empty()) e["note"] = row.note;
    rows.push_back(e);
  }
  return {{"format", "convid.stability"},
          {"version", kFormatVersion},
          {"rows", rows},
          {"consistent_vanishing", r.consistent_vanishing},
          {"contrast", std::isfinite(r.contrast) ? json(r.contrast) : json(nullptr)}};
}

std::string to_csv(const IllposedTable& t) {
  std::string s = "n,log_pair,log_ratio,bound,bank_max,bound_holds\n";
  for (const auto& r : t.rows)
    s += std::to_string(r.n) + "," + num(r.log_pair) + "," + num(r.log_ratio) + "," + num(r.bound) + "," +
         num(r.bank_max) + "," + (r.bound_holds ? "1" : "0") + "\n";
  return s;
}

std::string to_csv(const StabilityReport& r) {
  std::string s = "kind,scale,distance,failed\n";
  for (const auto& row : r.rows)
    s += to_string(row.kind) + "," + num(row.scale) + "," + num(row.distance) + "," + (row.failed ? "1" : "0") + "\n";
  return s;
}

json law_to_json(const Law& l) { return l.describe(); }

json model_to_json(const ModelSpec& m) {
  json j = {{"model", to_string(m.model)}, {"dim", m.dim}, {"n", m.n}, {"seed", m.seed}, {"f", m.f.describe()},
            {"ux", m.ux.describe()}};
  if (m.model == Model::example2) {
    j["g"] = m.regression.describe();
    j["z"] = m.z_law.describe();
    j["uy"] = m.uy.describe();
  } else {
    j["g"] = m.g.describe();
  }
  return j;
}

std::string config_hash(const json& j) {
  const std::string s = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

}  // namespace convid
