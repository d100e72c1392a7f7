#include <gtest/gtest.h>

#include <atomic>
#include <cstdio>
#include <unistd.h>

#include "convid/error.hpp"
#include "convid/io.hpp"
#include "support.hpp"

using namespace convid;
using namespace testing_support;

namespace {

// fresh directory per call, removed at scope exit
struct TempDir {
  fs::path path;
  TempDir() {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() /
           ("convid_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

GridFn sample_fn(const GridSpec& s) {
  return GridFn::sample(s, [](const Point& t) { return std::exp(cplx(-0.3 * t[0] * t[0], 0.7 * t[0] + t[1])); });
}

void expect_same(const GridFn& a, const GridFn& b) {
  ASSERT_EQ(a.spec().dim, b.spec().dim);
  ASSERT_EQ(a.size(), b.size());
  for (int k = 0; k < a.spec().dim; ++k) {
    EXPECT_EQ(a.spec().n[k], b.spec().n[k]);
    EXPECT_EQ(a.spec().lo[k], b.spec().lo[k]);
    EXPECT_EQ(a.spec().hi[k], b.spec().hi[k]);
  }
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a[i], b[i]) << i;
}

}  // namespace

TEST(Io, GridFnRoundTripBinaryAndCsv) {
  TempDir d;
  for (const GridSpec& s : {make_grid(-4.0, 4.0, 32), make_grid(Point{-2.0, -1.0}, Point{2.0, 3.0}, {16, 16})}) {
    const GridFn f = sample_fn(s);
    write_gridfn(f, d.path / "b.json", Payload::binary);
    write_gridfn(f, d.path / "c.json", Payload::csv);
    EXPECT_TRUE(fs::exists(d.path / "b.bin"));
    EXPECT_TRUE(fs::exists(d.path / "c.csv"));
    expect_same(read_gridfn(d.path / "b.json"), f);
    expect_same(read_gridfn(d.path / "c.json"), f);
  }
}

TEST(Io, GridFnErrors) {
  TempDir d;
  EXPECT_THROW(read_gridfn(d.path / "missing.json"), IoError);
  const GridFn f = sample_fn(make_grid(-1.0, 1.0, 16));
  write_gridfn(f, d.path / "t.json");
  fs::resize_file(d.path / "t.bin", 10);
  EXPECT_THROW(read_gridfn(d.path / "t.json"), IoError);
  write_text(d.path / "u.json", "{\"format\":\"something.else\",\"version\":1}");
  EXPECT_THROW(read_gridfn(d.path / "u.json"), IoError);
  write_text(d.path / "v.json", "not json");
  EXPECT_THROW(read_gridfn(d.path / "v.json"), IoError);
}

TEST(Io, SamplesRoundTripWithSidecar) {
  TempDir d;
  ModelSpec m;
  m.model = Model::example2;
  m.uy = replicate(Gaussian{0.0, 0.1}, 1);
  m.n = 50;
  m.seed = 8;
  const SampleSet s = generate(m);
  write_samples(s, d.path / "s.csv", {{"config_hash", "abc"}});
  const json side = json::parse(read_text(d.path / "s.csv.json"));
  EXPECT_EQ(side["format"], "convid.samples");
  EXPECT_EQ(side["model"], "example2");
  EXPECT_EQ(side["config_hash"], "abc");
  EXPECT_EQ(side["n"], 50);
  const SampleSet r = read_samples(d.path / "s.csv");
  EXPECT_EQ(r.model, Model::example2);
  EXPECT_EQ(r.seed, 8u);
  ASSERT_EQ(r.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(r.z[i][0], s.z[i][0]);
    EXPECT_EQ(r.x[i][0], s.x[i][0]);
    EXPECT_EQ(r.y[i], s.y[i]);
  }
}

TEST(Io, SamplesTwoDimensionalWithoutSidecar) {
  TempDir d;
  write_text(d.path / "t.csv", "z1,z2,x1,x2\n1,2,3,4\n-1,0.5,2,2\n");
  const SampleSet r = read_samples(d.path / "t.csv", Model::example3);
  EXPECT_EQ(r.model, Model::example3);
  EXPECT_EQ(r.dim, 2);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r.z[1][1], 0.5);
  EXPECT_EQ(r.x[0][1], 4.0);
}

TEST(Io, SampleErrors) {
  TempDir d;
  EXPECT_THROW(read_samples(d.path / "none.csv"), IoError);
  write_text(d.path / "a.csv", "z,w\n1,2\n");
  EXPECT_THROW(read_samples(d.path / "a.csv"), ConfigError);
  write_text(d.path / "b.csv", "z,x\n1,2\n3,4\n");
  EXPECT_THROW(read_samples(d.path / "b.csv", Model::example2), ConfigError);
  write_text(d.path / "c.csv", "z,x\n1,oops\n");
  EXPECT_THROW(read_samples(d.path / "c.csv"), IoError);
  write_text(d.path / "e.csv", "x\n1\n");
  EXPECT_THROW(read_samples(d.path / "e.csv"), ConfigError);
}

TEST(Io, MomentsRoundTrip) {
  TempDir d;
  const MomentSet m = oracle_moments(parse_law("gaussian(1,0.25)", 1), parse_law("laplace(0,1)", 1),
                                     make_grid(-4.0, 4.0, 64));
  write_moments(m, d.path / "m");
  const MomentSet r = read_moments(d.path / "m");
  EXPECT_EQ(r.source, Source::oracle);
  expect_same(r.eps1, m.eps1);
  ASSERT_EQ(r.eps2.size(), 1u);
  expect_same(r.eps2[0], m.eps2[0]);
  ASSERT_TRUE(r.has_deps1());
  expect_same(r.deps1[0], m.deps1[0]);
}

TEST(Io, SolutionManifest) {
  TempDir d;
  const MomentSet m = oracle_moments(parse_law("gaussian(0,1)", 1), parse_law("gaussian(0,1)", 1),
                                     make_grid(-4.0, 4.0, 64));
  Solution s = solve_case_a(m, 1e-6);
  json j = solution_manifest(s);
  EXPECT_EQ(j["format"], "convid.solution");
  EXPECT_EQ(j["version"], kFormatVersion);
  EXPECT_EQ(j["case"], "a");
  EXPECT_TRUE(j["regularization"].is_null());
  EXPECT_EQ(j["mask_count"], s.mask.count());
  s.regularization = RegularizationInfo{2.0, "bump"};
  j = solution_manifest(s);
  EXPECT_EQ(j["regularization"]["cutoff"], 2.0);
  EXPECT_EQ(j["regularization"]["profile"], "bump");
  write_solution(s, d.path / "sol", {{"config_hash", "0123"}});
  const json w = json::parse(read_text(d.path / "sol" / "manifest.json"));
  EXPECT_EQ(w["config_hash"], "0123");
  expect_same(read_gridfn(d.path / "sol" / w["files"]["gamma"].get<std::string>()), s.gamma);
}

TEST(Io, ConfigHash) {
  const json a = {{"n", 10}, {"model", "example1"}};
  const json b = {{"model", "example1"}, {"n", 10}};
  const std::string h = config_hash(a);
  EXPECT_EQ(h.size(), 16u);
  EXPECT_EQ(h.find_first_not_of("0123456789abcdef"), std::string::npos);
  EXPECT_EQ(h, config_hash(b));  // keys are ordered in the dump
  EXPECT_NE(h, config_hash({{"n", 11}, {"model", "example1"}}));
  // independent FNV-1a over the compact dump
  std::uint64_t f = 0xcbf29ce484222325ull;
  for (unsigned char c : a.dump()) f = (f ^ c) * 0x100000001b3ull;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(f));
  EXPECT_EQ(h, buf);
}

TEST(Io, ModelJson) {
  ModelSpec m;
  const json j = model_to_json(m);
  EXPECT_EQ(j["model"], "example1");
  EXPECT_EQ(j["g"], "gaussian(1,0.25)");
  EXPECT_EQ(j["f"], "laplace(0,1)");
  m.model = Model::example2;
  EXPECT_EQ(model_to_json(m)["g"], "linear(0,1)");
}

TEST(Io, ReportSerialisation) {
  IllposedTable t;
  t.rows.push_back({2, -3.0, 1.0, -1.75, 0.01, true});
  const std::string csv = to_csv(t);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,log_pair,log_ratio,bound,bank_max,bound_holds");
  EXPECT_NE(csv.find("2,-3,1,-1.75,0.01,1"), std::string::npos);
  const json j = to_json(t);
  EXPECT_EQ(j["rows"].size(), 1u);

  StabilityReport r;
  r.rows.push_back({PerturbationKind::consistent, 0.1, 0.02, false, ""});
  EXPECT_NE(to_csv(r).find("consistent,0.10000000000000001,0.02,0"), std::string::npos);
  Diagnosis dg;
  dg.verdict = Verdict::member;
  dg.trace = {{8.0, 1.0}, {16.0, 1.001}};
  const json dj = to_json(dg);
  EXPECT_EQ(dj["verdict"], "member");
  EXPECT_EQ(dj["trace"].size(), 2u);
}
