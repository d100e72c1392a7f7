#pragma once

// File formats. Every JSON document carries "format" and "version".
//   GridFn:    <name>.json header + <name>.bin (f64 little-endian, re/im
//              interleaved, row-major) or <name>.csv ("re,im" per line).
//   SampleSet: CSV with header z1..zd,x1..xd[,y] and a <csv>.json sidecar.
//   Solution and MomentSet: a directory with manifest.json and GridFn files.
// See docs/formats.md.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "convid/ecf.hpp"
#include "convid/grid.hpp"
#include "convid/ident.hpp"
#include "convid/sim.hpp"
#include "convid/wellposed.hpp"

namespace convid {

using json = nlohmann::json;
namespace fs = std::filesystem;

inline constexpr int kFormatVersion = 1;

enum class Payload { binary, csv };

json spec_to_json(const GridSpec& s);
GridSpec spec_from_json(const json& j);

/// Writes header `path` (extension .json) and the payload next to it.
void write_gridfn(const GridFn& f, const fs::path& path, Payload payload = Payload::binary);
GridFn read_gridfn(const fs::path& path);

/// Sidecar is written to <path>.json with `extra` merged into it.
void write_samples(const SampleSet& s, const fs::path& path, const json& extra = json::object());
/// The model comes from the sidecar when present, otherwise from `fallback`.
SampleSet read_samples(const fs::path& path, Model fallback = Model::example1);

json solution_manifest(const Solution& s);
void write_solution(const Solution& s, const fs::path& dir, const json& extra = json::object());
void write_moments(const MomentSet& m, const fs::path& dir, const json& extra = json::object());
MomentSet read_moments(const fs::path& dir);

json to_json(const Diagnosis& d);
json to_json(const IllposedTable& t);
json to_json(const StabilityReport& r);
std::string to_csv(const IllposedTable& t);
std::string to_csv(const StabilityReport& r);

json law_to_json(const Law& l);
json model_to_json(const ModelSpec& m);

/// FNV-1a (64 bit) of the compact dump of `j`, as 16 hex digits.
std::string config_hash(const json& j);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

}  // namespace convid
