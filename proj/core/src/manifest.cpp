#include "spadnet/manifest.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace spadnet {

using nlohmann::json;

int default_test_count(int count) noexcept { return count / 25; }

namespace {

std::string_view kind_name(SourceKind kind) {
  return kind == SourceKind::directories ? "directories" : "synthetic-gradient";
}

SourceKind kind_from(const std::string& name) {
  if (name == "directories") return SourceKind::directories;
  if (name == "synthetic-gradient") return SourceKind::synthetic_gradient;
  throw ParseError("manifest: unknown source_kind '" + name + "'");
}

}  // namespace

std::string manifest_to_string(const DatasetManifest& m) {
  json j;
  j["schema"] = "spadnet-dataset-manifest";
  j["schema_version"] = m.schema_version;
  j["rng_algorithm"] = m.rng_algorithm;
  j["seed"] = m.seed;
  j["source_kind"] = kind_name(m.source_kind);
  j["sources"] = m.sources;
  j["downsample_factor"] = m.downsample_factor;
  j["dims"] = {{"frames", m.dims.frames}, {"height", m.dims.height}, {"width", m.dims.width}};
  j["bit_level"] = m.bit_level;
  j["hot_pixels"] = {{"density", m.hot_density},
                     {"mode", to_string(m.hot_mode)},
                     {"seed", m.hot_seed}};
  j["split"] = {{"train", m.train_count}, {"test", m.test_count}};
  json seqs = json::array();
  for (const auto& s : m.sequences) {
    seqs.push_back({{"source", s.source}, {"t0", s.t0}, {"y0", s.y0}, {"x0", s.x0},
                    {"seed", s.seed}});
  }
  j["sequences"] = std::move(seqs);
  return j.dump(2) + "\n";
}

DatasetManifest manifest_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != manifest_schema_version) {
      throw VersionError("manifest schema_version " + std::to_string(version) +
                         " is not supported (expected " +
                         std::to_string(manifest_schema_version) + ")");
    }
    DatasetManifest m;
    m.schema_version = version;
    m.rng_algorithm = j.at("rng_algorithm").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.source_kind = kind_from(j.at("source_kind").get<std::string>());
    m.sources = j.at("sources").get<std::vector<std::string>>();
    m.downsample_factor = j.at("downsample_factor").get<int>();
    const auto& d = j.at("dims");
    m.dims = {d.at("frames").get<int>(), d.at("height").get<int>(), d.at("width").get<int>()};
    m.bit_level = j.at("bit_level").get<int>();
    const auto& hot = j.at("hot_pixels");
    m.hot_density = hot.at("density").get<double>();
    m.hot_mode = hot_pixel_mode_from_string(hot.at("mode").get<std::string>());
    m.hot_seed = hot.at("seed").get<std::uint64_t>();
    m.train_count = j.at("split").at("train").get<int>();
    m.test_count = j.at("split").at("test").get<int>();
    for (const auto& s : j.at("sequences")) {
      m.sequences.push_back({s.at("source").get<std::string>(), s.at("t0").get<int>(),
                             s.at("y0").get<int>(), s.at("x0").get<int>(),
                             s.at("seed").get<std::uint64_t>()});
    }
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  } catch (const DomainError& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot create " + path.string());
  out << manifest_to_string(manifest);
  if (!out) throw IoError("write failed: " + path.string());
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return manifest_from_string(ss.str());
}

}  // namespace spadnet
