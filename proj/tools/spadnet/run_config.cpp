#include "run_config.hpp"

#include <fstream>
#include <set>

#include "spadnet/errors.hpp"

namespace spadnet::cli {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ParseError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError("bad value for '" + std::string(key) + "' in " + where);
  }
}

std::array<int, 3> triple(const json& j, const char* key, std::array<int, 3> fallback,
                          const std::string& where) {
  read(j, key, fallback, where);
  return fallback;
}

NetworkConfig network_from_json(const json& j) {
  const std::string where = "network";
  reject_unknown(j, {"num_blocks", "channels", "kernel", "leaky_slope", "intermediate_convs",
                     "skip_mode", "border"},
                 where);
  NetworkConfig c;
  read(j, "num_blocks", c.num_blocks, where);
  read(j, "channels", c.channels, where);
  const auto k = triple(j, "kernel", {c.kernel_t, c.kernel_h, c.kernel_w}, where);
  c.kernel_t = k[0];
  c.kernel_h = k[1];
  c.kernel_w = k[2];
  read(j, "leaky_slope", c.leaky_slope, where);
  read(j, "intermediate_convs", c.intermediate_convs, where);
  std::string skip(to_string(c.skip_mode)), border(to_string(c.border));
  read(j, "skip_mode", skip, where);
  read(j, "border", border, where);
  c.skip_mode = skip_mode_from_string(skip);
  c.border = border_mode_from_string(border);
  return c;
}

TrainConfig training_from_json(const json& j) {
  const std::string where = "training";
  reject_unknown(j, {"batch_size", "steps", "learning_rate", "momentum", "weight_decay",
                     "clip_norm", "decay_every", "decay_factor", "charbonnier_eta", "seed",
                     "patch", "augment", "checkpoint_every", "checkpoint", "log_every",
                     "trained_bits"},
                 where);
  TrainConfig t;
  read(j, "batch_size", t.batch_size, where);
  read(j, "steps", t.steps, where);
  read(j, "learning_rate", t.sgd.learning_rate, where);
  read(j, "momentum", t.sgd.momentum, where);
  read(j, "weight_decay", t.sgd.weight_decay, where);
  read(j, "clip_norm", t.clip_norm, where);
  read(j, "decay_every", t.decay_every, where);
  read(j, "decay_factor", t.decay_factor, where);
  read(j, "charbonnier_eta", t.loss.eta, where);
  read(j, "seed", t.seed, where);
  const auto p = triple(j, "patch", {t.patch.depth, t.patch.height, t.patch.width}, where);
  t.patch = {p[0], p[1], p[2]};
  read(j, "augment", t.augment, where);
  read(j, "checkpoint_every", t.checkpoint_every, where);
  std::string ckpt;
  read(j, "checkpoint", ckpt, where);
  t.checkpoint_path = ckpt;
  read(j, "log_every", t.log_every, where);
  read(j, "trained_bits", t.trained_bits, where);
  return t;
}

}  // namespace

RunConfig config_from_json(const json& j) {
  reject_unknown(j, {"config_version", "network", "training", "data"}, "config");
  if (!j.contains("config_version")) throw ParseError("config lacks config_version");
  int version = 0;
  read(j, "config_version", version, "config");
  if (version != config_version) {
    throw VersionError("unsupported config_version " + std::to_string(version));
  }
  RunConfig cfg;
  if (j.contains("network")) cfg.network = network_from_json(j["network"]);
  if (j.contains("training")) cfg.training = training_from_json(j["training"]);
  if (j.contains("data")) {
    const json& d = j["data"];
    reject_unknown(d, {"manifest", "sources"}, "data");
    std::string manifest;
    std::vector<std::string> sources;
    read(d, "manifest", manifest, "data");
    read(d, "sources", sources, "data");
    cfg.manifest = manifest;
    cfg.source_dirs.assign(sources.begin(), sources.end());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

json network_to_json(const NetworkConfig& c) {
  return {{"num_blocks", c.num_blocks},
          {"channels", c.channels},
          {"kernel", {c.kernel_t, c.kernel_h, c.kernel_w}},
          {"leaky_slope", c.leaky_slope},
          {"intermediate_convs", c.intermediate_convs},
          {"skip_mode", std::string(to_string(c.skip_mode))},
          {"border", std::string(to_string(c.border))}};
}

json config_to_json(const RunConfig& cfg) {
  const TrainConfig& t = cfg.training;
  json sources = json::array();
  for (const auto& s : cfg.source_dirs) sources.push_back(s.string());
  return {{"config_version", config_version},
          {"network", network_to_json(cfg.network)},
          {"training",
           {{"batch_size", t.batch_size},
            {"steps", t.steps},
            {"learning_rate", t.sgd.learning_rate},
            {"momentum", t.sgd.momentum},
            {"weight_decay", t.sgd.weight_decay},
            {"clip_norm", t.clip_norm},
            {"decay_every", t.decay_every},
            {"decay_factor", t.decay_factor},
            {"charbonnier_eta", t.loss.eta},
            {"seed", t.seed},
            {"patch", {t.patch.depth, t.patch.height, t.patch.width}},
            {"augment", t.augment},
            {"checkpoint_every", t.checkpoint_every},
            {"checkpoint", t.checkpoint_path.string()},
            {"log_every", t.log_every},
            {"trained_bits", t.trained_bits}}},
          {"data", {{"manifest", cfg.manifest.string()}, {"sources", sources}}}};
}

}  // namespace spadnet::cli
