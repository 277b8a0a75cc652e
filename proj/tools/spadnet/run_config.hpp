#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spadnet/network.hpp"
#include "spadnet/training.hpp"

namespace spadnet::cli {

inline constexpr int config_version = 1;

/// Everything `train` needs. Loaded from JSON, then overridden by flags.
struct RunConfig {
  NetworkConfig network;
  TrainConfig training;
  std::filesystem::path manifest;                  // dataset manifest
  std::vector<std::filesystem::path> source_dirs;  // for directory manifests
};

/// Throws ParseError on unknown keys or wrong types, VersionError on a
/// config_version this build does not read.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const RunConfig& cfg);

nlohmann::json network_to_json(const NetworkConfig& cfg);

}  // namespace spadnet::cli
