#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace aqualoc::tools {

// Written as manifest.json in every output directory.
struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  std::string filter;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  double runtime_s = 0.0;
  std::vector<std::string> outputs;
  std::vector<std::string> notes;
};

void write_manifest(const std::filesystem::path& dir, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& path);

}  // namespace aqualoc::tools
