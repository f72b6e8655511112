#include "manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include <nlohmann/json.hpp>

#include <aqualoc/errors.hpp>

namespace aqualoc::tools {

void write_manifest(const std::filesystem::path& dir, const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["inputs"] = m.inputs;
  j["filter"] = m.filter;
  j["config"] = m.config;
  j["seed"] = m.seed ? nlohmann::ordered_json(*m.seed) : nlohmann::ordered_json(nullptr);
  j["out"] = m.out;
  j["outputs"] = m.outputs;
  j["notes"] = m.notes;
  j["runtime_s"] = m.runtime_s;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  j["created"] = stamp;

  std::ofstream out(dir / "manifest.json");
  if (!out) throw Error("cannot write " + (dir / "manifest.json").string());
  out << j.dump(2) << '\n';
}

RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open manifest " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("manifest " + path.string() + ": " + e.what());
  }
  RunManifest m;
  m.command = j.value("command", "");
  m.inputs = j.value("inputs", std::vector<std::string>{});
  m.filter = j.value("filter", "");
  m.config = j.value("config", "");
  if (j.contains("seed") && j["seed"].is_number_unsigned()) m.seed = j["seed"].get<std::uint64_t>();
  m.out = j.value("out", "");
  m.outputs = j.value("outputs", std::vector<std::string>{});
  m.notes = j.value("notes", std::vector<std::string>{});
  m.runtime_s = j.value("runtime_s", 0.0);
  return m;
}

}  // namespace aqualoc::tools
