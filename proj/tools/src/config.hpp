#pragma once

// JSON run configuration.
//
//   {
//     "scenario": { ...ScenarioConfig fields..., "fields": [ ...FieldConfig... ] },
//     "filter":   { ...FilterConfig overrides... }
//   }
//
// Every key is optional; unknown keys are rejected so typos do not pass
// silently.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <aqualoc/filter.hpp>
#include <aqualoc/sim.hpp>

namespace aqualoc::tools {

struct FilterOverrides {
  std::optional<NoiseModel> noise;
  std::optional<double> initial_p_scale;
  std::optional<double> max_dt;
  std::optional<PositionUpdateFrame> depth_frame;
  std::optional<PositionUpdateFrame> gps_frame;
  std::optional<double> gps_vertical_variance;
  std::optional<double> ekf_dvl;
  std::optional<double> ekf_depth;
  std::optional<double> initial_heading;

  void apply(FilterConfig& cfg) const;
};

struct RunConfig {
  sim::ScenarioConfig scenario;
  std::vector<sim::FieldConfig> fields;
  FilterOverrides filter;
};

// Throws ParseError naming the offending key.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& json_text);

PositionUpdateFrame parse_frame(const std::string& s);
std::string to_string(PositionUpdateFrame f);

}  // namespace aqualoc::tools
