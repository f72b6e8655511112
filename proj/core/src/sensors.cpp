#include "aqualoc/sensors.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace aqualoc {
namespace {

struct ParamInfo {
  WqParameter param;
  std::string_view name;
  std::string_view units;
};

constexpr std::array<ParamInfo, 6> kParams{{
    {WqParameter::chlorophyll, "chlorophyll", "ug/L"},
    {WqParameter::temperature, "temperature", "degC"},
    {WqParameter::ph, "ph", "pH"},
    {WqParameter::tss, "tss", "mg/L"},
    {WqParameter::salinity, "salinity", "PSU"},
    {WqParameter::tds, "tds", "g/L"},
}};

const ParamInfo& info(WqParameter p) { return kParams[static_cast<std::size_t>(p)]; }

}  // namespace

std::string_view to_string(WqParameter p) { return info(p).name; }
std::string_view units(WqParameter p) { return info(p).units; }

std::optional<WqParameter> parse_wq_parameter(std::string_view name) {
  for (const auto& e : kParams) {
    if (e.name == name) return e.param;
  }
  if (name == "pH") return WqParameter::ph;
  return std::nullopt;
}

double timestamp(const SensorRecord& r) {
  return std::visit([](const auto& x) { return x.t; }, r);
}

namespace {

bool valid_record(const ImuSample& s) { return s.gyro.allFinite() && s.accel.allFinite(); }
bool valid_record(const DvlSample& s) { return !s.valid || s.velocity.allFinite(); }
bool valid_record(const DepthSample& s) { return std::isfinite(s.depth); }
bool valid_record(const GpsSample& s) {
  return std::isfinite(s.lat) && std::isfinite(s.lon) && std::abs(s.lat) <= 90.0 && std::abs(s.lon) <= 180.0 &&
         std::isfinite(s.accuracy);
}
bool valid_record(const WqRecord& s) { return std::isfinite(s.value); }

}  // namespace

namespace {

int type_rank(const SensorRecord& r) {
  if (std::holds_alternative<GpsSample>(r)) return 0;
  if (std::holds_alternative<ImuSample>(r)) return 1;
  return 2 + static_cast<int>(r.index());
}

}  // namespace

void sort_records(std::vector<SensorRecord>& recs) {
  std::stable_sort(recs.begin(), recs.end(), [](const SensorRecord& a, const SensorRecord& b) {
    const double ta = timestamp(a), tb = timestamp(b);
    if (ta != tb) return ta < tb;
    return type_rank(a) < type_rank(b);
  });
}

bool is_valid(const SensorRecord& r) {
  return std::visit([](const auto& x) { return std::isfinite(x.t) && valid_record(x); }, r);
}

}  // namespace aqualoc
