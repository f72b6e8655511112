#include "aqualoc/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "aqualoc/errors.hpp"

namespace aqualoc::geo {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

void check_latitude(double lat_deg) {
  if (!std::isfinite(lat_deg) || std::abs(lat_deg) >= kMaxLatitude) {
    throw GeoDomainError("latitude " + std::to_string(lat_deg) + " deg outside Mercator domain (|lat| < 85)");
  }
}

}  // namespace

GeoRef::GeoRef(double lat_deg, double lon_deg, double radius)
    : lat_(lat_deg), lon_(lon_deg), radius_(radius) {
  check_latitude(lat_deg);
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw GeoDomainError("earth radius must be positive, got " + std::to_string(radius));
  }
  if (!std::isfinite(lon_deg)) throw GeoDomainError("reference longitude is not finite");
  scale_ = std::cos(lat_deg * kDegToRad);
  merc_y0_ = mercator_y(lat_deg);
}

double mercator_y(double lat_deg) {
  return std::log(std::tan(std::numbers::pi / 4.0 + 0.5 * lat_deg * kDegToRad));
}

PlanarXY to_local(double lat_deg, double lon_deg, const GeoRef& ref) {
  check_latitude(lat_deg);
  const double k = ref.scale_ * ref.radius_;
  return {k * (lon_deg - ref.lon_) * kDegToRad, k * (mercator_y(lat_deg) - ref.merc_y0_)};
}

LatLon to_geo(double x, double y, const GeoRef& ref) {
  const double k = ref.scale_ * ref.radius_;
  const double merc = y / k + ref.merc_y0_;
  const double lat = (2.0 * std::atan(std::exp(merc)) - std::numbers::pi / 2.0) * kRadToDeg;
  const double lon = ref.lon_ + (x / k) * kRadToDeg;
  return {lat, lon};
}

double great_circle_distance(const LatLon& a, const LatLon& b, double radius) {
  const double p1 = a.lat * kDegToRad;
  const double p2 = b.lat * kDegToRad;
  const double dp = p2 - p1;
  const double dl = (b.lon - a.lon) * kDegToRad;
  const double h = std::sin(dp / 2) * std::sin(dp / 2) + std::cos(p1) * std::cos(p2) * std::sin(dl / 2) * std::sin(dl / 2);
  return 2.0 * radius * std::asin(std::min(1.0, std::sqrt(h)));
}

}  // namespace aqualoc::geo
