#pragma once

// Spherical Mercator with a local reference origin.
//
// Planar coordinates are east (x) and north (y) in meters, scaled by
// cos(reference latitude) so that distances are metric near the origin.

namespace aqualoc::geo {

inline constexpr double kEarthRadius = 6378137.0;
inline constexpr double kMaxLatitude = 85.0;

struct LatLon {
  double lat = 0.0;  // deg
  double lon = 0.0;  // deg
};

struct PlanarXY {
  double x = 0.0;  // m, east
  double y = 0.0;  // m, north
};

class GeoRef {
 public:
  GeoRef() : GeoRef(0.0, 0.0) {}
  // Throws GeoDomainError if |lat| >= 85 or radius <= 0.
  GeoRef(double lat_deg, double lon_deg, double radius = kEarthRadius);

  double lat() const { return lat_; }
  double lon() const { return lon_; }
  double radius() const { return radius_; }
  double scale() const { return scale_; }

 private:
  friend PlanarXY to_local(double, double, const GeoRef&);
  friend LatLon to_geo(double, double, const GeoRef&);

  double lat_;
  double lon_;
  double radius_;
  double scale_;
  double merc_y0_;  // unscaled projected northing of the reference, radians
};

// Mercator northing (unscaled, unit sphere) of a latitude in degrees.
double mercator_y(double lat_deg);

PlanarXY to_local(double lat_deg, double lon_deg, const GeoRef& ref);
LatLon to_geo(double x, double y, const GeoRef& ref);

// Haversine distance on the sphere of radius `radius`.
double great_circle_distance(const LatLon& a, const LatLon& b, double radius = kEarthRadius);

}  // namespace aqualoc::geo
