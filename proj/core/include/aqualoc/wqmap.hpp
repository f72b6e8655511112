#pragma once

// Water-quality voxel grids and trajectory error metrics.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "aqualoc/filter.hpp"
#include "aqualoc/geo.hpp"
#include "aqualoc/ingest.hpp"

namespace aqualoc::wqmap {

struct GridSpec {
  Vec3 origin = Vec3::Zero();  // minimum corner, m
  Vec3 cell{1.0, 1.0, 0.25};   // m
  std::array<int, 3> dims{1, 1, 1};
  double power = 2.0;
  double radius_cells = 3.0;

  // Grid covering the samples' bounding box, padded by `pad_cells` on each side.
  static GridSpec covering(const std::vector<ingest::GeoreferencedSample>& samples, const Vec3& cell = {1.0, 1.0, 0.25},
                           int pad_cells = 0);
};

struct WqGrid {
  WqParameter param = WqParameter::temperature;
  GridSpec spec;
  std::vector<double> value;     // NaN where unfilled
  std::vector<int> count;        // contributing samples
  std::vector<bool> filled;

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * spec.dims[1] + j) * spec.dims[0] + i;
  }
  Vec3 center(int i, int j, int k) const;
  std::size_t filled_count() const;
  std::size_t size() const { return value.size(); }
};

// Inverse-distance weighting (weights |d|^-power, d in cell units) of the
// samples of `param` within radius_cells of each cell center. Cells with no
// sample in range stay unfilled. Throws DataError if no sample of `param`
// lies inside the grid bounds.
WqGrid build_grid(const std::vector<ingest::GeoreferencedSample>& samples, WqParameter param, const GridSpec& spec);

// One row per filled cell: x,y,z,lat,lon,parameter,value,count.
void write_grid(std::ostream& out, const WqGrid& grid, const geo::GeoRef& ref);

struct ErrorReport {
  Vec3 mae = Vec3::Zero();      // per-axis mean |error|, m
  double total_error = 0.0;     // RMSE of the Euclidean position error, m
  double total_variance = 0.0;  // variance of the Euclidean position error, m^2
  double runtime_s = 0.0;
  std::size_t samples = 0;
  std::string filter;
};

inline constexpr double kAlignTolerance = 0.25;  // s

// Pairs each estimate state with the nearest truth state within `tolerance`.
// Throws DataError when nothing aligns.
ErrorReport compute_errors(const TrajectoryEstimate& est, const TrajectoryEstimate& truth, double runtime_s,
                           double tolerance = kAlignTolerance);

// Key-value text, one metric per line (per-axis MAE, total error, total variance, runtime).
void write_report(std::ostream& out, const ErrorReport& r);

}  // namespace aqualoc::wqmap
