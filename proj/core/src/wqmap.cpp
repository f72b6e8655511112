#include "aqualoc/wqmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "aqualoc/errors.hpp"

namespace aqualoc::wqmap {

GridSpec GridSpec::covering(const std::vector<ingest::GeoreferencedSample>& samples, const Vec3& cell, int pad_cells) {
  if (samples.empty()) throw DataError("cannot size a grid without samples");
  Vec3 lo = samples.front().position, hi = lo;
  for (const auto& s : samples) {
    lo = lo.cwiseMin(s.position);
    hi = hi.cwiseMax(s.position);
  }
  GridSpec spec;
  spec.cell = cell;
  for (int a = 0; a < 3; ++a) {
    const double start = (std::floor(lo[a] / cell[a]) - pad_cells) * cell[a];
    const int n = static_cast<int>(std::floor(hi[a] / cell[a]) - std::floor(lo[a] / cell[a])) + 1 + 2 * pad_cells;
    spec.origin[a] = start;
    spec.dims[a] = n;
  }
  return spec;
}

Vec3 WqGrid::center(int i, int j, int k) const {
  return spec.origin + Vec3((i + 0.5) * spec.cell.x(), (j + 0.5) * spec.cell.y(), (k + 0.5) * spec.cell.z());
}

std::size_t WqGrid::filled_count() const { return static_cast<std::size_t>(std::count(filled.begin(), filled.end(), true)); }

WqGrid build_grid(const std::vector<ingest::GeoreferencedSample>& samples, WqParameter param, const GridSpec& spec) {
  for (int a = 0; a < 3; ++a) {
    if (spec.dims[a] <= 0) throw DataError("grid dimensions must be positive");
    if (!(spec.cell[a] > 0.0)) throw DataError("grid cell sizes must be positive");
  }
  if (!(spec.radius_cells > 0.0)) throw DataError("interpolation radius must be positive");

  const Vec3 extent = spec.cell.cwiseProduct(Vec3(spec.dims[0], spec.dims[1], spec.dims[2]));
  const Vec3 upper = spec.origin + extent;

  // Sample positions in continuous cell coordinates.
  struct Local {
    Vec3 pos;
    double value;
  };
  std::vector<Local> pts;
  std::size_t in_bounds = 0;
  for (const auto& s : samples) {
    if (s.record.param != param || !std::isfinite(s.record.value) || !s.position.allFinite()) continue;
    const Vec3& p = s.position;
    if ((p.array() >= spec.origin.array()).all() && (p.array() <= upper.array()).all()) ++in_bounds;
    pts.push_back({(p - spec.origin).cwiseQuotient(spec.cell), s.record.value});
  }
  if (in_bounds == 0) throw DataError("no " + std::string(to_string(param)) + " samples inside the grid bounds");

  // Bucket samples by cell for the radius search.
  const auto& d = spec.dims;
  std::vector<std::vector<std::size_t>> buckets(static_cast<std::size_t>(d[0]) * d[1] * d[2]);
  auto cell_of = [&](double c, int n) { return std::clamp(static_cast<int>(std::floor(c)), -1, n); };
  for (std::size_t n = 0; n < pts.size(); ++n) {
    const int i = cell_of(pts[n].pos.x(), d[0]), j = cell_of(pts[n].pos.y(), d[1]), k = cell_of(pts[n].pos.z(), d[2]);
    if (i < 0 || j < 0 || k < 0 || i >= d[0] || j >= d[1] || k >= d[2]) {
      // Out-of-bounds samples still influence border cells within the radius.
      const int ci = std::clamp(i, 0, d[0] - 1), cj = std::clamp(j, 0, d[1] - 1), ck = std::clamp(k, 0, d[2] - 1);
      buckets[(static_cast<std::size_t>(ck) * d[1] + cj) * d[0] + ci].push_back(n);
    } else {
      buckets[(static_cast<std::size_t>(k) * d[1] + j) * d[0] + i].push_back(n);
    }
  }

  WqGrid grid;
  grid.param = param;
  grid.spec = spec;
  const std::size_t total = buckets.size();
  grid.value.assign(total, std::numeric_limits<double>::quiet_NaN());
  grid.count.assign(total, 0);
  grid.filled.assign(total, false);

  const double r = spec.radius_cells;
  const double r2 = r * r;
  const int reach = static_cast<int>(std::ceil(r)) + 1;
  for (int k = 0; k < d[2]; ++k) {
    for (int j = 0; j < d[1]; ++j) {
      for (int i = 0; i < d[0]; ++i) {
        const Vec3 c(i + 0.5, j + 0.5, k + 0.5);
        double wsum = 0.0, vsum = 0.0, exact_sum = 0.0;
        double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
        int n_in = 0, n_exact = 0;
        for (int kk = std::max(0, k - reach); kk <= std::min(d[2] - 1, k + reach); ++kk) {
          for (int jj = std::max(0, j - reach); jj <= std::min(d[1] - 1, j + reach); ++jj) {
            for (int ii = std::max(0, i - reach); ii <= std::min(d[0] - 1, i + reach); ++ii) {
              for (std::size_t n : buckets[(static_cast<std::size_t>(kk) * d[1] + jj) * d[0] + ii]) {
                const double dist2 = (pts[n].pos - c).squaredNorm();
                if (dist2 > r2) continue;
                ++n_in;
                vmin = std::min(vmin, pts[n].value);
                vmax = std::max(vmax, pts[n].value);
                if (dist2 == 0.0) {
                  ++n_exact;
                  exact_sum += pts[n].value;
                  continue;
                }
                const double w = std::pow(dist2, -0.5 * spec.power);
                wsum += w;
                vsum += w * pts[n].value;
              }
            }
          }
        }
        if (n_in == 0) continue;
        const std::size_t idx = grid.index(i, j, k);
        // clamp away the last-bit overshoot of the weighted sum
        grid.value[idx] = std::clamp(n_exact > 0 ? exact_sum / n_exact : vsum / wsum, vmin, vmax);
        grid.count[idx] = n_in;
        grid.filled[idx] = true;
      }
    }
  }
  return grid;
}

void write_grid(std::ostream& out, const WqGrid& grid, const geo::GeoRef& ref) {
  out << "x,y,z,lat,lon,parameter,value,count\n";
  const auto& d = grid.spec.dims;
  for (int k = 0; k < d[2]; ++k) {
    for (int j = 0; j < d[1]; ++j) {
      for (int i = 0; i < d[0]; ++i) {
        const std::size_t idx = grid.index(i, j, k);
        if (!grid.filled[idx]) continue;
        const Vec3 c = grid.center(i, j, k);
        const geo::LatLon ll = geo::to_geo(c.x(), c.y(), ref);
        out << ingest::format_number(c.x()) << ',' << ingest::format_number(c.y()) << ','
            << ingest::format_number(c.z()) << ',' << ingest::format_number(ll.lat) << ','
            << ingest::format_number(ll.lon) << ',' << to_string(grid.param) << ','
            << ingest::format_number(grid.value[idx]) << ',' << grid.count[idx] << '\n';
      }
    }
  }
}

ErrorReport compute_errors(const TrajectoryEstimate& est, const TrajectoryEstimate& truth, double runtime_s,
                           double tolerance) {
  std::vector<double> times;
  times.reserve(truth.states.size());
  for (const auto& s : truth.states) times.push_back(s.t);
  if (!std::is_sorted(times.begin(), times.end())) throw OrderingError("truth timestamps are not sorted");

  std::vector<Vec3> errs;
  errs.reserve(est.states.size());
  for (const auto& s : est.states) {
    if (times.empty()) break;
    auto it = std::lower_bound(times.begin(), times.end(), s.t);
    std::size_t best = times.size();
    double gap = std::numeric_limits<double>::infinity();
    if (it != times.end()) {
      best = static_cast<std::size_t>(it - times.begin());
      gap = *it - s.t;
    }
    if (it != times.begin() && s.t - *(it - 1) <= gap) {
      best = static_cast<std::size_t>(it - times.begin()) - 1;
      gap = s.t - *(it - 1);
    }
    if (gap > tolerance) continue;
    errs.push_back(s.X.p - truth.states[best].X.p);
  }
  if (errs.empty()) throw DataError("no estimate states align with the reference trajectory");

  ErrorReport rep;
  rep.filter = est.filter;
  rep.runtime_s = runtime_s;
  rep.samples = errs.size();
  const double n = static_cast<double>(errs.size());
  double sq = 0.0, norm_sum = 0.0;
  for (const Vec3& e : errs) {
    rep.mae += e.cwiseAbs();
    sq += e.squaredNorm();
    norm_sum += e.norm();
  }
  rep.mae /= n;
  rep.total_error = std::sqrt(sq / n);
  const double mean_norm = norm_sum / n;
  double var = 0.0;
  for (const Vec3& e : errs) var += (e.norm() - mean_norm) * (e.norm() - mean_norm);
  rep.total_variance = var / n;
  return rep;
}

void write_report(std::ostream& out, const ErrorReport& r) {
  using ingest::format_number;
  out << "filter = " << (r.filter.empty() ? "unknown" : r.filter) << '\n';
  out << "samples = " << r.samples << '\n';
  out << "mae_x = " << format_number(r.mae.x()) << '\n';
  out << "mae_y = " << format_number(r.mae.y()) << '\n';
  out << "mae_z = " << format_number(r.mae.z()) << '\n';
  out << "total_error = " << format_number(r.total_error) << '\n';
  out << "total_variance = " << format_number(r.total_variance) << '\n';
  out << "runtime_s = " << format_number(r.runtime_s) << '\n';
}

}  // namespace aqualoc::wqmap
