#include "aqualoc/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string_view>

#include <Eigen/Geometry>

#include "aqualoc/errors.hpp"

namespace aqualoc::ingest {
namespace {

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// --- calibration header -----------------------------------------------------

const std::set<std::string> kRequiredCalibration = {
    "gravity", "dvl_rotation", "dvl_translation", "noise_gyro", "noise_accel", "noise_dvl", "noise_pseudo", "geo_origin",
};

std::vector<double> header_numbers(const std::vector<std::string_view>& tok, std::size_t count, std::size_t line_no) {
  if (tok.size() != count + 1) {
    throw ParseError("line " + std::to_string(line_no) + ": @" + std::string(tok[0].substr(1)) + " expects " +
                     std::to_string(count) + " values");
  }
  std::vector<double> out;
  for (std::size_t i = 1; i < tok.size(); ++i) {
    auto v = to_double(tok[i]);
    if (!v) throw ParseError("line " + std::to_string(line_no) + ": bad number '" + std::string(tok[i]) + "'");
    out.push_back(*v);
  }
  return out;
}

Vec3 vec3_of(const std::vector<double>& v) { return {v[0], v[1], v[2]}; }
Mat3 diag_of(const std::vector<double>& v) { return Vec3(v[0], v[1], v[2]).asDiagonal(); }

void apply_header(std::string_view line, std::size_t line_no, SensorLog& log, std::set<std::string>& seen) {
  const auto tok = split_ws(line);
  const std::string key(tok[0].substr(1));
  seen.insert(key);
  Calibration& c = log.calib;
  if (key == "format") return;
  if (key == "source") {
    log.source = trim(line.substr(line.find("source") + 6));
    return;
  }
  if (key == "gravity") {
    c.gravity = vec3_of(header_numbers(tok, 3, line_no));
  } else if (key == "dvl_rotation") {
    const auto v = header_numbers(tok, 9, line_no);
    for (int r = 0; r < 3; ++r)
      for (int col = 0; col < 3; ++col) c.dvl.rotation(r, col) = v[3 * r + col];
    if (!is_rotation(c.dvl.rotation, 1e-6)) {
      throw ParseError("line " + std::to_string(line_no) + ": dvl_rotation is not a rotation matrix");
    }
  } else if (key == "dvl_translation") {
    c.dvl.translation = vec3_of(header_numbers(tok, 3, line_no));
  } else if (key == "noise_gyro") {
    c.noise.gyro = diag_of(header_numbers(tok, 3, line_no));
  } else if (key == "noise_accel") {
    c.noise.accel = diag_of(header_numbers(tok, 3, line_no));
  } else if (key == "noise_dvl") {
    c.noise.dvl = diag_of(header_numbers(tok, 3, line_no));
  } else if (key == "noise_pseudo") {
    c.noise.pseudo = diag_of(header_numbers(tok, 3, line_no));
  } else if (key == "geo_origin") {
    const auto v = header_numbers(tok, 2, line_no);
    c.origin_lat = v[0];
    c.origin_lon = v[1];
  } else if (key == "initial_heading") {
    c.initial_heading = header_numbers(tok, 1, line_no)[0];
  } else {
    throw ParseError("line " + std::to_string(line_no) + ": unknown header key @" + key);
  }
}

// --- records ------------------------------------------------------------------

class FieldMap {
 public:
  explicit FieldMap(const std::vector<std::string_view>& tokens) {
    for (auto tok : tokens) {
      const auto eq = tok.find('=');
      if (eq == std::string_view::npos || eq == 0) throw std::invalid_argument("token '" + std::string(tok) + "' is not key=value");
      const auto [it, inserted] = fields_.emplace(tok.substr(0, eq), tok.substr(eq + 1));
      if (!inserted) throw std::invalid_argument("duplicate field '" + std::string(it->first) + "'");
    }
  }

  std::string_view text(std::string_view key) {
    auto it = fields_.find(key);
    if (it == fields_.end()) throw std::invalid_argument("missing field '" + std::string(key) + "'");
    used_.insert(key);
    return it->second;
  }

  double number(std::string_view key) {
    auto v = to_double(text(key));
    if (!v) throw std::invalid_argument("field '" + std::string(key) + "' is not a finite number");
    return *v;
  }

  bool flag(std::string_view key, bool fallback) {
    if (!fields_.count(key)) return fallback;
    const auto s = text(key);
    if (s == "1" || s == "true") return true;
    if (s == "0" || s == "false") return false;
    throw std::invalid_argument("field '" + std::string(key) + "' is not 0/1");
  }

  void check_all_used() const {
    for (const auto& [k, v] : fields_) {
      if (!used_.count(k)) throw std::invalid_argument("unexpected field '" + std::string(k) + "'");
    }
  }

 private:
  std::map<std::string_view, std::string_view, std::less<>> fields_;
  std::set<std::string_view, std::less<>> used_;
};

SensorRecord parse_record(std::string_view line) {
  FieldMap f(split_ws(line));
  const double t = f.number("t");
  const auto type = f.text("type");
  SensorRecord rec;
  if (type == "imu") {
    rec = ImuSample{t, Vec3(f.number("gx"), f.number("gy"), f.number("gz")),
                    Vec3(f.number("ax"), f.number("ay"), f.number("az"))};
  } else if (type == "dvl") {
    DvlSample d;
    d.t = t;
    d.velocity = Vec3(f.number("vx"), f.number("vy"), f.number("vz"));
    d.valid = f.flag("valid", true);
    rec = d;
  } else if (type == "depth") {
    rec = DepthSample{t, f.number("d")};
  } else if (type == "gps") {
    GpsSample g;
    g.t = t;
    g.lat = f.number("lat");
    g.lon = f.number("lon");
    g.accuracy = f.number("acc");
    g.valid = f.flag("valid", true);
    rec = g;
  } else if (type == "wq") {
    const auto name = f.text("param");
    const auto param = parse_wq_parameter(name);
    if (!param) throw std::invalid_argument("unknown water-quality parameter '" + std::string(name) + "'");
    rec = WqRecord{t, *param, f.number("value")};
  } else {
    throw std::invalid_argument("unknown record type '" + std::string(type) + "'");
  }
  f.check_all_used();
  if (!is_valid(rec)) throw std::invalid_argument("record fails range checks");
  return rec;
}

void write_vec(std::ostream& out, const Vec3& v) {
  out << format_number(v.x()) << ' ' << format_number(v.y()) << ' ' << format_number(v.z());
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

ParsedLog parse_log(std::istream& in, const ParseOptions& opts) {
  ParsedLog result;
  SensorLog& log = result.log;
  ParseReport& report = result.report;
  std::set<std::string> seen;

  struct Pending {
    SensorRecord rec;
    std::size_t line;
  };
  std::vector<Pending> recs;
  double latest = -std::numeric_limits<double>::infinity();
  std::size_t latest_line = 0;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    if (body[0] == '@') {
      apply_header(body, line_no, log, seen);
      continue;
    }
    ++report.data_lines;
    SensorRecord rec;
    try {
      rec = parse_record(body);
    } catch (const std::invalid_argument& e) {
      report.rejects.push_back({line_no, body, e.what()});
      continue;
    }
    const double t = timestamp(rec);
    // slack so a decimal 10 ms step is not rejected by rounding
    if (t < latest - opts.reorder_tolerance - 1e-9) {
      std::ostringstream msg;
      msg << "line " << line_no << ": timestamp " << t << " is more than " << opts.reorder_tolerance
          << " s behind line " << latest_line << " (t=" << latest << ")";
      throw ParseError(msg.str());
    }
    if (t > latest) {
      latest = t;
      latest_line = line_no;
    }
    recs.push_back({std::move(rec), line_no});
  }

  if (opts.require_calibration) {
    std::vector<std::string> missing;
    for (const auto& k : kRequiredCalibration) {
      if (!seen.count(k)) missing.push_back("@" + k);
    }
    if (!missing.empty()) {
      std::string msg = "missing calibration header entries:";
      for (const auto& m : missing) msg += " " + m;
      throw ParseError(msg);
    }
  }

  if (report.data_lines > 0) {
    const double frac = static_cast<double>(report.rejects.size()) / static_cast<double>(report.data_lines);
    if (frac > opts.max_reject_fraction) {
      std::ostringstream msg;
      msg << report.rejects.size() << " of " << report.data_lines << " data lines malformed (first at line "
          << report.rejects.front().line << ": " << report.rejects.front().reason << ")";
      throw ParseError(msg.str());
    }
  }

  std::vector<std::size_t> order(recs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return timestamp(recs[a].rec) < timestamp(recs[b].rec); });
  log.records.reserve(recs.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] != i) ++report.reordered;
    log.records.push_back(std::move(recs[order[i]].rec));
  }
  report.records = log.records.size();
  return result;
}

ParsedLog parse_log(const std::filesystem::path& path, const ParseOptions& opts) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open log file " + path.string());
  return parse_log(in, opts);
}

void write_log(std::ostream& out, const SensorLog& log) {
  const Calibration& c = log.calib;
  out << "@format aqualoc-log 1\n";
  if (!log.source.empty()) out << "@source " << log.source << '\n';
  out << "@gravity ";
  write_vec(out, c.gravity);
  out << "\n@dvl_rotation";
  for (int r = 0; r < 3; ++r)
    for (int col = 0; col < 3; ++col) out << ' ' << format_number(c.dvl.rotation(r, col));
  out << "\n@dvl_translation ";
  write_vec(out, c.dvl.translation);
  out << "\n@noise_gyro ";
  write_vec(out, c.noise.gyro.diagonal());
  out << "\n@noise_accel ";
  write_vec(out, c.noise.accel.diagonal());
  out << "\n@noise_dvl ";
  write_vec(out, c.noise.dvl.diagonal());
  out << "\n@noise_pseudo ";
  write_vec(out, c.noise.pseudo.diagonal());
  out << "\n@geo_origin " << format_number(c.origin_lat) << ' ' << format_number(c.origin_lon) << '\n';
  if (c.initial_heading) out << "@initial_heading " << format_number(*c.initial_heading) << '\n';

  for (const auto& rec : log.records) {
    out << "t=" << format_number(timestamp(rec));
    if (const auto* s = std::get_if<ImuSample>(&rec)) {
      out << " type=imu gx=" << format_number(s->gyro.x()) << " gy=" << format_number(s->gyro.y())
          << " gz=" << format_number(s->gyro.z()) << " ax=" << format_number(s->accel.x())
          << " ay=" << format_number(s->accel.y()) << " az=" << format_number(s->accel.z());
    } else if (const auto* d = std::get_if<DvlSample>(&rec)) {
      out << " type=dvl vx=" << format_number(d->velocity.x()) << " vy=" << format_number(d->velocity.y())
          << " vz=" << format_number(d->velocity.z()) << " valid=" << (d->valid ? 1 : 0);
    } else if (const auto* z = std::get_if<DepthSample>(&rec)) {
      out << " type=depth d=" << format_number(z->depth);
    } else if (const auto* g = std::get_if<GpsSample>(&rec)) {
      out << " type=gps lat=" << format_number(g->lat) << " lon=" << format_number(g->lon)
          << " acc=" << format_number(g->accuracy) << " valid=" << (g->valid ? 1 : 0);
    } else if (const auto* w = std::get_if<WqRecord>(&rec)) {
      out << " type=wq param=" << to_string(w->param) << " value=" << format_number(w->value);
    }
    out << '\n';
  }
}

void write_log(const std::filesystem::path& path, const SensorLog& log) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write log file " + path.string());
  write_log(out, log);
}

SyncResult sync_wq(const std::vector<WqRecord>& wq, const TrajectoryEstimate& traj, double tolerance) {
  if (wq.empty()) throw DataError("no water-quality records to synchronize");
  if (traj.states.empty()) throw DataError("trajectory is empty");

  std::vector<double> times;
  times.reserve(traj.states.size());
  for (const auto& s : traj.states) times.push_back(s.t);
  if (!std::is_sorted(times.begin(), times.end())) throw OrderingError("trajectory timestamps are not sorted");

  const auto [wq_min_it, wq_max_it] =
      std::minmax_element(wq.begin(), wq.end(), [](const WqRecord& a, const WqRecord& b) { return a.t < b.t; });
  const double wq_min = wq_min_it->t, wq_max = wq_max_it->t;
  if (wq_max < times.front() - tolerance || wq_min > times.back() + tolerance) {
    std::ostringstream msg;
    msg << "water-quality records [" << wq_min << ", " << wq_max << "] s do not overlap trajectory ["
        << times.front() << ", " << times.back() << "] s";
    throw DataError(msg.str());
  }

  SyncResult out;
  for (const WqRecord& r : wq) {
    auto it = std::lower_bound(times.begin(), times.end(), r.t);
    std::size_t best = 0;
    double best_gap = std::numeric_limits<double>::infinity();
    if (it != times.end()) {
      best = static_cast<std::size_t>(it - times.begin());
      best_gap = *it - r.t;
    }
    if (it != times.begin()) {
      const auto prev = static_cast<std::size_t>(it - times.begin()) - 1;
      if (r.t - times[prev] <= best_gap) {
        best = prev;
        best_gap = r.t - times[prev];
      }
    }
    if (best_gap > tolerance) {
      ++out.dropped;
      continue;
    }
    out.samples.push_back({r, traj.states[best].X.p, times[best]});
  }
  return out;
}

void write_trajectory(std::ostream& out, const TrajectoryEstimate& traj, double runtime_s) {
  out << "# aqualoc-trajectory filter=" << (traj.filter.empty() ? "unknown" : traj.filter);
  if (runtime_s != 0.0) out << " runtime_s=" << format_number(runtime_s);
  out << '\n';
  out << "t,x,y,z,vx,vy,vz,qw,qx,qy,qz,var_x,var_y,var_z\n";
  for (const auto& s : traj.states) {
    const Eigen::Quaterniond q(s.X.R);
    const double vals[] = {s.t, s.X.p.x(), s.X.p.y(), s.X.p.z(), s.X.v.x(), s.X.v.y(), s.X.v.z(),
                           q.w(), q.x(), q.y(), q.z(), s.P(6, 6), s.P(7, 7), s.P(8, 8)};
    for (std::size_t i = 0; i < std::size(vals); ++i) {
      if (i) out << ',';
      out << format_number(vals[i]);
    }
    out << '\n';
  }
}

void write_trajectory(const std::filesystem::path& path, const TrajectoryEstimate& traj, double runtime_s) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write trajectory file " + path.string());
  write_trajectory(out, traj, runtime_s);
}

TrajectoryFile read_trajectory(std::istream& in) {
  TrajectoryFile file;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(line);
    if (body.empty()) continue;
    if (body[0] == '#') {
      for (auto tok : split_ws(std::string_view(body).substr(1))) {
        if (tok.starts_with("filter=")) file.trajectory.filter = std::string(tok.substr(7));
        if (tok.starts_with("runtime_s=")) {
          if (auto v = to_double(tok.substr(10))) file.runtime_s = *v;
        }
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      if (body.starts_with("t,")) continue;
    }
    std::vector<double> vals;
    std::string_view rest(body);
    while (true) {
      const auto comma = rest.find(',');
      auto v = to_double(rest.substr(0, comma));
      if (!v) throw ParseError("trajectory line " + std::to_string(line_no) + ": bad number");
      vals.push_back(*v);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (vals.size() != 14) {
      throw ParseError("trajectory line " + std::to_string(line_no) + ": expected 14 columns, got " +
                       std::to_string(vals.size()));
    }
    GroupState s;
    s.t = vals[0];
    s.X.p = Vec3(vals[1], vals[2], vals[3]);
    s.X.v = Vec3(vals[4], vals[5], vals[6]);
    s.X.R = Eigen::Quaterniond(vals[7], vals[8], vals[9], vals[10]).normalized().toRotationMatrix();
    s.P = Mat9::Zero();
    s.P(6, 6) = vals[11];
    s.P(7, 7) = vals[12];
    s.P(8, 8) = vals[13];
    file.trajectory.states.push_back(s);
  }
  return file;
}

TrajectoryFile read_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trajectory file " + path.string());
  return read_trajectory(in);
}

}  // namespace aqualoc::ingest
