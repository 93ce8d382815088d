#include "driverl/track.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <istream>
#include <ostream>
#include <sstream>

#include "driverl/error.hpp"

namespace driverl {

namespace {

std::string trim(std::string_view v) {
  const auto b = v.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = v.find_last_not_of(" \t\r\n");
  return std::string(v.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, ',')) fields.push_back(trim(cur));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_number(const std::string& field, std::size_t line_no) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (field.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ParseError("not a finite number: '" + field + "'", line_no);
  }
  return v;
}

struct CsvTable {
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> line_numbers;
};

CsvTable read_csv(std::istream& source, const std::vector<std::string>& header) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(source, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (!seen_header) {
      if (fields != header) {
        std::string expected;
        for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
        throw ParseError("expected header '" + expected + "'", line_no);
      }
      seen_header = true;
      continue;
    }
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_number(f, line_no));
    table.rows.push_back(std::move(row));
    table.line_numbers.push_back(line_no);
  }
  if (!seen_header) throw ParseError("missing header", line_no == 0 ? 1 : line_no);
  return table;
}

double interp_periodic(std::span<const double> values, double index) {
  const std::size_t n = values.size();
  double base = std::floor(index);
  const double f = index - base;
  const std::size_t i = static_cast<std::size_t>(static_cast<long long>(base) % static_cast<long long>(n));
  return values[i] + f * (values[(i + 1) % n] - values[i]);
}

double sample_profile(const TrackGeometry& track, const std::vector<double>& values, double s) {
  double f = 0.0;
  const std::size_t i = track.centerline.locate(s, f);
  const std::size_t j = (i + 1) % values.size();
  return values[i] + f * (values[j] - values[i]);
}

}  // namespace

double TrackGeometry::width_left_at(double s) const { return sample_profile(*this, width_left, s); }
double TrackGeometry::width_right_at(double s) const { return sample_profile(*this, width_right, s); }

double TrackGeometry::reference_offset(double s) const {
  return raceline ? sample_profile(*this, raceline->offset, s) : 0.0;
}

double TrackGeometry::reference_heading(double s) const {
  return raceline ? sample_profile(*this, raceline->heading_ref, s) : 0.0;
}

double TrackGeometry::reference_speed(double s) const {
  return raceline ? sample_profile(*this, raceline->speed, s)
                  : std::numeric_limits<double>::infinity();
}

TrackGeometry make_track(std::span<const Vec2> points, std::span<const double> width_left,
                         std::span<const double> width_right, double spacing) {
  if (points.size() != width_left.size() || points.size() != width_right.size()) {
    throw ValidationError("points and widths differ in length");
  }
  std::vector<Vec2> pts(points.begin(), points.end());
  std::vector<double> wl(width_left.begin(), width_left.end());
  std::vector<double> wr(width_right.begin(), width_right.end());

  // An explicit closing point duplicating the first one is dropped.
  if (pts.size() > 1 && (pts.back() - pts.front()).norm() <= 1e-6) {
    pts.pop_back();
    wl.pop_back();
    wr.pop_back();
  }
  if (pts.size() < 8) {
    throw ValidationError("track needs at least 8 distinct points, got " + std::to_string(pts.size()));
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(wl[i] > 0.0) || !(wr[i] > 0.0)) {
      throw ValidationError("non-positive width at point " + std::to_string(i));
    }
  }
  std::vector<double> seg(pts.size() - 1);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    seg[i] = (pts[i + 1] - pts[i]).norm();
    if (!(seg[i] > 1e-9)) throw ValidationError("duplicate consecutive points at " + std::to_string(i));
  }
  std::vector<double> sorted = seg;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2), sorted.end());
  const double median = sorted[sorted.size() / 2];
  const double gap = (pts.front() - pts.back()).norm();
  if (gap > 10.0 * median) {
    throw ValidationError("path is not closed: gap of " + std::to_string(gap) +
                          " m between last and first point");
  }

  auto resampled = ClosedPath::resample(pts, spacing);
  TrackGeometry track;
  track.width_left.reserve(resampled.points.size());
  track.width_right.reserve(resampled.points.size());
  for (double idx : resampled.source_index) {
    track.width_left.push_back(interp_periodic(wl, idx));
    track.width_right.push_back(interp_periodic(wr, idx));
  }
  track.centerline = ClosedPath(std::move(resampled.points));

  constexpr double kMaxHeadingStep = 0.25;
  if (track.centerline.max_heading_step() > kMaxHeadingStep) {
    throw ValidationError("heading discontinuity exceeds limit after resampling");
  }
  const auto& kappa = track.centerline.curvatures();
  for (std::size_t i = 0; i < kappa.size(); ++i) {
    const double inner = kappa[i] > 0.0 ? track.width_left[i] : track.width_right[i];
    if (inner * std::abs(kappa[i]) >= 0.95) {
      throw ValidationError("track too tight for its width near s = " +
                            std::to_string(track.centerline.s_at(i)));
    }
  }
  return track;
}

TrackGeometry load_track(std::istream& source) {
  const auto table = read_csv(source, {"x_m", "y_m", "w_left_m", "w_right_m"});
  std::vector<Vec2> pts;
  std::vector<double> wl, wr;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (!(row[2] > 0.0) || !(row[3] > 0.0)) {
      throw ValidationError("non-positive width on line " + std::to_string(table.line_numbers[r]));
    }
    pts.emplace_back(row[0], row[1]);
    wl.push_back(row[2]);
    wr.push_back(row[3]);
  }
  return make_track(pts, wl, wr);
}

TrackGeometry load_track_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open track file '" + path + "'");
  return load_track(in);
}

std::vector<double> offset_curve_curvature(const TrackGeometry& track,
                                           std::span<const double> offsets) {
  const auto& c = track.centerline;
  const std::size_t n = c.size();
  std::vector<Vec2> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = c.headings()[i];
    pts[i] = c.points()[i] + offsets[i] * Vec2(-std::sin(h), std::cos(h));
  }
  std::vector<double> kappa(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = pts[(i + n - 1) % n];
    const Vec2 b = pts[i];
    const Vec2 d = pts[(i + 1) % n];
    const Vec2 u = b - a;
    const Vec2 v = d - b;
    const double turn = wrap_angle(std::atan2(v.y(), v.x()) - std::atan2(u.y(), u.x()));
    kappa[i] = turn / std::max(0.5 * (u.norm() + v.norm()), 1e-9);
  }
  return kappa;
}

Raceline make_raceline(const TrackGeometry& track, std::vector<double> offsets,
                       std::vector<double> speeds) {
  const auto& c = track.centerline;
  const std::size_t n = c.size();
  Raceline rl;
  rl.curvature = offset_curve_curvature(track, offsets);
  rl.heading_ref.resize(n);
  const double ds = c.spacing();
  std::vector<Vec2> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double slope = (offsets[(i + 1) % n] - offsets[(i + n - 1) % n]) / (2.0 * ds);
    rl.heading_ref[i] = std::atan2(slope, 1.0 - offsets[i] * c.curvatures()[i]);
    const double h = c.headings()[i];
    pts[i] = c.points()[i] + offsets[i] * Vec2(-std::sin(h), std::cos(h));
  }
  rl.offset = std::move(offsets);
  rl.speed = std::move(speeds);
  rl.path = ClosedPath::from_points(pts, kTrackSpacing);
  return rl;
}

TrackGeometry load_raceline(const TrackGeometry& track, std::istream& source) {
  const auto table = read_csv(source, {"x_m", "y_m", "v_ref_mps"});
  if (table.rows.size() < 8) throw ValidationError("raceline needs at least 8 points");
  struct Sample {
    double s, n, v;
  };
  std::vector<Sample> samples;
  for (const auto& row : table.rows) {
    const auto proj = track.centerline.project(Vec2(row[0], row[1]));
    samples.push_back({proj.s, proj.n, row[2]});
  }
  std::sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) { return a.s < b.s; });
  const double L = track.total_length();
  const std::size_t n = track.centerline.size();
  std::vector<double> offsets(n), speeds(n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = track.centerline.s_at(i);
    while (k < samples.size() && samples[k].s <= s) ++k;
    const Sample& a = samples[(k + samples.size() - 1) % samples.size()];
    const Sample& b = samples[k % samples.size()];
    double span = b.s - a.s;
    double pos = s - a.s;
    if (span <= 0.0) span += L;
    if (pos < 0.0) pos += L;
    const double f = span > 0.0 ? std::clamp(pos / span, 0.0, 1.0) : 0.0;
    offsets[i] = a.n + f * (b.n - a.n);
    speeds[i] = a.v + f * (b.v - a.v);
    if (offsets[i] > track.width_left[i] || offsets[i] < -track.width_right[i]) {
      throw ValidationError("raceline leaves the track near s = " + std::to_string(s));
    }
  }
  TrackGeometry out = track;
  out.raceline = make_raceline(track, std::move(offsets), std::move(speeds));
  return out;
}

void write_track_csv(const TrackGeometry& track, std::ostream& out) {
  out << "x_m,y_m,w_left_m,w_right_m\n";
  out << std::setprecision(10);
  const auto& pts = track.centerline.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out << pts[i].x() << ',' << pts[i].y() << ',' << track.width_left[i] << ','
        << track.width_right[i] << '\n';
  }
}

void write_raceline_csv(const TrackGeometry& track, std::ostream& out) {
  if (!track.raceline) throw ValidationError("track has no raceline");
  out << "x_m,y_m,v_ref_mps\n";
  out << std::setprecision(10);
  const auto& c = track.centerline;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double h = c.headings()[i];
    const Vec2 p = c.points()[i] + track.raceline->offset[i] * Vec2(-std::sin(h), std::cos(h));
    out << p.x() << ',' << p.y() << ',' << track.raceline->speed[i] << '\n';
  }
}

FrenetPose frenet_project(const TrackGeometry& track, const Vec2& position, double heading,
                          bool use_raceline) {
  if (use_raceline && !track.raceline) throw ValidationError("track has no raceline");
  const ClosedPath& path = use_raceline ? track.raceline->path : track.centerline;
  const auto proj = path.project(position);
  return {proj.s, proj.n, wrap_angle(heading - proj.heading)};
}

CartesianPose frenet_to_cartesian(const TrackGeometry& track, const FrenetPose& pose,
                                  bool use_raceline) {
  if (use_raceline && !track.raceline) throw ValidationError("track has no raceline");
  const ClosedPath& path = use_raceline ? track.raceline->path : track.centerline;
  return {path.to_cartesian(pose.s, pose.n), wrap_angle(path.heading(pose.s) + pose.dphi)};
}

double speed_reference(double curvature, double alat_max, double v_cap) {
  return std::min(v_cap, std::sqrt(alat_max / std::max(std::abs(curvature), 1e-6)));
}

}  // namespace driverl
