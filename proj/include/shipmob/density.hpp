#pragma once

// CNM density on an equal-angle lat/lon grid: navigated length per cell divided
// by the cell's area, so its area integral recovers the navigated miles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "shipmob/geo.hpp"
#include "shipmob/io.hpp"
#include "shipmob/tracks.hpp"

namespace shipmob {

struct BoundingBox {
  double lat_min = 0.0;
  double lat_max = 0.0;
  double lon_min = 0.0;
  double lon_max = 0.0;

  bool contains(geo::LatLon p) const {
    return p.lat >= lat_min && p.lat <= lat_max && p.lon >= lon_min && p.lon <= lon_max;
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Grid geometry. Rows run south to north, columns west to east; the last row/column is clipped
/// to the box when the cell size does not divide it.
class GridSpec {
 public:
  GridSpec() = default;

  GridSpec(BoundingBox bbox, double cell_size_deg) : bbox_(bbox), cell_(cell_size_deg) {
    if (!(cell_ > 0.0) || !std::isfinite(cell_)) throw std::invalid_argument("cell size must be positive");
    if (!(bbox.lat_max > bbox.lat_min) || !(bbox.lon_max > bbox.lon_min))
      throw std::invalid_argument("bounding box is degenerate");
    if (bbox.lat_min < -90.0 || bbox.lat_max > 90.0 || bbox.lon_min < -180.0 || bbox.lon_max > 180.0)
      throw std::invalid_argument("bounding box outside valid coordinates");
    rows_ = count(bbox.lat_max - bbox.lat_min);
    cols_ = count(bbox.lon_max - bbox.lon_min);
  }

  const BoundingBox& bbox() const { return bbox_; }
  double cell_size_deg() const { return cell_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return rows_ * cols_; }

  double row_south(std::size_t r) const { return bbox_.lat_min + static_cast<double>(r) * cell_; }
  double row_north(std::size_t r) const { return std::min(bbox_.lat_max, row_south(r) + cell_); }
  double col_west(std::size_t c) const { return bbox_.lon_min + static_cast<double>(c) * cell_; }
  double col_east(std::size_t c) const { return std::min(bbox_.lon_max, col_west(c) + cell_); }

  geo::LatLon center(std::size_t r, std::size_t c) const {
    return {(row_south(r) + row_north(r)) / 2.0, (col_west(c) + col_east(c)) / 2.0};
  }

  /// Cell containing `p`, or nullopt outside the box.
  std::optional<std::size_t> locate(geo::LatLon p) const {
    if (!bbox_.contains(p)) return std::nullopt;
    auto idx = [this](double offset, std::size_t n) {
      const auto k = static_cast<std::size_t>(std::floor(offset / cell_));
      return std::min(k, n - 1);
    };
    return idx(p.lat - bbox_.lat_min, rows_) * cols_ + idx(p.lon - bbox_.lon_min, cols_);
  }

  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.bbox_ == b.bbox_ && a.cell_ == b.cell_;
  }

 private:
  std::size_t count(double extent) const {
    const double n = extent / cell_;
    return static_cast<std::size_t>(std::max(1.0, std::ceil(n - 1e-9)));
  }

  BoundingBox bbox_;
  double cell_ = 0.1;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
};

/// Area of a cell in square nautical miles: R^2 * dlon * (sin(north) - sin(south)).
inline double cell_area_nmi2(const GridSpec& spec, std::size_t row, std::size_t col = 0) {
  if (row >= spec.rows() || col >= spec.cols()) throw std::out_of_range("cell outside grid");
  const double dlon = geo::deg2rad(spec.col_east(col) - spec.col_west(col));
  const double band = std::sin(geo::deg2rad(spec.row_north(row))) - std::sin(geo::deg2rad(spec.row_south(row)));
  return geo::kEarthRadiusNmi * geo::kEarthRadiusNmi * dlon * band;
}

struct DensityGrid {
  GridSpec spec;
  std::vector<double> values;  // per-nmi, row-major
  std::vector<double> areas;   // nmi^2, row-major
  double spill_nmi = 0.0;      // length that fell outside the box

  double value(std::size_t r, std::size_t c) const { return values[r * spec.cols() + c]; }

  /// Sum of value * area, i.e. the navigated miles inside the box.
  double integral_nmi() const {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * areas[i];
    return s;
  }
};

inline std::vector<double> cell_areas(const GridSpec& spec) {
  std::vector<double> a(spec.size());
  for (std::size_t r = 0; r < spec.rows(); ++r)
    for (std::size_t c = 0; c < spec.cols(); ++c) a[r * spec.cols() + c] = cell_area_nmi2(spec, r, c);
  return a;
}

/// Apportions each tracklet's great-circle length to the cells it crosses: the arc is cut into
/// equal pieces no longer than `step_deg` of arc (default cell_size / 4) and each piece is
/// credited to the cell holding its midpoint.
inline DensityGrid accumulate(std::span<const Tracklet> tracklets, const GridSpec& spec,
                              std::optional<double> step_deg = std::nullopt) {
  const double step = step_deg.value_or(spec.cell_size_deg() / 4.0);
  if (!(step > 0.0)) throw std::invalid_argument("subdivision step must be positive");
  DensityGrid g{spec, std::vector<double>(spec.size(), 0.0), cell_areas(spec), 0.0};
  std::vector<double> length(spec.size(), 0.0);
  for (const auto& t : tracklets) {
    if (t.length_nmi <= 0.0) continue;
    const double arc_deg = geo::rad2deg(geo::central_angle(t.start, t.end));
    const auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil(arc_deg / step)));
    const double piece_len = t.length_nmi / static_cast<double>(pieces);
    for (std::size_t i = 0; i < pieces; ++i) {
      const double f = (static_cast<double>(i) + 0.5) / static_cast<double>(pieces);
      const auto cell = spec.locate(geo::interpolate(t.start, t.end, f));
      if (cell) length[*cell] += piece_len;
      else g.spill_nmi += piece_len;
    }
  }
  for (std::size_t i = 0; i < length.size(); ++i) g.values[i] = length[i] / g.areas[i];
  return g;
}

struct DiffGrid {
  GridSpec spec;
  std::vector<double> values;  // b - a, row-major
};

struct GridMismatch : DataError {
  using DataError::DataError;
};

inline DiffGrid diff(const DensityGrid& b, const DensityGrid& a) {
  if (!(b.spec == a.spec)) throw GridMismatch("density grids have different specs");
  DiffGrid d{b.spec, std::vector<double>(b.values.size())};
  for (std::size_t i = 0; i < d.values.size(); ++i) d.values[i] = b.values[i] - a.values[i];
  return d;
}

struct TimeWindow {
  Epoch from = 0;
  Epoch to = 0;  // exclusive

  bool contains(Epoch t) const { return t >= from && t < to; }
  bool overlaps(const TimeWindow& o) const { return from < o.to && o.from < to; }
};

/// Percent change of the mean SOG of active fixes inside `region` between two windows;
/// nullopt when either window has no such fixes.
inline std::optional<double> region_speed_delta(std::span<const PositionFix> fixes, const geo::Polygon& region,
                                                TimeWindow window_b, TimeWindow window_a,
                                                double idle_speed_knots = 2.0) {
  if (window_a.overlaps(window_b)) throw std::invalid_argument("speed windows overlap");
  double sum[2] = {0, 0};
  std::size_t n[2] = {0, 0};
  for (const auto& f : fixes) {
    if (!f.timestamp || !f.has_position() || !f.sog_knots) continue;
    if (fix_activity(f, idle_speed_knots) != Activity::active) continue;
    const int w = window_b.contains(*f.timestamp) ? 0 : window_a.contains(*f.timestamp) ? 1 : -1;
    if (w < 0 || !region.contains(position_of(f))) continue;
    sum[w] += *f.sog_knots;
    ++n[w];
  }
  if (n[0] == 0 || n[1] == 0) return std::nullopt;
  const double mean_b = sum[0] / static_cast<double>(n[0]);
  const double mean_a = sum[1] / static_cast<double>(n[1]);
  return 100.0 * (mean_b - mean_a) / mean_a;
}

/// Outer ring of the first Polygon in a GeoJSON Feature, FeatureCollection or bare geometry.
inline geo::Polygon polygon_from_geojson(const nlohmann::json& j) {
  const nlohmann::json* geom = &j;
  if (j.value("type", "") == "FeatureCollection") {
    if (!j.contains("features") || j["features"].empty()) throw DataError("GeoJSON has no features");
    geom = &j["features"][0];
  }
  if (geom->value("type", "") == "Feature") geom = &(*geom)["geometry"];
  const std::string type = geom->value("type", "");
  const nlohmann::json* rings = nullptr;
  if (type == "Polygon") rings = &(*geom)["coordinates"];
  else if (type == "MultiPolygon" && !(*geom)["coordinates"].empty()) rings = &(*geom)["coordinates"][0];
  if (!rings || rings->empty()) throw DataError("GeoJSON has no polygon");
  geo::Polygon poly;
  for (const auto& pt : (*rings)[0]) {
    if (!pt.is_array() || pt.size() < 2) throw DataError("bad GeoJSON coordinate");
    poly.ring.push_back({pt[1].get<double>(), pt[0].get<double>()});
  }
  if (poly.ring.size() > 1 && poly.ring.front() == poly.ring.back()) poly.ring.pop_back();
  if (poly.ring.size() < 3) throw DataError("polygon needs at least three vertices");
  return poly;
}

// Output formats

inline std::string grid_csv(const GridSpec& spec, std::span<const double> values) {
  std::string out = "row,col,lat_center,lon_center,value\n";
  for (std::size_t r = 0; r < spec.rows(); ++r)
    for (std::size_t c = 0; c < spec.cols(); ++c) {
      const auto ctr = spec.center(r, c);
      out += fmt::format("{},{},{:.6f},{:.6f},{:.9g}\n", r, c, ctr.lat, ctr.lon, values[r * spec.cols() + c]);
    }
  return out;
}

inline nlohmann::json spec_json(const GridSpec& spec) {
  const auto& b = spec.bbox();
  return {{"lat_min", b.lat_min}, {"lat_max", b.lat_max}, {"lon_min", b.lon_min},
          {"lon_max", b.lon_max}, {"cell_size_deg", spec.cell_size_deg()},
          {"rows", spec.rows()},  {"cols", spec.cols()}};
}

inline GridSpec spec_from_json(const nlohmann::json& j) {
  try {
    return GridSpec({j.at("lat_min").get<double>(), j.at("lat_max").get<double>(), j.at("lon_min").get<double>(),
                     j.at("lon_max").get<double>()},
                    j.at("cell_size_deg").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("bad grid spec: {}", e.what()));
  } catch (const std::invalid_argument& e) {
    throw DataError(fmt::format("bad grid spec: {}", e.what()));
  }
}

/// Reads values back from `grid_csv` output.
inline std::vector<double> read_grid_csv(std::istream& in, const GridSpec& spec, std::string source = "<grid>") {
  csv::Reader reader(in, source);
  reader.require({"row", "col", "value"});
  const std::size_t cr = *reader.column("row"), cc = *reader.column("col"), cv = *reader.column("value");
  std::vector<double> values(spec.size(), 0.0);
  std::vector<std::string> f;
  while (reader.next(f)) {
    const auto r = csv::parse_number<std::size_t>(f[cr]);
    const auto c = csv::parse_number<std::size_t>(f[cc]);
    const auto v = csv::parse_number<double>(f[cv]);
    if (!r || !c || !v || *r >= spec.rows() || *c >= spec.cols())
      throw DataError(fmt::format("{}: bad grid row", reader.where()));
    values[*r * spec.cols() + *c] = *v;
  }
  return values;
}

/// One polygon feature per cell with its value as a property.
inline nlohmann::json grid_geojson(const GridSpec& spec, std::span<const double> values) {
  nlohmann::json features = nlohmann::json::array();
  for (std::size_t r = 0; r < spec.rows(); ++r)
    for (std::size_t c = 0; c < spec.cols(); ++c) {
      const double s = spec.row_south(r), n = spec.row_north(r), w = spec.col_west(c), e = spec.col_east(c);
      features.push_back({{"type", "Feature"},
                          {"properties", {{"row", r}, {"col", c}, {"value", values[r * spec.cols() + c]}}},
                          {"geometry",
                           {{"type", "Polygon"},
                            {"coordinates", {{{w, s}, {e, s}, {e, n}, {w, n}, {w, s}}}}}}});
    }
  return {{"type", "FeatureCollection"}, {"features", features}};
}

/// 8-bit binary PGM, north up. Non-negative grids scale [0, max] to [0, 255]; signed grids map
/// [-m, m] to [0, 255] with zero at mid-grey.
inline std::string grid_pgm(const GridSpec& spec, std::span<const double> values, bool is_signed) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  std::string out = fmt::format("P5\n{} {}\n255\n", spec.cols(), spec.rows());
  for (std::size_t r = spec.rows(); r-- > 0;)
    for (std::size_t c = 0; c < spec.cols(); ++c) {
      const double v = values[r * spec.cols() + c];
      double x = 0.0;
      if (m > 0.0) x = is_signed ? 127.5 + 127.5 * v / m : 255.0 * v / m;
      else if (is_signed) x = 127.5;
      out += static_cast<char>(static_cast<std::uint8_t>(std::clamp(std::lround(x), 0L, 255L)));
    }
  return out;
}

}  // namespace shipmob
