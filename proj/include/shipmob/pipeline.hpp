#pragma once

// Command implementations shared by the CLI and the tests. Every command writes its outputs
// atomically into an output directory together with a stats.json.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "shipmob/ais/codec.hpp"
#include "shipmob/density.hpp"
#include "shipmob/fleet.hpp"
#include "shipmob/io.hpp"
#include "shipmob/metrics.hpp"
#include "shipmob/ports.hpp"
#include "shipmob/simulate.hpp"
#include "shipmob/time.hpp"
#include "shipmob/tracks.hpp"

namespace shipmob::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct RunConfig {
  std::vector<fs::path> inputs;  // NMEA feeds, or decoded fixes.csv files
  std::optional<fs::path> fleet;
  std::optional<fs::path> ports;
  std::optional<fs::path> scheme;
  std::optional<fs::path> history;
  TrackConfig track;
  double min_dwell_hours = 1.0;
  std::optional<BoundingBox> bbox;
  double cell_size_deg = 0.1;
  bool geojson = false;
  std::optional<Epoch> from;  // inclusive
  std::optional<Epoch> to;    // exclusive
  std::vector<std::string> groups;
  fs::path out_dir = "out";

  void validate() const {
    for (const auto& p : inputs)
      if (!fs::exists(p)) throw IoError(fmt::format("input not found: {}", p.string()));
    for (const auto* p : {&fleet, &ports, &scheme, &history})
      if (*p && !fs::exists(**p)) throw IoError(fmt::format("file not found: {}", (*p)->string()));
    if (!(track.gap_hours > 0) || !(track.speed_gate_knots > 0) || !(track.idle_speed_knots > 0) ||
        !(min_dwell_hours >= 0) || !(cell_size_deg > 0))
      throw UsageError("thresholds must be positive");
    if (from && to && !(*from < *to)) throw UsageError("time window must have from < to");
  }

  Epoch min_dwell_s() const { return static_cast<Epoch>(min_dwell_hours * 3600.0); }
};

/// Reads a key-value config file. Sections: [input] fleet, ports, scheme, history;
/// [thresholds] gap_hours, speed_gate_knots, idle_speed_knots, min_dwell_hours;
/// [grid] lat_min, lat_max, lon_min, lon_max, cell_size_deg; [window] from, to;
/// [groups] include; [output] dir.
inline RunConfig read_config(std::istream& in, const std::string& source, RunConfig cfg = {}) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw UsageError(fmt::format("{}: {}", source, e.message()));
  }
  const fs::path base = fs::path(source).parent_path();
  auto path_of = [&](const std::string& v) { return fs::path(v).is_absolute() ? fs::path(v) : base / v; };
  auto num = [&](const std::string& key, const std::string& v) {
    const auto x = csv::parse_number<double>(v);
    if (!x) throw UsageError(fmt::format("{}: bad value for {}: '{}'", source, key, v));
    return *x;
  };
  std::optional<double> lat_min, lat_max, lon_min, lon_max;
  for (const auto& [section, body] : tree) {
    for (const auto& [key, node] : body) {
      const std::string v = sim::detail::trimmed(node.get_value<std::string>());
      const std::string name = section + "." + key;
      if (name == "input.fleet") cfg.fleet = path_of(v);
      else if (name == "input.ports") cfg.ports = path_of(v);
      else if (name == "input.scheme") cfg.scheme = path_of(v);
      else if (name == "input.history") cfg.history = path_of(v);
      else if (name == "input.files") {
        for (const auto& p : sim::detail::split_list(v, ",")) cfg.inputs.push_back(path_of(p));
      } else if (name == "thresholds.gap_hours") cfg.track.gap_hours = num(name, v);
      else if (name == "thresholds.speed_gate_knots") cfg.track.speed_gate_knots = num(name, v);
      else if (name == "thresholds.idle_speed_knots") cfg.track.idle_speed_knots = num(name, v);
      else if (name == "thresholds.min_dwell_hours") cfg.min_dwell_hours = num(name, v);
      else if (name == "grid.lat_min") lat_min = num(name, v);
      else if (name == "grid.lat_max") lat_max = num(name, v);
      else if (name == "grid.lon_min") lon_min = num(name, v);
      else if (name == "grid.lon_max") lon_max = num(name, v);
      else if (name == "grid.cell_size_deg") cfg.cell_size_deg = num(name, v);
      else if (name == "grid.geojson") cfg.geojson = v == "true" || v == "1" || v == "yes";
      else if (name == "window.from" || name == "window.to") {
        const auto t = parse_time(v);
        if (!t) throw UsageError(fmt::format("{}: bad time for {}: '{}'", source, name, v));
        (key == "from" ? cfg.from : cfg.to) = *t;
      } else if (name == "groups.include") cfg.groups = sim::detail::split_list(v, ",");
      else if (name == "output.dir") cfg.out_dir = path_of(v);
      else throw UsageError(fmt::format("{}: unknown key {}", source, name));
    }
  }
  if (lat_min || lat_max || lon_min || lon_max) {
    if (!(lat_min && lat_max && lon_min && lon_max)) throw UsageError(fmt::format("{}: incomplete [grid] box", source));
    cfg.bbox = BoundingBox{*lat_min, *lat_max, *lon_min, *lon_max};
  }
  return cfg;
}

inline RunConfig load_config(const fs::path& path, RunConfig cfg = {}) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  return read_config(in, path.string(), std::move(cfg));
}

// Decoded fix files

inline std::string fixes_csv_header() { return "mmsi,epoch,lat,lon,sog,cog,heading,nav_status,msg_type\n"; }

inline std::string fixes_csv_row(const PositionFix& f) {
  auto opt = [](const std::optional<double>& v, int decimals) {
    return v ? fmt::format("{:.{}f}", *v, decimals) : std::string();
  };
  return fmt::format("{},{},{},{},{},{},{},{},{}\n", f.mmsi, f.timestamp ? std::to_string(*f.timestamp) : "",
                     opt(f.lat_deg, 7), opt(f.lon_deg, 7), opt(f.sog_knots, 1), opt(f.cog_deg, 1),
                     f.heading_deg ? std::to_string(*f.heading_deg) : "", static_cast<int>(f.nav_status),
                     static_cast<int>(f.msg_type));
}

inline std::vector<PositionFix> read_fixes_csv(std::istream& in, const std::string& source) {
  csv::Reader reader(in, source);
  reader.require({"mmsi", "epoch", "lat", "lon", "sog", "cog", "heading", "nav_status", "msg_type"});
  std::size_t col[9];
  const char* names[] = {"mmsi", "epoch", "lat", "lon", "sog", "cog", "heading", "nav_status", "msg_type"};
  for (int i = 0; i < 9; ++i) col[i] = *reader.column(names[i]);
  std::vector<PositionFix> out;
  std::vector<std::string> f;
  while (reader.next(f)) {
    auto opt = [&](std::size_t c) -> std::optional<double> {
      if (f[c].empty()) return std::nullopt;
      const auto v = csv::parse_number<double>(f[c]);
      if (!v) throw DataError(fmt::format("{}: bad number '{}'", reader.where(), f[c]));
      return v;
    };
    PositionFix fix;
    const auto mmsi = csv::parse_number<std::uint32_t>(f[col[0]]);
    const auto status = csv::parse_number<int>(f[col[7]]);
    const auto type = csv::parse_number<int>(f[col[8]]);
    if (!mmsi || !status || *status < 0 || *status > 15 || !type || *type < 1 || *type > 3)
      throw DataError(fmt::format("{}: bad fix row", reader.where()));
    fix.mmsi = *mmsi;
    if (!f[col[1]].empty()) {
      const auto t = csv::parse_number<Epoch>(f[col[1]]);
      if (!t) throw DataError(fmt::format("{}: bad epoch", reader.where()));
      fix.timestamp = *t;
    }
    fix.lat_deg = opt(col[2]);
    fix.lon_deg = opt(col[3]);
    fix.sog_knots = opt(col[4]);
    fix.cog_deg = opt(col[5]);
    if (const auto h = opt(col[6])) fix.heading_deg = static_cast<std::uint16_t>(*h);
    fix.nav_status = static_cast<NavStatus>(*status);
    fix.msg_type = static_cast<std::uint8_t>(*type);
    out.push_back(ais::quantized(fix));
  }
  return out;
}

inline std::string static_csv_header() { return "mmsi,epoch,imo,callsign,name,ship_type,destination\n"; }

inline std::string static_csv_row(const ais::StaticReport& r) {
  return csv::row(std::to_string(r.mmsi), r.timestamp ? std::to_string(*r.timestamp) : "",
                  std::to_string(r.imo_number), r.callsign, r.name, std::to_string(r.ship_type_code), r.destination);
}

struct DecodedInput {
  std::vector<PositionFix> fixes;
  std::vector<ais::StaticReport> statics;
  ais::DecodeStats stats;  // NMEA inputs only
  std::size_t csv_rows = 0;
};

inline bool is_csv(const fs::path& p) { return p.extension() == ".csv"; }

inline void decode_stream(std::istream& in, DecodedInput& out) {
  ais::Decoder decoder;
  std::string line;
  while (std::getline(in, line)) {
    auto r = decoder.consume(line);
    if (auto* f = std::get_if<PositionFix>(&r)) out.fixes.push_back(std::move(*f));
    else if (auto* s = std::get_if<ais::StaticReport>(&r)) out.statics.push_back(std::move(*s));
  }
  const auto& st = decoder.stats();
  auto& acc = out.stats;
  acc.lines += st.lines;
  acc.blank += st.blank;
  acc.position_reports += st.position_reports;
  acc.static_reports += st.static_reports;
  acc.skipped += st.skipped;
  acc.buffered += st.buffered;
  for (std::size_t i = 0; i < ais::kDecodeErrorKinds; ++i) acc.errors[i] += st.errors[i];
  acc.padded += st.padded;
  acc.untimed += st.untimed;
}

inline DecodedInput load_inputs(const std::vector<fs::path>& inputs) {
  if (inputs.empty()) throw UsageError("no input files");
  DecodedInput out;
  for (const auto& p : inputs) {
    auto in = open_input(p);
    if (is_csv(p)) {
      auto fixes = read_fixes_csv(in, p.string());
      out.csv_rows += fixes.size();
      out.fixes.insert(out.fixes.end(), fixes.begin(), fixes.end());
    } else {
      decode_stream(in, out);
    }
    if (in.bad()) throw IoError(fmt::format("read error on {}", p.string()));
  }
  return out;
}

inline json decode_stats_json(const ais::DecodeStats& s) {
  json errors = json::object();
  for (std::size_t i = 0; i < ais::kDecodeErrorKinds; ++i)
    errors[std::string(ais::to_string(static_cast<ais::DecodeError>(i)))] = s.errors[i];
  return {{"lines", s.lines},
          {"blank", s.blank},
          {"position_reports", s.position_reports},
          {"static_reports", s.static_reports},
          {"skipped_types", s.skipped},
          {"buffered_fragments", s.buffered},
          {"errors", errors},
          {"error_total", s.error_total()},
          {"padded_static", s.padded},
          {"untimed", s.untimed},
          {"reconciled", s.accounted() == s.lines}};
}

inline json cleaning_json(const CleaningStats& s, std::size_t outside_window) {
  return {{"input", s.input + outside_window},
          {"outside_window", outside_window},
          {"invalid_mmsi", s.invalid_mmsi},
          {"unknown_vessel", s.unknown_vessel},
          {"excluded_vessel", s.excluded_vessel},
          {"untimed", s.untimed},
          {"no_position", s.no_position},
          {"duplicate", s.duplicate},
          {"speed_gate", s.speed_gate},
          {"retained", s.retained},
          {"reconciled", s.retained + s.dropped() == s.input},
          {"unknown_mmsis", s.unknown_mmsis.size()}};
}

inline void write_json(const fs::path& path, const json& j) { write_atomic(path, j.dump(2) + "\n"); }

inline void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
}

/// decode: fixes.csv, static.csv, stats.json.
inline ais::DecodeStats run_decode(const RunConfig& cfg) {
  cfg.validate();
  const auto in = load_inputs(cfg.inputs);
  ensure_dir(cfg.out_dir);
  std::string fixes = fixes_csv_header();
  for (const auto& f : in.fixes) fixes += fixes_csv_row(f);
  std::string statics = static_csv_header();
  for (const auto& s : in.statics) statics += static_csv_row(s);
  write_atomic(cfg.out_dir / "fixes.csv", fixes);
  write_atomic(cfg.out_dir / "static.csv", statics);
  write_json(cfg.out_dir / "stats.json", {{"command", "decode"}, {"decode", decode_stats_json(in.stats)},
                                          {"csv_rows", in.csv_rows}, {"fixes_written", in.fixes.size()}});
  return in.stats;
}

/// Everything downstream of decoding: registry, cleaned fixes, labelled tracks.
struct Prepared {
  FleetRegistry registry;
  DecodedInput input;
  CleanResult cleaned;
  std::size_t outside_window = 0;
  std::vector<LabeledTrack> tracks;

  json stats() const {
    return {{"decode", decode_stats_json(input.stats)},
            {"csv_rows", input.csv_rows},
            {"cleaning", cleaning_json(cleaned.stats, outside_window)},
            {"vessels", {{"registry", registry.size()},
                         {"included", registry.included_count()},
                         {"excluded", registry.size() - registry.included_count()}}},
            {"tracks", tracks.size()}};
  }
};

inline Prepared prepare(const RunConfig& cfg) {
  cfg.validate();
  if (!cfg.fleet) throw UsageError("a fleet file is required");
  Prepared p;
  const auto scheme = cfg.scheme ? SizeClassScheme::load(*cfg.scheme) : SizeClassScheme::defaults();
  p.registry = FleetRegistry::load(*cfg.fleet, scheme);
  p.input = load_inputs(cfg.inputs);
  std::vector<PositionFix> fixes;
  fixes.reserve(p.input.fixes.size());
  for (const auto& f : p.input.fixes) {
    if (f.timestamp && ((cfg.from && *f.timestamp < *cfg.from) || (cfg.to && *f.timestamp >= *cfg.to))) {
      ++p.outside_window;
      continue;
    }
    fixes.push_back(f);
  }
  p.cleaned = clean(std::move(fixes), p.registry, cfg.track);
  p.tracks = label_tracks(build_tracks(p.cleaned.fixes, cfg.track.gap_hours), cfg.track.idle_speed_knots);
  return p;
}

/// tracks: tracks.csv, episodes.csv, stats.json.
inline Prepared run_tracks(const RunConfig& cfg) {
  auto p = prepare(cfg);
  ensure_dir(cfg.out_dir);
  std::string tracks = "mmsi,track_id,start,end,n_fixes,length_nmi\n";
  std::string episodes = "mmsi,track_id,status,start,end\n";
  for (const auto& lt : p.tracks) {
    const auto& t = lt.track;
    tracks += fmt::format("{},{},{},{},{},{:.6f}\n", t.mmsi, t.track_id, iso8601(t.start()), iso8601(t.end()),
                          t.fixes.size(), t.length_nmi());
    for (const auto& e : lt.episodes)
      episodes += fmt::format("{},{},{},{},{}\n", e.mmsi, t.track_id, to_string(e.status), iso8601(e.start),
                              iso8601(e.end));
  }
  write_atomic(cfg.out_dir / "tracks.csv", tracks);
  write_atomic(cfg.out_dir / "episodes.csv", episodes);
  auto stats = p.stats();
  stats["command"] = "tracks";
  write_json(cfg.out_dir / "stats.json", stats);
  return p;
}

inline std::vector<MonthlyValue> read_history(std::istream& in, const std::string& source) {
  csv::Reader reader(in, source);
  reader.require({"group", "year", "month", "value"});
  const auto cg = *reader.column("group"), cy = *reader.column("year"), cm = *reader.column("month"),
             cv = *reader.column("value");
  std::vector<MonthlyValue> out;
  std::vector<std::string> f;
  while (reader.next(f)) {
    const auto y = csv::parse_number<int>(f[cy]);
    const auto m = csv::parse_number<int>(f[cm]);
    const auto v = csv::parse_number<double>(f[cv]);
    if (f[cg].empty() || !y || !m || *m < 1 || *m > 12 || !v)
      throw DataError(fmt::format("{}: bad history row", reader.where()));
    out.push_back({f[cg], *y, *m, *v});
  }
  return out;
}

inline std::vector<MonthlyValue> load_history(const fs::path& path) {
  auto in = open_input(path);
  return read_history(in, path.string());
}

inline std::string forecast_csv(const std::vector<ForecastPoint>& points) {
  std::string out = "group,month,forecast,actual,delta_pct\n";
  for (const auto& p : points)
    out += fmt::format("{},{},{:.6f},{},{}\n", p.group, p.month, p.forecast_value,
                       p.actual ? fmt::format("{:.6f}", *p.actual) : "",
                       p.delta_pct ? fmt::format("{:.4f}", *p.delta_pct) : "");
  return out;
}

inline std::string indicators_csv(const std::vector<IndicatorSeries>& series) {
  std::string out = "group,granularity,date,cnm_nmi,n_active,n_idle,n_unknown,mean_speed\n";
  for (const auto& s : series)
    for (const auto& p : s.points)
      out += fmt::format("{},{},{},{:.6f},{:.4f},{:.4f},{:.4f},{}\n", csv::escape(s.group), to_string(s.granularity),
                         p.date, p.cnm_nmi, p.n_active, p.n_idle, p.n_unknown,
                         p.mean_speed_knots ? fmt::format("{:.4f}", *p.mean_speed_knots) : "");
  return out;
}

struct IndicatorRun {
  std::vector<IndicatorSeries> series;
  std::vector<ForecastPoint> forecasts;
  json stats;
};

/// indicators: indicators.csv, forecast.csv, stats.json. Forecast rows need a history file
/// (same units as the computed CNM) with at least two years before the data's latest year.
inline IndicatorRun run_indicators(const RunConfig& cfg) {
  auto p = prepare(cfg);
  IndicatorRun run;
  run.series = compute_indicators(p.tracks, p.registry);
  if (!cfg.groups.empty()) {
    const std::set<std::string> keep(cfg.groups.begin(), cfg.groups.end());
    std::erase_if(run.series, [&](const IndicatorSeries& s) { return !keep.contains(s.group); });
  }
  if (cfg.history) {
    auto values = load_history(*cfg.history);
    const auto computed = monthly_cnm_values(run.series);
    int target = 0;
    for (const auto& v : computed) target = std::max(target, v.year);
    std::set<std::pair<std::string, int>> present;
    for (const auto& v : computed) present.insert({v.group, v.year * 100 + v.month});
    std::erase_if(values, [&](const MonthlyValue& v) { return present.contains({v.group, v.year * 100 + v.month}); });
    values.insert(values.end(), computed.begin(), computed.end());
    if (target > 0) run.forecasts = build_forecasts(values, target);
  }
  ensure_dir(cfg.out_dir);
  write_atomic(cfg.out_dir / "indicators.csv", indicators_csv(run.series));
  write_atomic(cfg.out_dir / "forecast.csv", forecast_csv(run.forecasts));
  run.stats = p.stats();
  run.stats["command"] = "indicators";
  run.stats["series"] = run.series.size();
  run.stats["forecast_rows"] = run.forecasts.size();
  write_json(cfg.out_dir / "stats.json", run.stats);
  return run;
}

/// forecast: forecast.csv from a history file alone.
inline std::vector<ForecastPoint> run_forecast(const fs::path& history, int target_year, const fs::path& out_dir) {
  const auto values = load_history(history);
  auto points = build_forecasts(values, target_year);
  ensure_dir(out_dir);
  write_atomic(out_dir / "forecast.csv", forecast_csv(points));
  write_json(out_dir / "stats.json", {{"command", "forecast"}, {"history_rows", values.size()},
                                      {"target_year", target_year}, {"forecast_rows", points.size()}});
  return points;
}

struct DensityRun {
  DensityGrid grid;
  double cnm_nmi = 0.0;  // active miles in the window, inside or outside the box
};

/// density: density.csv, grid.json, density.pgm (and density.geojson), stats.json.
inline DensityRun run_density(const RunConfig& cfg) {
  if (!cfg.bbox) throw UsageError("density needs a bounding box");
  GridSpec spec;
  try {
    spec = GridSpec(*cfg.bbox, cfg.cell_size_deg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  auto p = prepare(cfg);
  std::vector<Tracklet> tracklets;
  for (const auto& lt : p.tracks) {
    const auto a = active_tracklets(lt);
    tracklets.insert(tracklets.end(), a.begin(), a.end());
  }
  DensityRun run;
  for (const auto& t : tracklets) run.cnm_nmi += t.length_nmi;
  run.grid = accumulate(tracklets, spec);
  ensure_dir(cfg.out_dir);
  write_atomic(cfg.out_dir / "density.csv", grid_csv(spec, run.grid.values));
  write_json(cfg.out_dir / "grid.json", spec_json(spec));
  write_atomic(cfg.out_dir / "density.pgm", grid_pgm(spec, run.grid.values, false));
  if (cfg.geojson) write_atomic(cfg.out_dir / "density.geojson", grid_geojson(spec, run.grid.values).dump() + "\n");
  auto stats = p.stats();
  stats["command"] = "density";
  stats["cnm_nmi"] = run.cnm_nmi;
  stats["integral_nmi"] = run.grid.integral_nmi();
  stats["spill_nmi"] = run.grid.spill_nmi;
  write_json(cfg.out_dir / "stats.json", stats);
  return run;
}

inline DensityGrid load_density(const fs::path& run_dir) {
  const auto spec = spec_from_json(nlohmann::json::parse(read_file(run_dir / "grid.json"), nullptr, false));
  auto in = open_input(run_dir / "density.csv");
  DensityGrid g{spec, read_grid_csv(in, spec, (run_dir / "density.csv").string()), cell_areas(spec), 0.0};
  return g;
}

/// diff-density: diff.csv, grid.json, diff.pgm, stats.json for run_b minus run_a.
inline DiffGrid run_diff_density(const fs::path& run_b, const fs::path& run_a, const fs::path& out_dir,
                                 bool geojson = false) {
  const auto b = load_density(run_b);
  const auto a = load_density(run_a);
  const auto d = diff(b, a);
  ensure_dir(out_dir);
  write_atomic(out_dir / "diff.csv", grid_csv(d.spec, d.values));
  write_json(out_dir / "grid.json", spec_json(d.spec));
  write_atomic(out_dir / "diff.pgm", grid_pgm(d.spec, d.values, true));
  if (geojson) write_atomic(out_dir / "diff.geojson", grid_geojson(d.spec, d.values).dump() + "\n");
  std::size_t up = 0, down = 0;
  for (double v : d.values) {
    if (v > 0) ++up;
    if (v < 0) ++down;
  }
  write_json(out_dir / "stats.json", {{"command", "diff-density"}, {"run_b", run_b.string()}, {"run_a", run_a.string()},
                                      {"cells", d.values.size()}, {"cells_up", up}, {"cells_down", down}});
  return d;
}

struct PortsRun {
  std::vector<PortVisit> visits;
  PortGraph graph;
};

/// ports: visits.csv, edges.csv, pv.csv, stats.json.
inline PortsRun run_ports(const RunConfig& cfg) {
  if (!cfg.ports) throw UsageError("a ports file is required");
  const auto ports = load_ports(*cfg.ports);
  auto p = prepare(cfg);
  PortsRun run;
  run.visits = detect_visits(p.tracks, ports, cfg.min_dwell_s());
  run.graph = PortGraph::from_visits(run.visits, ports);
  std::string pv = "port,visits\n";
  for (const auto& id : run.graph.nodes()) pv += csv::row(id, std::to_string(port_visits(run.graph, id)));
  ensure_dir(cfg.out_dir);
  write_atomic(cfg.out_dir / "visits.csv", visits_csv(run.visits));
  write_atomic(cfg.out_dir / "edges.csv", edges_csv(run.graph));
  write_atomic(cfg.out_dir / "pv.csv", pv);
  auto stats = p.stats();
  stats["command"] = "ports";
  stats["visits"] = run.visits.size();
  stats["journeys"] = run.graph.total_visits();
  stats["cnm_from_graph_nmi"] = cnm_from_graph(run.graph);
  write_json(cfg.out_dir / "stats.json", stats);
  return run;
}

/// ego: ego_edges.csv, ego_nodes.csv, stats.json.
inline EgoNetwork run_ego(const fs::path& edges, const std::string& port, int k, bool undirected,
                          const fs::path& out_dir) {
  auto in = open_input(edges);
  const auto g = read_edges(in, edges.string());
  if (!g.has_port(port)) throw DataError(fmt::format("port '{}' is not in {}", port, edges.string()));
  auto ego = ego_network(g, port, k, undirected);
  std::string nodes = "port,hops\n";
  for (const auto& [id, h] : ego.hops) nodes += csv::row(id, std::to_string(h));
  ensure_dir(out_dir);
  write_atomic(out_dir / "ego_edges.csv", edges_csv(ego.graph));
  write_atomic(out_dir / "ego_nodes.csv", nodes);
  write_json(out_dir / "stats.json", {{"command", "ego"}, {"ego", port}, {"k", k}, {"undirected", undirected},
                                      {"nodes", ego.hops.size()}, {"edges", ego.graph.edges().size()}});
  return ego;
}

/// simulate: synthetic.nmea, fleet.csv, ports.csv, pv_cnm.csv, itinerary.csv, truth.json.
inline sim::Result run_simulate(const fs::path& scenario, std::uint64_t seed, const fs::path& out_dir) {
  const auto sc = sim::load_scenario(scenario);
  auto r = sim::simulate(sc, seed);
  ensure_dir(out_dir);
  write_atomic(out_dir / "synthetic.nmea", sim::nmea_feed(r));
  write_atomic(out_dir / "fleet.csv", sim::fleet_csv(r));
  write_atomic(out_dir / "ports.csv", sim::ports_csv(sc));
  write_atomic(out_dir / "pv_cnm.csv", sim::pv_cnm_csv(r));
  write_atomic(out_dir / "itinerary.csv", sim::itinerary_csv(r));
  write_atomic(out_dir / "truth.json", sim::truth_json(r).dump(2) + "\n");
  return r;
}

}  // namespace shipmob::pipeline
