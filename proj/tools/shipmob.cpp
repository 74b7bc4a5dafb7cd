// shipmob: AIS decoding, mobility indicators, density grids, port networks and the voyage
// simulator from the command line.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "shipmob/shipmob.hpp"

namespace fs = std::filesystem;
using namespace shipmob;
using pipeline::RunConfig;

namespace {

struct Flags {
  std::vector<std::string> inputs;
  std::optional<std::string> config, fleet, ports, scheme, history, out, from, to;
  std::optional<double> gap_hours, speed_gate, idle_speed, min_dwell_hours, cell_size;
  std::optional<std::vector<double>> bbox;
  std::vector<std::string> groups;
  bool geojson = false;
};

void add_run_options(CLI::App* cmd, Flags& f, bool needs_fleet) {
  cmd->add_option("inputs", f.inputs, "NMEA feeds or decoded fixes.csv files");
  cmd->add_option("--config", f.config, "key-value config file");
  cmd->add_option("-o,--out", f.out, "output directory");
  if (!needs_fleet) return;
  cmd->add_option("--fleet", f.fleet, "fleet registry CSV");
  cmd->add_option("--scheme", f.scheme, "size-class scheme INI");
  cmd->add_option("--gap-hours", f.gap_hours, "split tracks at gaps longer than this");
  cmd->add_option("--speed-gate", f.speed_gate, "drop fixes implying more than this many knots");
  cmd->add_option("--idle-speed", f.idle_speed, "SOG below this is idle");
  cmd->add_option("--from", f.from, "window start (inclusive), ISO-8601 or epoch");
  cmd->add_option("--to", f.to, "window end (exclusive), ISO-8601 or epoch");
}

Epoch time_flag(const std::string& s, const char* what) {
  const auto t = parse_time(s);
  if (!t) throw UsageError(fmt::format("bad {} time '{}'", what, s));
  return *t;
}

RunConfig resolve(const Flags& f) {
  RunConfig cfg;
  if (f.config) cfg = pipeline::load_config(*f.config);
  if (!f.inputs.empty()) cfg.inputs.assign(f.inputs.begin(), f.inputs.end());
  if (f.fleet) cfg.fleet = *f.fleet;
  if (f.ports) cfg.ports = *f.ports;
  if (f.scheme) cfg.scheme = *f.scheme;
  if (f.history) cfg.history = *f.history;
  if (f.out) cfg.out_dir = *f.out;
  if (f.gap_hours) cfg.track.gap_hours = *f.gap_hours;
  if (f.speed_gate) cfg.track.speed_gate_knots = *f.speed_gate;
  if (f.idle_speed) cfg.track.idle_speed_knots = *f.idle_speed;
  if (f.min_dwell_hours) cfg.min_dwell_hours = *f.min_dwell_hours;
  if (f.cell_size) cfg.cell_size_deg = *f.cell_size;
  if (f.bbox) {
    if (f.bbox->size() != 4) throw UsageError("--bbox takes lat_min,lat_max,lon_min,lon_max");
    cfg.bbox = BoundingBox{(*f.bbox)[0], (*f.bbox)[1], (*f.bbox)[2], (*f.bbox)[3]};
  }
  if (f.from) cfg.from = time_flag(*f.from, "--from");
  if (f.to) cfg.to = time_flag(*f.to, "--to");
  if (!f.groups.empty()) cfg.groups = f.groups;
  if (f.geojson) cfg.geojson = true;
  return cfg;
}

void log_cleaning(const pipeline::Prepared& p) {
  const auto& s = p.cleaned.stats;
  fmt::print(stderr, "fixes {} retained {} dropped {} tracks {}\n", s.input, s.retained, s.dropped(), p.tracks.size());
}

int run(int argc, char** argv) {
  CLI::App app{"AIS maritime mobility indicators"};
  app.require_subcommand(1);
  Flags f;

  auto* decode = app.add_subcommand("decode", "decode NMEA feeds to fixes.csv");
  add_run_options(decode, f, false);

  auto* tracks = app.add_subcommand("tracks", "clean fixes and build labelled tracks");
  add_run_options(tracks, f, true);

  auto* indicators = app.add_subcommand("indicators", "CNM, fleet status and speed series");
  add_run_options(indicators, f, true);
  indicators->add_option("--history", f.history, "monthly history CSV (group,year,month,value)");
  indicators->add_option("--group", f.groups, "keep only these groups");

  std::string history;
  int target_year = 0;
  auto* forecast = app.add_subcommand("forecast", "same-month forecast from a history file");
  forecast->add_option("history", history, "history CSV (group,year,month,value)")->required();
  forecast->add_option("--target-year", target_year, "year to forecast")->required();
  forecast->add_option("-o,--out", f.out, "output directory");

  auto* density = app.add_subcommand("density", "CNM density grid");
  add_run_options(density, f, true);
  density->add_option("--bbox", f.bbox, "lat_min,lat_max,lon_min,lon_max")->delimiter(',')->expected(4);
  density->add_option("--cell-size", f.cell_size, "cell size in degrees");
  density->add_flag("--geojson", f.geojson, "also write one polygon per cell");

  std::string run_b, run_a;
  auto* diff_density = app.add_subcommand("diff-density", "difference of two density runs (b - a)");
  diff_density->add_option("run_b", run_b, "later density run directory")->required();
  diff_density->add_option("run_a", run_a, "earlier density run directory")->required();
  diff_density->add_option("-o,--out", f.out, "output directory");
  diff_density->add_flag("--geojson", f.geojson, "also write one polygon per cell");

  auto* ports = app.add_subcommand("ports", "port visits, edge list and PV");
  add_run_options(ports, f, true);
  ports->add_option("--ports", f.ports, "ports CSV");
  ports->add_option("--min-dwell-hours", f.min_dwell_hours, "shortest idle stay counted as a visit");

  std::string edges, ego_port;
  int hops = 0;
  bool undirected = false;
  auto* ego = app.add_subcommand("ego", "k-hop ego network from an edge list");
  ego->add_option("edges", edges, "edges.csv from the ports command")->required();
  ego->add_option("--port", ego_port, "focal port id")->required();
  ego->add_option("-k,--hops", hops, "hop limit")->check(CLI::NonNegativeNumber);
  ego->add_flag("--undirected", undirected, "follow edges in both directions");
  ego->add_option("-o,--out", f.out, "output directory");

  std::string scenario;
  std::uint64_t seed = 1;
  auto* simulate = app.add_subcommand("simulate", "run a voyage scenario");
  simulate->add_option("scenario", scenario, "scenario INI")->required();
  simulate->add_option("--seed", seed, "random seed");
  simulate->add_option("-o,--out", f.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  const fs::path out = f.out.value_or("out");
  if (*decode) {
    const auto s = pipeline::run_decode(resolve(f));
    fmt::print(stderr, "lines {} positions {} static {} errors {}\n", s.lines, s.position_reports, s.static_reports,
               s.error_total());
  } else if (*tracks) {
    log_cleaning(pipeline::run_tracks(resolve(f)));
  } else if (*indicators) {
    const auto r = pipeline::run_indicators(resolve(f));
    fmt::print(stderr, "series {} forecast rows {}\n", r.series.size(), r.forecasts.size());
  } else if (*forecast) {
    const auto r = pipeline::run_forecast(history, target_year, out);
    fmt::print(stderr, "forecast rows {}\n", r.size());
  } else if (*density) {
    const auto r = pipeline::run_density(resolve(f));
    fmt::print(stderr, "cnm {:.3f} in grid {:.3f} spill {:.3f}\n", r.cnm_nmi, r.grid.integral_nmi(), r.grid.spill_nmi);
  } else if (*diff_density) {
    const auto d = pipeline::run_diff_density(run_b, run_a, out, f.geojson);
    fmt::print(stderr, "cells {}\n", d.values.size());
  } else if (*ports) {
    const auto r = pipeline::run_ports(resolve(f));
    fmt::print(stderr, "visits {} journeys {}\n", r.visits.size(), r.graph.total_visits());
  } else if (*ego) {
    const auto e = pipeline::run_ego(edges, ego_port, hops, undirected, out);
    fmt::print(stderr, "nodes {} edges {}\n", e.hops.size(), e.graph.edges().size());
  } else if (*simulate) {
    const auto r = pipeline::run_simulate(scenario, seed, out);
    fmt::print(stderr, "vessels {} fixes {} sailed {:.3f} nmi\n", r.vessels.size(), r.fixes.size(),
               r.total_sailed_nmi());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    fmt::print(stderr, "usage error: {}\n", e.what());
    return 1;
  } catch (const IoError& e) {
    fmt::print(stderr, "i/o error: {}\n", e.what());
    return 2;
  } catch (const fs::filesystem_error& e) {
    fmt::print(stderr, "i/o error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "data error: {}\n", e.what());
    return 3;
  }
}
