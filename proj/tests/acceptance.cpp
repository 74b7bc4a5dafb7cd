// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <fmt/format.h>

#include "shipmob/shipmob.hpp"
#include "support.hpp"

using namespace shipmob;
using testing_support::Gen;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int n, bool ok, const std::string& what) {
  fmt::print("{} criterion {}: {}\n", ok ? "PASS" : "FAIL", n, what);
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <typename F>
void guarded(int n, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(n, false, fmt::format("threw {}", e.what()));
  }
}

std::vector<MonthlyValue> table_history() {
  auto in = open_input(testing_support::test_data() / "monthly_cnm.csv");
  return pipeline::read_history(in, "monthly_cnm.csv");
}

std::map<std::pair<int, int>, double> table_totals() {
  auto in = open_input(testing_support::test_data() / "monthly_totals.csv");
  csv::Reader r(in, "monthly_totals.csv");
  std::map<std::pair<int, int>, double> out;
  std::vector<std::string> f;
  while (r.next(f)) out[{std::stoi(f[0]), std::stoi(f[1])}] = std::stod(f[2]);
  return out;
}

std::map<std::string, double> printed_forecasts() {
  auto in = open_input(testing_support::test_data() / "monthly_forecast.csv");
  csv::Reader r(in, "monthly_forecast.csv");
  std::map<std::string, double> out;
  std::vector<std::string> f;
  while (r.next(f)) out[f[0] + "@" + f[1]] = std::stod(f[2]);
  return out;
}

std::vector<ForecastPoint> table_forecasts() {
  auto values = table_history();
  for (const auto& [ym, v] : table_totals()) values.push_back({"total", ym.first, ym.second, v});
  return build_forecasts(values, 2020);
}

void criterion1() {
  const auto printed = printed_forecasts();
  const auto points = table_forecasts();
  std::size_t checked = 0;
  double worst = 0.0;
  for (const auto& p : points) {
    auto it = printed.find(p.group + "@" + p.month);
    if (it == printed.end()) continue;
    worst = std::max(worst, std::abs(p.forecast_value - it->second));
    ++checked;
  }
  report(1, checked == printed.size() && worst <= 0.02,
         fmt::format("{} of {} forecasts checked, max |diff| {:.4f} (limit 0.02)", checked, printed.size(), worst));
}

void criterion2() {
  const std::vector<std::tuple<std::string, std::string, double>> published{
      {"container", "2020-06", -13.77}, {"passenger", "2020-05", -45.3}, {"wet_bulk", "2020-02", 5.17},
      {"dry_bulk", "2020-02", 1.11},    {"dry_bulk", "2020-06", -3.32}};
  const auto points = table_forecasts();
  double worst = 0.0;
  std::size_t found = 0;
  for (const auto& [group, month, value] : published)
    for (const auto& p : points)
      if (p.group == group && p.month == month && p.delta_pct) {
        worst = std::max(worst, std::abs(*p.delta_pct - value));
        ++found;
      }
  report(2, found == published.size() && worst <= 0.05,
         fmt::format("{} of {} deltas found, max |diff| {:.3f} pp (limit 0.05)", found, published.size(), worst));
}

void criterion3() {
  std::map<std::pair<int, int>, double> sums;
  for (const auto& v : table_history()) sums[{v.year, v.month}] += v.value;
  const auto totals = table_totals();
  double worst = 0.0;
  std::size_t checked = 0;
  for (const auto& [ym, total] : totals) {
    if (!sums.contains(ym)) continue;
    worst = std::max(worst, std::abs(sums[ym] - total));
    ++checked;
  }
  report(3, checked == totals.size() && worst <= 0.03,
         fmt::format("{} months, max |sum - total| {:.4f} (limit 0.03)", checked, worst));
}

void criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  testing_support::TempDir tmp("accept4");
  const auto sim = pipeline::run_simulate(testing_support::data_dir() / "scenarios" / "three_port.ini", 2020, tmp.path());
  pipeline::RunConfig cfg;
  cfg.inputs = {tmp / "synthetic.nmea"};
  cfg.fleet = tmp / "fleet.csv";
  cfg.ports = tmp / "ports.csv";
  cfg.out_dir = tmp / "indicators";
  const auto ind = pipeline::run_indicators(cfg);
  cfg.out_dir = tmp / "ports";
  const auto ports = pipeline::run_ports(cfg);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  double cnm = 0.0;
  for (const auto& s : ind.series)
    if (s.group == "total" && s.granularity == Granularity::daily)
      for (const auto& p : s.points) cnm += p.cnm_nmi;
  const double truth = sim.total_sailed_nmi();
  const double rel = std::abs(cnm - truth) / truth;

  auto key = [](const PortVisit& v) { return std::make_tuple(v.mmsi, v.port, v.arrival, v.departure); };
  std::vector<std::tuple<std::uint32_t, std::string, Epoch, Epoch>> want, got;
  for (const auto& v : sim.detectable_itinerary(cfg.min_dwell_s())) want.push_back(key(v));
  for (const auto& v : ports.visits) got.push_back(key(v));
  std::sort(want.begin(), want.end());
  std::sort(got.begin(), got.end());

  report(4, sim.vessels.size() == 20 && rel <= 0.01 && want == got && !want.empty() && seconds < 60.0,
         fmt::format("{} vessels, CNM {:.2f} vs truth {:.2f} (rel {:.2e}), visits {}/{} {}, {:.1f} s",
                     sim.vessels.size(), cnm, truth, rel, got.size(), want.size(),
                     want == got ? "identical" : "differ", seconds));
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

void criterion5() {
  const auto dir = testing_support::data_dir() / "scenarios";
  const auto cape = sim::load_scenario(dir / "cape.ini");
  const auto suez = sim::load_scenario(dir / "suez.ini");
  const auto rc = sim::simulate(cape, 5);
  const auto rs = sim::simulate(suez, 5);
  const double extra = cape.route_nmi("SGSIN", "NLRTM") - suez.route_nmi("SGSIN", "NLRTM");
  bool same_pv = rc.periods.size() == rs.periods.size();
  double worst = 0.0;
  for (std::size_t k = 0; same_pv && k < rc.periods.size(); ++k) {
    same_pv = rc.periods[k].visits == rs.periods[k].visits;
    const double expected = static_cast<double>(rc.periods[k].total_visits) * extra;
    const double got = rc.periods[k].cnm_nmi - rs.periods[k].cnm_nmi;
    worst = std::max(worst, std::abs(got - expected) / std::max(1.0, expected));
  }

  const auto two = sim::load_scenario(dir / "two_port.ini");
  const auto rt = sim::simulate(two, 5);
  std::vector<double> pv, cnm;
  for (const auto& p : rt.periods) {
    pv.push_back(static_cast<double>(p.visits.at("SGSIN") + p.visits.at("CNSHA")));
    cnm.push_back(p.cnm_nmi);
  }
  const double d = two.route_nmi("SGSIN", "CNSHA");
  const double slope_err = std::abs(ols_slope(pv, cnm) - d) / d;

  report(5, same_pv && worst <= 1e-9 && slope_err <= 1e-9,
         fmt::format("PV series {}, CNM gap vs visits x {:.1f} nmi rel {:.1e}, two-port slope rel error {:.1e}",
                     same_pv ? "identical" : "differ", extra, worst, slope_err));
}

// Independent slerp on unit vectors.
geo::LatLon along(geo::LatLon a, geo::LatLon b, double f) {
  auto vec = [](geo::LatLon p) {
    const double la = p.lat * std::numbers::pi / 180, lo = p.lon * std::numbers::pi / 180;
    return std::array<double, 3>{std::cos(la) * std::cos(lo), std::cos(la) * std::sin(lo), std::sin(la)};
  };
  const auto u = vec(a), v = vec(b);
  const double dot = std::clamp(u[0] * v[0] + u[1] * v[1] + u[2] * v[2], -1.0, 1.0);
  const double w = std::acos(dot);
  double ka = 1 - f, kb = f;
  if (w > 1e-12) {
    ka = std::sin((1 - f) * w) / std::sin(w);
    kb = std::sin(f * w) / std::sin(w);
  }
  const double x = ka * u[0] + kb * v[0], y = ka * u[1] + kb * v[1], z = ka * u[2] + kb * v[2];
  return {std::atan2(z, std::hypot(x, y)) * 180 / std::numbers::pi, std::atan2(y, x) * 180 / std::numbers::pi};
}

// Length of a tracklet inside the box: scan for membership changes, then bisect each one.
double inside_length(const Tracklet& t, const BoundingBox& box) {
  const int n = 400;
  auto in = [&](double f) { return box.contains(along(t.start, t.end, f)); };
  double inside = 0.0;
  double seg_start = in(0.0) ? 0.0 : -1.0;
  bool prev = in(0.0);
  for (int i = 1; i <= n; ++i) {
    const double f = static_cast<double>(i) / n;
    const bool cur = in(f);
    if (cur != prev) {
      double lo = static_cast<double>(i - 1) / n, hi = f;
      for (int k = 0; k < 60; ++k) {
        const double mid = (lo + hi) / 2;
        (in(mid) == prev ? lo : hi) = mid;
      }
      if (cur) seg_start = hi;
      else inside += hi - seg_start;
      prev = cur;
    }
  }
  if (prev) inside += 1.0 - seg_start;
  return inside * t.length_nmi;
}

void criterion6() {
  Gen g(6);
  const BoundingBox box{40, 43, 2, 6};
  const double cell = 0.1;
  const GridSpec spec(box, cell);
  FleetRegistry reg;
  std::vector<PositionFix> fixes;
  for (std::uint32_t v = 0; v < 40; ++v) {
    const std::uint32_t mmsi = 247000000 + v;
    reg.add(classify(testing_support::vessel(mmsi), SizeClassScheme::defaults()));
    double lat = g.uniform(39.5, 43.5), lon = g.uniform(1.5, 6.5), heading = g.uniform(0, 360);
    for (int k = 0; k < 150; ++k) {
      PositionFix f;
      f.mmsi = mmsi;
      f.timestamp = 1583020800 + k * 1200;
      f.lat_deg = lat;
      f.lon_deg = lon;
      const bool moored = k % 50 > 44;
      f.sog_knots = moored ? 0.0 : g.uniform(6, 18);
      f.nav_status = moored ? NavStatus::moored : NavStatus::under_way_engine;
      fixes.push_back(ais::quantized(f));
      heading += g.uniform(-25, 25);
      const double step = moored ? 0.0 : *f.sog_knots / 3.0 / 60.0;
      lat = std::clamp(lat + step * std::cos(heading * std::numbers::pi / 180), 39.0, 44.0);
      lon = std::clamp(lon + step * std::sin(heading * std::numbers::pi / 180) / std::cos(lat * std::numbers::pi / 180), 1.0, 7.0);
    }
  }
  const auto cleaned = clean(fixes, reg);
  const auto tracks = label_tracks(build_tracks(cleaned.fixes));
  double window_cnm = 0.0;
  for (const auto& s : cnm(tracks, reg, Granularity::daily))
    if (s.group == "total")
      for (const auto& p : s.points) window_cnm += p.cnm_nmi;
  std::vector<Tracklet> tracklets;
  for (const auto& lt : tracks) {
    const auto a = active_tracklets(lt);
    tracklets.insert(tracklets.end(), a.begin(), a.end());
  }

  const auto grid = accumulate(tracklets, spec);
  const double identity = std::abs(grid.integral_nmi() + grid.spill_nmi - window_cnm) / window_cnm;

  double oracle_inside = 0.0;
  std::vector<double> exact;
  for (const auto& t : tracklets) {
    exact.push_back(inside_length(t, box));
    oracle_inside += exact.back();
  }
  std::vector<double> errors;
  double bbox_err = 0.0;
  for (double step : {cell / 4, cell / 8, cell / 16}) {
    double l1 = 0.0;
    for (std::size_t i = 0; i < tracklets.size(); ++i) {
      const auto one = accumulate(std::span<const Tracklet>(&tracklets[i], 1), spec, step);
      l1 += std::abs(one.integral_nmi() - exact[i]);
    }
    errors.push_back(l1 / oracle_inside);
    if (errors.size() == 1) bbox_err = std::abs(accumulate(tracklets, spec, step).integral_nmi() - oracle_inside) / oracle_inside;
  }
  const bool monotone = errors[0] > errors[1] && errors[1] > errors[2];
  report(6, identity <= 0.005 && bbox_err <= 0.005 && errors[0] <= 0.005 && monotone,
         fmt::format("{} tracklets, |integral+spill-CNM|/CNM {:.1e}, in-box error {:.2e}, per-tracklet error "
                     "{:.2e} > {:.2e} > {:.2e}",
                     tracklets.size(), identity, bbox_err, errors[0], errors[1], errors[2]));
}

std::vector<PositionFix> fuzz_stream(Gen& g, std::size_t n) {
  std::vector<PositionFix> out;
  const std::uint32_t vessels[] = {244000001, 244000002, 244000003, 244000004, 0, 123};
  std::map<std::uint32_t, PositionFix> last;
  for (std::size_t i = 0; i < n; ++i) {
    const auto m = vessels[g.integer(0, 5)];
    PositionFix f;
    if (!last.contains(m)) {
      f.mmsi = m;
      f.timestamp = 1583020800 + g.integer(0, 3600);
      f.lat_deg = g.uniform(-60, 60);
      f.lon_deg = g.uniform(-170, 170);
      f.sog_knots = g.uniform(0, 25);
    } else {
      f = last[m];
      *f.timestamp += g.chance(0.05) ? 0 : g.chance(0.02) ? 25 * 3600 + g.integer(0, 5000) : g.integer(1, 1200);
      const double jump = g.chance(0.05) ? g.uniform(0.5, 5.0) : g.uniform(0.0, 0.05);
      *f.lat_deg = std::clamp(*f.lat_deg + g.uniform(-jump, jump), -80.0, 80.0);
      *f.lon_deg = std::clamp(*f.lon_deg + g.uniform(-jump, jump), -179.0, 179.0);
      f.sog_knots = g.uniform(0, 25);
    }
    if (g.chance(0.02)) f.timestamp.reset();
    if (g.chance(0.02)) f.lat_deg.reset();
    last[m] = f;
    if (!f.timestamp || !f.lat_deg) last.erase(m);
    out.push_back(f);
  }
  return out;
}

void criterion7() {
  FleetRegistry reg;
  for (std::uint32_t m : {244000001u, 244000002u, 244000003u})
    reg.add(classify(testing_support::vessel(m), SizeClassScheme::defaults()));
  reg.add(classify(testing_support::vessel(244000004, 500.0), SizeClassScheme::defaults()));
  Gen g(7);
  bool speed_ok = true, idempotent = true, reconciled = true, order_free = true, gaps_ok = true;
  double fastest = 0.0;
  for (int round = 0; round < 50; ++round) {
    auto in = fuzz_stream(g, 4000);
    const auto r = clean(in, reg);
    reconciled = reconciled && r.stats.retained + r.stats.dropped() == in.size() && r.stats.input == in.size();
    for (const auto& t : build_tracks(r.fixes))
      for (const auto& tr : t.tracklets()) fastest = std::max(fastest, tr.implied_speed_knots());
    const auto again = clean(r.fixes, reg);
    idempotent = idempotent && again.fixes == r.fixes && again.stats.dropped() == 0;
    std::shuffle(in.begin(), in.end(), std::mt19937_64(round));
    order_free = order_free && clean(in, reg).fixes == r.fixes;
  }
  speed_ok = fastest <= 50.0;
  for (int round = 0; round < 500; ++round) {
    std::vector<PositionFix> in;
    Epoch t = 0;
    int gaps = 0;
    for (int i = 0; i < 40; ++i) {
      const bool gap = i > 0 && g.chance(0.1);
      gaps += gap;
      t += gap ? 25 * 3600 + g.integer(0, 100000) : g.integer(1, 24 * 3600);
      PositionFix f;
      f.mmsi = 244000001;
      f.timestamp = t;
      f.lat_deg = 0.0;
      f.lon_deg = 0.001 * i;
      in.push_back(f);
    }
    gaps_ok = gaps_ok && build_tracks(in).size() == static_cast<std::size_t>(gaps + 1);
  }
  report(7, speed_ok && idempotent && reconciled && order_free && gaps_ok,
         fmt::format("max implied speed {:.2f} kn, idempotent {}, order independent {}, counts reconcile {}, "
                     "25 h gaps split {}",
                     fastest, idempotent, order_free, reconciled, gaps_ok));
}

bool close_fix(const PositionFix& a, const PositionFix& b) {
  auto near = [](const std::optional<double>& x, const std::optional<double>& y, double tol) {
    return x.has_value() == y.has_value() && (!x || std::abs(*x - *y) <= tol);
  };
  return a.mmsi == b.mmsi && a.msg_type == b.msg_type && a.nav_status == b.nav_status &&
         a.heading_deg == b.heading_deg && a.utc_second == b.utc_second && a.timestamp == b.timestamp &&
         near(a.lat_deg, b.lat_deg, 0.5 / 600000.0 + 1e-12) && near(a.lon_deg, b.lon_deg, 0.5 / 600000.0 + 1e-12) &&
         near(a.sog_knots, b.sog_knots, 0.05 + 1e-9) && near(a.cog_deg, b.cog_deg, 0.05 + 1e-9);
}

std::string padded(std::string s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '@')) s.pop_back();
  return s;
}

bool close_static(const ais::StaticReport& a, const ais::StaticReport& b) {
  return a.mmsi == b.mmsi && a.imo_number == b.imo_number && padded(a.callsign) == padded(b.callsign) &&
         padded(a.name) == padded(b.name) && padded(a.destination) == padded(b.destination) &&
         a.ship_type_code == b.ship_type_code && a.dims.to_bow == b.dims.to_bow && a.dims.to_stern == b.dims.to_stern &&
         a.dims.to_port == b.dims.to_port && a.dims.to_starboard == b.dims.to_starboard &&
         a.draught_dm == b.draught_dm && a.timestamp == b.timestamp;
}

void criterion8() {
  Gen g(8);
  std::size_t pos_ok = 0, static_ok = 0;
  const std::size_t n = 100000;
  ais::Decoder statics;
  std::vector<std::string> corpus;
  for (std::size_t i = 0; i < n; ++i) {
    const auto f = g.position_fix();
    const auto line = ais::encode(f, i % 2 ? 'A' : 'B').at(0);
    const auto out = ais::decode({line, f.timestamp});
    if (const auto* d = std::get_if<PositionFix>(&out); d && close_fix(*d, f)) ++pos_ok;
    const auto r = g.static_report();
    const auto lines = ais::encode(r, 'B', static_cast<int>(i % 10));
    statics.decode({lines[0], r.timestamp});
    const auto sout = statics.decode({lines[1], r.timestamp});
    if (const auto* d = std::get_if<ais::StaticReport>(&sout); d && close_static(*d, r)) ++static_ok;
    if (i < 200) {
      corpus.push_back(line);
      corpus.insert(corpus.end(), lines.begin(), lines.end());
    }
  }

  ais::Decoder fuzz;
  const std::size_t lines = 1000000;
  for (std::size_t i = 0; i < lines; ++i) {
    std::string line;
    if (g.chance(0.1)) {
      const auto len = static_cast<std::size_t>(g.integer(0, 120));
      for (std::size_t k = 0; k < len; ++k) line += static_cast<char>(g.integer(0, 255));
    } else {
      line = corpus[static_cast<std::size_t>(g.integer(0, static_cast<std::int64_t>(corpus.size()) - 1))];
      if (g.chance(0.3)) line = std::to_string(g.integer(0, 2'000'000'000)) + "\t" + line;
      const int edits = static_cast<int>(g.integer(0, 5));
      for (int e = 0; e < edits && !line.empty(); ++e) {
        const auto pos = static_cast<std::size_t>(g.integer(0, static_cast<std::int64_t>(line.size()) - 1));
        switch (g.integer(0, 3)) {
          case 0: line[pos] = static_cast<char>(g.integer(0, 255)); break;
          case 1: line.erase(pos, 1); break;
          case 2: line.insert(pos, 1, static_cast<char>(g.integer(32, 126))); break;
          default: line.resize(pos); break;
        }
      }
    }
    fuzz.consume(line);
  }
  const auto& st = fuzz.stats();
  const bool survived = st.lines == lines && st.accounted() == lines;
  report(8, pos_ok == n && static_ok == n && survived,
         fmt::format("{}/{} positions and {}/{} static reports round-trip, {} fuzzed lines decoded "
                     "({} errors, counts reconcile {})",
                     pos_ok, n, static_ok, n, st.lines, st.error_total(), survived));
}

}  // namespace

int main() {
  guarded(1, criterion1);
  guarded(2, criterion2);
  guarded(3, criterion3);
  guarded(4, criterion4);
  guarded(5, criterion5);
  guarded(6, criterion6);
  guarded(7, criterion7);
  guarded(8, criterion8);
  return failures == 0 ? 0 : 1;
}
