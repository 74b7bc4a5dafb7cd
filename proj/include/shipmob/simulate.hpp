#pragma once

// Port-graph voyage simulator. Vessels cycle through an itinerary of ports along routed legs;
// the run yields per-period PV and CNM series, the exact itinerary, and synthetic AIS fixes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "shipmob/ais/codec.hpp"
#include "shipmob/fleet.hpp"
#include "shipmob/geo.hpp"
#include "shipmob/io.hpp"
#include "shipmob/ports.hpp"
#include "shipmob/time.hpp"

namespace shipmob::sim {

inline constexpr double kMinLegSpeedKnots = 2.0;
inline constexpr double kMaxLegSpeedKnots = 50.0;

struct FleetSpec {
  std::string name;
  int count = 0;
  std::uint32_t mmsi_base = 0;
  int type_code = 70;
  std::string hint;
  double dwt = 50000.0;
  double gt = 0.0;
  double teu = 0.0;
  double speed_knots = 14.0;
  double dwell_hours = 24.0;
  double start_spread_hours = 24.0;
  std::optional<int> layup_day;
  double layup_fraction = 0.0;
};

using OdPair = std::pair<std::string, std::string>;

struct Scenario {
  std::string name = "scenario";
  Epoch start = 0;
  int days = 30;
  int period_days = 7;
  int cadence_s = 600;
  std::vector<Port> ports;
  std::map<OdPair, std::vector<geo::LatLon>> waypoints;  // intermediate points only
  std::map<OdPair, double> leg_hours;
  std::vector<std::string> loop;
  std::vector<FleetSpec> fleets;

  Epoch end() const { return start + static_cast<Epoch>(days) * kSecondsPerDay; }

  const Port& port(const std::string& id) const {
    for (const auto& p : ports)
      if (p.id == id) return p;
    throw DataError(fmt::format("scenario {}: unknown port '{}'", name, id));
  }

  /// Full polyline from `src` to `dst`; a reverse entry is used backwards.
  std::vector<geo::LatLon> route(const std::string& src, const std::string& dst) const {
    std::vector<geo::LatLon> pts{port(src).location};
    if (auto it = waypoints.find({src, dst}); it != waypoints.end()) {
      pts.insert(pts.end(), it->second.begin(), it->second.end());
    } else if (auto rev = waypoints.find({dst, src}); rev != waypoints.end()) {
      pts.insert(pts.end(), rev->second.rbegin(), rev->second.rend());
    } else {
      throw DataError(fmt::format("scenario {}: no route between {} and {}", name, src, dst));
    }
    pts.push_back(port(dst).location);
    return pts;
  }

  double route_nmi(const std::string& src, const std::string& dst) const {
    const auto pts = route(src, dst);
    return geo::path_length_nmi(pts);
  }

  std::optional<double> scheduled_hours(const std::string& src, const std::string& dst) const {
    if (auto it = leg_hours.find({src, dst}); it != leg_hours.end()) return it->second;
    if (auto it = leg_hours.find({dst, src}); it != leg_hours.end()) return it->second;
    return std::nullopt;
  }

  double leg_seconds(const std::string& src, const std::string& dst, double speed_knots) const {
    const double hours = scheduled_hours(src, dst).value_or(route_nmi(src, dst) / speed_knots);
    return std::max(1.0, std::round(hours * 3600.0));
  }

  void validate() const {
    if (days < 0 || period_days <= 0 || cadence_s <= 0) throw DataError(fmt::format("scenario {}: bad timing", name));
    std::set<std::string> ids;
    for (const auto& p : ports) {
      shipmob::validate(p);
      if (!ids.insert(p.id).second) throw DataError(fmt::format("scenario {}: duplicate port {}", name, p.id));
    }
    if (fleets.empty()) return;
    if (loop.size() < 2) throw DataError(fmt::format("scenario {}: itinerary needs at least two ports", name));
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const auto& a = loop[i];
      const auto& b = loop[(i + 1) % loop.size()];
      if (a == b) throw DataError(fmt::format("scenario {}: itinerary repeats {}", name, a));
      for (const auto& f : fleets) {
        const double speed = route_nmi(a, b) / (leg_seconds(a, b, f.speed_knots) / 3600.0);
        if (speed <= kMinLegSpeedKnots || speed >= kMaxLegSpeedKnots)
          throw DataError(fmt::format("scenario {}: leg {}-{} needs {:.1f} kn", name, a, b, speed));
      }
    }
    for (const auto& f : fleets) {
      if (f.count < 0 || !(f.speed_knots > 0.0) || f.dwell_hours < 0.0 || f.start_spread_hours < 0.0 ||
          f.layup_fraction < 0.0 || f.layup_fraction > 1.0)
        throw DataError(fmt::format("scenario {}: bad fleet [{}]", name, f.name));
      if (!ais::is_valid_mmsi(f.mmsi_base) || !ais::is_valid_mmsi(f.mmsi_base + static_cast<std::uint32_t>(f.count)))
        throw DataError(fmt::format("scenario {}: fleet [{}] MMSIs out of range", name, f.name));
    }
  }
};

namespace detail {

inline std::string trimmed(std::string s) {
  boost::algorithm::trim(s);
  return s;
}

inline std::vector<std::string> split_list(const std::string& s, const char* sep) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, s, boost::algorithm::is_any_of(sep));
  for (auto& p : parts) boost::algorithm::trim(p);
  if (parts.size() == 1 && parts[0].empty()) parts.clear();
  return parts;
}

inline double number(const std::string& text, const std::string& where) {
  const auto v = csv::parse_number<double>(trimmed(text));
  if (!v) throw DataError(fmt::format("{}: bad number '{}'", where, text));
  return *v;
}

inline OdPair od_key(const std::string& key, const std::string& where) {
  const auto dash = key.find('-');
  if (dash == std::string::npos || dash == 0 || dash + 1 == key.size())
    throw DataError(fmt::format("{}: expected SRC-DST, got '{}'", where, key));
  return {trimmed(key.substr(0, dash)), trimmed(key.substr(dash + 1))};
}

}  // namespace detail

/// Reads a scenario from INI text:
///
///   [scenario]  name, start, days, period_days, cadence_min
///   [ports]     ID = name, country, lat, lon[, radius_nmi]
///   [routes]    SRC-DST = lat,lon; lat,lon   (or "direct")
///   [schedule]  SRC-DST = leg hours
///   [itinerary] loop = A, B, C
///   [fleet.*]   count, mmsi_base, type_code, hint, dwt, gt, teu, speed_knots, dwell_hours,
///               start_spread_hours, layup_day, layup_fraction
inline Scenario read_scenario(std::istream& in, const std::string& source = "<scenario>") {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw DataError(fmt::format("{}: {}", source, e.message()));
  }
  Scenario sc;
  std::uint32_t next_base = 211000000;
  for (const auto& [section, body] : tree) {
    const std::string where = fmt::format("{} [{}]", source, section);
    if (section == "scenario") {
      for (const auto& [key, node] : body) {
        const auto value = detail::trimmed(node.get_value<std::string>());
        if (key == "name") sc.name = value;
        else if (key == "start") {
          const auto t = parse_time(value);
          if (!t) throw DataError(fmt::format("{}: bad start '{}'", where, value));
          sc.start = *t;
        } else if (key == "days") sc.days = static_cast<int>(detail::number(value, where));
        else if (key == "period_days") sc.period_days = static_cast<int>(detail::number(value, where));
        else if (key == "cadence_min") sc.cadence_s = static_cast<int>(std::lround(detail::number(value, where) * 60.0));
        else throw DataError(fmt::format("{}: unknown key '{}'", where, key));
      }
    } else if (section == "ports") {
      for (const auto& [key, node] : body) {
        const auto f = detail::split_list(node.get_value<std::string>(), ",");
        if (f.size() != 4 && f.size() != 5) throw DataError(fmt::format("{}: port {} needs name, country, lat, lon", where, key));
        Port p{key, f[0], f[1], {detail::number(f[2], where), detail::number(f[3], where)}, 10.0};
        if (f.size() == 5) p.radius_nmi = detail::number(f[4], where);
        sc.ports.push_back(std::move(p));
      }
    } else if (section == "routes") {
      for (const auto& [key, node] : body) {
        const auto value = detail::trimmed(node.get_value<std::string>());
        std::vector<geo::LatLon> pts;
        if (value != "direct") {
          for (const auto& wp : detail::split_list(value, ";")) {
            const auto c = detail::split_list(wp, ",");
            if (c.size() != 2) throw DataError(fmt::format("{}: bad waypoint '{}'", where, wp));
            pts.push_back({detail::number(c[0], where), detail::number(c[1], where)});
            if (!geo::is_valid(pts.back())) throw DataError(fmt::format("{}: bad waypoint '{}'", where, wp));
          }
        }
        sc.waypoints[detail::od_key(key, where)] = std::move(pts);
      }
    } else if (section == "schedule") {
      for (const auto& [key, node] : body) {
        const double h = detail::number(node.get_value<std::string>(), where);
        if (!(h > 0.0)) throw DataError(fmt::format("{}: leg hours must be positive", where));
        sc.leg_hours[detail::od_key(key, where)] = h;
      }
    } else if (section == "itinerary") {
      sc.loop = detail::split_list(body.get<std::string>("loop", ""), ",");
    } else if (section == "fleet" || section.starts_with("fleet.")) {
      FleetSpec f;
      f.name = section == "fleet" ? "fleet" : section.substr(6);
      f.mmsi_base = next_base;
      for (const auto& [key, node] : body) {
        const auto value = detail::trimmed(node.get_value<std::string>());
        if (key == "count") f.count = static_cast<int>(detail::number(value, where));
        else if (key == "mmsi_base") f.mmsi_base = static_cast<std::uint32_t>(detail::number(value, where));
        else if (key == "type_code") f.type_code = static_cast<int>(detail::number(value, where));
        else if (key == "hint") f.hint = value;
        else if (key == "dwt") f.dwt = detail::number(value, where);
        else if (key == "gt") f.gt = detail::number(value, where);
        else if (key == "teu") f.teu = detail::number(value, where);
        else if (key == "speed_knots") f.speed_knots = detail::number(value, where);
        else if (key == "dwell_hours") f.dwell_hours = detail::number(value, where);
        else if (key == "start_spread_hours") f.start_spread_hours = detail::number(value, where);
        else if (key == "layup_day") f.layup_day = static_cast<int>(detail::number(value, where));
        else if (key == "layup_fraction") f.layup_fraction = detail::number(value, where);
        else throw DataError(fmt::format("{}: unknown key '{}'", where, key));
      }
      next_base = f.mmsi_base + 1000;
      sc.fleets.push_back(std::move(f));
    } else {
      throw DataError(fmt::format("{}: unknown section [{}]", source, section));
    }
  }
  sc.validate();
  return sc;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_scenario(in, path.string());
}

struct Leg {
  std::uint32_t mmsi = 0;
  std::string src;
  std::string dst;
  std::vector<geo::LatLon> path;
  std::vector<Epoch> times;  // passage time of each path point; front() departs, back() arrives

  Epoch departure() const { return times.front(); }
  Epoch arrival() const { return times.back(); }
  double length_nmi() const { return geo::path_length_nmi(path); }

  /// Position, speed and course at `t` in [departure, arrival).
  PositionFix state(Epoch t) const {
    std::size_t i = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t) - times.begin()) - 1;
    i = std::min(i, times.size() - 2);
    const double span = static_cast<double>(times[i + 1] - times[i]);
    const double f = static_cast<double>(t - times[i]) / span;
    PositionFix fix;
    fix.mmsi = mmsi;
    fix.nav_status = ais::NavStatus::under_way_engine;
    const auto pos = geo::interpolate(path[i], path[i + 1], f);
    fix.lat_deg = pos.lat;
    fix.lon_deg = pos.lon;
    fix.sog_knots = geo::great_circle_nmi(path[i], path[i + 1]) / (span / 3600.0);
    fix.cog_deg = geo::initial_bearing_deg(pos, path[i + 1]);
    fix.timestamp = t;
    return fix;
  }

  /// Miles covered by `t` (clamped to the leg).
  double sailed_by(Epoch t) const {
    if (t <= departure()) return 0.0;
    double d = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      if (times[i + 1] <= t) {
        d += geo::great_circle_nmi(path[i], path[i + 1]);
      } else {
        if (times[i] < t) {
          const auto s = state(t);
          d += geo::great_circle_nmi(path[i], {*s.lat_deg, *s.lon_deg});
        }
        break;
      }
    }
    return d;
  }
};

struct PeriodRow {
  Epoch start = 0;
  Epoch end = 0;
  std::map<std::string, std::size_t> visits;  // V_p per port
  std::size_t total_visits = 0;
  double cnm_nmi = 0.0;
};

struct Result {
  Scenario scenario;
  std::uint64_t seed = 0;
  std::vector<VesselInputs> vessels;
  std::vector<PortVisit> itinerary;  // every stay, clipped to the horizon
  std::vector<Leg> legs;
  std::vector<PeriodRow> periods;
  std::map<std::uint32_t, double> sailed_nmi;  // per vessel, within the horizon
  std::vector<PositionFix> fixes;              // sorted by (timestamp, mmsi)
  std::vector<ais::StaticReport> statics;

  double total_sailed_nmi() const {
    double s = 0.0;
    for (const auto& [m, d] : sailed_nmi) s += d;
    return s;
  }

  /// Stays lasting at least `min_dwell_s`, as a visit detector should report them.
  std::vector<PortVisit> detectable_itinerary(Epoch min_dwell_s) const {
    std::vector<PortVisit> out;
    for (const auto& v : itinerary)
      if (v.departure - v.arrival >= min_dwell_s) out.push_back(v);
    return out;
  }
};

namespace detail {

class Uniform {
 public:
  Uniform(std::uint64_t seed, std::uint32_t stream) : rng_(seed * 0x9E3779B97F4A7C15ULL + stream) {}
  double operator()() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 rng_;
};

struct Interval {
  Epoch begin = 0;
  const PortVisit* stay = nullptr;  // exactly one of stay / leg is set
  const Leg* leg = nullptr;
};

}  // namespace detail

/// Deterministic for a given scenario and seed; each vessel draws from its own stream.
inline Result simulate(const Scenario& scenario, std::uint64_t seed) {
  scenario.validate();
  Result r;
  r.scenario = scenario;
  r.seed = seed;
  const Epoch t0 = scenario.start;
  const Epoch t_end = scenario.end();

  struct Plan {
    std::uint32_t mmsi;
    std::vector<std::size_t> stays, legs;
  };
  std::vector<Plan> plans;
  int global = 0;
  for (const auto& fleet : scenario.fleets) {
    for (int i = 0; i < fleet.count; ++i, ++global) {
      const std::uint32_t mmsi = fleet.mmsi_base + static_cast<std::uint32_t>(i);
      r.vessels.push_back({mmsi, static_cast<std::uint32_t>(9000000 + global), fmt::format("{} {}", fleet.name, i),
                           fleet.type_code, fleet.hint, fleet.dwt, fleet.gt, fleet.teu});
      detail::Uniform u(seed, mmsi);
      const Epoch offset = static_cast<Epoch>(std::llround(u() * fleet.start_spread_hours * 3600.0));
      const bool lays_up = u() < fleet.layup_fraction && fleet.layup_day.has_value();
      const Epoch layup_at = t0 + static_cast<Epoch>(fleet.layup_day.value_or(0)) * kSecondsPerDay;

      Plan plan{mmsi, {}, {}};
      std::size_t at = static_cast<std::size_t>(global) % scenario.loop.size();
      std::optional<std::string> previous;
      double journey = 0.0;
      Epoch arrival = t0;
      Epoch departure = t0 + offset;
      while (true) {
        const bool stop = departure >= t_end || (lays_up && departure >= layup_at);
        if (stop) departure = t_end;
        if (departure > arrival || stop) {
          plan.stays.push_back(r.itinerary.size());
          r.itinerary.push_back({mmsi, scenario.loop[at], arrival, departure, previous, journey});
        }
        if (stop) break;
        const std::size_t next = (at + 1) % scenario.loop.size();
        Leg leg;
        leg.mmsi = mmsi;
        leg.src = scenario.loop[at];
        leg.dst = scenario.loop[next];
        leg.path = scenario.route(leg.src, leg.dst);
        const double total = geo::path_length_nmi(leg.path);
        const double dur = scenario.leg_seconds(leg.src, leg.dst, fleet.speed_knots);
        double cum = 0.0;
        leg.times.push_back(departure);
        for (std::size_t k = 1; k < leg.path.size(); ++k) {
          cum += geo::great_circle_nmi(leg.path[k - 1], leg.path[k]);
          const Epoch tk = departure + static_cast<Epoch>(std::llround(dur * cum / total));
          leg.times.push_back(std::max(tk, leg.times.back() + 1));
        }
        plan.legs.push_back(r.legs.size());
        r.legs.push_back(leg);
        if (leg.arrival() > t_end) break;
        previous = leg.src;
        journey = total;
        at = next;
        arrival = leg.arrival();
        const double dwell = fleet.dwell_hours * (0.75 + 0.5 * u()) * 3600.0;
        departure = arrival + std::max<Epoch>(1, static_cast<Epoch>(std::llround(dwell)));
      }
      plans.push_back(std::move(plan));

      ais::StaticReport st;
      st.mmsi = mmsi;
      st.imo_number = r.vessels.back().imo;
      st.callsign = fmt::format("SIM{}", global % 10000);
      st.name = boost::algorithm::to_upper_copy(r.vessels.back().name).substr(0, 20);
      st.ship_type_code = static_cast<std::uint8_t>(std::clamp(fleet.type_code, 0, 99));
      st.destination = boost::algorithm::to_upper_copy(scenario.loop[(static_cast<std::size_t>(global) + 1) %
                                                                     scenario.loop.size()]);
      st.timestamp = t0;
      r.statics.push_back(std::move(st));
    }
  }

  for (const auto& plan : plans) {
    double sailed = 0.0;
    std::vector<detail::Interval> timeline;
    for (auto s : plan.stays) timeline.push_back({r.itinerary[s].arrival, &r.itinerary[s], nullptr});
    for (auto l : plan.legs) {
      timeline.push_back({r.legs[l].departure(), nullptr, &r.legs[l]});
      sailed += r.legs[l].sailed_by(t_end);
    }
    std::sort(timeline.begin(), timeline.end(),
              [](const auto& a, const auto& b) { return a.begin < b.begin; });
    r.sailed_nmi[plan.mmsi] = sailed;

    std::set<Epoch> times;
    for (Epoch t = t0; t <= t_end; t += scenario.cadence_s) times.insert(t);
    times.insert(t_end);
    for (const auto& iv : timeline) times.insert(iv.begin);
    for (auto l : plan.legs)
      for (Epoch t : r.legs[l].times) times.insert(t);
    for (Epoch t : times) {
      if (t < t0 || t > t_end) continue;
      auto it = std::upper_bound(timeline.begin(), timeline.end(), t,
                                 [](Epoch v, const detail::Interval& iv) { return v < iv.begin; });
      if (it == timeline.begin()) continue;
      const auto& iv = *std::prev(it);
      PositionFix fix;
      if (iv.leg) {
        fix = iv.leg->state(t);
      } else {
        const auto& loc = scenario.port(iv.stay->port).location;
        fix.mmsi = plan.mmsi;
        fix.nav_status = ais::NavStatus::moored;
        fix.lat_deg = loc.lat;
        fix.lon_deg = loc.lon;
        fix.sog_knots = 0.0;
        fix.timestamp = t;
      }
      fix.utc_second = static_cast<std::uint8_t>(t % 60);
      r.fixes.push_back(ais::quantized(fix));
    }
  }
  std::sort(r.fixes.begin(), r.fixes.end(), [](const PositionFix& a, const PositionFix& b) {
    return std::tie(*a.timestamp, a.mmsi) < std::tie(*b.timestamp, b.mmsi);
  });

  const Epoch period_s = static_cast<Epoch>(scenario.period_days) * kSecondsPerDay;
  const auto n_periods = static_cast<std::size_t>(std::max<Epoch>(1, (t_end - t0 + period_s - 1) / period_s));
  std::vector<PortGraph> graphs(n_periods);
  for (auto& g : graphs)
    for (const auto& p : scenario.ports) g.add_port(p.id);
  for (const auto& v : r.itinerary) {
    if (!v.previous_port) continue;
    const auto k = std::min(n_periods - 1, static_cast<std::size_t>((v.arrival - t0) / period_s));
    graphs[k].add_journey(*v.previous_port, v.port, v.journey_nmi);
  }
  for (std::size_t k = 0; k < n_periods; ++k) {
    PeriodRow row;
    row.start = t0 + static_cast<Epoch>(k) * period_s;
    row.end = std::min(t_end, row.start + period_s);
    for (const auto& p : scenario.ports) row.visits[p.id] = port_visits(graphs[k], p.id);
    row.total_visits = graphs[k].total_visits();
    row.cnm_nmi = cnm_from_graph(graphs[k]);
    r.periods.push_back(std::move(row));
  }
  return r;
}

/// Time-ordered "<epoch>\t<sentence>" lines; static reports first, at the scenario start.
inline std::string nmea_feed(const Result& r) {
  std::string out;
  int seq = 0;
  for (const auto& st : r.statics) {
    for (const auto& s : ais::encode(st, 'A', seq)) out += fmt::format("{}\t{}\n", *st.timestamp, s);
    seq = (seq + 1) % 10;
  }
  for (const auto& f : r.fixes)
    for (const auto& s : ais::encode(f, f.mmsi % 2 ? 'B' : 'A')) out += fmt::format("{}\t{}\n", *f.timestamp, s);
  return out;
}

inline std::string fleet_csv(const Result& r) {
  std::string out = fleet_csv_header();
  for (const auto& v : r.vessels) out += fleet_csv_row(v);
  return out;
}

inline std::string ports_csv(const Scenario& sc) {
  std::string out = ports_csv_header();
  for (const auto& p : sc.ports) out += ports_csv_row(p);
  return out;
}

inline std::string pv_cnm_csv(const Result& r) {
  std::string out = "period,start,end,total_visits,cnm_nmi";
  for (const auto& p : r.scenario.ports) out += ",pv_" + p.id;
  out += '\n';
  for (std::size_t k = 0; k < r.periods.size(); ++k) {
    const auto& row = r.periods[k];
    out += fmt::format("{},{},{},{},{:.6f}", k, iso8601(row.start), iso8601(row.end), row.total_visits, row.cnm_nmi);
    for (const auto& p : r.scenario.ports) out += fmt::format(",{}", row.visits.at(p.id));
    out += '\n';
  }
  return out;
}

inline std::string itinerary_csv(const Result& r) {
  std::string out = "mmsi,port,arrival,departure,previous_port,journey_nmi\n";
  for (const auto& v : r.itinerary)
    out += csv::row(std::to_string(v.mmsi), v.port, iso8601(v.arrival), iso8601(v.departure),
                    v.previous_port.value_or(""), fmt::format("{:.6f}", v.journey_nmi));
  return out;
}

inline nlohmann::ordered_json truth_json(const Result& r) {
  nlohmann::ordered_json per_vessel = nlohmann::ordered_json::object();
  for (const auto& [m, d] : r.sailed_nmi) per_vessel[std::to_string(m)] = d;
  return {{"scenario", r.scenario.name},
          {"seed", r.seed},
          {"start", iso8601(r.scenario.start)},
          {"end", iso8601(r.scenario.end())},
          {"vessels", r.vessels.size()},
          {"fixes", r.fixes.size()},
          {"stays", r.itinerary.size()},
          {"sailed_nmi", r.total_sailed_nmi()},
          {"sailed_nmi_by_vessel", per_vessel}};
}

}  // namespace shipmob::sim
