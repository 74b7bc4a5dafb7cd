#pragma once

// Port visits, the directed port graph, PV counts and ego networks.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "shipmob/geo.hpp"
#include "shipmob/io.hpp"
#include "shipmob/time.hpp"
#include "shipmob/tracks.hpp"

namespace shipmob {

struct Port {
  std::string id;
  std::string name;
  std::string country;
  geo::LatLon location;
  double radius_nmi = 10.0;
};

inline void validate(const Port& p) {
  if (p.id.empty()) throw DataError("port id is empty");
  if (!geo::is_valid(p.location)) throw DataError(fmt::format("port {}: invalid location", p.id));
  if (!(p.radius_nmi > 0.0)) throw DataError(fmt::format("port {}: radius must be positive", p.id));
}

inline std::string ports_csv_header() { return "id,name,country,lat,lon,radius_nmi\n"; }

inline std::string ports_csv_row(const Port& p) {
  return csv::row(p.id, p.name, p.country, fmt::format("{}", p.location.lat), fmt::format("{}", p.location.lon),
                  fmt::format("{}", p.radius_nmi));
}

inline std::vector<Port> read_ports(std::istream& in, std::string source = "<ports>") {
  csv::Reader reader(in, source);
  reader.require({"id", "lat", "lon"});
  const auto ci = *reader.column("id"), clat = *reader.column("lat"), clon = *reader.column("lon");
  const auto cname = reader.column("name"), ccountry = reader.column("country"), crad = reader.column("radius_nmi");
  std::vector<Port> ports;
  std::set<std::string> seen;
  std::vector<std::string> f;
  while (reader.next(f)) {
    Port p;
    p.id = f[ci];
    if (cname) p.name = f[*cname];
    if (ccountry) p.country = f[*ccountry];
    const auto lat = csv::parse_number<double>(f[clat]);
    const auto lon = csv::parse_number<double>(f[clon]);
    if (!lat || !lon) throw DataError(fmt::format("{}: bad coordinates", reader.where()));
    p.location = {*lat, *lon};
    if (crad && !f[*crad].empty()) {
      const auto r = csv::parse_number<double>(f[*crad]);
      if (!r) throw DataError(fmt::format("{}: bad radius", reader.where()));
      p.radius_nmi = *r;
    }
    validate(p);
    if (!seen.insert(p.id).second) throw DataError(fmt::format("{}: duplicate port '{}'", reader.where(), p.id));
    ports.push_back(std::move(p));
  }
  return ports;
}

inline std::vector<Port> load_ports(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_ports(in, path.string());
}

/// Nearest port whose disk contains `p`.
inline const Port* port_at(std::span<const Port> ports, geo::LatLon p) {
  const Port* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& port : ports) {
    const double d = geo::great_circle_nmi(p, port.location);
    if (d <= port.radius_nmi && d < best_d) {
      best = &port;
      best_d = d;
    }
  }
  return best;
}

struct PortVisit {
  std::uint32_t mmsi = 0;
  std::string port;
  Epoch arrival = 0;
  Epoch departure = 0;
  std::optional<std::string> previous_port;
  double journey_nmi = 0.0;  // navigated from the previous port; 0 for the first visit

  friend bool operator==(const PortVisit&, const PortVisit&) = default;
};

/// A visit is an idle episode lasting at least `min_dwell_s` whose fix centroid lies inside a
/// port disk (nearest centre wins). The journey length is the active navigation between the
/// previous departure and this arrival, or the port-to-port distance when nothing was tracked.
inline std::vector<PortVisit> detect_visits(std::span<const LabeledTrack> tracks, std::span<const Port> ports,
                                            Epoch min_dwell_s = 3600) {
  std::map<std::uint32_t, std::vector<const LabeledTrack*>> by_vessel;
  for (const auto& t : tracks) by_vessel[t.track.mmsi].push_back(&t);

  std::map<std::string, const Port*> index;
  for (const auto& p : ports) index[p.id] = &p;

  std::vector<PortVisit> out;
  for (auto& [mmsi, vt] : by_vessel) {
    std::sort(vt.begin(), vt.end(),
              [](const LabeledTrack* a, const LabeledTrack* b) { return a->track.start() < b->track.start(); });
    std::vector<PortVisit> visits;
    std::vector<Tracklet> moves;
    for (const auto* lt : vt) {
      const auto active = active_tracklets(*lt);
      moves.insert(moves.end(), active.begin(), active.end());
      for (const auto& e : lt->episodes) {
        if (e.status != Activity::idle || e.duration_s() < min_dwell_s) continue;
        std::vector<geo::LatLon> pts;
        for (std::size_t i = e.first_fix; i <= e.last_fix; ++i) pts.push_back(position_of(lt->track.fixes[i]));
        const Port* port = port_at(ports, geo::centroid(pts));
        if (!port) continue;
        visits.push_back({mmsi, port->id, e.start, e.end, std::nullopt, 0.0});
      }
    }
    for (std::size_t k = 1; k < visits.size(); ++k) {
      auto& v = visits[k];
      const auto& prev = visits[k - 1];
      v.previous_port = prev.port;
      double d = 0.0;
      for (const auto& m : moves)
        if (m.start_epoch >= prev.departure && m.end_epoch <= v.arrival) d += m.length_nmi;
      if (d <= 0.0) d = geo::great_circle_nmi(index.at(prev.port)->location, index.at(v.port)->location);
      v.journey_nmi = d;
    }
    out.insert(out.end(), visits.begin(), visits.end());
  }
  return out;
}

/// Directed graph over ports; edge (src -> dst) holds one distance per journey from src to dst.
class PortGraph {
 public:
  using Edge = std::pair<std::string, std::string>;

  void add_port(const std::string& id) { nodes_.insert(id); }

  void add_journey(const std::string& src, const std::string& dst, double distance_nmi) {
    if (!(distance_nmi > 0.0)) throw std::invalid_argument("journey distance must be positive");
    nodes_.insert(src);
    nodes_.insert(dst);
    edges_[{src, dst}].push_back(distance_nmi);
  }

  bool has_port(const std::string& id) const { return nodes_.contains(id); }
  const std::set<std::string>& nodes() const { return nodes_; }
  const std::map<Edge, std::vector<double>>& edges() const { return edges_; }

  /// V_pp': number of journeys into `dst` from `src`.
  std::size_t visits(const std::string& dst, const std::string& src) const {
    auto it = edges_.find({src, dst});
    return it == edges_.end() ? 0 : it->second.size();
  }

  std::size_t total_visits() const {
    std::size_t n = 0;
    for (const auto& [e, d] : edges_) n += d.size();
    return n;
  }

  static PortGraph from_visits(std::span<const PortVisit> visits, std::span<const Port> ports = {}) {
    PortGraph g;
    for (const auto& p : ports) g.add_port(p.id);
    for (const auto& v : visits) {
      g.add_port(v.port);
      if (v.previous_port && v.journey_nmi > 0.0) g.add_journey(*v.previous_port, v.port, v.journey_nmi);
    }
    return g;
  }

 private:
  std::set<std::string> nodes_;
  std::map<Edge, std::vector<double>> edges_;
};

/// V_p: all journeys ending at `port`.
inline std::size_t port_visits(const PortGraph& g, const std::string& port) {
  if (!g.has_port(port)) throw std::invalid_argument(fmt::format("unknown port '{}'", port));
  std::size_t n = 0;
  for (const auto& [e, d] : g.edges())
    if (e.second == port) n += d.size();
  return n;
}

/// Sum of every journey distance on every edge.
inline double cnm_from_graph(const PortGraph& g) {
  double total = 0.0;
  for (const auto& [e, d] : g.edges())
    for (double x : d) total += x;
  return total;
}

inline double mean_distance(const std::vector<double>& d) {
  double s = 0.0;
  for (double x : d) s += x;
  return d.empty() ? 0.0 : s / static_cast<double>(d.size());
}

/// Sum over edges of visit count times mean distance.
inline double cnm_closed_form(const PortGraph& g) {
  double total = 0.0;
  for (const auto& [e, d] : g.edges()) total += static_cast<double>(d.size()) * mean_distance(d);
  return total;
}

struct EgoNetwork {
  PortGraph graph;
  std::map<std::string, int> hops;  // node -> distance from the ego
};

/// Nodes within `k` hops of `ego` along edge direction (or either direction when `undirected`),
/// with every edge of the full graph between them.
inline EgoNetwork ego_network(const PortGraph& g, const std::string& ego, int k, bool undirected = false) {
  if (!g.has_port(ego)) throw std::invalid_argument(fmt::format("unknown port '{}'", ego));
  if (k < 0) throw std::invalid_argument("hop count must be non-negative");
  std::map<std::string, std::set<std::string>> adj;
  for (const auto& [e, d] : g.edges()) {
    adj[e.first].insert(e.second);
    if (undirected) adj[e.second].insert(e.first);
  }
  EgoNetwork out;
  out.hops[ego] = 0;
  std::deque<std::string> queue{ego};
  while (!queue.empty()) {
    const std::string cur = queue.front();
    queue.pop_front();
    const int h = out.hops[cur];
    if (h == k) continue;
    for (const auto& next : adj[cur])
      if (out.hops.emplace(next, h + 1).second) queue.push_back(next);
  }
  for (const auto& [id, h] : out.hops) out.graph.add_port(id);
  for (const auto& [e, d] : g.edges())
    if (out.hops.contains(e.first) && out.hops.contains(e.second))
      for (double x : d) out.graph.add_journey(e.first, e.second, x);
  return out;
}

inline std::string edges_csv(const PortGraph& g) {
  std::string out = "src,dst,visits,mean_distance_nmi\n";
  for (const auto& [e, d] : g.edges())
    out += csv::row(e.first, e.second, std::to_string(d.size()), fmt::format("{:.6f}", mean_distance(d)));
  return out;
}

/// Reads `edges_csv` output back; each edge gets `visits` journeys of its mean distance.
inline PortGraph read_edges(std::istream& in, std::string source = "<edges>") {
  csv::Reader reader(in, source);
  reader.require({"src", "dst", "visits", "mean_distance_nmi"});
  const auto cs = *reader.column("src"), cd = *reader.column("dst"), cv = *reader.column("visits"),
             cm = *reader.column("mean_distance_nmi");
  PortGraph g;
  std::vector<std::string> f;
  while (reader.next(f)) {
    const auto v = csv::parse_number<std::size_t>(f[cv]);
    const auto m = csv::parse_number<double>(f[cm]);
    if (f[cs].empty() || f[cd].empty() || !v || !m || (*v > 0 && !(*m > 0.0)))
      throw DataError(fmt::format("{}: bad edge row", reader.where()));
    g.add_port(f[cs]);
    g.add_port(f[cd]);
    for (std::size_t i = 0; i < *v; ++i) g.add_journey(f[cs], f[cd], *m);
  }
  return g;
}

inline std::string visits_csv(std::span<const PortVisit> visits) {
  std::string out = "mmsi,port,arrival,departure,previous_port,journey_nmi\n";
  for (const auto& v : visits)
    out += csv::row(std::to_string(v.mmsi), v.port, iso8601(v.arrival), iso8601(v.departure),
                    v.previous_port.value_or(""), fmt::format("{:.6f}", v.journey_nmi));
  return out;
}

}  // namespace shipmob
