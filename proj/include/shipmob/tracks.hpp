#pragma once

// Cleaning, per-vessel track assembly and active/idle labelling.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string_view>
#include <tuple>
#include <vector>

#include "shipmob/ais/messages.hpp"
#include "shipmob/fleet.hpp"
#include "shipmob/geo.hpp"
#include "shipmob/time.hpp"

namespace shipmob {

using ais::NavStatus;
using ais::PositionFix;

struct TrackConfig {
  double gap_hours = 24.0;
  double speed_gate_knots = 50.0;
  double idle_speed_knots = 2.0;
};

struct CleaningStats {
  std::size_t input = 0;
  std::size_t retained = 0;
  std::size_t invalid_mmsi = 0;
  std::size_t unknown_vessel = 0;
  std::size_t excluded_vessel = 0;
  std::size_t untimed = 0;
  std::size_t no_position = 0;
  std::size_t duplicate = 0;
  std::size_t speed_gate = 0;
  std::vector<std::uint32_t> unknown_mmsis;  // distinct, ascending

  std::size_t dropped() const {
    return invalid_mmsi + unknown_vessel + excluded_vessel + untimed + no_position + duplicate + speed_gate;
  }
};

inline geo::LatLon position_of(const PositionFix& f) { return {*f.lat_deg, *f.lon_deg}; }

namespace detail {

/// Total order used to make cleaning independent of input order.
inline bool fix_less(const PositionFix& a, const PositionFix& b) {
  auto key = [](const PositionFix& f) {
    return std::make_tuple(f.mmsi, f.timestamp.value_or(0), f.lat_deg.value_or(-999), f.lon_deg.value_or(-999),
                           f.sog_knots.value_or(-1), f.cog_deg.value_or(-1),
                           static_cast<int>(f.heading_deg.value_or(9999)), static_cast<int>(f.nav_status),
                           static_cast<int>(f.msg_type), static_cast<int>(f.utc_second));
  };
  return key(a) < key(b);
}

inline double implied_speed_knots(const PositionFix& from, const PositionFix& to) {
  const double hours = static_cast<double>(*to.timestamp - *from.timestamp) / 3600.0;
  return geo::great_circle_nmi(position_of(from), position_of(to)) / hours;
}

}  // namespace detail

struct CleanResult {
  std::vector<PositionFix> fixes;  // sorted by (mmsi, timestamp)
  CleaningStats stats;
};

/// Drops, in this order: invalid MMSIs, vessels missing from the registry, vessels the registry
/// excludes, untimed fixes, fixes without a position, repeated (mmsi, epoch) fixes, and fixes whose
/// implied speed from the previous retained fix of the same vessel exceeds the gate.
inline CleanResult clean(std::vector<PositionFix> fixes, const FleetRegistry& registry, const TrackConfig& cfg = {}) {
  CleanResult out;
  auto& st = out.stats;
  st.input = fixes.size();

  std::vector<PositionFix> candidates;
  candidates.reserve(fixes.size());
  for (auto& f : fixes) {
    if (!ais::is_valid_mmsi(f.mmsi)) {
      ++st.invalid_mmsi;
      continue;
    }
    const VesselProfile* p = registry.lookup(f.mmsi);
    if (!p) {
      ++st.unknown_vessel;
      st.unknown_mmsis.push_back(f.mmsi);
      continue;
    }
    if (!p->included) {
      ++st.excluded_vessel;
      continue;
    }
    if (!f.timestamp) {
      ++st.untimed;
      continue;
    }
    if (!f.has_position()) {
      ++st.no_position;
      continue;
    }
    candidates.push_back(std::move(f));
  }
  std::sort(st.unknown_mmsis.begin(), st.unknown_mmsis.end());
  st.unknown_mmsis.erase(std::unique(st.unknown_mmsis.begin(), st.unknown_mmsis.end()), st.unknown_mmsis.end());
  std::sort(candidates.begin(), candidates.end(), detail::fix_less);

  out.fixes.reserve(candidates.size());
  const PositionFix* last = nullptr;
  for (auto& f : candidates) {
    if (last && last->mmsi == f.mmsi) {
      if (*last->timestamp == *f.timestamp) {
        ++st.duplicate;
        continue;
      }
      if (detail::implied_speed_knots(*last, f) > cfg.speed_gate_knots) {
        ++st.speed_gate;
        continue;
      }
    }
    out.fixes.push_back(std::move(f));
    last = &out.fixes.back();
  }
  st.retained = out.fixes.size();
  return out;
}

/// Segment between two consecutive fixes of one track.
struct Tracklet {
  geo::LatLon start;
  geo::LatLon end;
  Epoch start_epoch = 0;
  Epoch end_epoch = 0;
  double length_nmi = 0.0;

  double duration_s() const { return static_cast<double>(end_epoch - start_epoch); }
  double implied_speed_knots() const { return duration_s() > 0 ? length_nmi / (duration_s() / 3600.0) : 0.0; }
};

struct Track {
  std::uint32_t mmsi = 0;
  int track_id = 0;
  std::vector<PositionFix> fixes;  // strictly increasing timestamps

  Epoch start() const { return *fixes.front().timestamp; }
  Epoch end() const { return *fixes.back().timestamp; }

  Tracklet tracklet(std::size_t i) const {
    const auto& a = fixes[i];
    const auto& b = fixes[i + 1];
    return {position_of(a), position_of(b), *a.timestamp, *b.timestamp,
            geo::great_circle_nmi(position_of(a), position_of(b))};
  }

  std::vector<Tracklet> tracklets() const {
    std::vector<Tracklet> out;
    if (fixes.size() > 1) out.reserve(fixes.size() - 1);
    for (std::size_t i = 0; i + 1 < fixes.size(); ++i) out.push_back(tracklet(i));
    return out;
  }

  double length_nmi() const {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < fixes.size(); ++i) total += tracklet(i).length_nmi;
    return total;
  }
};

/// Sorts per vessel and starts a new track wherever consecutive fixes are more than `gap_hours`
/// apart. Input must be cleaned (timed, positioned); repeated epochs keep the first fix.
inline std::vector<Track> build_tracks(std::vector<PositionFix> fixes, double gap_hours = 24.0) {
  std::sort(fixes.begin(), fixes.end(), detail::fix_less);
  const auto gap_s = static_cast<Epoch>(gap_hours * 3600.0);
  std::vector<Track> tracks;
  for (auto& f : fixes) {
    if (!f.timestamp || !f.has_position()) continue;
    const bool same_vessel = !tracks.empty() && tracks.back().mmsi == f.mmsi;
    if (same_vessel && *f.timestamp == tracks.back().end()) continue;
    if (!same_vessel || *f.timestamp - tracks.back().end() > gap_s) {
      Track t;
      t.mmsi = f.mmsi;
      t.track_id = same_vessel ? tracks.back().track_id + 1 : 0;
      tracks.push_back(std::move(t));
    }
    tracks.back().fixes.push_back(std::move(f));
  }
  return tracks;
}

enum class Activity { active, idle, unknown };

constexpr std::string_view to_string(Activity a) {
  switch (a) {
    case Activity::active: return "active";
    case Activity::idle: return "idle";
    case Activity::unknown: return "unknown";
  }
  return "unknown";
}

constexpr bool is_idle_status(NavStatus s) {
  return s == NavStatus::at_anchor || s == NavStatus::not_under_command || s == NavStatus::moored ||
         s == NavStatus::aground;
}

/// Status wins over speed; a fix with neither speed nor a defined status is unknown.
inline Activity fix_activity(const PositionFix& f, double idle_speed_knots = 2.0) {
  if (is_idle_status(f.nav_status)) return Activity::idle;
  if (f.sog_knots) return *f.sog_knots < idle_speed_knots ? Activity::idle : Activity::active;
  return f.nav_status == NavStatus::not_defined ? Activity::unknown : Activity::active;
}

/// Run of same-status fixes. Covers [start, end): each episode ends where the next one starts,
/// the last one at the track's final fix.
struct ActivityEpisode {
  std::uint32_t mmsi = 0;
  Activity status = Activity::unknown;
  Epoch start = 0;
  Epoch end = 0;
  std::size_t first_fix = 0;  // indices into the track's fixes
  std::size_t last_fix = 0;

  Epoch duration_s() const { return end - start; }
};

inline std::vector<ActivityEpisode> label_activity(const Track& track, double idle_speed_knots = 2.0) {
  std::vector<ActivityEpisode> out;
  for (std::size_t i = 0; i < track.fixes.size(); ++i) {
    const Activity a = fix_activity(track.fixes[i], idle_speed_knots);
    const Epoch t = *track.fixes[i].timestamp;
    if (!out.empty() && out.back().status == a) {
      out.back().last_fix = i;
      out.back().end = t;
      continue;
    }
    if (!out.empty()) out.back().end = t;
    out.push_back({track.mmsi, a, t, t, i, i});
  }
  return out;
}

/// A track together with its episodes.
struct LabeledTrack {
  Track track;
  std::vector<ActivityEpisode> episodes;

  /// Status of the episode containing `t` (episodes start at fix epochs).
  Activity status_at(Epoch t) const {
    auto it = std::upper_bound(episodes.begin(), episodes.end(), t,
                               [](Epoch v, const ActivityEpisode& e) { return v < e.start; });
    if (it == episodes.begin()) return Activity::unknown;
    return std::prev(it)->status;
  }
};

/// Tracklets whose start fix is active: the ones that count towards CNM.
inline std::vector<Tracklet> active_tracklets(const LabeledTrack& lt) {
  std::vector<Tracklet> out;
  for (std::size_t i = 0; i + 1 < lt.track.fixes.size(); ++i)
    if (lt.status_at(*lt.track.fixes[i].timestamp) == Activity::active) out.push_back(lt.track.tracklet(i));
  return out;
}

inline std::vector<LabeledTrack> label_tracks(std::vector<Track> tracks, double idle_speed_knots = 2.0) {
  std::vector<LabeledTrack> out;
  out.reserve(tracks.size());
  for (auto& t : tracks) {
    auto episodes = label_activity(t, idle_speed_knots);
    out.push_back({std::move(t), std::move(episodes)});
  }
  return out;
}

}  // namespace shipmob
