#pragma once

// Mobility indicators: cumulated navigated miles (CNM), daily active/idle
// fleet counts, time-weighted mean speed, and the same-month growth forecast.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <fmt/format.h>

#include "shipmob/fleet.hpp"
#include "shipmob/geo.hpp"
#include "shipmob/time.hpp"
#include "shipmob/tracks.hpp"

namespace shipmob {

using geo::great_circle_nmi;

enum class Granularity { daily, monthly };

constexpr std::string_view to_string(Granularity g) { return g == Granularity::daily ? "daily" : "monthly"; }

inline constexpr std::string_view kTotalGroup = "total";

struct IndicatorPoint {
  std::string date;  // YYYY-MM-DD or YYYY-MM
  double cnm_nmi = 0.0;
  double n_active = 0.0;  // monthly points hold the mean of the daily counts
  double n_idle = 0.0;
  double n_unknown = 0.0;
  std::optional<double> mean_speed_knots;
};

struct IndicatorSeries {
  std::string group;  // "total", "<category>" or "<category>/<size class>"
  Granularity granularity = Granularity::daily;
  std::vector<IndicatorPoint> points;  // sorted by date, unique

  const IndicatorPoint* at(std::string_view date) const {
    auto it = std::lower_bound(points.begin(), points.end(), date,
                               [](const IndicatorPoint& p, std::string_view d) { return p.date < d; });
    return it != points.end() && it->date == date ? &*it : nullptr;
  }
};

/// Groups a vessel contributes to: the fleet total, its category, and its category/size class.
inline std::array<std::string, 3> groups_of(const VesselProfile& p) {
  return {std::string(kTotalGroup), std::string(to_string(p.category)), p.group()};
}

struct DateRange {
  Epoch first_day = 0;  // start of the first UTC day
  Epoch last_day = 0;   // start of the last UTC day (inclusive)
};

namespace detail {

struct DayCell {
  double cnm = 0.0;
  double counts[3] = {0.0, 0.0, 0.0};  // indexed by Activity
  double speed_time = 0.0;              // sum of sog * seconds
  double seconds = 0.0;
};

using DayTable = std::map<std::string, std::map<Epoch, DayCell>>;  // group -> day start -> cell

inline std::optional<DateRange> observed_range(std::span<const LabeledTrack> tracks) {
  std::optional<DateRange> r;
  for (const auto& lt : tracks) {
    if (lt.track.fixes.empty()) continue;
    const Epoch a = day_start(lt.track.start());
    const Epoch b = day_start(lt.track.end());
    if (!r) r = DateRange{a, b};
    r->first_day = std::min(r->first_day, a);
    r->last_day = std::max(r->last_day, b);
  }
  return r;
}

/// Adds CNM of active tracklets, keyed by the UTC day of their start fix.
inline void accumulate_cnm(DayTable& table, std::span<const LabeledTrack> tracks, const FleetRegistry& registry) {
  for (const auto& lt : tracks) {
    const VesselProfile* p = registry.lookup(lt.track.mmsi);
    if (!p) continue;
    const auto groups = groups_of(*p);
    for (std::size_t i = 0; i + 1 < lt.track.fixes.size(); ++i) {
      const Epoch t = *lt.track.fixes[i].timestamp;
      if (lt.status_at(t) != Activity::active) continue;
      const double len = lt.track.tracklet(i).length_nmi;
      const Epoch day = day_start(t);
      for (const auto& g : groups) table[g][day].cnm += len;
    }
  }
}

/// Time-weighted SOG of active fixes; each fix holds until the next fix of its track.
inline void accumulate_speed(DayTable& table, std::span<const LabeledTrack> tracks, const FleetRegistry& registry) {
  for (const auto& lt : tracks) {
    const VesselProfile* p = registry.lookup(lt.track.mmsi);
    if (!p) continue;
    const auto groups = groups_of(*p);
    const auto& fx = lt.track.fixes;
    for (std::size_t i = 0; i + 1 < fx.size(); ++i) {
      const Epoch t = *fx[i].timestamp;
      if (!fx[i].sog_knots || lt.status_at(t) != Activity::active) continue;
      const double dt = static_cast<double>(*fx[i + 1].timestamp - t);
      const Epoch day = day_start(t);
      for (const auto& g : groups) {
        auto& cell = table[g][day];
        cell.speed_time += *fx[i].sog_knots * dt;
        cell.seconds += dt;
      }
    }
  }
}

/// Status of one vessel on each day it was observed: majority of observed seconds, falling back
/// to a majority of fix votes when the day holds only instantaneous observations.
inline std::map<Epoch, Activity> vessel_day_status(std::span<const LabeledTrack* const> tracks) {
  struct Tally {
    double seconds[3] = {0, 0, 0};
    double votes[3] = {0, 0, 0};
  };
  std::map<Epoch, Tally> days;
  for (const LabeledTrack* lt : tracks) {
    for (const auto& e : lt->episodes) {
      const auto k = static_cast<std::size_t>(e.status);
      Epoch t = e.start;
      while (t < e.end) {
        const Epoch d = day_start(t);
        const Epoch stop = std::min(e.end, d + kSecondsPerDay);
        days[d].seconds[k] += static_cast<double>(stop - t);
        t = stop;
      }
      for (std::size_t i = e.first_fix; i <= e.last_fix; ++i)
        days[day_start(*lt->track.fixes[i].timestamp)].votes[k] += 1.0;
    }
  }
  std::map<Epoch, Activity> out;
  for (const auto& [day, tally] : days) {
    const double* w = (tally.seconds[0] + tally.seconds[1] + tally.seconds[2] > 0) ? tally.seconds : tally.votes;
    std::size_t best = 0;
    for (std::size_t k = 1; k < 3; ++k)
      if (w[k] > w[best]) best = k;
    out[day] = static_cast<Activity>(best);
  }
  return out;
}

/// Daily active/idle/unknown counts over every included vessel of the registry.
inline void accumulate_counts(DayTable& table, std::span<const LabeledTrack> tracks, const FleetRegistry& registry,
                              DateRange range) {
  std::map<std::uint32_t, std::vector<const LabeledTrack*>> by_vessel;
  for (const auto& lt : tracks) by_vessel[lt.track.mmsi].push_back(&lt);
  for (const VesselProfile* p : registry.profiles()) {
    if (!p->included) continue;
    std::map<Epoch, Activity> status;
    if (auto it = by_vessel.find(p->mmsi); it != by_vessel.end()) status = vessel_day_status(it->second);
    const auto groups = groups_of(*p);
    for (Epoch day = range.first_day; day <= range.last_day; day += kSecondsPerDay) {
      auto it = status.find(day);
      const Activity a = it == status.end() ? Activity::unknown : it->second;
      for (const auto& g : groups) table[g][day].counts[static_cast<std::size_t>(a)] += 1.0;
    }
  }
}

inline std::vector<IndicatorSeries> to_series(const DayTable& table, bool with_cnm, bool with_counts,
                                              bool with_speed) {
  std::vector<IndicatorSeries> out;
  for (const auto& [group, days] : table) {
    IndicatorSeries daily{group, Granularity::daily, {}};
    IndicatorSeries monthly{group, Granularity::monthly, {}};
    struct MonthAcc {
      double cnm = 0, counts[3] = {0, 0, 0}, speed_time = 0, seconds = 0, ndays = 0;
    };
    std::map<std::string, MonthAcc> months;
    for (const auto& [day, cell] : days) {
      IndicatorPoint p;
      p.date = date_string(day);
      if (with_cnm) p.cnm_nmi = cell.cnm;
      if (with_counts) {
        p.n_active = cell.counts[0];
        p.n_idle = cell.counts[1];
        p.n_unknown = cell.counts[2];
      }
      if (with_speed && cell.seconds > 0) p.mean_speed_knots = cell.speed_time / cell.seconds;
      daily.points.push_back(p);

      auto& m = months[month_string(day)];
      m.cnm += cell.cnm;
      for (int k = 0; k < 3; ++k) m.counts[k] += cell.counts[k];
      m.speed_time += cell.speed_time;
      m.seconds += cell.seconds;
      m.ndays += 1;
    }
    for (const auto& [month, m] : months) {
      IndicatorPoint p;
      p.date = month;
      if (with_cnm) p.cnm_nmi = m.cnm;
      if (with_counts) {
        p.n_active = m.counts[0] / m.ndays;
        p.n_idle = m.counts[1] / m.ndays;
        p.n_unknown = m.counts[2] / m.ndays;
      }
      if (with_speed && m.seconds > 0) p.mean_speed_knots = m.speed_time / m.seconds;
      monthly.points.push_back(p);
    }
    out.push_back(std::move(daily));
    out.push_back(std::move(monthly));
  }
  return out;
}

inline std::vector<IndicatorSeries> select(std::vector<IndicatorSeries> all, Granularity g) {
  std::erase_if(all, [g](const IndicatorSeries& s) { return s.granularity != g; });
  return all;
}

}  // namespace detail

/// CNM per group: lengths of tracklets whose start fix lies in an active episode, bucketed by the
/// UTC date of that fix. Monthly values are sums of the daily ones.
inline std::vector<IndicatorSeries> cnm(std::span<const LabeledTrack> tracks, const FleetRegistry& registry,
                                        Granularity bucket) {
  detail::DayTable table;
  detail::accumulate_cnm(table, tracks, registry);
  return detail::select(detail::to_series(table, true, false, false), bucket);
}

/// Per-day vessel status counts (majority of observed time; unobserved days are unknown).
/// Monthly values are means of the daily counts.
inline std::vector<IndicatorSeries> activity_counts(std::span<const LabeledTrack> tracks,
                                                    const FleetRegistry& registry, Granularity bucket,
                                                    std::optional<DateRange> range = std::nullopt) {
  if (!range) range = detail::observed_range(tracks);
  if (!range) return {};
  detail::DayTable table;
  detail::accumulate_counts(table, tracks, registry, *range);
  return detail::select(detail::to_series(table, false, true, false), bucket);
}

/// Time-weighted mean SOG of active fixes; buckets without active time have no value.
inline std::vector<IndicatorSeries> mean_speed(std::span<const LabeledTrack> tracks, const FleetRegistry& registry,
                                               Granularity bucket) {
  detail::DayTable table;
  detail::accumulate_speed(table, tracks, registry);
  auto series = detail::select(detail::to_series(table, false, false, true), bucket);
  for (auto& s : series) std::erase_if(s.points, [](const IndicatorPoint& p) { return !p.mean_speed_knots; });
  return series;
}

/// All indicators in one pass, daily and monthly, sorted by (group, granularity).
inline std::vector<IndicatorSeries> compute_indicators(std::span<const LabeledTrack> tracks,
                                                       const FleetRegistry& registry,
                                                       std::optional<DateRange> range = std::nullopt) {
  if (!range) range = detail::observed_range(tracks);
  detail::DayTable table;
  detail::accumulate_cnm(table, tracks, registry);
  detail::accumulate_speed(table, tracks, registry);
  if (range) detail::accumulate_counts(table, tracks, registry, *range);
  return detail::to_series(table, true, true, true);
}

/// Next value assuming the mean year-over-year increment persists:
/// y_n + (y_n - y_1) / (n - 1).
inline double forecast(std::span<const double> history) {
  if (history.size() < 2) throw std::invalid_argument("forecast needs at least two history values");
  const double n = static_cast<double>(history.size());
  return history.back() + (history.back() - history.front()) / (n - 1.0);
}

/// Percent change of `actual` relative to `forecast_value`.
inline double delta_pct(double forecast_value, double actual) {
  if (!(forecast_value > 0.0)) throw std::invalid_argument("forecast must be positive");
  return 100.0 * (actual - forecast_value) / forecast_value;
}

inline double round_to(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(v * scale) / scale;
}

struct MonthlyValue {
  std::string group;
  int year = 0;
  int month = 0;
  double value = 0.0;
};

struct ForecastPoint {
  std::string group;
  std::string month;             // YYYY-MM of the forecast year
  std::vector<double> history;   // same month, consecutive earlier years, oldest first
  double forecast_value = 0.0;
  std::optional<double> actual;
  std::optional<double> delta_pct;
};

/// Forecasts `target_year` for every (group, month) with at least two earlier years of history.
inline std::vector<ForecastPoint> build_forecasts(std::span<const MonthlyValue> values, int target_year) {
  std::map<std::pair<std::string, int>, std::map<int, double>> table;
  for (const auto& v : values) table[{v.group, v.month}][v.year] = v.value;
  std::vector<ForecastPoint> out;
  for (const auto& [key, years] : table) {
    ForecastPoint fp;
    fp.group = key.first;
    fp.month = fmt::format("{:04}-{:02}", target_year, key.second);
    for (const auto& [year, value] : years)
      if (year < target_year) fp.history.push_back(value);
    if (fp.history.size() < 2) continue;
    fp.forecast_value = forecast(fp.history);
    if (auto it = years.find(target_year); it != years.end()) {
      fp.actual = it->second;
      if (fp.forecast_value > 0.0) fp.delta_pct = delta_pct(fp.forecast_value, it->second);
    }
    out.push_back(std::move(fp));
  }
  return out;
}

/// Monthly CNM values of the "total", category and size-class series, for forecasting.
inline std::vector<MonthlyValue> monthly_cnm_values(std::span<const IndicatorSeries> series) {
  std::vector<MonthlyValue> out;
  for (const auto& s : series) {
    if (s.granularity != Granularity::monthly) continue;
    for (const auto& p : s.points) {
      const auto y = csv::parse_number<int>(std::string_view(p.date).substr(0, 4));
      const auto m = csv::parse_number<int>(std::string_view(p.date).substr(5, 2));
      if (y && m) out.push_back({s.group, *y, *m, p.cnm_nmi});
    }
  }
  return out;
}

}  // namespace shipmob
