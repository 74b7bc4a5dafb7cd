#include <fstream>
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "shipmob/metrics.hpp"
#include "shipmob/pipeline.hpp"
#include "support.hpp"

using namespace shipmob;

namespace {

constexpr Epoch kDay0 = 1583020800;  // 2020-03-01

PositionFix fix(std::uint32_t mmsi, Epoch t, double lat, double lon, double sog,
                NavStatus status = NavStatus::under_way_engine) {
  PositionFix f;
  f.mmsi = mmsi;
  f.timestamp = t;
  f.lat_deg = lat;
  f.lon_deg = lon;
  f.sog_knots = sog;
  f.nav_status = status;
  return f;
}

struct Fixture {
  FleetRegistry registry;
  std::vector<LabeledTrack> tracks;
};

// Vessel A: container, sails 0.1 deg north per hour for 3 h, then moors. Vessel B: dry bulk,
// moored all day. Vessel C: included tanker never seen.
Fixture build() {
  Fixture fx;
  const auto scheme = SizeClassScheme::defaults();
  fx.registry.add(classify({244000001, 1, "A", 71, "container", 50000, 0, 4000}, scheme));
  fx.registry.add(classify({244000002, 2, "B", 70, "bulk", 50000, 0, 0}, scheme));
  fx.registry.add(classify({244000003, 3, "C", 80, "", 150000, 0, 0}, scheme));
  std::vector<PositionFix> fixes;
  for (int h = 0; h <= 3; ++h) fixes.push_back(fix(244000001, kDay0 + h * 3600, 0.1 * h, 0, 6.0));
  fixes.push_back(fix(244000001, kDay0 + 4 * 3600, 0.3, 0, 0.0, NavStatus::moored));
  fixes.push_back(fix(244000001, kDay0 + 20 * 3600, 0.3, 0, 0.0, NavStatus::moored));
  for (int h = 0; h <= 23; h += 4) fixes.push_back(fix(244000002, kDay0 + h * 3600, 10, 10, 0.0, NavStatus::moored));
  fx.tracks = label_tracks(build_tracks(fixes));
  return fx;
}

const IndicatorSeries& series(const std::vector<IndicatorSeries>& all, std::string_view group, Granularity g) {
  for (const auto& s : all)
    if (s.group == group && s.granularity == g) return s;
  throw std::runtime_error("no series " + std::string(group));
}

}  // namespace

TEST(Cnm, CountsOnlyActiveTracklets) {
  const auto fx = build();
  const auto all = cnm(fx.tracks, fx.registry, Granularity::daily);
  const double expected = geo::great_circle_nmi({0, 0}, {0.3, 0});
  EXPECT_NEAR(series(all, "total", Granularity::daily).at("2020-03-01")->cnm_nmi, expected, 1e-9);
  EXPECT_NEAR(series(all, "container", Granularity::daily).at("2020-03-01")->cnm_nmi, expected, 1e-9);
  EXPECT_NEAR(series(all, "container/Panamax", Granularity::daily).at("2020-03-01")->cnm_nmi, expected, 1e-9);
}

TEST(Cnm, ZeroFixesGiveNoSeries) {
  FleetRegistry reg;
  EXPECT_TRUE(cnm(std::vector<LabeledTrack>{}, reg, Granularity::daily).empty());
}

TEST(Cnm, TrackletsBucketByStartDay) {
  FleetRegistry reg;
  reg.add(classify({244000001, 1, "A", 70, "bulk", 50000, 0, 0}, SizeClassScheme::defaults()));
  std::vector<PositionFix> fixes{fix(244000001, kDay0 + 86400 - 600, 0, 0, 10), fix(244000001, kDay0 + 86400 + 600, 0.05, 0, 10)};
  const auto all = cnm(label_tracks(build_tracks(fixes)), reg, Granularity::daily);
  const auto& s = series(all, "total", Granularity::daily);
  ASSERT_EQ(s.points.size(), 1u);
  EXPECT_EQ(s.points[0].date, "2020-03-01");
}

TEST(Cnm, MonthlyIsSumOfDaily) {
  FleetRegistry reg;
  reg.add(classify({244000001, 1, "A", 70, "bulk", 50000, 0, 0}, SizeClassScheme::defaults()));
  std::vector<PositionFix> fixes;
  for (int i = 0; i < 24 * 40; ++i) fixes.push_back(fix(244000001, kDay0 + i * 3600, 0.0, -60 + i * 0.1, 6.0));
  const auto tracks = label_tracks(build_tracks(fixes));
  const auto daily = series(cnm(tracks, reg, Granularity::daily), "total", Granularity::daily);
  const auto monthly = series(cnm(tracks, reg, Granularity::monthly), "total", Granularity::monthly);
  std::map<std::string, double> sums;
  for (const auto& p : daily.points) sums[p.date.substr(0, 7)] += p.cnm_nmi;
  ASSERT_EQ(monthly.points.size(), 2u);
  for (const auto& p : monthly.points) EXPECT_NEAR(p.cnm_nmi, sums[p.date], 1e-9);
}

TEST(Counts, EveryIncludedVesselCountedEachDay) {
  const auto fx = build();
  const auto all = activity_counts(fx.tracks, fx.registry, Granularity::daily);
  const auto* p = series(all, "total", Granularity::daily).at("2020-03-01");
  ASSERT_TRUE(p);
  EXPECT_EQ(p->n_active, 0.0);  // A is active 4 h, idle 16 h
  EXPECT_EQ(p->n_idle, 2.0);
  EXPECT_EQ(p->n_unknown, 1.0);  // C never reports
  EXPECT_EQ(series(all, "wet_bulk", Granularity::daily).at("2020-03-01")->n_unknown, 1.0);
}

TEST(Counts, MonthlyIsMeanOfDaily) {
  FleetRegistry reg;
  reg.add(classify({244000001, 1, "A", 70, "bulk", 50000, 0, 0}, SizeClassScheme::defaults()));
  std::vector<PositionFix> fixes;
  for (int d = 0; d < 4; ++d)
    for (int h = 0; h < 24; h += 2)
      fixes.push_back(fix(244000001, kDay0 + d * 86400 + h * 3600, 0, 0.2 * (d * 12 + h / 2.0), d < 1 ? 8.0 : 0.0));
  const auto all = activity_counts(label_tracks(build_tracks(fixes)), reg, Granularity::monthly);
  const auto& m = series(all, "total", Granularity::monthly).points.at(0);
  EXPECT_NEAR(m.n_active, 0.25, 1e-12);
  EXPECT_NEAR(m.n_idle, 0.75, 1e-12);
}

TEST(Speed, TimeWeightedOverActiveFixes) {
  FleetRegistry reg;
  reg.add(classify({244000001, 1, "A", 70, "bulk", 50000, 0, 0}, SizeClassScheme::defaults()));
  std::vector<PositionFix> fixes{fix(244000001, kDay0, 0, 0, 10), fix(244000001, kDay0 + 3600, 0, 0.15, 20),
                                 fix(244000001, kDay0 + 3 * 3600, 0, 0.8, 0.0, NavStatus::moored),
                                 fix(244000001, kDay0 + 9 * 3600, 0, 0.8, 0.0, NavStatus::moored)};
  const auto all = mean_speed(label_tracks(build_tracks(fixes)), reg, Granularity::daily);
  EXPECT_NEAR(*series(all, "total", Granularity::daily).points.at(0).mean_speed_knots, (10.0 + 2 * 20.0) / 3.0, 1e-12);
}

TEST(Forecast, LinearHistory) {
  const std::vector<double> h{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(forecast(h), 5.0);
  const std::vector<double> flat{7, 7, 7, 7};
  EXPECT_DOUBLE_EQ(forecast(flat), 7.0);
  const std::vector<double> two{10, 12};
  EXPECT_DOUBLE_EQ(forecast(two), 14.0);
  const std::vector<double> one{10};
  EXPECT_THROW(forecast(one), std::invalid_argument);
}

TEST(Forecast, DeltaPercent) {
  EXPECT_DOUBLE_EQ(delta_pct(100.0, 90.0), -10.0);
  EXPECT_DOUBLE_EQ(delta_pct(100.0, 100.0), 0.0);
  EXPECT_THROW(delta_pct(0.0, 1.0), std::invalid_argument);
}

TEST(Forecast, PublishedMonthlySpotValues) {
  auto in = open_input(testing_support::test_data() / "monthly_cnm.csv");
  const auto values = pipeline::read_history(in, "monthly_cnm.csv");
  const auto points = build_forecasts(values, 2020);
  std::map<std::string, const ForecastPoint*> by_key;
  for (const auto& p : points) by_key[p.group + "@" + p.month] = &p;
  EXPECT_NEAR(by_key.at("container@2020-06")->forecast_value, 27.88, 0.02);
  EXPECT_NEAR(by_key.at("dry_bulk@2020-06")->forecast_value, 44.11, 0.02);
  EXPECT_NEAR(by_key.at("wet_bulk@2020-01")->forecast_value, 26.07, 0.02);
  EXPECT_NEAR(by_key.at("passenger@2020-06")->forecast_value, 6.48, 0.02);
  EXPECT_NEAR(*by_key.at("container@2020-06")->delta_pct, -13.77, 0.05);
  EXPECT_EQ(by_key.at("container@2020-06")->history.size(), 4u);
}

TEST(Forecast, SingleYearGivesNothing) {
  const std::vector<MonthlyValue> v{{"total", 2020, 1, 5.0}, {"total", 2020, 2, 6.0}};
  EXPECT_TRUE(build_forecasts(v, 2020).empty());
  EXPECT_TRUE(build_forecasts(v, 2021).empty());
}
