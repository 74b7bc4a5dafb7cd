#pragma once

// Typed AIS reports: class A dynamic position reports (types 1/2/3) and
// static-and-voyage reports (type 5).

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "shipmob/time.hpp"

namespace shipmob::ais {

/// ITU-R M.1371 navigational status codes.
enum class NavStatus : std::uint8_t {
  under_way_engine = 0,
  at_anchor = 1,
  not_under_command = 2,
  restricted_manoeuvrability = 3,
  constrained_by_draught = 4,
  moored = 5,
  aground = 6,
  engaged_in_fishing = 7,
  under_way_sailing = 8,
  reserved_hsc = 9,
  reserved_wig = 10,
  towing_astern = 11,
  pushing_ahead = 12,
  reserved_13 = 13,
  ais_sart = 14,
  not_defined = 15,
};

constexpr std::string_view to_string(NavStatus s) {
  constexpr std::string_view names[] = {
      "under_way_engine", "at_anchor",     "not_under_command", "restricted_manoeuvrability",
      "constrained_by_draught", "moored",  "aground",           "engaged_in_fishing",
      "under_way_sailing", "reserved_hsc", "reserved_wig",      "towing_astern",
      "pushing_ahead",    "reserved_13",   "ais_sart",          "not_defined"};
  return names[static_cast<std::uint8_t>(s) & 0x0F];
}

inline constexpr std::uint32_t kMaxMmsi = 999'999'999;

constexpr bool is_valid_mmsi(std::uint32_t mmsi) { return mmsi >= 1 && mmsi <= kMaxMmsi; }

/// One decoded dynamic report. Continuous fields carry wire resolution
/// (1/600000 degree, 0.1 knot, 0.1 degree); nullopt means "not available".
struct PositionFix {
  std::uint32_t mmsi = 0;
  std::uint8_t msg_type = 1;
  NavStatus nav_status = NavStatus::not_defined;
  std::optional<double> sog_knots;
  std::optional<double> lon_deg;
  std::optional<double> lat_deg;
  std::optional<double> cog_deg;
  std::optional<std::uint16_t> heading_deg;
  std::uint8_t utc_second = 60;
  std::optional<Epoch> timestamp;

  bool has_position() const { return lat_deg.has_value() && lon_deg.has_value(); }

  friend bool operator==(const PositionFix&, const PositionFix&) = default;
};

struct ShipDimensions {
  std::uint16_t to_bow = 0;
  std::uint16_t to_stern = 0;
  std::uint8_t to_port = 0;
  std::uint8_t to_starboard = 0;

  friend bool operator==(const ShipDimensions&, const ShipDimensions&) = default;
};

struct StaticReport {
  std::uint32_t mmsi = 0;
  std::uint32_t imo_number = 0;
  std::string callsign;
  std::string name;
  std::uint8_t ship_type_code = 0;
  ShipDimensions dims;
  std::uint8_t draught_dm = 0;
  std::string destination;
  std::optional<Epoch> timestamp;

  friend bool operator==(const StaticReport&, const StaticReport&) = default;
};

}  // namespace shipmob::ais
