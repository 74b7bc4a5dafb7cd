#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "shipmob/ais/messages.hpp"
#include "shipmob/ais/codec.hpp"
#include "shipmob/fleet.hpp"

namespace testing_support {

namespace fs = std::filesystem;

inline fs::path source_dir() { return SHIPMOB_SOURCE_DIR; }
inline fs::path data_dir() { return source_dir() / "data"; }
inline fs::path test_data() { return source_dir() / "tests" / "data"; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("shipmob_" + tag + "_" + std::to_string(::getpid()) + "_" +
                                         std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

/// Seeded generator with the few draws the property tests need.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  bool chance(double p) { return unit() < p; }
  std::uint64_t raw() { return rng_(); }

  std::string text(std::size_t max_len) {
    static const char alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 -/.";
    const auto n = static_cast<std::size_t>(integer(0, static_cast<std::int64_t>(max_len)));
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += alphabet[integer(0, sizeof(alphabet) - 2)];
    return s;
  }

  shipmob::ais::PositionFix position_fix() {
    shipmob::ais::PositionFix f;
    f.mmsi = static_cast<std::uint32_t>(integer(1, 999'999'999));
    f.msg_type = static_cast<std::uint8_t>(integer(1, 3));
    f.nav_status = static_cast<shipmob::ais::NavStatus>(integer(0, 15));
    if (chance(0.95)) f.sog_knots = uniform(0.0, 102.2);
    if (chance(0.95)) {
      f.lat_deg = uniform(-90.0, 90.0);
      f.lon_deg = uniform(-180.0, 180.0);
    }
    if (chance(0.95)) f.cog_deg = uniform(0.0, 359.9);
    if (chance(0.9)) f.heading_deg = static_cast<std::uint16_t>(integer(0, 359));
    f.utc_second = static_cast<std::uint8_t>(integer(0, 63));
    if (chance(0.9)) f.timestamp = integer(1'450'000'000, 1'700'000'000);
    return f;
  }

  shipmob::ais::StaticReport static_report() {
    shipmob::ais::StaticReport r;
    r.mmsi = static_cast<std::uint32_t>(integer(1, 999'999'999));
    r.imo_number = static_cast<std::uint32_t>(integer(0, 9'999'999));
    r.callsign = text(7);
    r.name = text(20);
    r.ship_type_code = static_cast<std::uint8_t>(integer(0, 99));
    r.dims = {static_cast<std::uint16_t>(integer(0, 511)), static_cast<std::uint16_t>(integer(0, 511)),
              static_cast<std::uint8_t>(integer(0, 63)), static_cast<std::uint8_t>(integer(0, 63))};
    r.draught_dm = static_cast<std::uint8_t>(integer(0, 255));
    r.destination = text(20);
    if (chance(0.9)) r.timestamp = integer(1'450'000'000, 1'700'000'000);
    return r;
  }

 private:
  std::mt19937_64 rng_;
};

inline shipmob::VesselInputs vessel(std::uint32_t mmsi, double dwt = 50000.0, int type_code = 70,
                                    std::string hint = "bulk carrier") {
  return {mmsi, 9000000 + mmsi % 1000000, "TEST " + std::to_string(mmsi), type_code, std::move(hint), dwt, 0.0, 0.0};
}

}  // namespace testing_support
