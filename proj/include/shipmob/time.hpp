#pragma once

// UTC calendar helpers. Epochs are integral seconds since 1970-01-01T00:00:00Z.

#include <charconv>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <fmt/format.h>

namespace shipmob {

using Epoch = std::int64_t;

inline constexpr Epoch kSecondsPerDay = 86400;

inline std::chrono::sys_days day_of(Epoch t) {
  using namespace std::chrono;
  return floor<days>(sys_seconds{seconds{t}});
}

inline Epoch day_start(Epoch t) {
  return std::chrono::duration_cast<std::chrono::seconds>(day_of(t).time_since_epoch()).count();
}

inline Epoch to_epoch(std::chrono::sys_days d) {
  return std::chrono::duration_cast<std::chrono::seconds>(d.time_since_epoch()).count();
}

/// "YYYY-MM-DD"
inline std::string date_string(std::chrono::year_month_day ymd) {
  return fmt::format("{:04}-{:02}-{:02}", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                     static_cast<unsigned>(ymd.day()));
}

inline std::string date_string(Epoch t) { return date_string(std::chrono::year_month_day{day_of(t)}); }

/// "YYYY-MM"
inline std::string month_string(Epoch t) {
  const std::chrono::year_month_day ymd{day_of(t)};
  return fmt::format("{:04}-{:02}", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()));
}

/// "YYYY-MM-DDTHH:MM:SSZ"
inline std::string iso8601(Epoch t) {
  const Epoch sod = t - day_start(t);
  return fmt::format("{}T{:02}:{:02}:{:02}Z", date_string(t), sod / 3600, (sod / 60) % 60, sod % 60);
}

namespace detail {

inline std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return v;
}

}  // namespace detail

/// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM[:SS][Z]" or a bare integer epoch.
inline std::optional<Epoch> parse_time(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.size() < 10 || s[4] != '-') {
    Epoch v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return v;
  }
  if (s[7] != '-') return std::nullopt;
  const auto y = detail::parse_int(s.substr(0, 4));
  const auto m = detail::parse_int(s.substr(5, 2));
  const auto d = detail::parse_int(s.substr(8, 2));
  if (!y || !m || !d) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
                                        std::chrono::day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  Epoch t = to_epoch(std::chrono::sys_days{ymd});
  std::string_view rest = s.substr(10);
  if (rest.empty()) return t;
  if (rest.front() != 'T' && rest.front() != ' ') return std::nullopt;
  rest.remove_prefix(1);
  if (!rest.empty() && rest.back() == 'Z') rest.remove_suffix(1);
  if (rest.size() != 5 && rest.size() != 8) return std::nullopt;
  const auto hh = detail::parse_int(rest.substr(0, 2));
  const auto mm = detail::parse_int(rest.substr(3, 2));
  const auto ss = rest.size() == 8 ? detail::parse_int(rest.substr(6, 2)) : std::optional<int>{0};
  if (!hh || !mm || !ss || *hh > 23 || *mm > 59 || *ss > 60 || rest[2] != ':') return std::nullopt;
  return t + *hh * 3600 + *mm * 60 + *ss;
}

}  // namespace shipmob
