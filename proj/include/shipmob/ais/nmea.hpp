#pragma once

// AIVDM/AIVDO sentence framing: checksum and field splitting.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include <fmt/format.h>

namespace shipmob::ais {

struct FramingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ChecksumStatus { ok, mismatch, malformed };

namespace detail {

constexpr int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

inline std::string_view trim_line_end(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == '\n' || s.back() == ' ' || s.back() == '\t'))
    s.remove_suffix(1);
  return s;
}

}  // namespace detail

/// XOR of every character strictly between the leading '!' and the '*'.
inline std::uint8_t nmea_xor(std::string_view body) {
  std::uint8_t x = 0;
  for (char c : body) x ^= static_cast<std::uint8_t>(c);
  return x;
}

inline ChecksumStatus checksum_status(std::string_view line) {
  line = detail::trim_line_end(line);
  const auto star = line.rfind('*');
  if (line.empty() || line.front() != '!' || star == std::string_view::npos || star + 3 != line.size())
    return ChecksumStatus::malformed;
  const int hi = detail::hex_value(line[star + 1]);
  const int lo = detail::hex_value(line[star + 2]);
  if (hi < 0 || lo < 0) return ChecksumStatus::malformed;
  const auto expected = static_cast<std::uint8_t>(hi * 16 + lo);
  return nmea_xor(line.substr(1, star - 1)) == expected ? ChecksumStatus::ok : ChecksumStatus::mismatch;
}

/// True iff the `*hh` suffix matches the XOR of the sentence body. Throws FramingError when the
/// suffix is missing or not two hex digits.
inline bool verify_checksum(std::string_view line) {
  switch (checksum_status(line)) {
    case ChecksumStatus::ok:
      return true;
    case ChecksumStatus::mismatch:
      return false;
    case ChecksumStatus::malformed:
      break;
  }
  throw FramingError(fmt::format("malformed checksum suffix in '{}'", line));
}

/// Appends `*hh` to a body that starts with '!'.
inline std::string with_checksum(std::string_view body) {
  return fmt::format("{}*{:02X}", body, nmea_xor(body.substr(1)));
}

struct Sentence {
  std::string talker = "AIVDM";
  int fragment_count = 1;
  int fragment_index = 1;
  std::optional<int> sequence_id;
  char channel = 'A';
  std::string payload;
  int fill_bits = 0;
};

/// Splits a checksum-valid line into its fields. Returns the reason on structural errors.
inline std::variant<Sentence, std::string> parse_sentence(std::string_view line) {
  line = detail::trim_line_end(line);
  const auto star = line.rfind('*');
  if (star == std::string_view::npos) return std::string("missing checksum");
  std::string_view body = line.substr(1, star - 1);
  std::string_view fields[7];
  int n = 0;
  while (n < 7) {
    const auto comma = body.find(',');
    fields[n++] = body.substr(0, comma);
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  if (n != 7 || body.find(',') != std::string_view::npos) return std::string("expected 7 fields");

  Sentence s;
  if (fields[0] != "AIVDM" && fields[0] != "AIVDO") return fmt::format("unsupported talker '{}'", fields[0]);
  s.talker = std::string(fields[0]);

  auto single_digit = [](std::string_view f) -> int {
    return (f.size() == 1 && f[0] >= '0' && f[0] <= '9') ? f[0] - '0' : -1;
  };
  s.fragment_count = single_digit(fields[1]);
  s.fragment_index = single_digit(fields[2]);
  if (s.fragment_count < 1) return std::string("bad fragment count");
  if (s.fragment_index < 1 || s.fragment_index > s.fragment_count) return std::string("bad fragment index");
  if (!fields[3].empty()) {
    const int seq = single_digit(fields[3]);
    if (seq < 0) return std::string("bad sequence id");
    s.sequence_id = seq;
  }
  if (fields[4].size() > 1) return std::string("bad channel");
  s.channel = fields[4].empty() ? '\0' : fields[4][0];
  s.payload = std::string(fields[5]);
  s.fill_bits = single_digit(fields[6]);
  if (s.fill_bits < 0 || s.fill_bits > 5) return std::string("bad fill bits");
  return s;
}

inline std::string format_sentence(const Sentence& s) {
  std::string body = fmt::format("!{},{},{},", s.talker, s.fragment_count, s.fragment_index);
  if (s.sequence_id) body += std::to_string(*s.sequence_id);
  body += ',';
  if (s.channel != '\0') body += s.channel;
  body += fmt::format(",{},{}", s.payload, s.fill_bits);
  return with_checksum(body);
}

}  // namespace shipmob::ais
