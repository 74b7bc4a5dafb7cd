#pragma once

// AIVDM decoding and encoding for message types 1/2/3 and 5.
//
// Field layout (bit offset, width), ITU-R M.1371:
//
//   types 1-3 (168 bits)            type 5 (424 bits)
//   type        0   6               type          0   6
//   repeat      6   2               repeat        6   2
//   mmsi        8  30               mmsi          8  30
//   nav status 38   4               ais version  38   2
//   rot        42   8 (signed)      imo          40  30
//   sog        50  10 (0.1 kn)      callsign     70  42 (7 chars)
//   accuracy   60   1               name        112 120 (20 chars)
//   lon        61  28 (1/600000°)   ship type   232   8
//   lat        89  27 (1/600000°)   to bow      240   9
//   cog       116  12 (0.1°)        to stern    249   9
//   heading   128   9               to port     258   6
//   second    137   6               to stbd     264   6
//   maneuver  143   2               epfd        270   4
//   spare     145   3               eta         274  20
//   raim      148   1               draught     294   8 (0.1 m)
//   radio     149  19               destination 302 120 (20 chars)
//                                   dte         422   1, spare 423 1

#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <fmt/format.h>

#include "shipmob/ais/messages.hpp"
#include "shipmob/ais/nmea.hpp"
#include "shipmob/ais/sixbit.hpp"
#include "shipmob/time.hpp"

namespace shipmob::ais {

inline constexpr std::size_t kPositionReportBits = 168;
inline constexpr std::size_t kStaticReportBits = 424;
inline constexpr std::size_t kStaticReportMinBits = 422;

inline constexpr std::int64_t kLonUnavailable = 181 * 600000;  // 0x6791AC0
inline constexpr std::int64_t kLatUnavailable = 91 * 600000;   // 0x3412140
inline constexpr std::uint64_t kSogUnavailable = 1023;
inline constexpr std::uint64_t kCogUnavailable = 3600;
inline constexpr std::uint64_t kHeadingUnavailable = 511;

enum class DecodeError {
  framing,   // not an AIVDM/AIVDO sentence, malformed suffix or fields, bad epoch prefix
  checksum,  // suffix does not match the body
  armor,     // payload character outside the six-bit alphabet
  length,    // payload bit count wrong for its message type (or empty)
  fragment,  // multipart sequence out of order or inconsistent
};

inline constexpr std::size_t kDecodeErrorKinds = 5;

constexpr std::string_view to_string(DecodeError e) {
  switch (e) {
    case DecodeError::framing: return "framing";
    case DecodeError::checksum: return "checksum";
    case DecodeError::armor: return "armor";
    case DecodeError::length: return "length";
    case DecodeError::fragment: return "fragment";
  }
  return "unknown";
}

struct DecodeFailure {
  DecodeError kind;
  std::string detail;
};

/// A valid line that yields no report: another message type, or a fragment awaiting the rest.
struct Skip {
  int msg_type = -1;  // -1 while buffered
  bool buffered = false;
};

using DecodeOutcome = std::variant<PositionFix, StaticReport, Skip, DecodeFailure>;

struct RawSentence {
  std::string_view line;
  std::optional<Epoch> receipt_epoch;
};

struct EncodeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Rounds continuous fields to wire resolution, as decode(encode(fix)) would.
inline PositionFix quantized(PositionFix fix) {
  auto q = [](std::optional<double>& v, double scale) {
    if (v) v = static_cast<double>(std::llround(*v * scale)) / scale;
  };
  q(fix.lat_deg, 600000.0);
  q(fix.lon_deg, 600000.0);
  q(fix.sog_knots, 10.0);
  if (fix.cog_deg) fix.cog_deg = static_cast<double>(std::llround(*fix.cog_deg * 10.0) % 3600) / 10.0;
  return fix;
}

/// Text fields lose trailing spaces and '@' padding on the wire.
inline StaticReport quantized(StaticReport r) {
  for (std::string* s : {&r.callsign, &r.name, &r.destination})
    while (!s->empty() && (s->back() == '@' || s->back() == ' ')) s->pop_back();
  return r;
}

namespace detail {

inline PositionFix decode_position(const BitReader& bits, std::optional<Epoch> t) {
  PositionFix f;
  f.msg_type = static_cast<std::uint8_t>(bits.uint(0, 6));
  f.mmsi = static_cast<std::uint32_t>(bits.uint(8, 30));
  f.nav_status = static_cast<NavStatus>(bits.uint(38, 4));
  if (const auto sog = bits.uint(50, 10); sog != kSogUnavailable) f.sog_knots = static_cast<double>(sog) / 10.0;
  if (const auto lon = bits.sint(61, 28); lon != kLonUnavailable && std::llabs(lon) <= 180 * 600000)
    f.lon_deg = static_cast<double>(lon) / 600000.0;
  if (const auto lat = bits.sint(89, 27); lat != kLatUnavailable && std::llabs(lat) <= 90 * 600000)
    f.lat_deg = static_cast<double>(lat) / 600000.0;
  if (const auto cog = bits.uint(116, 12); cog < kCogUnavailable) f.cog_deg = static_cast<double>(cog) / 10.0;
  if (const auto hdg = bits.uint(128, 9); hdg < 360) f.heading_deg = static_cast<std::uint16_t>(hdg);
  f.utc_second = static_cast<std::uint8_t>(bits.uint(137, 6));
  f.timestamp = t;
  return f;
}

inline StaticReport decode_static(const BitReader& bits, std::optional<Epoch> t) {
  StaticReport r;
  r.mmsi = static_cast<std::uint32_t>(bits.uint(8, 30));
  r.imo_number = static_cast<std::uint32_t>(bits.uint(40, 30));
  r.callsign = bits.text(70, 7);
  r.name = bits.text(112, 20);
  r.ship_type_code = static_cast<std::uint8_t>(bits.uint(232, 8));
  r.dims.to_bow = static_cast<std::uint16_t>(bits.uint(240, 9));
  r.dims.to_stern = static_cast<std::uint16_t>(bits.uint(249, 9));
  r.dims.to_port = static_cast<std::uint8_t>(bits.uint(258, 6));
  r.dims.to_starboard = static_cast<std::uint8_t>(bits.uint(264, 6));
  r.draught_dm = static_cast<std::uint8_t>(bits.uint(294, 8));
  r.destination = bits.text(302, 20);
  r.timestamp = t;
  return r;
}

}  // namespace detail

/// Decodes one complete (reassembled) payload. `padded` is set when a short type-5 payload was
/// zero-filled.
inline DecodeOutcome decode_payload(BitReader bits, std::optional<Epoch> t, bool* padded = nullptr) {
  if (bits.size() < 6) return DecodeFailure{DecodeError::length, "payload shorter than the type field"};
  const int type = static_cast<int>(bits.uint(0, 6));
  if (type >= 1 && type <= 3) {
    if (bits.size() != kPositionReportBits)
      return DecodeFailure{DecodeError::length, fmt::format("type {} payload has {} bits, expected 168", type,
                                                            bits.size())};
    return detail::decode_position(bits, t);
  }
  if (type == 5) {
    if (bits.size() < kStaticReportMinBits || bits.size() > kStaticReportBits)
      return DecodeFailure{DecodeError::length,
                           fmt::format("type 5 payload has {} bits, expected 422-424", bits.size())};
    if (bits.size() < kStaticReportBits) {
      bits.zero_fill_to(kStaticReportBits);
      if (padded) *padded = true;
    }
    return detail::decode_static(bits, t);
  }
  return Skip{type, false};
}

struct ReassemblyStats {
  std::size_t evicted = 0;   // incomplete sequences dropped by age or capacity
  std::size_t replaced = 0;  // incomplete sequences superseded by a new first fragment
};

/// Multipart buffer keyed by (channel, sequence id). Entries older than `max_age_s` of feed time
/// are evicted; feed time is the latest receipt epoch seen.
class Reassembler {
 public:
  explicit Reassembler(Epoch max_age_s = 30, std::size_t capacity = 1024)
      : max_age_s_(max_age_s), capacity_(capacity) {}

  struct Result {
    std::optional<BitReader> complete;
    std::optional<DecodeFailure> failure;
  };

  Result add(const Sentence& s, std::optional<Epoch> t) {
    if (t) {
      now_ = now_ ? std::max(*now_, *t) : *t;
      evict_stale();
    }
    char bad = 0;
    auto bits = BitReader::from_payload(s.payload, s.fill_bits, &bad);
    if (!bits) return {std::nullopt, DecodeFailure{DecodeError::armor, fmt::format("invalid payload character '{}'", bad)}};
    if (s.fragment_count == 1) return {std::move(bits), std::nullopt};

    const Key key{s.channel, s.sequence_id.value_or(-1)};
    if (s.fragment_index == 1) {
      if (buffer_.erase(key)) ++stats_.replaced;
      if (buffer_.size() >= capacity_) evict_oldest();
      buffer_.emplace(key, Pending{s.fragment_count, 1, std::move(*bits), now_.value_or(0), insert_counter_++});
      return {};
    }
    auto it = buffer_.find(key);
    if (it == buffer_.end())
      return {std::nullopt, DecodeFailure{DecodeError::fragment,
                                          fmt::format("fragment {}/{} without its predecessors", s.fragment_index,
                                                      s.fragment_count)}};
    Pending& p = it->second;
    if (p.count != s.fragment_count || p.received + 1 != s.fragment_index) {
      buffer_.erase(it);
      return {std::nullopt, DecodeFailure{DecodeError::fragment,
                                          fmt::format("fragment {}/{} does not continue a {}-part sequence at {}",
                                                      s.fragment_index, s.fragment_count, p.count, p.received)}};
    }
    p.bits.append(*bits);
    p.received = s.fragment_index;
    if (p.received < p.count) return {};
    BitReader done = std::move(p.bits);
    buffer_.erase(it);
    return {std::move(done), std::nullopt};
  }

  std::size_t pending() const { return buffer_.size(); }
  const ReassemblyStats& stats() const { return stats_; }

 private:
  using Key = std::pair<char, int>;
  struct Pending {
    int count = 0;
    int received = 0;
    BitReader bits;
    Epoch started = 0;
    std::uint64_t order = 0;
  };

  void evict_stale() {
    for (auto it = buffer_.begin(); it != buffer_.end();) {
      if (*now_ - it->second.started > max_age_s_) {
        it = buffer_.erase(it);
        ++stats_.evicted;
      } else {
        ++it;
      }
    }
  }

  void evict_oldest() {
    auto oldest = buffer_.begin();
    for (auto it = buffer_.begin(); it != buffer_.end(); ++it)
      if (it->second.order < oldest->second.order) oldest = it;
    if (oldest != buffer_.end()) {
      buffer_.erase(oldest);
      ++stats_.evicted;
    }
  }

  Epoch max_age_s_;
  std::size_t capacity_;
  std::optional<Epoch> now_;
  std::uint64_t insert_counter_ = 0;
  std::map<Key, Pending> buffer_;
  ReassemblyStats stats_;
};

/// Per-line outcome counts. Every input line lands in exactly one bucket.
struct DecodeStats {
  std::size_t lines = 0;
  std::size_t blank = 0;
  std::size_t position_reports = 0;
  std::size_t static_reports = 0;
  std::size_t skipped = 0;   // valid sentences of other message types
  std::size_t buffered = 0;  // fragments awaiting completion
  std::size_t errors[kDecodeErrorKinds] = {};
  std::size_t padded = 0;    // type-5 payloads zero-filled from 422/423 bits
  std::size_t untimed = 0;   // reports without a receipt epoch

  std::size_t error_total() const {
    std::size_t n = 0;
    for (auto e : errors) n += e;
    return n;
  }

  std::size_t accounted() const {
    return blank + position_reports + static_reports + skipped + buffered + error_total();
  }
};

/// Stateful decoder for one input stream (owns that stream's reassembly buffer).
class Decoder {
 public:
  explicit Decoder(Epoch reassembly_age_s = 30) : reassembler_(reassembly_age_s) {}

  DecodeOutcome decode(const RawSentence& raw) {
    const std::string_view line = detail::trim_line_end(raw.line);
    if (line.size() < 6 || (line.substr(0, 6) != "!AIVDM" && line.substr(0, 6) != "!AIVDO"))
      return DecodeFailure{DecodeError::framing, "not an AIVDM/AIVDO sentence"};
    switch (checksum_status(line)) {
      case ChecksumStatus::ok: break;
      case ChecksumStatus::mismatch: return DecodeFailure{DecodeError::checksum, "checksum mismatch"};
      case ChecksumStatus::malformed: return DecodeFailure{DecodeError::framing, "malformed checksum suffix"};
    }
    auto parsed = parse_sentence(line);
    if (auto* why = std::get_if<std::string>(&parsed)) return DecodeFailure{DecodeError::framing, *why};
    const Sentence& s = std::get<Sentence>(parsed);
    auto r = reassembler_.add(s, raw.receipt_epoch);
    if (r.failure) return *r.failure;
    if (!r.complete) return Skip{-1, true};
    bool padded = false;
    auto out = decode_payload(std::move(*r.complete), raw.receipt_epoch, &padded);
    last_padded_ = padded;
    return out;
  }

  /// Accepts an optional "<epoch-seconds>\t" prefix before the sentence.
  DecodeOutcome decode_line(std::string_view feed_line) {
    last_padded_ = false;
    std::optional<Epoch> epoch;
    if (const auto tab = feed_line.find('\t'); tab != std::string_view::npos) {
      std::string_view prefix = feed_line.substr(0, tab);
      const auto dot = prefix.find('.');
      std::string_view whole = prefix.substr(0, dot);
      Epoch v = 0;
      const auto* end = whole.data() + whole.size();
      auto [ptr, ec] = std::from_chars(whole.data(), end, v);
      bool ok = !whole.empty() && ec == std::errc{} && ptr == end && v >= 0;
      if (ok && dot != std::string_view::npos)
        for (char c : prefix.substr(dot + 1)) ok = ok && c >= '0' && c <= '9';
      if (!ok) return DecodeFailure{DecodeError::framing, "malformed epoch prefix"};
      epoch = v;
      feed_line.remove_prefix(tab + 1);
    }
    return decode({feed_line, epoch});
  }

  /// Decodes and tallies one feed line.
  DecodeOutcome consume(std::string_view feed_line) {
    ++stats_.lines;
    if (detail::trim_line_end(feed_line).empty()) {
      ++stats_.blank;
      return Skip{-1, false};
    }
    auto out = decode_line(feed_line);
    std::visit(
        [this](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, PositionFix>) {
            ++stats_.position_reports;
            if (!v.timestamp) ++stats_.untimed;
          } else if constexpr (std::is_same_v<T, StaticReport>) {
            ++stats_.static_reports;
            if (last_padded_) ++stats_.padded;
          } else if constexpr (std::is_same_v<T, Skip>) {
            ++(v.buffered ? stats_.buffered : stats_.skipped);
          } else {
            ++stats_.errors[static_cast<std::size_t>(v.kind)];
          }
        },
        out);
    return out;
  }

  const DecodeStats& stats() const { return stats_; }
  const Reassembler& reassembler() const { return reassembler_; }

 private:
  Reassembler reassembler_;
  DecodeStats stats_;
  bool last_padded_ = false;
};

/// Convenience single-shot decode of one line with its own fresh reassembly buffer.
inline DecodeOutcome decode(const RawSentence& raw) { return Decoder{}.decode(raw); }

inline std::vector<std::string> encode(const PositionFix& fix, char channel = 'A') {
  if (fix.msg_type < 1 || fix.msg_type > 3) throw EncodeError(fmt::format("msg_type {} not in 1..3", fix.msg_type));
  if (!is_valid_mmsi(fix.mmsi)) throw EncodeError(fmt::format("mmsi {} out of range", fix.mmsi));
  if (fix.lat_deg && !(std::abs(*fix.lat_deg) <= 90.0)) throw EncodeError("latitude out of range");
  if (fix.lon_deg && !(std::abs(*fix.lon_deg) <= 180.0)) throw EncodeError("longitude out of range");
  if (fix.sog_knots && !(*fix.sog_knots >= 0.0 && *fix.sog_knots <= 102.2)) throw EncodeError("sog out of range");
  if (fix.cog_deg && !(*fix.cog_deg >= 0.0 && *fix.cog_deg < 360.0)) throw EncodeError("cog out of range");
  if (fix.heading_deg && *fix.heading_deg > 359) throw EncodeError("heading out of range");
  if (fix.utc_second > 63) throw EncodeError("utc second out of range");

  const PositionFix q = quantized(fix);
  BitWriter w;
  w.put(q.msg_type, 6);
  w.put(0, 2);
  w.put(q.mmsi, 30);
  w.put(static_cast<std::uint8_t>(q.nav_status), 4);
  w.put_signed(-128, 8);  // rate of turn not available
  w.put(q.sog_knots ? static_cast<std::uint64_t>(std::llround(*q.sog_knots * 10.0)) : kSogUnavailable, 10);
  w.put(0, 1);
  w.put_signed(q.lon_deg ? std::llround(*q.lon_deg * 600000.0) : kLonUnavailable, 28);
  w.put_signed(q.lat_deg ? std::llround(*q.lat_deg * 600000.0) : kLatUnavailable, 27);
  w.put(q.cog_deg ? static_cast<std::uint64_t>(std::llround(*q.cog_deg * 10.0)) : kCogUnavailable, 12);
  w.put(q.heading_deg ? *q.heading_deg : kHeadingUnavailable, 9);
  w.put(q.utc_second, 6);
  w.put(0, 2);
  w.put(0, 3);
  w.put(0, 1);
  w.put(0, 19);
  const auto a = w.armored();
  Sentence s;
  s.channel = channel;
  s.payload = a.payload;
  s.fill_bits = a.fill_bits;
  return {format_sentence(s)};
}

/// Encodes a type-5 report as two fragments (60 + 11 characters) sharing `sequence_id`.
inline std::vector<std::string> encode(const StaticReport& r, char channel = 'A', int sequence_id = 0) {
  auto check_text = [](std::string_view s, std::size_t max, std::string_view what) {
    if (s.size() > max) throw EncodeError(fmt::format("{} longer than {} characters", what, max));
    for (char c : s)
      if (!ascii_to_sixbit(c)) throw EncodeError(fmt::format("{} has character '{}' outside the six-bit alphabet", what, c));
  };
  if (!is_valid_mmsi(r.mmsi)) throw EncodeError(fmt::format("mmsi {} out of range", r.mmsi));
  if (r.imo_number >= (1u << 30)) throw EncodeError("imo out of range");
  check_text(r.callsign, 7, "callsign");
  check_text(r.name, 20, "name");
  check_text(r.destination, 20, "destination");
  if (r.ship_type_code > 99) throw EncodeError("ship type code out of range");
  if (r.dims.to_bow > 511 || r.dims.to_stern > 511 || r.dims.to_port > 63 || r.dims.to_starboard > 63)
    throw EncodeError("dimensions out of range");
  if (sequence_id < 0 || sequence_id > 9) throw EncodeError("sequence id out of range");

  BitWriter w;
  w.put(5, 6);
  w.put(0, 2);
  w.put(r.mmsi, 30);
  w.put(0, 2);
  w.put(r.imo_number, 30);
  w.put_text(r.callsign, 7);
  w.put_text(r.name, 20);
  w.put(r.ship_type_code, 8);
  w.put(r.dims.to_bow, 9);
  w.put(r.dims.to_stern, 9);
  w.put(r.dims.to_port, 6);
  w.put(r.dims.to_starboard, 6);
  w.put(0, 4);
  w.put(0, 4);   // eta month n/a
  w.put(0, 5);   // eta day n/a
  w.put(24, 5);  // eta hour n/a
  w.put(60, 6);  // eta minute n/a
  w.put(r.draught_dm, 8);
  w.put_text(r.destination, 20);
  w.put(0, 1);
  w.put(0, 1);
  const auto a = w.armored();

  Sentence first;
  first.fragment_count = 2;
  first.fragment_index = 1;
  first.sequence_id = sequence_id;
  first.channel = channel;
  first.payload = a.payload.substr(0, 60);
  first.fill_bits = 0;
  Sentence second = first;
  second.fragment_index = 2;
  second.payload = a.payload.substr(60);
  second.fill_bits = a.fill_bits;
  return {format_sentence(first), format_sentence(second)};
}

}  // namespace shipmob::ais
