#pragma once

// Six-bit payload armoring and big-endian bit slicing for AIVDM payloads
// (ITU-R M.1371 / IEC 61162-1).

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shipmob::ais {

/// Armored character to its six-bit value; nullopt outside the 64-symbol alphabet.
constexpr std::optional<std::uint8_t> dearmor(char ch) {
  const int c = static_cast<unsigned char>(ch);
  if (c < '0' || c > 'w' || (c > 'W' && c < '`')) return std::nullopt;
  int v = c - 48;
  if (v > 40) v -= 8;
  return static_cast<std::uint8_t>(v);
}

constexpr char armor(std::uint8_t value) {
  const int v = value & 0x3F;
  return static_cast<char>(v < 40 ? v + 48 : v + 56);
}

/// Six-bit text alphabet: values 0..31 map to '@'..'_', 32..63 to ' '..'?'.
constexpr char sixbit_to_ascii(std::uint8_t v) {
  v &= 0x3F;
  return static_cast<char>(v < 32 ? v + 64 : v);
}

constexpr std::optional<std::uint8_t> ascii_to_sixbit(char ch) {
  const int c = static_cast<unsigned char>(ch);
  if (c >= 64 && c <= 95) return static_cast<std::uint8_t>(c - 64);
  if (c >= 32 && c <= 63) return static_cast<std::uint8_t>(c);
  return std::nullopt;
}

/// Unpacked payload bits, one byte per bit. Reads beyond the end return zeros.
class BitReader {
 public:
  BitReader() = default;
  explicit BitReader(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {}

  /// De-armors `payload`, dropping `fill_bits` trailing bits. Returns nullopt on a bad character
  /// and reports it through `bad_char`.
  static std::optional<BitReader> from_payload(std::string_view payload, int fill_bits, char* bad_char = nullptr) {
    std::vector<std::uint8_t> bits;
    bits.reserve(payload.size() * 6);
    for (char ch : payload) {
      const auto v = dearmor(ch);
      if (!v) {
        if (bad_char) *bad_char = ch;
        return std::nullopt;
      }
      for (int b = 5; b >= 0; --b) bits.push_back(static_cast<std::uint8_t>((*v >> b) & 1));
    }
    const auto drop = static_cast<std::size_t>(fill_bits);
    bits.resize(bits.size() >= drop ? bits.size() - drop : 0);
    return BitReader(std::move(bits));
  }

  std::size_t size() const { return bits_.size(); }

  void append(const BitReader& other) { bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end()); }

  void zero_fill_to(std::size_t n) {
    if (bits_.size() < n) bits_.resize(n, 0);
  }

  std::uint64_t uint(std::size_t offset, std::size_t width) const {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i) {
      const std::size_t k = offset + i;
      v = (v << 1) | (k < bits_.size() ? bits_[k] : 0u);
    }
    return v;
  }

  std::int64_t sint(std::size_t offset, std::size_t width) const {
    const std::uint64_t raw = uint(offset, width);
    const std::uint64_t sign = std::uint64_t{1} << (width - 1);
    return (raw & sign) ? static_cast<std::int64_t>(raw) - static_cast<std::int64_t>(sign << 1)
                        : static_cast<std::int64_t>(raw);
  }

  /// Decodes `nchars` six-bit characters and strips trailing '@' padding and spaces.
  std::string text(std::size_t offset, std::size_t nchars) const {
    std::string out;
    out.reserve(nchars);
    for (std::size_t i = 0; i < nchars; ++i)
      out += sixbit_to_ascii(static_cast<std::uint8_t>(uint(offset + 6 * i, 6)));
    while (!out.empty() && (out.back() == '@' || out.back() == ' ')) out.pop_back();
    return out;
  }

 private:
  std::vector<std::uint8_t> bits_;
};

class BitWriter {
 public:
  void put(std::uint64_t value, std::size_t width) {
    for (std::size_t i = width; i-- > 0;) bits_.push_back(static_cast<std::uint8_t>((value >> i) & 1));
  }

  void put_signed(std::int64_t value, std::size_t width) {
    put(static_cast<std::uint64_t>(value) & ((std::uint64_t{1} << width) - 1), width);
  }

  /// Caller guarantees every character is in the six-bit alphabet. Pads with '@'.
  void put_text(std::string_view s, std::size_t nchars) {
    for (std::size_t i = 0; i < nchars; ++i) put(i < s.size() ? ascii_to_sixbit(s[i]).value_or(0) : 0, 6);
  }

  std::size_t size() const { return bits_.size(); }

  struct Armored {
    std::string payload;
    int fill_bits = 0;
  };

  Armored armored() const {
    Armored out;
    const std::size_t nchars = (bits_.size() + 5) / 6;
    out.fill_bits = static_cast<int>(nchars * 6 - bits_.size());
    out.payload.reserve(nchars);
    for (std::size_t c = 0; c < nchars; ++c) {
      std::uint8_t v = 0;
      for (std::size_t b = 0; b < 6; ++b) {
        const std::size_t k = c * 6 + b;
        v = static_cast<std::uint8_t>((v << 1) | (k < bits_.size() ? bits_[k] : 0));
      }
      out.payload += armor(v);
    }
    return out;
  }

 private:
  std::vector<std::uint8_t> bits_;
};

}  // namespace shipmob::ais
