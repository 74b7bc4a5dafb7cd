#pragma once

// Error types, atomic file output and a small RFC 4180 CSV reader/writer.

#include <cerrno>
#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <fmt/format.h>

namespace shipmob {

/// Bad command-line usage or configuration.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File system failure (missing input, unwritable output).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input that violates a file-format or data contract.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}: {}", path.string(), std::strerror(errno)));
  return in;
}

/// Writes via a sibling temp file and rename, so readers never see a partial file.
inline void write_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot write {}", tmp.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError(fmt::format("write failed for {}", tmp.string()));
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError(fmt::format("cannot rename {} -> {}: {}", tmp.string(), path.string(), ec.message()));
}

inline std::string read_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

namespace csv {

/// Quotes a field when it contains a delimiter, quote or line break.
inline std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

template <typename... Fields>
std::string row(const Fields&... fields) {
  std::string out;
  bool first = true;
  ((out += (first ? "" : ","), out += escape(fields), first = false), ...);
  out += '\n';
  return out;
}

/// Streams rows of a headed CSV file, resolving columns by name.
class Reader {
 public:
  explicit Reader(std::istream& in, std::string source = "<csv>") : in_(in), source_(std::move(source)) {
    std::string line;
    if (!std::getline(in_, line)) throw DataError(fmt::format("{}: missing header", source_));
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    header_ = split(line);
    for (std::size_t i = 0; i < header_.size(); ++i) index_[header_[i]] = i;
  }

  const std::vector<std::string>& header() const { return header_; }

  /// Throws DataError naming the missing columns.
  void require(std::initializer_list<std::string_view> columns) const {
    for (auto c : columns) {
      if (!index_.contains(std::string(c))) throw DataError(fmt::format("{}: missing column '{}'", source_, c));
    }
  }

  std::optional<std::size_t> column(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Skips blank lines; false at end of input.
  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.empty() || line == "\r") continue;
      fields = split(line);
      if (fields.size() != header_.size())
        throw DataError(fmt::format("{}:{}: expected {} fields, got {}", source_, line_no_ + 1, header_.size(),
                                    fields.size()));
      return true;
    }
    return false;
  }

  std::string where() const { return fmt::format("{}:{}", source_, line_no_ + 1); }

 private:
  std::istream& in_;
  std::string source_;
  std::vector<std::string> header_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t line_no_ = 0;
};

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  T v{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return v;
}

}  // namespace csv
}  // namespace shipmob
