#pragma once

// Vessel profiles: traffic category from the ITU ship-type code, size class
// from a configurable scheme, and the DWT inclusion rule.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "shipmob/ais/messages.hpp"
#include "shipmob/io.hpp"

namespace shipmob {

enum class Category { container, dry_bulk, wet_bulk, passenger, other };

inline constexpr Category kTrafficCategories[] = {Category::container, Category::dry_bulk, Category::wet_bulk,
                                                  Category::passenger};

constexpr std::string_view to_string(Category c) {
  switch (c) {
    case Category::container: return "container";
    case Category::dry_bulk: return "dry_bulk";
    case Category::wet_bulk: return "wet_bulk";
    case Category::passenger: return "passenger";
    case Category::other: return "other";
  }
  return "other";
}

inline std::optional<Category> category_from_string(std::string_view s) {
  for (Category c : {Category::container, Category::dry_bulk, Category::wet_bulk, Category::passenger, Category::other})
    if (s == to_string(c)) return c;
  return std::nullopt;
}

/// Deadweight below which cargo carriers are left out of the indicators.
inline constexpr double kCargoMinDwt = 10000.0;
inline constexpr double kPassengerMinDwt = 1000.0;

enum class SizeUnit { teu, dwt, gt };

struct SizeClass {
  std::string name;
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
};

/// Ordered, contiguous bins for one category. Bins are [lower, upper) unless
/// `upper_inclusive`, in which case they are (lower, upper] and the first bin includes 0.
struct CategoryBins {
  SizeUnit unit = SizeUnit::dwt;
  bool upper_inclusive = false;
  std::vector<SizeClass> classes;
};

class SizeClassScheme {
 public:
  static SizeClassScheme defaults() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    SizeClassScheme s;
    s.bins_[Category::container] = {SizeUnit::teu, false,
                                    {{"Small feeder", 0, 1000},
                                     {"Feeder", 1000, 2000},
                                     {"Feedermax", 2000, 3000},
                                     {"Panamax", 3000, 5100},
                                     {"Post-Panamax", 5100, 10000},
                                     {"New Panamax", 10000, 14500},
                                     {"ULCV", 14500, inf}}};
    s.bins_[Category::dry_bulk] = {SizeUnit::dwt, false,
                                   {{"Handysize", 0, 40000},
                                    {"Handymax", 40000, 60000},
                                    {"Panamax", 60000, 80000},
                                    {"Post-Panamax", 80000, 100000},
                                    {"Capesize", 100000, 200000},
                                    {"VLBC", 200000, inf}}};
    s.bins_[Category::wet_bulk] = {SizeUnit::dwt, false,
                                   {{"Handysize", 0, 35000},
                                    {"Handymax", 35000, 55000},
                                    {"Panamax", 55000, 80000},
                                    {"Aframax", 80000, 120000},
                                    {"Suezmax", 120000, 200000},
                                    {"VLCC", 200000, inf}}};
    s.bins_[Category::passenger] = {SizeUnit::gt, true,
                                    {{"GT <= 10K", 0, 10000},
                                     {"10K < GT <= 60K", 10000, 60000},
                                     {"60K < GT <= 100K", 60000, 100000},
                                     {"GT > 100K", 100000, inf}}};
    return s;
  }

  /// Key-value file with one section per category:
  ///
  ///   [container]
  ///   unit = teu
  ///   closed = lower
  ///   Small feeder = 0, 1000
  ///   ULCV = 14500, inf
  ///
  /// `closed = upper` makes bins (lower, upper]. Sections present in the file replace the
  /// corresponding defaults.
  static SizeClassScheme from_ini(std::istream& in, std::string_view source = "<scheme>") {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
      pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
      throw DataError(fmt::format("{}: {}", source, e.message()));
    }
    SizeClassScheme s = defaults();
    for (const auto& [section, body] : tree) {
      const auto cat = category_from_string(section);
      if (!cat || *cat == Category::other) throw DataError(fmt::format("{}: unknown category section [{}]", source, section));
      CategoryBins bins;
      for (const auto& [key, node] : body) {
        const std::string value = node.get_value<std::string>();
        if (key == "unit") {
          if (value == "teu") bins.unit = SizeUnit::teu;
          else if (value == "dwt") bins.unit = SizeUnit::dwt;
          else if (value == "gt") bins.unit = SizeUnit::gt;
          else throw DataError(fmt::format("{}: [{}] unknown unit '{}'", source, section, value));
        } else if (key == "closed") {
          if (value != "lower" && value != "upper")
            throw DataError(fmt::format("{}: [{}] closed must be 'lower' or 'upper'", source, section));
          bins.upper_inclusive = value == "upper";
        } else {
          const auto comma = value.find(',');
          if (comma == std::string::npos)
            throw DataError(fmt::format("{}: [{}] class '{}' needs 'lower, upper'", source, section, key));
          auto bound = [&](std::string text) {
            text.erase(std::remove_if(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); }),
                       text.end());
            if (text == "inf") return std::numeric_limits<double>::infinity();
            const auto v = csv::parse_number<double>(text);
            if (!v) throw DataError(fmt::format("{}: [{}] bad bound '{}'", source, section, text));
            return *v;
          };
          bins.classes.push_back({key, bound(value.substr(0, comma)), bound(value.substr(comma + 1))});
        }
      }
      s.bins_[*cat] = std::move(bins);
    }
    s.validate();
    return s;
  }

  static SizeClassScheme load(const std::filesystem::path& path) {
    auto in = open_input(path);
    return from_ini(in, path.string());
  }

  /// Bins must start at 0, be contiguous and ascending, and end at infinity.
  void validate() const {
    for (const auto& [cat, bins] : bins_) {
      const auto name = to_string(cat);
      if (bins.classes.empty()) throw DataError(fmt::format("size classes for {} are empty", name));
      if (bins.classes.front().lower != 0.0) throw DataError(fmt::format("size classes for {} must start at 0", name));
      if (!std::isinf(bins.classes.back().upper))
        throw DataError(fmt::format("size classes for {} must end at inf", name));
      for (std::size_t i = 0; i < bins.classes.size(); ++i) {
        const auto& c = bins.classes[i];
        if (!(c.upper > c.lower)) throw DataError(fmt::format("size class {}/{} is empty", name, c.name));
        if (i > 0 && bins.classes[i - 1].upper != c.lower)
          throw DataError(fmt::format("size classes for {} are not contiguous at {}", name, c.name));
      }
    }
  }

  const CategoryBins* bins(Category c) const {
    auto it = bins_.find(c);
    return it == bins_.end() ? nullptr : &it->second;
  }

  /// Class name for a capacity measure in the category's unit.
  std::optional<std::string> classify(Category c, double measure) const {
    const auto* b = bins(c);
    if (!b || !(measure >= 0.0)) return std::nullopt;
    for (const auto& cls : b->classes) {
      if (b->upper_inclusive ? measure <= cls.upper : measure < cls.upper) return cls.name;
    }
    return std::nullopt;
  }

 private:
  std::map<Category, CategoryBins> bins_;
};

/// Raw registry row.
struct VesselInputs {
  std::uint32_t mmsi = 0;
  std::uint32_t imo = 0;
  std::string name;
  int type_code = 0;
  std::string category_hint;
  double dwt = 0.0;
  double gt = 0.0;
  double teu = 0.0;
};

struct VesselProfile {
  std::uint32_t mmsi = 0;
  std::uint32_t imo = 0;
  std::string name;
  int type_code = 0;
  Category category = Category::other;
  double dwt = 0.0;
  double gt = 0.0;
  double teu = 0.0;
  std::string size_class;
  bool included = false;

  /// "container/Panamax"
  std::string group() const { return fmt::format("{}/{}", to_string(category), size_class); }
};

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

/// Registry hull-type text to a category; nullopt when it says nothing usable.
inline std::optional<Category> category_from_hint(std::string_view hint) {
  const std::string h = lower(hint);
  if (h.empty()) return std::nullopt;
  auto has = [&](std::string_view w) { return h.find(w) != std::string::npos; };
  if (has("container")) return Category::container;
  if (has("wet") || has("tanker") || has("oil") || has("chemical") || has("lng") || has("lpg"))
    return Category::wet_bulk;
  if (has("bulk") || has("ore")) return Category::dry_bulk;
  if (has("passenger") || has("cruise") || has("ferry")) return Category::passenger;
  return std::nullopt;
}

}  // namespace detail

/// 6x passenger, 8x tanker (wet bulk), 7x split by the registry hint; anything else is "other".
inline Category category_for(int type_code, std::string_view hint) {
  if (type_code >= 60 && type_code <= 69) return Category::passenger;
  if (type_code >= 80 && type_code <= 89) return Category::wet_bulk;
  if (type_code >= 70 && type_code <= 79) return detail::category_from_hint(hint).value_or(Category::other);
  return Category::other;
}

inline VesselProfile classify(const VesselInputs& in, const SizeClassScheme& scheme) {
  VesselProfile p;
  p.mmsi = in.mmsi;
  p.imo = in.imo;
  p.name = in.name;
  p.type_code = in.type_code;
  p.dwt = in.dwt;
  p.gt = in.gt;
  p.teu = in.teu;
  p.category = category_for(in.type_code, in.category_hint);
  if (p.category == Category::other) return p;

  double measure = in.dwt;
  if (const auto* bins = scheme.bins(p.category)) {
    if (bins->unit == SizeUnit::teu) measure = in.teu;
    if (bins->unit == SizeUnit::gt) measure = in.gt;
  }
  const auto cls = scheme.classify(p.category, measure);
  if (!cls) return p;
  p.size_class = *cls;
  const double min_dwt = p.category == Category::passenger ? kPassengerMinDwt : kCargoMinDwt;
  p.included = in.dwt >= min_dwt && ais::is_valid_mmsi(in.mmsi);
  return p;
}

/// Immutable after load; lookups are safe from any thread.
class FleetRegistry {
 public:
  FleetRegistry() = default;

  void add(VesselProfile p) {
    const auto mmsi = p.mmsi;
    profiles_[mmsi] = std::move(p);
  }

  const VesselProfile* lookup(std::uint32_t mmsi) const {
    if (!ais::is_valid_mmsi(mmsi)) return nullptr;
    auto it = profiles_.find(mmsi);
    return it == profiles_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return profiles_.size(); }

  std::size_t included_count() const {
    return static_cast<std::size_t>(
        std::count_if(profiles_.begin(), profiles_.end(), [](const auto& kv) { return kv.second.included; }));
  }

  /// Profiles ordered by MMSI.
  std::vector<const VesselProfile*> profiles() const {
    std::vector<const VesselProfile*> out;
    out.reserve(profiles_.size());
    for (const auto& [_, p] : profiles_) out.push_back(&p);
    std::sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->mmsi < b->mmsi; });
    return out;
  }

  /// CSV `mmsi,imo,name,type_code,category_hint,dwt,gt,teu`. Empty numeric fields read as 0.
  static FleetRegistry from_csv(std::istream& in, const SizeClassScheme& scheme, std::string source = "<fleet>") {
    csv::Reader reader(in, source);
    reader.require({"mmsi", "imo", "name", "type_code", "category_hint", "dwt", "gt", "teu"});
    const auto col = [&](std::string_view n) { return *reader.column(n); };
    const std::size_t c_mmsi = col("mmsi"), c_imo = col("imo"), c_name = col("name"), c_type = col("type_code"),
                      c_hint = col("category_hint"), c_dwt = col("dwt"), c_gt = col("gt"), c_teu = col("teu");
    FleetRegistry reg;
    std::vector<std::string> f;
    while (reader.next(f)) {
      VesselInputs v;
      const auto mmsi = csv::parse_number<std::uint32_t>(f[c_mmsi]);
      if (!mmsi) throw DataError(fmt::format("{}: bad mmsi '{}'", reader.where(), f[c_mmsi]));
      v.mmsi = *mmsi;
      v.imo = csv::parse_number<std::uint32_t>(f[c_imo]).value_or(0);
      v.name = f[c_name];
      const auto type = csv::parse_number<int>(f[c_type]);
      if (!type) throw DataError(fmt::format("{}: bad type_code '{}'", reader.where(), f[c_type]));
      v.type_code = *type;
      v.category_hint = f[c_hint];
      auto measure = [&](std::size_t c, std::string_view what) {
        if (f[c].empty()) return 0.0;
        const auto x = csv::parse_number<double>(f[c]);
        if (!x || *x < 0.0 || !std::isfinite(*x))
          throw DataError(fmt::format("{}: bad {} '{}'", reader.where(), what, f[c]));
        return *x;
      };
      v.dwt = measure(c_dwt, "dwt");
      v.gt = measure(c_gt, "gt");
      v.teu = measure(c_teu, "teu");
      reg.add(classify(v, scheme));
    }
    return reg;
  }

  static FleetRegistry load(const std::filesystem::path& path, const SizeClassScheme& scheme) {
    auto in = open_input(path);
    return from_csv(in, scheme, path.string());
  }

 private:
  std::unordered_map<std::uint32_t, VesselProfile> profiles_;
};

inline std::string fleet_csv_header() { return "mmsi,imo,name,type_code,category_hint,dwt,gt,teu\n"; }

inline std::string fleet_csv_row(const VesselInputs& v) {
  return csv::row(std::to_string(v.mmsi), std::to_string(v.imo), v.name, std::to_string(v.type_code),
                  v.category_hint, fmt::format("{}", v.dwt), fmt::format("{}", v.gt), fmt::format("{}", v.teu));
}

}  // namespace shipmob
