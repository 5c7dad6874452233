#pragma once

// Ground-truth tables for WEFAT: occupation gender composition, census name
// gender frequencies, and the transcribed scatter data of the two published
// figures.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "embias/error.hpp"
#include "embias/stimuli.hpp"
#include "embias/wefat.hpp"

namespace embias {

// ---------------------------------------------------------------------------
// CSV

namespace csv {

// One RFC 4180 record: comma separated, fields optionally double-quoted with
// "" as an escaped quote. Returns nullopt at end of input.
inline std::optional<std::vector<std::string>> read_record(std::istream& in, std::size_t& line_no) {
  std::string line;
  if (!std::getline(in, line)) return std::nullopt;
  ++line_no;
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  std::size_t i = 0;
  while (true) {
    if (i == line.size()) {
      if (quoted) {
        // Quoted field spans a newline.
        std::string next;
        if (!std::getline(in, next)) throw ParseError("CSV line " + std::to_string(line_no) + ": unterminated quote");
        ++line_no;
        field.push_back('\n');
        line = std::move(next);
        i = 0;
        continue;
      }
      break;
    }
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r' || i + 1 != line.size()) {
      field.push_back(c);
    }
    ++i;
  }
  fields.push_back(std::move(field));
  return fields;
}

inline std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

inline std::optional<double> to_double(std::string_view s) {
  std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// Column name -> position, matched case-insensitively after trimming.
class Header {
 public:
  explicit Header(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      std::string key = detail::ascii_lower(trim(names[i]));
      if (i == 0 && key.starts_with("\xEF\xBB\xBF")) key.erase(0, 3);
      columns_.emplace(std::move(key), i);
    }
  }

  std::optional<std::size_t> find(std::string_view name) const {
    auto it = columns_.find(std::string(name));
    if (it == columns_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t require(std::string_view name, std::string_view what) const {
    if (auto c = find(name)) return *c;
    throw ParseError(std::string(what) + ": missing mandatory column '" + std::string(name) + "'");
  }

  bool has(std::string_view name) const { return find(name).has_value(); }

 private:
  std::map<std::string, std::size_t> columns_;
};

inline std::string field_or_empty(const std::vector<std::string>& row, std::size_t col) {
  return col < row.size() ? row[col] : std::string();
}

}  // namespace csv

inline void check_percentage(double pct, std::size_t line_no, std::string_view what) {
  if (pct < 0.0 || pct > 100.0) {
    throw ParseError(std::string(what) + " line " + std::to_string(line_no) + ": pct_women " +
                     std::to_string(pct) + " outside [0, 100]");
  }
}

// ---------------------------------------------------------------------------
// Occupations

struct OccupationRecord {
  std::string raw_name;
  double pct_women = 0.0;
  std::optional<std::uint64_t> workers;
};

struct OccupationTable {
  std::vector<OccupationRecord> records;
  std::size_t dropped_missing = 0;  // rows with no usable pct_women
};

inline OccupationTable load_occupations_csv(std::istream& in) {
  std::size_t line_no = 0;
  auto header_row = csv::read_record(in, line_no);
  if (!header_row) throw ParseError("occupations CSV is empty");
  const csv::Header header(*header_row);
  const std::size_t name_col = header.require("occupation", "occupations CSV");
  const std::size_t pct_col = header.require("pct_women", "occupations CSV");
  const auto workers_col = header.find("workers");

  OccupationTable table;
  while (auto row = csv::read_record(in, line_no)) {
    if (row->size() == 1 && csv::trim((*row)[0]).empty()) continue;
    std::string name = csv::trim(csv::field_or_empty(*row, name_col));
    if (name.empty()) throw ParseError("occupations CSV line " + std::to_string(line_no) + ": empty occupation");
    auto pct = csv::to_double(csv::field_or_empty(*row, pct_col));
    if (!pct) {
      ++table.dropped_missing;
      continue;
    }
    check_percentage(*pct, line_no, "occupations CSV");
    OccupationRecord rec{std::move(name), *pct, std::nullopt};
    if (workers_col) {
      std::string w = csv::trim(csv::field_or_empty(*row, *workers_col));
      std::erase_if(w, [](char c) { return c == '_' || c == ','; });
      std::uint64_t count = 0;
      if (!w.empty() && std::from_chars(w.data(), w.data() + w.size(), count).ec == std::errc()) {
        rec.workers = count;
      }
    }
    table.records.push_back(std::move(rec));
  }
  return table;
}

inline OccupationTable load_occupations_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open occupations CSV '" + path + "'");
  return load_occupations_csv(in);
}

// Exact raw-name mappings first, then the final word of the raw name if it is
// an allowlisted head word. Keys are matched lowercased with collapsed
// whitespace.
struct OccupationMapping {
  std::map<std::string, std::string> exact;
  std::set<std::string> heads;
};

namespace detail {

inline std::string normalize_occupation(std::string_view raw) {
  std::string out;
  bool space = false;
  for (char c : raw) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      space = !out.empty();
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
  }
  return out;
}

}  // namespace detail

inline OccupationMapping builtin_occupation_mapping() {
  OccupationMapping m;
  for (auto& w : detail::split_words(stimuli_data::kOccupations)) m.heads.insert(std::move(w));
  return m;
}

inline OccupationMapping occupation_mapping_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("occupation mapping must be a JSON object");
  OccupationMapping m;
  if (j.contains("exact")) {
    if (!j.at("exact").is_object()) throw ParseError("occupation mapping: 'exact' must be an object");
    for (auto it = j.at("exact").begin(); it != j.at("exact").end(); ++it) {
      if (!it.value().is_string()) throw ParseError("occupation mapping: exact targets must be strings");
      m.exact[detail::normalize_occupation(it.key())] = it.value().get<std::string>();
    }
  }
  if (j.contains("heads")) {
    if (!j.at("heads").is_array()) throw ParseError("occupation mapping: 'heads' must be an array");
    for (const auto& h : j.at("heads")) {
      if (!h.is_string()) throw ParseError("occupation mapping: heads must be strings");
      m.heads.insert(detail::normalize_occupation(h.get<std::string>()));
    }
  }
  return m;
}

inline OccupationMapping load_occupation_mapping(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open occupation mapping '" + path + "'");
  try {
    return occupation_mapping_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("occupation mapping is not valid JSON: ") + e.what());
  }
}

inline nlohmann::json to_json(const OccupationMapping& m) {
  return {{"exact", m.exact}, {"heads", m.heads}};
}

// Nullopt means the occupation cannot be reduced to a single word.
inline std::optional<std::string> reduce_occupation(std::string_view raw_name, const OccupationMapping& mapping) {
  const std::string key = detail::normalize_occupation(raw_name);
  if (auto it = mapping.exact.find(key); it != mapping.exact.end()) return it->second;
  const auto space = key.rfind(' ');
  std::string head = space == std::string::npos ? key : key.substr(space + 1);
  if (mapping.heads.contains(head)) return head;
  return std::nullopt;
}

struct ReducedOccupations {
  std::vector<PropertyRecord> properties;  // one per single-word occupation
  std::vector<std::string> unmappable;
};

// Percentage of women per reduced occupation word: worker-weighted when every
// contributing row carries a worker count, otherwise the plain mean.
inline ReducedOccupations aggregate_occupations(std::span<const OccupationRecord> records,
                                                const OccupationMapping& mapping) {
  struct Acc {
    double weighted = 0.0, weight = 0.0, plain = 0.0;
    std::size_t rows = 0;
    bool all_weighted = true;
  };
  std::map<std::string, Acc> acc;
  ReducedOccupations out;
  for (const auto& rec : records) {
    auto token = reduce_occupation(rec.raw_name, mapping);
    if (!token) {
      out.unmappable.push_back(rec.raw_name);
      continue;
    }
    Acc& a = acc[*token];
    ++a.rows;
    a.plain += rec.pct_women;
    if (rec.workers && *rec.workers > 0) {
      a.weighted += rec.pct_women * static_cast<double>(*rec.workers);
      a.weight += static_cast<double>(*rec.workers);
    } else {
      a.all_weighted = false;
    }
  }
  for (const auto& [token, a] : acc) {
    const double pct = a.all_weighted && a.weight > 0.0 ? a.weighted / a.weight
                                                        : a.plain / static_cast<double>(a.rows);
    out.properties.push_back({token, pct});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Census names

struct NameRecord {
  std::string name;
  double pct_women = 0.0;
  std::uint64_t popularity = 0;
};

inline std::vector<NameRecord> load_census_names_csv(std::istream& in) {
  std::size_t line_no = 0;
  auto header_row = csv::read_record(in, line_no);
  if (!header_row) throw ParseError("census names CSV is empty");
  const csv::Header header(*header_row);
  const std::size_t name_col = header.require("name", "census names CSV");
  const std::size_t pct_col = header.require("pct_women", "census names CSV");
  const std::size_t pop_col = header.require("popularity", "census names CSV");

  std::vector<NameRecord> records;
  while (auto row = csv::read_record(in, line_no)) {
    if (row->size() == 1 && csv::trim((*row)[0]).empty()) continue;
    NameRecord rec;
    rec.name = csv::trim(csv::field_or_empty(*row, name_col));
    if (rec.name.empty()) throw ParseError("census names CSV line " + std::to_string(line_no) + ": empty name");
    auto pct = csv::to_double(csv::field_or_empty(*row, pct_col));
    if (!pct) throw ParseError("census names CSV line " + std::to_string(line_no) + ": pct_women is not a number");
    check_percentage(*pct, line_no, "census names CSV");
    rec.pct_women = *pct;
    auto pop = csv::to_double(csv::field_or_empty(*row, pop_col));
    if (!pop || *pop < 0.0) {
      throw ParseError("census names CSV line " + std::to_string(line_no) + ": popularity must be a non-negative number");
    }
    rec.popularity = static_cast<std::uint64_t>(std::llround(*pop));
    records.push_back(std::move(rec));
  }
  return records;
}

inline std::vector<NameRecord> load_census_names_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open census names CSV '" + path + "'");
  return load_census_names_csv(in);
}

struct AndrogynousSelection {
  std::vector<NameRecord> names;            // grouped by window, then popularity
  std::vector<std::size_t> empty_windows;   // window indices with no records
};

// Buckets by pct_women into half-open windows [0,w), [w,2w), ... with the top
// window closed at 100, then keeps the per_window most popular names of each
// (ties by name).
inline AndrogynousSelection select_androgynous(std::span<const NameRecord> records, double window = 10.0,
                                               std::size_t per_window = 5) {
  if (!(window > 0.0 && window <= 100.0)) throw UsageError("window width must lie in (0, 100]");
  const auto windows = static_cast<std::size_t>(std::ceil(100.0 / window - 1e-9));
  std::vector<std::vector<NameRecord>> buckets(windows);
  for (const auto& r : records) {
    auto idx = static_cast<std::size_t>(std::floor(r.pct_women / window));
    buckets[std::min(idx, windows - 1)].push_back(r);
  }
  AndrogynousSelection out;
  for (std::size_t w = 0; w < windows; ++w) {
    auto& b = buckets[w];
    if (b.empty()) {
      out.empty_windows.push_back(w);
      continue;
    }
    std::sort(b.begin(), b.end(), [](const NameRecord& x, const NameRecord& y) {
      if (x.popularity != y.popularity) return x.popularity > y.popularity;
      return x.name < y.name;
    });
    const std::size_t take = std::min(per_window, b.size());
    out.names.insert(out.names.end(), b.begin(), b.begin() + static_cast<std::ptrdiff_t>(take));
  }
  return out;
}

// Generic property table: columns word, property.
inline std::vector<PropertyRecord> load_properties_csv(std::istream& in) {
  std::size_t line_no = 0;
  auto header_row = csv::read_record(in, line_no);
  if (!header_row) throw ParseError("properties CSV is empty");
  const csv::Header header(*header_row);
  const std::size_t word_col = header.require("word", "properties CSV");
  const std::size_t prop_col = header.require("property", "properties CSV");
  std::vector<PropertyRecord> out;
  while (auto row = csv::read_record(in, line_no)) {
    if (row->size() == 1 && csv::trim((*row)[0]).empty()) continue;
    PropertyRecord rec;
    rec.word = csv::trim(csv::field_or_empty(*row, word_col));
    auto v = csv::to_double(csv::field_or_empty(*row, prop_col));
    if (rec.word.empty() || !v) {
      throw ParseError("properties CSV line " + std::to_string(line_no) + ": expected word and numeric property");
    }
    rec.property = *v;
    out.push_back(std::move(rec));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Published figure data

struct FigurePoint {
  double x = 0.0;  // percentage of women
  double y = 0.0;  // association strength with the female attributes
};

namespace figure_data {

inline constexpr FigurePoint kOccupations[] = {
    {40.3405636548995, -0.618295772567137}, {59.7000002861022, -0.359534454457046},
    {38.6379688978195, -0.210380392309696}, {10.7220619916915, -1.24358460789786},
    {36.6602212190628, 0.183353483437528},  {70.8000004291534, 0.58057468396656},
    {69.5260107517242, -0.217910516724983}, {66.4814829826354, 0.886769028937551},
    {34.3712568283081, -0.932221142025421}, {1.79823748767375, -1.18589342551197},
    {38.5087370872497, -0.860851389212995}, {76.702058315277, 1.54325129179417},
    {54.8585951328277, -0.413876829168239}, {48.0778098106384, 0.368592694396301},
    {90.5999958515167, 1.56031771301856},   {82.9999983310699, 1.58391098910974},
    {37.9000008106231, -0.328774457043344}, {56.9999992847442, 0.572649919476393},
    {34.2999994754791, -0.82982271932872},  {70.3000009059906, 0.606284914383192},
    {37.9000008106231, -0.450193435780125}, {2.07293052226305, -1.27860785398165},
    {89.5787000656127, 1.69169044228022},   {45.1470792293548, 0.0433185744619843},
    {59.7999989986419, -0.149675516394478}, {41.2466585636138, -0.307129945976618},
    {2.30000000447034, -1.48342602197301},  {27.8983950614929, -0.75561650327389},
    {98.6000001430511, 0.201198396292573},  {70.9967494010925, 0.560582607867996},
    {34.4999998807907, -0.580433444033216}, {78.600001335144, 0.834401512543746},
    {74.7891068458557, 0.403603086051639},  {0.699999975040555, -1.27525463174608},
    {62.2999966144561, 0.34575788649185},   {37.9000008106231, -0.664525478690241},
    {60.5000019073486, 0.707161661508323},  {32.9000025987625, -0.107560895659864},
    {56.8609476089477, 0.356613856599807},  {36.0999971628189, -0.831631418106719},
    {6.700000166893, -1.07516910891801},    {52.2370278835296, -0.190559718575058},
    {94.5999979972839, 1.43541221781079},   {20.8091482520103, -1.13158517776214},
    {94.1999971866607, 1.40039418657867},   {60.7999980449676, 0.166763866801003},
    {18.3507040143013, -1.35196954392284},  {85.4000031948089, 1.43146828784567},
    {96.3999986648559, 1.606349523179},     {41.9448286294937, -0.801155869004541},
};

inline constexpr FigurePoint kNames[] = {
    {81.7919075489044, 0.994559450437584},  {80.4081618785858, 0.764976692097587},
    {69.8630094528198, 0.0752851555670182}, {67.6691710948944, 0.852229771474509},
    {3.68663594126701, -0.618020800146378}, {81.9047629833221, 1.10971315302975},
    {78.0346870422363, 1.19681407333001},   {33.333334326744, 0.169569466143982},
    {65.5319154262542, 0.735683932861957},  {81.3953459262847, 0.76221225285643},
    {90.1785731315612, 1.12532147897402},   {60.1226985454559, 0.924394461096375},
    {10.7142858207225, -0.863743302220375}, {87.6811623573303, 1.13932466229447},
    {34.939756989479, -0.3598206719527},    {3.4632034599781, -1.05635701147449},
    {20.4603567719459, -0.830027348966197}, {23.9436611533164, -0.396198491892427},
    {95.5835998058319, 1.21107626958981},   {7.09677413105964, -1.16336197437153},
    {13.3333340287208, -1.2359466051297},   {61.2903177738189, 0.412893909681936},
    {64.5161271095275, -0.614987313115582}, {40.9090906381607, 0.799690260931069},
    {24.3107795715332, -1.10876810848296},  {55.0000011920928, -0.124530545637003},
    {51.5151500701904, -0.864911660014612}, {97.4522292613983, 1.05393881410809},
    {73.1707334518432, 0.916458654272867},  {50, -0.0641337464599566},
    {48.8888889551162, -0.106233725501299}, {86.6666674613952, 0.993296686006082},
    {8.00000056624412, -0.630612324128962}, {86.6666674613952, 0.0515081102845481},
    {80.232560634613, 0.927492287542635},   {11.5384615957736, -1.22809559887457},
    {86.4077627658843, 1.04289233602163},   {32.9268306493759, 0.206859223153351},
    {90.0000035762786, 0.136451558037537},  {19.597989320755, -0.924865701835472},
    {71.7647075653076, 0.498356415447874},  {74.3902444839477, 0.888735715185642},
    {25, 0.0775454157604775},               {42.8571432828903, -0.631504403591407},
    {17.6470592617988, -0.681900157551051}, {94.6601927280426, 1.62007344731497},
    {72.9729712009429, -0.49374839613887},  {66.6666686534881, 0.330817523807185},
    {22.6666688919067, -0.863924864175879}, {69.4444417953491, 0.649136303144436},
};

}  // namespace figure_data

inline const std::vector<std::string_view>& builtin_figure_ids() {
  static const std::vector<std::string_view> ids = {"fig1_occupations", "fig2_names"};
  return ids;
}

inline std::vector<FigurePoint> builtin_figure_data(std::string_view id) {
  if (id == "fig1_occupations") {
    return {std::begin(figure_data::kOccupations), std::end(figure_data::kOccupations)};
  }
  if (id == "fig2_names") return {std::begin(figure_data::kNames), std::end(figure_data::kNames)};
  throw UsageError(detail::unknown_id_message(id, builtin_figure_ids()));
}

}  // namespace embias
