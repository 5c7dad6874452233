#pragma once

// Command-line front end. Lives in a header so the test suites can drive it
// in-process; tools/embias.cpp only forwards argv.
//
// Exit codes: 0 success, 1 I/O or parse failure, 2 resolution or degenerate
// data, 64 usage error.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "embias/embedding_store.hpp"
#include "embias/error.hpp"
#include "embias/realworld_data.hpp"
#include "embias/report.hpp"
#include "embias/stimuli.hpp"
#include "embias/weat.hpp"
#include "embias/wefat.hpp"

namespace embias::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitUsage = 64;

struct EmbeddingOptions {
  std::string path;
  std::string cache;
  std::string format = "glove";
  std::size_t max_vocab = 0;
  bool lenient_tokens = false;
};

struct LoadedEmbedding {
  EmbeddingStore store;
  std::vector<std::string> notes;
};

namespace detail {

inline void add_embedding_options(CLI::App* app, EmbeddingOptions& o, const std::string& flag = "--embedding",
                                  const std::string& prefix = "") {
  app->add_option(flag, o.path, "Embedding file (GloVe or word2vec text, or an EMB1 cache)");
  app->add_option("--" + prefix + "cache", o.cache,
                  "EMB1 cache path: loaded when present, written after parsing otherwise");
  app->add_option("--" + prefix + "embedding-format", o.format, "Text format: glove or word2vec")
      ->check(CLI::IsMember({"glove", "word2vec"}));
  app->add_option("--" + prefix + "max-vocab", o.max_vocab, "Keep at most this many records (0 = all)");
  app->add_flag("--" + prefix + "lenient-tokens", o.lenient_tokens,
                "Allow tokens containing spaces (token = text before the last d fields)");
}

inline std::string default_cache_path(const std::string& embedding) {
  const char* dir = std::getenv("EMBIAS_CACHE_DIR");
  if (dir == nullptr || *dir == '\0' || embedding.empty()) return {};
  return (std::filesystem::path(dir) / (std::filesystem::path(embedding).filename().string() + ".emb1"))
      .string();
}

inline LoadedEmbedding load_embedding(const EmbeddingOptions& o) {
  LoadedEmbedding out;
  std::string cache = o.cache.empty() ? default_cache_path(o.path) : o.cache;
  if (!cache.empty() && std::filesystem::exists(cache)) {
    out.store = load_cache(cache);
    out.notes.push_back("loaded embedding from cache " + cache);
    return out;
  }
  if (o.path.empty()) throw UsageError("--embedding is required");
  if (is_cache_file(o.path)) {
    out.store = load_cache(o.path);
    return out;
  }
  ParseOptions po;
  po.format = o.format == "word2vec" ? EmbeddingFormat::word2vec_text : EmbeddingFormat::glove;
  po.max_vocab = o.max_vocab;
  po.lenient_tokens = o.lenient_tokens;
  out.store = load_embedding_text<float>(o.path, po);
  if (!cache.empty()) {
    save_cache(out.store, cache);
    out.notes.push_back("wrote embedding cache " + cache);
  }
  return out;
}

inline FallbackChain parse_chain(const std::vector<std::string>& names) {
  FallbackChain chain;
  for (const auto& n : names) {
    std::stringstream ss(n);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) chain.push_back(parse_fallback(part));
    }
  }
  if (chain.empty()) chain.push_back(Fallback::exact);
  return chain;
}

// Writes to --out when given, else to the command's stdout.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
      if (!*file_) throw ParseError("cannot open '" + path + "' for writing");
      out_ = file_.get();
    }
  }
  std::ostream& stream() { return *out_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* out_;
};

inline std::vector<std::string> read_target_words(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open targets file '" + path + "'");
  if (path.ends_with(".json")) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("targets file is not valid JSON: ") + e.what());
    }
    if (j.is_array()) return j.get<std::vector<std::string>>();
    if (j.is_object() && j.contains("words")) return j.at("words").get<std::vector<std::string>>();
    throw ParseError("targets JSON must be an array of words or an object with 'words'");
  }
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    std::string w = csv::trim(line);
    if (w.empty() || w.front() == '#') continue;
    words.push_back(w);
  }
  return words;
}

inline std::pair<WordSet, WordSet> read_attributes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open attributes file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("attributes file is not valid JSON: ") + e.what());
  }
  WordSet a = embias::detail::word_set_from_json(j, "A");
  WordSet b = embias::detail::word_set_from_json(j, "B");
  validate(a);
  validate(b);
  return {a, b};
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Subcommands

struct WeatArgs {
  EmbeddingOptions embedding;
  std::string test, spec;
  std::string p_method = "auto";
  std::uint64_t samples = 100'000;
  std::uint64_t seed = 0;
  std::uint64_t exact_threshold = 200'000;
  std::string tie = "geq";
  std::string sd = "population";
  std::vector<std::string> fallback;
  unsigned threads = 0;
  std::string format = "text";
  std::string out;
};

inline int cmd_weat(const WeatArgs& a, const std::vector<std::string>& invocation, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  if (a.test.empty() == a.spec.empty()) throw UsageError("weat needs exactly one of --test or --spec");
  const WeatSpec spec = a.test.empty() ? load_spec(a.spec) : builtin_weat(a.test);
  WeatConfig config;
  config.p_method = parse_p_method(a.p_method);
  config.samples = a.samples;
  config.seed = a.seed;
  config.exact_threshold = a.exact_threshold;
  config.tie = parse_tie(a.tie);
  config.sd = a.sd == "sample" ? SdConvention::sample : SdConvention::population;
  config.fallback_chain = detail::parse_chain(a.fallback);
  config.threads = a.threads;
  config.validate();

  LoadedEmbedding emb = detail::load_embedding(a.embedding);
  const WeatResult result = run_weat(spec, emb.store, config);

  RunContext ctx{"weat", invocation, emb.store.provenance(), emb.store.stats(), emb.notes, 0.0};
  auto w = resolution_warnings(result.resolution.missing, result.resolution.rebalance_deletions,
                               result.resolution.substitutions);
  ctx.warnings.insert(ctx.warnings.end(), w.begin(), w.end());
  if (result.p_method == PMethod::normal) ctx.warnings.push_back("p_value is a normal-tail approximation");
  ctx.duration_seconds = detail::seconds_since(t0);

  detail::Sink sink(a.out, out);
  if (a.format == "json") {
    sink.stream() << weat_report_json(result, ctx).dump(2) << "\n";
  } else if (a.format == "csv") {
    write_weat_csv(result, sink.stream());
  } else {
    write_weat_text(result, ctx, sink.stream());
  }
  return kExitOk;
}

struct WefatArgs {
  EmbeddingOptions embedding;
  std::string test;
  std::string targets;
  std::string properties;
  std::string mapping;
  std::string attributes;
  std::string name_filter = "off";
  double drop_fraction = 0.2;
  std::string filter_metric = "cosine";
  bool select_androgynous = false;
  double window = 10.0;
  std::size_t per_window = 5;
  std::vector<std::string> fallback;
  std::string format = "text";
  std::string out;
  std::string points_out;
};

// Reads a properties CSV in any of the three supported shapes: occupations
// (occupation,pct_women[,workers]), census names (name,pct_women,popularity),
// or generic (word,property).
struct PropertySource {
  std::vector<PropertyRecord> records;
  std::vector<NameRecord> census;  // non-empty for census input
  std::vector<std::string> notes;
};

inline PropertySource read_properties(const std::string& path, const std::string& mapping_path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open properties CSV '" + path + "'");
  std::size_t line_no = 0;
  auto header_row = csv::read_record(in, line_no);
  if (!header_row) throw ParseError("properties CSV is empty");
  const csv::Header header(*header_row);
  in.clear();
  in.seekg(0);

  PropertySource src;
  if (header.has("occupation")) {
    OccupationTable table = load_occupations_csv(in);
    const OccupationMapping mapping =
        mapping_path.empty() ? builtin_occupation_mapping() : load_occupation_mapping(mapping_path);
    ReducedOccupations reduced = aggregate_occupations(table.records, mapping);
    src.records = std::move(reduced.properties);
    if (table.dropped_missing > 0) {
      src.notes.push_back(std::to_string(table.dropped_missing) + " occupation row(s) without pct_women dropped");
    }
    for (const auto& u : reduced.unmappable) src.notes.push_back("unmappable occupation: " + u);
  } else if (header.has("name") && header.has("popularity")) {
    src.census = load_census_names_csv(in);
    for (const auto& r : src.census) src.records.push_back({r.name, r.pct_women});
  } else {
    src.records = load_properties_csv(in);
  }
  return src;
}

inline int cmd_wefat(const WefatArgs& a, const std::vector<std::string>& invocation, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!a.test.empty() && !a.targets.empty()) throw UsageError("--test and --targets are mutually exclusive");
  if (a.properties.empty()) throw UsageError("wefat needs --properties");
  if (a.name_filter != "on" && a.name_filter != "off") throw UsageError("--name-filter takes on or off");

  WefatSpec spec;
  if (!a.test.empty()) {
    spec = builtin_wefat(a.test);
  } else {
    WefatSpec defaults = builtin_wefat("occupations");
    spec.test_id = "custom";
    spec.A = defaults.A;
    spec.B = defaults.B;
    spec.targets.label = "Targets";
  }
  if (!a.attributes.empty()) std::tie(spec.A, spec.B) = detail::read_attributes(a.attributes);

  PropertySource props = read_properties(a.properties, a.mapping);
  if (a.test.empty()) {
    if (!a.targets.empty()) {
      spec.targets.words = detail::read_target_words(a.targets);
    } else if (a.select_androgynous) {
      if (props.census.empty()) throw UsageError("--select-androgynous needs a census names CSV");
      for (const auto& r : select_androgynous(props.census, a.window, a.per_window).names) {
        spec.targets.words.push_back(r.name);
      }
    } else {
      for (const auto& r : props.records) spec.targets.words.push_back(r.word);
    }
  }

  WefatOptions options;
  options.name_filter = a.name_filter == "on";
  options.drop_fraction = a.drop_fraction;
  options.filter_metric = a.filter_metric == "euclidean" ? DistanceMetric::euclidean : DistanceMetric::cosine;
  options.fallback_chain = detail::parse_chain(a.fallback);

  LoadedEmbedding emb = detail::load_embedding(a.embedding);
  const WefatResult result = run_wefat(spec.targets, std::span<const PropertyRecord>(props.records), spec.A,
                                       spec.B, emb.store, options, spec.test_id);

  RunContext ctx{"wefat", invocation, emb.store.provenance(), emb.store.stats(), emb.notes, 0.0};
  ctx.warnings.insert(ctx.warnings.end(), props.notes.begin(), props.notes.end());
  auto w = resolution_warnings(result.missing, {}, result.substitutions);
  ctx.warnings.insert(ctx.warnings.end(), w.begin(), w.end());
  ctx.duration_seconds = detail::seconds_since(t0);

  if (!a.points_out.empty()) {
    detail::Sink points(a.points_out, out);
    write_points_csv(result, points.stream());
  }
  detail::Sink sink(a.out, out);
  if (a.format == "json") {
    sink.stream() << wefat_report_json(result, ctx).dump(2) << "\n";
  } else if (a.format == "csv") {
    write_wefat_csv(result, sink.stream());
  } else {
    write_wefat_text(result, ctx, sink.stream());
  }
  return kExitOk;
}

struct CompareArgs {
  EmbeddingOptions first, second;
  std::string test = "occupations";
  std::string targets;
  std::vector<std::string> fallback;
  std::string format = "text";
  std::string out;
};

inline int cmd_compare(const CompareArgs& a, const std::vector<std::string>& invocation, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  WefatSpec spec = builtin_wefat(a.test);
  std::vector<std::string> words =
      a.targets.empty() ? spec.targets.words : detail::read_target_words(a.targets);
  const FallbackChain chain = detail::parse_chain(a.fallback);
  LoadedEmbedding e1 = detail::load_embedding(a.first);
  LoadedEmbedding e2 = detail::load_embedding(a.second);
  const EmbeddingComparison c =
      compare_embeddings(std::span<const std::string>(words), spec.A, spec.B, e1.store, e2.store, chain);

  RunContext ctx{"compare", invocation, e1.store.provenance(), e1.store.stats(), e1.notes, 0.0};
  ctx.warnings.insert(ctx.warnings.end(), e2.notes.begin(), e2.notes.end());
  for (const auto& d : c.dropped) ctx.warnings.push_back("dropped " + d.word + ": " + d.reason);
  ctx.duration_seconds = detail::seconds_since(t0);

  detail::Sink sink(a.out, out);
  if (a.format == "json") {
    sink.stream() << compare_report_json(c, ctx, e2.store.provenance(), e2.store.stats()).dump(2) << "\n";
  } else if (a.format == "csv") {
    sink.stream() << "n,pearson_rho,spearman_rho\n"
                  << c.n << ',' << format_number(c.pearson_rho) << ',' << format_number(c.spearman_rho) << '\n';
  } else {
    sink.stream() << "compare " << a.test << "\n"
                  << "n: " << c.n << "\n"
                  << "pearson_rho: " << format_number(c.pearson_rho) << "\n"
                  << "spearman_rho: " << format_number(c.spearman_rho) << "\n";
    for (const auto& wline : ctx.warnings) sink.stream() << "warning: " << wline << "\n";
  }
  return kExitOk;
}

inline int cmd_stimuli_list(std::ostream& out) {
  out << "WEAT tests (X / Y / A / B word counts):\n";
  for (auto id : builtin_weat_ids()) {
    const WeatSpec s = builtin_weat(id);
    out << "  " << id << "  " << s.X.words.size() << "/" << s.Y.words.size() << "/" << s.A.words.size() << "/"
        << s.B.words.size() << "  " << s.source << "\n";
  }
  out << "WEFAT tests (targets / A / B word counts):\n";
  for (auto id : builtin_wefat_ids()) {
    const WefatSpec s = builtin_wefat(id);
    out << "  " << id << "  " << s.targets.words.size() << "/" << s.A.words.size() << "/" << s.B.words.size()
        << "  " << s.source << "\n";
  }
  return kExitOk;
}

inline int cmd_stimuli_export(const std::string& test, const std::string& path, std::ostream& out) {
  nlohmann::json j;
  if (is_builtin_wefat(test)) {
    j = to_json(builtin_wefat(test));
  } else {
    j = to_json(builtin_weat(test));
  }
  detail::Sink sink(path, out);
  sink.stream() << j.dump(2) << "\n";
  return kExitOk;
}

inline int cmd_stimuli_figure(const std::string& figure, const std::string& path, std::ostream& out) {
  const auto points = builtin_figure_data(figure);
  detail::Sink sink(path, out);
  sink.stream() << "x,y\n";
  for (const auto& p : points) sink.stream() << format_number(p.x) << ',' << format_number(p.y) << '\n';
  return kExitOk;
}

inline int cmd_info(const EmbeddingOptions& o, const std::string& make_cache, const std::string& format,
                    std::ostream& out) {
  LoadedEmbedding emb = detail::load_embedding(o);
  if (!make_cache.empty()) save_cache(emb.store, make_cache);
  const auto& s = emb.store.stats();
  if (format == "json") {
    nlohmann::json j = embedding_json(emb.store.provenance(), s);
    if (!make_cache.empty()) j["cache_written"] = make_cache;
    out << j.dump(2) << "\n";
  } else {
    out << "provenance: " << emb.store.provenance() << "\n"
        << "vocab_size: " << s.vocab_size << "\n"
        << "dimension: " << s.dimension << "\n"
        << "bytes_resident: " << s.bytes_resident << "\n"
        << "zero_vectors_dropped: " << s.zero_vectors_dropped << "\n"
        << "duplicate_tokens_dropped: " << s.duplicate_tokens_dropped << "\n";
    if (!make_cache.empty()) out << "cache_written: " << make_cache << "\n";
    for (const auto& n : emb.notes) out << "note: " << n << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Entry point

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"embias: association tests over word embeddings", "embias"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  const std::vector<std::string> formats = {"json", "csv", "text"};

  WeatArgs weat;
  CLI::App* weat_cmd = app.add_subcommand("weat", "Run a word embedding association test");
  detail::add_embedding_options(weat_cmd, weat.embedding);
  auto* test_opt = weat_cmd->add_option("--test", weat.test, "Built-in test id (see 'stimuli list')");
  auto* spec_opt = weat_cmd->add_option("--spec", weat.spec, "JSON test spec file");
  test_opt->excludes(spec_opt);
  weat_cmd->add_option("--p-method", weat.p_method, "exact, montecarlo, normal or auto")
      ->check(CLI::IsMember({"exact", "montecarlo", "normal", "auto"}));
  weat_cmd->add_option("--samples", weat.samples, "Monte Carlo partitions to draw");
  weat_cmd->add_option("--seed", weat.seed, "Seed for sampling and rebalancing");
  weat_cmd->add_option("--exact-threshold", weat.exact_threshold, "Largest partition count enumerated exactly");
  weat_cmd->add_option("--tie", weat.tie, "geq or strict")->check(CLI::IsMember({"geq", "strict"}));
  weat_cmd->add_option("--sd", weat.sd, "Effect-size deviation: population or sample")
      ->check(CLI::IsMember({"population", "sample"}));
  weat_cmd->add_option("--fallback", weat.fallback, "Lookup chain, e.g. exact,capitalized");
  weat_cmd->add_option("--threads", weat.threads, "Sampling threads (0 = all cores)");
  weat_cmd->add_option("--format", weat.format, "json, csv or text")->check(CLI::IsMember(formats));
  weat_cmd->add_option("--out", weat.out, "Write the report here instead of stdout");

  WefatArgs wefat;
  CLI::App* wefat_cmd = app.add_subcommand("wefat", "Regress real-world properties on association scores");
  detail::add_embedding_options(wefat_cmd, wefat.embedding);
  wefat_cmd->add_option("--test", wefat.test, "occupations or androgynous_names");
  wefat_cmd->add_option("--targets", wefat.targets, "Target words: text (one per line) or JSON");
  wefat_cmd->add_option("--properties", wefat.properties, "Properties CSV (occupations, census names, or word,property)");
  wefat_cmd->add_option("--mapping", wefat.mapping, "Occupation mapping JSON (default: built-in)");
  wefat_cmd->add_option("--attributes", wefat.attributes, "JSON with attribute sets A and B");
  wefat_cmd->add_option("--name-filter", wefat.name_filter, "on or off")->check(CLI::IsMember({"on", "off"}));
  wefat_cmd->add_option("--drop-fraction", wefat.drop_fraction, "Fraction dropped by the name filter");
  wefat_cmd->add_option("--filter-metric", wefat.filter_metric, "cosine or euclidean")
      ->check(CLI::IsMember({"cosine", "euclidean"}));
  wefat_cmd->add_flag("--select-androgynous", wefat.select_androgynous,
                      "Pick targets from a census CSV by gender-frequency window");
  wefat_cmd->add_option("--window", wefat.window, "Window width in percent");
  wefat_cmd->add_option("--per-window", wefat.per_window, "Names kept per window");
  wefat_cmd->add_option("--fallback", wefat.fallback, "Lookup chain, e.g. exact,capitalized");
  wefat_cmd->add_option("--format", wefat.format, "json, csv or text")->check(CLI::IsMember(formats));
  wefat_cmd->add_option("--out", wefat.out, "Write the report here instead of stdout");
  wefat_cmd->add_option("--points-out", wefat.points_out, "Write word,score,property rows here");

  CompareArgs compare;
  CLI::App* compare_cmd = app.add_subcommand("compare", "Correlate association scores across two embeddings");
  detail::add_embedding_options(compare_cmd, compare.first);
  detail::add_embedding_options(compare_cmd, compare.second, "--embedding2", "second-");
  compare_cmd->add_option("--test", compare.test, "WEFAT test supplying words and attributes");
  compare_cmd->add_option("--targets", compare.targets, "Override the word list");
  compare_cmd->add_option("--fallback", compare.fallback, "Lookup chain, e.g. exact,capitalized");
  compare_cmd->add_option("--format", compare.format, "json, csv or text")->check(CLI::IsMember(formats));
  compare_cmd->add_option("--out", compare.out, "Write the report here instead of stdout");

  CLI::App* stimuli_cmd = app.add_subcommand("stimuli", "List or export built-in stimulus sets");
  stimuli_cmd->require_subcommand(1);
  CLI::App* list_cmd = stimuli_cmd->add_subcommand("list", "List built-in tests");
  std::string export_test, export_out;
  CLI::App* export_cmd = stimuli_cmd->add_subcommand("export", "Write a built-in test as a JSON spec");
  export_cmd->add_option("--test", export_test, "Built-in test id")->required();
  export_cmd->add_option("--out", export_out, "Output file (default stdout)");
  std::string figure_id, figure_out;
  CLI::App* figure_cmd = stimuli_cmd->add_subcommand("figure", "Write published figure points as CSV (x,y)");
  figure_cmd->add_option("--figure", figure_id, "fig1_occupations or fig2_names")->required();
  figure_cmd->add_option("--out", figure_out, "Output file (default stdout)");

  EmbeddingOptions info;
  std::string make_cache, info_format = "text";
  CLI::App* info_cmd = app.add_subcommand("info", "Print embedding statistics");
  detail::add_embedding_options(info_cmd, info);
  info_cmd->add_option("--make-cache", make_cache, "Also write an EMB1 cache here");
  info_cmd->add_option("--format", info_format, "json or text")->check(CLI::IsMember({"json", "text"}));

  std::vector<const char*> argv;
  argv.push_back("embias");
  for (const auto& s : args) argv.push_back(s.c_str());
  std::vector<std::string> invocation = {"embias"};
  invocation.insert(invocation.end(), args.begin(), args.end());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    app.exit(e, err, err);
    return kExitUsage;
  }

  try {
    if (weat_cmd->parsed()) return cmd_weat(weat, invocation, out);
    if (wefat_cmd->parsed()) return cmd_wefat(wefat, invocation, out);
    if (compare_cmd->parsed()) return cmd_compare(compare, invocation, out);
    if (list_cmd->parsed()) return cmd_stimuli_list(out);
    if (export_cmd->parsed()) return cmd_stimuli_export(export_test, export_out, out);
    if (figure_cmd->parsed()) return cmd_stimuli_figure(figure_id, figure_out, out);
    if (info_cmd->parsed()) return cmd_info(info, make_cache, info_format, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ResolutionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const DegenerateError& e) {
    err << "error: degenerate data: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}

inline int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace embias::cli
