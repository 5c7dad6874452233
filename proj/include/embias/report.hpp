#pragma once

// Run reports: JSON (stable field names, versioned schema), plain text, and
// single-row CSV. All three print numbers so that they parse back to the same
// double.

#include <charconv>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "embias/embedding_store.hpp"
#include "embias/weat.hpp"
#include "embias/wefat.hpp"

#ifndef EMBIAS_VERSION
#define EMBIAS_VERSION "0.0.0"
#endif

namespace embias {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr std::string_view kToolVersion = EMBIAS_VERSION;

// Shortest decimal that round-trips to the same double.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

struct RunContext {
  std::string command;
  std::vector<std::string> invocation;
  std::string provenance;
  EmbeddingStats stats;
  std::vector<std::string> warnings;
  double duration_seconds = 0.0;
};

inline nlohmann::json embedding_json(const std::string& provenance, const EmbeddingStats& s) {
  return {{"provenance", provenance},
          {"vocab_size", s.vocab_size},
          {"dimension", s.dimension},
          {"bytes_resident", s.bytes_resident},
          {"zero_vectors_dropped", s.zero_vectors_dropped},
          {"duplicate_tokens_dropped", s.duplicate_tokens_dropped}};
}

namespace detail {

inline nlohmann::json header_json(const RunContext& ctx) {
  return {{"schema_version", kReportSchemaVersion},
          {"tool", "embias"},
          {"tool_version", std::string(kToolVersion)},
          {"command", ctx.command},
          {"invocation", ctx.invocation},
          {"embedding", embedding_json(ctx.provenance, ctx.stats)}};
}

inline nlohmann::json missing_json(const std::vector<MissingWord>& missing) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& m : missing) out.push_back({{"set", m.set}, {"word", m.word}, {"tried", m.tried}});
  return out;
}

inline nlohmann::json substitutions_json(const std::vector<Substitution>& subs) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : subs) {
    out.push_back({{"set", s.set}, {"word", s.word}, {"token", s.token}, {"via", s.via}, {"tried", s.tried}});
  }
  return out;
}

inline std::vector<std::string> fallback_names(const FallbackChain& chain) {
  std::vector<std::string> out;
  for (Fallback f : chain) out.emplace_back(to_string(f));
  return out;
}

}  // namespace detail

// Warnings derived from a resolution: misses, rebalancing deletions, and
// substitutions through fallbacks or aliases.
inline std::vector<std::string> resolution_warnings(const std::vector<MissingWord>& missing,
                                                    const std::vector<Deletion>& deletions,
                                                    const std::vector<Substitution>& subs) {
  std::vector<std::string> out;
  for (const auto& m : missing) out.push_back("missing from embedding: " + m.word + " (" + m.set + ")");
  for (const auto& d : deletions) out.push_back("deleted to rebalance targets: " + d.word + " (" + d.set + ")");
  for (const auto& s : subs) {
    out.push_back("resolved " + s.word + " as " + s.token + " via " + s.via + " (" + s.set + ")");
  }
  return out;
}

// ---------------------------------------------------------------------------
// WEAT

inline nlohmann::json weat_report_json(const WeatResult& r, const RunContext& ctx) {
  nlohmann::json j = detail::header_json(ctx);
  const auto& res = r.resolution;
  j["test_id"] = r.test_id;
  j["source"] = res.source;
  j["n_x"] = res.X.size();
  j["n_y"] = res.Y.size();
  j["n_a"] = res.A.size();
  j["n_b"] = res.B.size();
  j["labels"] = {{"X", res.X.label}, {"Y", res.Y.label}, {"A", res.A.label}, {"B", res.B.label}};
  j["statistic"] = r.statistic;
  j["effect_size"] = optional_number(r.effect_size);
  j["effect_size_degenerate"] = !r.effect_size.has_value();
  j["p_value"] = r.p_value;
  j["p_method"] = std::string(to_string(r.p_method));
  j["p_method_requested"] = std::string(to_string(r.p_method_requested));
  j["p_approximate"] = r.p_method == PMethod::normal;
  j["p_stderr"] = optional_number(r.p_stderr);
  j["p_raw"] = optional_number(r.p_raw);
  j["p_normal"] = optional_number(r.p_normal);
  j["null_mean"] = optional_number(r.null_mean);
  j["null_sd"] = optional_number(r.null_sd);
  j["samples"] = r.samples;
  j["partitions"] = r.partitions;
  j["seed"] = r.seed;
  j["tie"] = std::string(to_string(r.tie));
  j["sd"] = std::string(to_string(r.sd));
  j["fallback"] = detail::fallback_names(res.fallback_chain);
  j["missing"] = detail::missing_json(res.missing);
  nlohmann::json deletions = nlohmann::json::array();
  for (const auto& d : res.rebalance_deletions) deletions.push_back({{"set", d.set}, {"word", d.word}});
  j["deletions"] = deletions;
  j["substitutions"] = detail::substitutions_json(res.substitutions);
  nlohmann::json per_word = nlohmann::json::array();
  for (const auto& w : r.per_word) {
    per_word.push_back({{"word", w.word}, {"token", w.token}, {"set", w.set}, {"association", w.association}});
  }
  j["per_word"] = per_word;
  j["warnings"] = ctx.warnings;
  j["duration_seconds"] = ctx.duration_seconds;
  return j;
}

namespace detail {

// (name, value) pairs shared by the text and CSV renderings.
inline std::vector<std::pair<std::string, std::string>> weat_scalars(const WeatResult& r) {
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  const auto& res = r.resolution;
  return {{"test_id", r.test_id},
          {"n_x", std::to_string(res.X.size())},
          {"n_y", std::to_string(res.Y.size())},
          {"n_a", std::to_string(res.A.size())},
          {"n_b", std::to_string(res.B.size())},
          {"statistic", format_number(r.statistic)},
          {"effect_size", opt(r.effect_size)},
          {"p_value", format_number(r.p_value)},
          {"p_method", std::string(to_string(r.p_method))},
          {"p_stderr", opt(r.p_stderr)},
          {"p_normal", opt(r.p_normal)},
          {"samples", std::to_string(r.samples)},
          {"partitions", std::to_string(r.partitions)},
          {"seed", std::to_string(r.seed)},
          {"tie", std::string(to_string(r.tie))},
          {"sd", std::string(to_string(r.sd))},
          {"missing", std::to_string(res.missing.size())},
          {"deletions", std::to_string(res.rebalance_deletions.size())}};
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_csv_row(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& kv) {
  for (std::size_t i = 0; i < kv.size(); ++i) os << (i ? "," : "") << csv_escape(kv[i].first);
  os << '\n';
  for (std::size_t i = 0; i < kv.size(); ++i) os << (i ? "," : "") << csv_escape(kv[i].second);
  os << '\n';
}

}  // namespace detail

inline void write_weat_text(const WeatResult& r, const RunContext& ctx, std::ostream& os) {
  const auto& res = r.resolution;
  os << "WEAT " << r.test_id << "\n";
  os << "  targets:    X = " << res.X.label << " (" << res.X.size() << "), Y = " << res.Y.label << " ("
     << res.Y.size() << ")\n";
  os << "  attributes: A = " << res.A.label << " (" << res.A.size() << "), B = " << res.B.label << " ("
     << res.B.size() << ")\n";
  os << "statistic: " << format_number(r.statistic) << "\n";
  os << "effect_size: " << (r.effect_size ? format_number(*r.effect_size) : "degenerate (zero deviation)")
     << "\n";
  os << "p_value: " << format_number(r.p_value) << "\n";
  os << "p_method: " << to_string(r.p_method);
  if (r.p_method == PMethod::exact) {
    os << " (" << r.partitions << " partitions, tie " << to_string(r.tie) << ")";
  } else if (r.p_method == PMethod::montecarlo) {
    os << " (" << r.samples << " samples, seed " << r.seed << ", tie " << to_string(r.tie) << ")";
  } else {
    os << " approximation (normal fit to " << r.samples << " samples, seed " << r.seed << ")";
  }
  os << "\n";
  if (r.p_stderr) os << "p_stderr: " << format_number(*r.p_stderr) << "\n";
  if (r.p_normal) os << "p_normal: " << format_number(*r.p_normal) << " (approximate)\n";
  for (const auto& w : ctx.warnings) os << "warning: " << w << "\n";
}

inline void write_weat_csv(const WeatResult& r, std::ostream& os) {
  detail::write_csv_row(os, detail::weat_scalars(r));
}

// ---------------------------------------------------------------------------
// WEFAT

inline nlohmann::json wefat_report_json(const WefatResult& r, const RunContext& ctx) {
  nlohmann::json j = detail::header_json(ctx);
  j["test_id"] = r.test_id;
  j["n_points"] = r.points.size();
  j["n_a"] = r.n_a;
  j["n_b"] = r.n_b;
  j["name_filter"] = r.options.name_filter;
  j["drop_fraction"] = r.options.drop_fraction;
  j["filter_metric"] = r.options.filter_metric == DistanceMetric::cosine ? "cosine" : "euclidean";
  j["fallback"] = detail::fallback_names(r.options.fallback_chain);
  j["pearson_rho"] = r.regression.pearson_rho;
  j["pearson_p"] = r.regression.pearson_p;
  j["spearman_rho"] = r.regression.spearman_rho;
  j["slope"] = r.regression.slope;
  j["intercept"] = r.regression.intercept;
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : r.points) {
    points.push_back({{"word", p.word}, {"token", p.token}, {"score", p.score}, {"property", p.property}});
  }
  j["points"] = points;
  nlohmann::json dropped = nlohmann::json::array();
  for (const auto& d : r.dropped) dropped.push_back({{"word", d.word}, {"reason", d.reason}});
  j["dropped"] = dropped;
  nlohmann::json filtered = nlohmann::json::array();
  for (const auto& f : r.filtered) filtered.push_back({{"token", f.token}, {"distance", f.distance}});
  j["filtered"] = filtered;
  j["missing"] = detail::missing_json(r.missing);
  j["substitutions"] = detail::substitutions_json(r.substitutions);
  j["warnings"] = ctx.warnings;
  j["duration_seconds"] = ctx.duration_seconds;
  return j;
}

namespace detail {

inline std::vector<std::pair<std::string, std::string>> wefat_scalars(const WefatResult& r) {
  return {{"test_id", r.test_id},
          {"n_points", std::to_string(r.points.size())},
          {"n_a", std::to_string(r.n_a)},
          {"n_b", std::to_string(r.n_b)},
          {"pearson_rho", format_number(r.regression.pearson_rho)},
          {"pearson_p", format_number(r.regression.pearson_p)},
          {"spearman_rho", format_number(r.regression.spearman_rho)},
          {"slope", format_number(r.regression.slope)},
          {"intercept", format_number(r.regression.intercept)},
          {"name_filter", r.options.name_filter ? "on" : "off"},
          {"dropped", std::to_string(r.dropped.size())}};
}

}  // namespace detail

inline void write_wefat_text(const WefatResult& r, const RunContext& ctx, std::ostream& os) {
  os << "WEFAT " << r.test_id << "\n";
  os << "points: " << r.points.size() << " (attributes " << r.n_a << " / " << r.n_b << ")\n";
  os << "pearson_rho: " << format_number(r.regression.pearson_rho) << "\n";
  os << "pearson_p: " << format_number(r.regression.pearson_p) << "\n";
  os << "spearman_rho: " << format_number(r.regression.spearman_rho) << "\n";
  os << "slope: " << format_number(r.regression.slope) << "\n";
  os << "intercept: " << format_number(r.regression.intercept) << "\n";
  os << "name_filter: " << (r.options.name_filter ? "on" : "off") << "\n";
  for (const auto& d : r.dropped) os << "dropped: " << d.word << " (" << d.reason << ")\n";
  for (const auto& w : ctx.warnings) os << "warning: " << w << "\n";
}

inline void write_wefat_csv(const WefatResult& r, std::ostream& os) {
  detail::write_csv_row(os, detail::wefat_scalars(r));
}

// Per-word rows for re-plotting: word,score,property.
inline void write_points_csv(const WefatResult& r, std::ostream& os) {
  os << "word,score,property\n";
  for (const auto& p : r.points) {
    os << detail::csv_escape(p.word) << ',' << format_number(p.score) << ',' << format_number(p.property) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Cross-embedding comparison

inline nlohmann::json compare_report_json(const EmbeddingComparison& c, const RunContext& ctx,
                                          const std::string& provenance2, const EmbeddingStats& stats2) {
  nlohmann::json j = detail::header_json(ctx);
  j["embedding2"] = embedding_json(provenance2, stats2);
  j["n"] = c.n;
  j["pearson_rho"] = c.pearson_rho;
  j["spearman_rho"] = c.spearman_rho;
  nlohmann::json words = nlohmann::json::array();
  for (std::size_t i = 0; i < c.words.size(); ++i) {
    words.push_back({{"word", c.words[i]}, {"score1", c.scores1[i]}, {"score2", c.scores2[i]}});
  }
  j["words"] = words;
  nlohmann::json dropped = nlohmann::json::array();
  for (const auto& d : c.dropped) dropped.push_back({{"word", d.word}, {"reason", d.reason}});
  j["dropped"] = dropped;
  j["warnings"] = ctx.warnings;
  j["duration_seconds"] = ctx.duration_seconds;
  return j;
}

}  // namespace embias
