#pragma once

// Word-vector tables: parsing GloVe / word2vec text, the EMB1 binary cache,
// token lookup with case fallbacks, and the cosine / centroid primitives.
//
// Components are stored as T (float by default); every reduction is carried
// out in double.

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <vector>

#include "embias/error.hpp"

namespace embias {

enum class EmbeddingFormat { glove, word2vec_text };

enum class DuplicatePolicy { keep_first, keep_last, error };

struct ParseOptions {
  EmbeddingFormat format = EmbeddingFormat::glove;
  DuplicatePolicy duplicate_policy = DuplicatePolicy::keep_first;
  std::size_t max_vocab = 0;  // 0 = unlimited
  // Treat everything before the trailing d numeric fields as the token,
  // instead of the first space-delimited field. Off by default.
  bool lenient_tokens = false;
};

struct EmbeddingStats {
  std::size_t vocab_size = 0;
  std::size_t dimension = 0;
  std::size_t bytes_resident = 0;
  std::size_t zero_vectors_dropped = 0;
  std::size_t duplicate_tokens_dropped = 0;

  friend bool operator==(const EmbeddingStats&, const EmbeddingStats&) = default;
};

template <class T>
struct BasicWordVector {
  std::string_view token;
  std::span<const T> components;
  double norm = 0.0;

  std::size_t dimension() const { return components.size(); }
};

template <class T>
class BasicEmbeddingStore;

namespace detail {

template <class U, class V>
double dot(std::span<const U> u, std::span<const V> v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    acc += static_cast<double>(u[i]) * static_cast<double>(v[i]);
  }
  return acc;
}

template <class U>
double norm(std::span<const U> u) {
  return std::sqrt(dot(u, u));
}

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

inline std::string ascii_capitalized(std::string_view s) {
  std::string out = ascii_lower(s);
  if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') {
    out[0] = static_cast<char>(out[0] - 'a' + 'A');
  }
  return out;
}

template <class T>
bool parse_number(std::string_view field, T& out) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return false;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) return false;
  return std::isfinite(out);
}

// Fixed-width little-endian helpers for the EMB1 cache.
template <class U>
void put_le(std::ostream& os, U value) {
  static_assert(std::is_trivially_copyable_v<U>);
  unsigned char bytes[sizeof(U)];
  std::memcpy(bytes, &value, sizeof(U));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(std::begin(bytes), std::end(bytes));
  }
  os.write(reinterpret_cast<const char*>(bytes), sizeof(U));
}

template <class U>
U get_le(std::istream& is, const char* what) {
  unsigned char bytes[sizeof(U)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(U))) {
    throw ParseError(std::string("EMB1 cache truncated while reading ") + what);
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(std::begin(bytes), std::end(bytes));
  }
  U value;
  std::memcpy(&value, bytes, sizeof(U));
  return value;
}

}  // namespace detail

// Immutable token -> vector table with a fixed dimension and cached norms.
// Built through BasicEmbeddingStore::Builder; safe to share between threads.
template <class T>
class BasicEmbeddingStore {
 public:
  using value_type = T;
  using vector_type = BasicWordVector<T>;

  enum class AddOutcome { added, replaced, duplicate_dropped, zero_dropped };

  class Builder {
   public:
    explicit Builder(std::size_t dimension, std::string provenance = {},
                     DuplicatePolicy policy = DuplicatePolicy::keep_first)
        : policy_(policy) {
      if (dimension == 0) throw ParseError("embedding dimension must be positive");
      store_.dimension_ = dimension;
      store_.provenance_ = std::move(provenance);
    }

    std::size_t dimension() const { return store_.dimension_; }
    std::size_t size() const { return store_.tokens_.size(); }

    template <class U>
    AddOutcome add(std::string_view token, std::span<const U> components) {
      if (components.size() != store_.dimension_) {
        throw ParseError("vector for '" + std::string(token) + "' has " +
                         std::to_string(components.size()) + " components, expected " +
                         std::to_string(store_.dimension_));
      }
      std::span<const T> converted;
      std::vector<T> scratch;
      if constexpr (std::is_same_v<U, T>) {
        converted = components;
      } else {
        scratch.assign(components.begin(), components.end());
        converted = scratch;
      }
      const double n = detail::norm(converted);
      if (!(n > 0.0)) {
        ++stats_.zero_vectors_dropped;
        return AddOutcome::zero_dropped;
      }
      auto it = store_.index_.find(std::string(token));
      if (it != store_.index_.end()) {
        switch (policy_) {
          case DuplicatePolicy::keep_first:
            ++stats_.duplicate_tokens_dropped;
            return AddOutcome::duplicate_dropped;
          case DuplicatePolicy::keep_last: {
            std::copy(converted.begin(), converted.end(),
                      store_.data_.begin() + static_cast<std::ptrdiff_t>(it->second * store_.dimension_));
            store_.norms_[it->second] = n;
            ++stats_.duplicate_tokens_dropped;
            return AddOutcome::replaced;
          }
          case DuplicatePolicy::error:
            throw ParseError("duplicate token '" + std::string(token) + "'");
        }
      }
      store_.index_.emplace(std::string(token), store_.tokens_.size());
      store_.tokens_.emplace_back(token);
      store_.data_.insert(store_.data_.end(), converted.begin(), converted.end());
      store_.norms_.push_back(n);
      return AddOutcome::added;
    }

    template <class U>
    AddOutcome add(std::string_view token, std::initializer_list<U> components) {
      return add(token, std::span<const U>(components.begin(), components.size()));
    }

    template <class U>
    AddOutcome add(std::string_view token, const std::vector<U>& components) {
      return add(token, std::span<const U>(components));
    }

    void reserve(std::size_t n) {
      store_.tokens_.reserve(n);
      store_.norms_.reserve(n);
      store_.data_.reserve(n * store_.dimension_);
      store_.index_.reserve(n);
    }

    // Counters accumulated so far (vocab / bytes are filled in by build()).
    const EmbeddingStats& stats() const { return stats_; }

    BasicEmbeddingStore build() && {
      store_.data_.shrink_to_fit();
      stats_.vocab_size = store_.tokens_.size();
      stats_.dimension = store_.dimension_;
      stats_.bytes_resident = store_.resident_bytes();
      store_.stats_ = stats_;
      return std::move(store_);
    }

   private:
    BasicEmbeddingStore store_;
    DuplicatePolicy policy_;
    EmbeddingStats stats_;
  };

  BasicEmbeddingStore() = default;

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  const std::string& provenance() const { return provenance_; }
  const EmbeddingStats& stats() const { return stats_; }

  std::string_view token(std::size_t i) const { return tokens_[i]; }
  std::span<const T> components(std::size_t i) const {
    return std::span<const T>(data_.data() + i * dimension_, dimension_);
  }
  double norm(std::size_t i) const { return norms_[i]; }
  vector_type at(std::size_t i) const { return {tokens_[i], components(i), norms_[i]}; }

  std::optional<std::size_t> index_of(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<vector_type> find(std::string_view token) const {
    if (auto i = index_of(token)) return at(*i);
    return std::nullopt;
  }

  bool contains(std::string_view token) const { return index_.contains(std::string(token)); }

 private:
  std::size_t resident_bytes() const {
    std::size_t bytes = data_.size() * sizeof(T) + norms_.size() * sizeof(double);
    for (const auto& t : tokens_) bytes += sizeof(std::string) + t.size();
    // Rough per-entry hash map overhead: key copy + node + bucket.
    for (const auto& t : tokens_) bytes += t.size() + 3 * sizeof(void*) + sizeof(std::size_t);
    return bytes;
  }

  std::size_t dimension_ = 0;
  std::string provenance_;
  std::vector<std::string> tokens_;
  std::vector<T> data_;
  std::vector<double> norms_;
  std::unordered_map<std::string, std::size_t> index_;
  EmbeddingStats stats_;
};

using EmbeddingStore = BasicEmbeddingStore<float>;
using WordVector = BasicWordVector<float>;

// ---------------------------------------------------------------------------
// Text parsing

template <class T = float>
BasicEmbeddingStore<T> parse_embedding_text(std::istream& in, const ParseOptions& options = {},
                                            std::string provenance = "<stream>") {
  std::string line;
  std::size_t line_no = 0;
  std::size_t dimension = 0;
  std::optional<typename BasicEmbeddingStore<T>::Builder> builder;
  std::vector<T> values;
  std::vector<std::string_view> fields;
  bool any_content = false;

  auto split = [&fields](std::string_view s) {
    fields.clear();
    std::size_t start = 0;
    while (true) {
      std::size_t pos = s.find(' ', start);
      if (pos == std::string_view::npos) {
        fields.push_back(s.substr(start));
        break;
      }
      fields.push_back(s.substr(start, pos - start));
      start = pos + 1;
    }
  };

  auto strip = [](std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\n')) s.remove_suffix(1);
    return s;
  };

  if (options.format == EmbeddingFormat::word2vec_text) {
    while (std::getline(in, line)) {
      ++line_no;
      std::string_view s = strip(line);
      if (s.empty()) continue;
      any_content = true;
      split(s);
      std::size_t vocab = 0;
      if (fields.size() != 2 ||
          std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), vocab).ec != std::errc() ||
          std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), dimension).ec != std::errc() ||
          dimension == 0) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": expected word2vec header 'vocab_count dimension'");
      }
      builder.emplace(dimension, provenance, options.duplicate_policy);
      std::size_t want = options.max_vocab == 0 ? vocab : std::min(vocab, options.max_vocab);
      builder->reserve(want);
      break;
    }
  }

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = strip(line);
    if (s.empty()) continue;
    any_content = true;
    split(s);

    if (!builder) {
      if (fields.size() < 2) {
        throw ParseError("line " + std::to_string(line_no) + ": record has no vector components");
      }
      dimension = fields.size() - 1;
      builder.emplace(dimension, provenance, options.duplicate_policy);
    }

    std::string_view token;
    std::size_t first_value = 1;
    if (fields.size() != dimension + 1) {
      if (options.lenient_tokens && fields.size() > dimension + 1) {
        first_value = fields.size() - dimension;
        const char* end = fields[first_value - 1].data() + fields[first_value - 1].size();
        token = std::string_view(fields[0].data(), static_cast<std::size_t>(end - fields[0].data()));
      } else {
        throw ParseError("line " + std::to_string(line_no) + ": expected " +
                         std::to_string(dimension + 1) + " fields, found " +
                         std::to_string(fields.size()));
      }
    } else {
      token = fields[0];
    }
    if (token.empty()) {
      throw ParseError("line " + std::to_string(line_no) + ": empty token");
    }

    values.resize(dimension);
    for (std::size_t j = 0; j < dimension; ++j) {
      std::string_view f = fields[first_value + j];
      if (!detail::parse_number(f, values[j])) {
        throw ParseError("line " + std::to_string(line_no) + ", field " +
                         std::to_string(first_value + j + 1) + ": '" + std::string(f) +
                         "' is not a finite number");
      }
    }
    builder->add(token, std::span<const T>(values));
    if (options.max_vocab != 0 && builder->size() >= options.max_vocab) break;
  }

  if (!any_content || !builder) throw ParseError("embedding stream is empty");
  if (in.bad()) throw ParseError("I/O error while reading embedding");
  return std::move(*builder).build();
}

template <class T = float>
BasicEmbeddingStore<T> load_embedding_text(const std::string& path, const ParseOptions& options = {}) {
  std::vector<char> buffer(1 << 20);  // must outlive the stream
  std::ifstream in;
  in.rdbuf()->pubsetbuf(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  in.open(path, std::ios::binary);
  if (!in) throw ParseError("cannot open embedding file '" + path + "'");
  return parse_embedding_text<T>(in, options, path);
}

// Writes the store back out as GloVe text. Each float is printed in its
// shortest round-trip form, so re-parsing reproduces bit-identical components.
template <class T>
void write_embedding_text(const BasicEmbeddingStore<T>& store, std::ostream& os) {
  char buf[64];
  std::string line;
  for (std::size_t i = 0; i < store.size(); ++i) {
    line.assign(store.token(i));
    for (T c : store.components(i)) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), c);
      line.push_back(' ');
      line.append(buf, ptr);
    }
    line.push_back('\n');
    os.write(line.data(), static_cast<std::streamsize>(line.size()));
  }
}

// ---------------------------------------------------------------------------
// EMB1 binary cache
//
//   "EMB1" | u32 dimension | u64 vocab | per record: u32 token bytes,
//   token bytes, dimension x f32     (all little-endian)

inline constexpr char kCacheMagic[4] = {'E', 'M', 'B', '1'};

inline std::size_t cache_size_bytes(const EmbeddingStore& store) {
  std::size_t total = 4 + 4 + 8;
  for (std::size_t i = 0; i < store.size(); ++i) {
    total += 4 + store.token(i).size() + 4 * store.dimension();
  }
  return total;
}

inline void write_cache(const EmbeddingStore& store, std::ostream& os) {
  static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);
  if (store.empty()) throw ParseError("refusing to cache an empty embedding store");
  if (store.dimension() == 0 || store.dimension() > UINT32_MAX) {
    throw ParseError("embedding dimension out of range for EMB1 cache");
  }
  os.write(kCacheMagic, 4);
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(store.dimension()));
  detail::put_le<std::uint64_t>(os, static_cast<std::uint64_t>(store.size()));
  for (std::size_t i = 0; i < store.size(); ++i) {
    std::string_view tok = store.token(i);
    detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(tok.size()));
    os.write(tok.data(), static_cast<std::streamsize>(tok.size()));
    for (float c : store.components(i)) detail::put_le<float>(os, c);
  }
  if (!os) throw ParseError("I/O error while writing EMB1 cache");
}

inline EmbeddingStore read_cache(std::istream& is, std::string provenance = "<cache>") {
  char magic[4];
  if (!is.read(magic, 4)) throw ParseError("EMB1 cache truncated before magic");
  if (std::memcmp(magic, kCacheMagic, 4) != 0) throw ParseError("bad magic: not an EMB1 cache");
  const auto dimension = detail::get_le<std::uint32_t>(is, "dimension");
  if (dimension == 0) throw ParseError("EMB1 cache declares dimension 0");
  const auto vocab = detail::get_le<std::uint64_t>(is, "vocab count");

  EmbeddingStore::Builder builder(dimension, std::move(provenance), DuplicatePolicy::error);
  builder.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(vocab, 1u << 24)));
  std::string token;
  std::vector<float> values(dimension);
  for (std::uint64_t r = 0; r < vocab; ++r) {
    const auto len = detail::get_le<std::uint32_t>(is, "token length");
    token.resize(len);
    if (len != 0 && !is.read(token.data(), len)) throw ParseError("EMB1 cache truncated in token bytes");
    for (auto& v : values) v = detail::get_le<float>(is, "vector components");
    if (builder.add(token, std::span<const float>(values)) == EmbeddingStore::AddOutcome::zero_dropped) {
      throw ParseError("EMB1 cache holds a zero vector for '" + token + "'");
    }
  }
  return std::move(builder).build();
}

inline void save_cache(const EmbeddingStore& store, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ParseError("cannot open '" + path + "' for writing");
  write_cache(store, os);
}

inline EmbeddingStore load_cache(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot open cache file '" + path + "'");
  return read_cache(is, path);
}

inline bool is_cache_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  char magic[4];
  return is && is.read(magic, 4) && std::memcmp(magic, kCacheMagic, 4) == 0;
}

// ---------------------------------------------------------------------------
// Lookup

enum class Fallback { exact, lowercase, capitalized };

inline std::string_view to_string(Fallback f) {
  switch (f) {
    case Fallback::exact: return "exact";
    case Fallback::lowercase: return "lowercase";
    case Fallback::capitalized: return "capitalized";
  }
  return "?";
}

inline Fallback parse_fallback(std::string_view s) {
  if (s == "exact") return Fallback::exact;
  if (s == "lowercase") return Fallback::lowercase;
  if (s == "capitalized") return Fallback::capitalized;
  throw UsageError("unknown fallback '" + std::string(s) + "' (expected exact, lowercase, capitalized)");
}

using FallbackChain = std::vector<Fallback>;

struct LookupResult {
  std::string requested;
  std::vector<std::string> tried;    // candidate tokens in the order tried
  std::optional<std::size_t> index;  // store index on hit
  std::string matched_token;
  std::optional<Fallback> matched_by;

  bool hit() const { return index.has_value(); }
  explicit operator bool() const { return hit(); }
};

template <class T>
LookupResult lookup(const BasicEmbeddingStore<T>& store, std::string_view token,
                    const FallbackChain& chain = {Fallback::exact}) {
  LookupResult r;
  r.requested = std::string(token);
  for (Fallback f : chain) {
    std::string candidate;
    switch (f) {
      case Fallback::exact: candidate = std::string(token); break;
      case Fallback::lowercase: candidate = detail::ascii_lower(token); break;
      case Fallback::capitalized: candidate = detail::ascii_capitalized(token); break;
    }
    if (std::find(r.tried.begin(), r.tried.end(), candidate) != r.tried.end()) continue;
    r.tried.push_back(candidate);
    if (auto idx = store.index_of(candidate)) {
      r.index = idx;
      r.matched_token = std::move(candidate);
      r.matched_by = f;
      return r;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Geometry

template <class U, class V>
double cosine(std::span<const U> u, std::span<const V> v) {
  if (u.size() != v.size()) {
    throw UsageError("cosine: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                     std::to_string(v.size()) + ")");
  }
  const double nu = detail::norm(u);
  const double nv = detail::norm(v);
  if (!(nu > 0.0) || !(nv > 0.0)) throw DegenerateError("cosine of a zero vector");
  return detail::dot(u, v) / (nu * nv);
}

template <class U, class V>
double cosine(const std::vector<U>& u, const std::vector<V>& v) {
  return cosine(std::span<const U>(u), std::span<const V>(v));
}

// Uses the cached norms; symmetric in its arguments bit-for-bit.
template <class T>
double cosine(const BasicWordVector<T>& u, const BasicWordVector<T>& v) {
  if (u.dimension() != v.dimension()) {
    throw UsageError("cosine: dimension mismatch");
  }
  return detail::dot(u.components, v.components) / (u.norm * v.norm);
}

template <class T>
std::vector<double> centroid(std::span<const BasicWordVector<T>> vectors) {
  if (vectors.empty()) throw UsageError("centroid of an empty set");
  std::vector<double> mean(vectors.front().dimension(), 0.0);
  for (const auto& v : vectors) {
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += static_cast<double>(v.components[j]);
  }
  for (double& m : mean) m /= static_cast<double>(vectors.size());
  return mean;
}

template <class T>
std::vector<double> centroid(const BasicEmbeddingStore<T>& store, std::span<const std::string> tokens) {
  if (tokens.empty()) throw UsageError("centroid of an empty set");
  std::vector<BasicWordVector<T>> vectors;
  std::vector<std::string> misses;
  for (const auto& t : tokens) {
    if (auto v = store.find(t)) {
      vectors.push_back(*v);
    } else {
      misses.push_back(t);
    }
  }
  if (!misses.empty()) {
    std::string msg = "centroid: tokens not in embedding:";
    for (const auto& m : misses) msg += " " + m;
    throw ResolutionError(msg);
  }
  return centroid(std::span<const BasicWordVector<T>>(vectors));
}

}  // namespace embias
