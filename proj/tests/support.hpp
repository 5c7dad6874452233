#pragma once

// Shared fixtures for the unit and acceptance suites: tiny stores built from
// literal vectors, random stores, scratch directories, and an independent
// brute-force permutation oracle that shares no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "embias/cli.hpp"
#include "embias/embias.hpp"

namespace embias::testing {

using Vec = std::vector<double>;

// Store from (token, vector) pairs, in the given order.
template <class T = float>
BasicEmbeddingStore<T> make_store(const std::vector<std::pair<std::string, Vec>>& entries,
                                  std::string provenance = "fixture") {
  typename BasicEmbeddingStore<T>::Builder b(entries.front().second.size(), std::move(provenance));
  for (const auto& [token, v] : entries) b.add(token, v);
  return std::move(b).build();
}

// Random fixture: target sets X, Y of size n and attribute sets A, B of size
// na / nb, all Gaussian in `dim` dimensions. Tokens are x0.., y0.., a0.., b0..
struct Fixture {
  std::vector<std::pair<std::string, Vec>> entries;
  WeatSpec spec;
};

inline Vec gaussian(std::mt19937_64& rng, std::size_t dim, double shift = 0.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(dim);
  for (auto& c : v) c = g(rng) + shift;
  return v;
}

inline Fixture random_fixture(std::mt19937_64& rng, std::size_t n, std::size_t na, std::size_t nb,
                              std::size_t dim = 10) {
  Fixture f;
  f.spec.test_id = "random";
  auto fill = [&](WordSet& set, const std::string& prefix, std::size_t count) {
    set.label = prefix;
    for (std::size_t i = 0; i < count; ++i) {
      const std::string token = prefix + std::to_string(i);
      set.words.push_back(token);
      f.entries.emplace_back(token, gaussian(rng, dim));
    }
  };
  fill(f.spec.X, "x", n);
  fill(f.spec.Y, "y", n);
  fill(f.spec.A, "a", na);
  fill(f.spec.B, "b", nb);
  return f;
}

// The two-dimensional hand fixture: X = {(1,0),(1,0)}, Y = {(0,1),(0,1)},
// A = {(1,0)}, B = {(0,1)}.
inline Fixture hand_fixture() {
  Fixture f;
  f.entries = {{"x1", {1, 0}}, {"x2", {1, 0}}, {"y1", {0, 1}}, {"y2", {0, 1}}, {"a", {1, 0}}, {"b", {0, 1}}};
  f.spec.test_id = "hand";
  f.spec.X = {"X", {"x1", "x2"}, {}};
  f.spec.Y = {"Y", {"y1", "y2"}, {}};
  f.spec.A = {"A", {"a"}, {}};
  f.spec.B = {"B", {"b"}, {}};
  return f;
}

inline std::vector<std::string> all_tokens(const WordSet& s) { return s.words; }

// ---------------------------------------------------------------------------
// Independent oracle

namespace oracle {

inline double cos(const Vec& u, const Vec& v) {
  long double d = 0, nu = 0, nv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    d += static_cast<long double>(u[i]) * v[i];
    nu += static_cast<long double>(u[i]) * u[i];
    nv += static_cast<long double>(v[i]) * v[i];
  }
  return static_cast<double>(d / std::sqrt(nu * nv));
}

inline double s(const Vec& w, const std::vector<Vec>& A, const std::vector<Vec>& B) {
  long double sa = 0, sb = 0;
  for (const auto& a : A) sa += cos(w, a);
  for (const auto& b : B) sb += cos(w, b);
  return static_cast<double>(sa / A.size() - sb / B.size());
}

struct BruteForce {
  std::uint64_t partitions = 0;
  std::uint64_t geq = 0;
  std::uint64_t strict = 0;
};

// Enumerates every size-n subset of the 2n associations by recursion and
// compares each partition statistic with the observed one. `tol` is the
// relative tie band; values within it count as equal.
inline BruteForce enumerate(const std::vector<double>& assoc, std::size_t n, double tol_rel = 1e-9) {
  const std::size_t total = assoc.size();
  long double sum_all = 0, abs_all = 0;
  for (double a : assoc) {
    sum_all += a;
    abs_all += std::fabs(a);
  }
  long double sx = 0;
  for (std::size_t i = 0; i < n; ++i) sx += assoc[i];
  const long double observed = sx - (sum_all - sx);
  const long double tol = tol_rel * std::max<long double>(abs_all, 1e-300L);

  BruteForce out;
  std::function<void(std::size_t, std::size_t, long double)> rec = [&](std::size_t i, std::size_t chosen,
                                                                       long double acc) {
    if (chosen == n) {
      const long double stat = acc - (sum_all - acc);
      ++out.partitions;
      if (stat >= observed - tol) ++out.geq;
      if (stat > observed + tol) ++out.strict;
      return;
    }
    if (total - i < n - chosen) return;
    rec(i + 1, chosen + 1, acc + assoc[i]);
    rec(i + 1, chosen, acc);
  };
  rec(0, 0, 0);
  return out;
}

inline std::vector<double> associations(const Fixture& f) {
  auto vec_of = [&](const std::string& t) {
    for (const auto& [tok, v] : f.entries) {
      if (tok == t) return v;
    }
    throw std::logic_error("oracle: unknown token " + t);
  };
  std::vector<Vec> A, B;
  for (const auto& w : f.spec.A.words) A.push_back(vec_of(w));
  for (const auto& w : f.spec.B.words) B.push_back(vec_of(w));
  std::vector<double> out;
  for (const auto& w : f.spec.X.words) out.push_back(s(vec_of(w), A, B));
  for (const auto& w : f.spec.Y.words) out.push_back(s(vec_of(w), A, B));
  return out;
}

// Two-pass Pearson in long double.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

}  // namespace oracle

// ---------------------------------------------------------------------------
// Scratch files

class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag = "embias") {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }

  std::string write(const std::string& name, const std::string& content) const {
    const std::string p = file(name);
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }

 private:
  std::filesystem::path path_;
};

inline std::string glove_text(const std::vector<std::pair<std::string, Vec>>& entries) {
  std::ostringstream os;
  for (const auto& [token, v] : entries) {
    os << token;
    for (double c : v) os << ' ' << format_number(static_cast<double>(static_cast<float>(c)));
    os << '\n';
  }
  return os.str();
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline std::string source_path(const std::string& rel) {
  return (std::filesystem::path(EMBIAS_SOURCE_DIR) / rel).string();
}

// Runs the CLI in-process.
struct CliRun {
  int code = 0;
  std::string out, err;
};

inline CliRun run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

}  // namespace embias::testing
