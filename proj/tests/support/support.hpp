#pragma once

// Shared test fixtures and brute-force oracles. Oracles here deliberately
// avoid the library's indices: they loop over raw triple lists.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <unistd.h>
#include <utility>
#include <vector>

#include "kgbench/knowledge_graph.hpp"
#include "kgbench/random.hpp"

namespace kgtest {

using kgbench::EntityId;
using kgbench::KnowledgeGraph;
using kgbench::RelationId;
using kgbench::Triple;

using NamedTriple = std::tuple<std::string, std::string, std::string>;

inline KnowledgeGraph make_kg(const std::vector<NamedTriple>& rows) {
  kgbench::Interner ents, rels;
  std::vector<Triple> triples;
  for (const auto& [h, r, t] : rows) {
    const auto hi = ents.intern(h);
    const auto ri = rels.intern(r);
    const auto ti = ents.intern(t);
    triples.push_back({EntityId{hi}, RelationId{ri}, EntityId{ti}});
  }
  return KnowledgeGraph(std::move(ents), std::move(rels), std::move(triples));
}

inline EntityId ent(const KnowledgeGraph& kg, const std::string& name) {
  return kg.find_entity(name).value();
}

inline RelationId rel(const KnowledgeGraph& kg, const std::string& name) {
  return kg.find_relation(name).value();
}

inline Triple triple(const KnowledgeGraph& kg, const std::string& h, const std::string& r,
                     const std::string& t) {
  return {ent(kg, h), rel(kg, r), ent(kg, t)};
}

// Random KG with every interned entity and relation used at least once.
inline KnowledgeGraph random_kg(std::uint64_t seed, std::size_t max_entities = 50,
                                std::size_t max_relations = 6, std::size_t max_triples = 300) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  const std::size_t n_ent = pick(2, max_entities);
  const std::size_t n_rel = pick(1, max_relations);
  const std::size_t n_tri = pick(n_rel, max_triples);
  std::vector<NamedTriple> rows;
  for (std::size_t i = 0; i < n_tri; ++i) {
    const std::size_t r = i < n_rel ? i : pick(0, n_rel - 1);
    rows.emplace_back("e" + std::to_string(pick(0, n_ent - 1)), "r" + std::to_string(r),
                      "e" + std::to_string(pick(0, n_ent - 1)));
  }
  return make_kg(rows);
}

// Unique scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("kgbench_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---- descriptor oracle -----------------------------------------------------

struct OracleDescriptors {
  std::vector<std::uint32_t> relations;  // relations with at least one triple
  std::vector<std::size_t> positives, domain, range;
  std::vector<std::vector<std::size_t>> pair_inter, pair_union, ent_inter, ent_union;
};

inline OracleDescriptors oracle_descriptors(const std::vector<Triple>& raw,
                                            std::size_t relation_count) {
  using Pair = std::pair<std::uint32_t, std::uint32_t>;
  std::vector<std::set<Pair>> pairs(relation_count);
  std::vector<std::set<std::uint32_t>> dom(relation_count), rng(relation_count), ents(relation_count);
  for (const Triple& t : raw) {
    const auto r = kgbench::index(t.rel);
    pairs[r].insert({kgbench::index(t.head), kgbench::index(t.tail)});
    dom[r].insert(kgbench::index(t.head));
    rng[r].insert(kgbench::index(t.tail));
    ents[r].insert(kgbench::index(t.head));
    ents[r].insert(kgbench::index(t.tail));
  }
  OracleDescriptors o;
  for (std::uint32_t r = 0; r < relation_count; ++r) {
    if (pairs[r].empty()) continue;
    o.relations.push_back(r);
    o.positives.push_back(pairs[r].size());
    o.domain.push_back(dom[r].size());
    o.range.push_back(rng[r].size());
  }
  const std::size_t n = o.relations.size();
  auto counts = [](const auto& a, const auto& b) {
    std::size_t inter = 0;
    for (const auto& x : a) inter += b.count(x);
    return std::make_pair(inter, a.size() + b.size() - inter);
  };
  for (auto* m : {&o.pair_inter, &o.pair_union, &o.ent_inter, &o.ent_union}) {
    m->assign(n, std::vector<std::size_t>(n, 0));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      auto [pi, pu] = counts(pairs[o.relations[i]], pairs[o.relations[j]]);
      auto [ei, eu] = counts(ents[o.relations[i]], ents[o.relations[j]]);
      o.pair_inter[i][j] = pi;
      o.pair_union[i][j] = pu;
      o.ent_inter[i][j] = ei;
      o.ent_union[i][j] = eu;
    }
  }
  return o;
}

// ---- rank oracle -----------------------------------------------------------

// Rank by full sort: position of the truth among sorted candidates, with a
// tied block of size b starting at position p (1-based) mapped to
// p + ceil((b - 1) / 2) when the truth sits in it.
inline std::size_t oracle_rank(const std::vector<double>& scores, std::size_t truth,
                               const std::vector<bool>& excluded) {
  std::vector<std::pair<double, std::size_t>> kept;
  for (std::size_t e = 0; e < scores.size(); ++e) {
    if (e != truth && excluded[e]) continue;
    kept.emplace_back(scores[e], e);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::size_t first = 0;
  while (kept[first].first != scores[truth]) ++first;
  std::size_t last = first;
  while (last + 1 < kept.size() && kept[last + 1].first == scores[truth]) ++last;
  const std::size_t others = last - first;  // tied competitors
  return first + 1 + (others + 1) / 2;
}

// ---- finite differences ----------------------------------------------------

template <class F>
std::vector<double> numeric_gradient(F f, std::vector<double> x, double h = 1e-6) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + h;
    const double up = f(x);
    x[i] = orig - h;
    const double down = f(x);
    x[i] = orig;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// max_i |a_i - b_i| / max(1e-8, |a|_inf, |b|_inf)
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, scale = 1e-8;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
  }
  return diff / scale;
}

}  // namespace kgtest
