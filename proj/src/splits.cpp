#include "kgbench/splits.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "kgbench/errors.hpp"

namespace kgbench {
namespace {

bool is_excluded(const KnowledgeGraph& kg, const TripleSet* exclude, const TripleSet& chosen,
                 const Triple& t) {
  return kg.contains(t) || chosen.contains(t) || (exclude != nullptr && exclude->contains(t));
}

void sort_triples(std::vector<Triple>& v) { std::sort(v.begin(), v.end()); }

}  // namespace

void SplitConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie strictly between 0 and 1");
  if (!(ratio > 0.0)) throw ConfigError("positive/negative ratio must be positive");
}

std::size_t retained_count(double alpha, std::size_t n) {
  const double exact = alpha * static_cast<double>(n);
  const auto k = static_cast<std::size_t>(std::floor(exact + 0.5 + 1e-9));
  return std::min(k, n);
}

std::pair<std::vector<Triple>, std::vector<Triple>> split_positives(const KnowledgeGraph& kg,
                                                                   RelationId r, double alpha,
                                                                   Rng& rng) {
  auto all = kg.triples_of(r);
  std::vector<Triple> shuffled(all.begin(), all.end());
  shuffle(std::span<Triple>(shuffled), rng);
  const std::size_t k = retained_count(alpha, shuffled.size());
  std::vector<Triple> train(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(k));
  std::vector<Triple> test(shuffled.begin() + static_cast<std::ptrdiff_t>(k), shuffled.end());
  sort_triples(train);
  sort_triples(test);
  return {std::move(train), std::move(test)};
}

NegativeSample sample_negatives(const KnowledgeGraph& kg, RelationId r, std::size_t count,
                                NegativeMode mode, Rng& rng, const TripleSet* exclude) {
  NegativeSample out;
  if (count == 0) return out;

  const bool semantic = mode == NegativeMode::semantic;
  std::vector<EntityId> all_entities;
  if (!semantic) {
    all_entities.reserve(kg.entity_count());
    for (std::uint32_t e = 0; e < kg.entity_count(); ++e) all_entities.push_back(EntityId{e});
  }
  const std::span<const EntityId> heads = semantic ? kg.domain_of(r) : all_entities;
  const std::span<const EntityId> tails = semantic ? kg.range_of(r) : all_entities;
  const double space = semantic ? static_cast<double>(heads.size()) * tails.size()
                                : static_cast<double>(heads.size()) * (heads.size() - 1.0);
  if (heads.empty() || tails.empty() || space <= 0.0) {
    out.shortfall = true;
    return out;
  }

  TripleSet chosen;
  chosen.reserve(count * 2);
  const double known = static_cast<double>(kg.pairs(r).size());
  const bool small_space = space <= 2.0 * (static_cast<double>(count) + known) + 64.0;

  if (!small_space) {
    const std::size_t max_attempts = 50 * count + 1000;
    for (std::size_t attempt = 0; attempt < max_attempts && out.triples.size() < count; ++attempt) {
      const EntityId h = heads[uniform_index(rng, heads.size())];
      const EntityId t = tails[uniform_index(rng, tails.size())];
      if (!semantic && h == t) continue;
      const Triple cand{h, r, t};
      if (is_excluded(kg, exclude, chosen, cand)) continue;
      chosen.insert(cand);
      out.triples.push_back(cand);
    }
    if (out.triples.size() == count) return out;
  }

  // Enumerate the remaining candidates and draw the rest without replacement.
  std::vector<Triple> candidates;
  for (EntityId h : heads) {
    for (EntityId t : tails) {
      if (!semantic && h == t) continue;
      const Triple cand{h, r, t};
      if (!is_excluded(kg, exclude, chosen, cand)) candidates.push_back(cand);
    }
  }
  const std::size_t need = count - out.triples.size();
  const std::size_t take = std::min(need, candidates.size());
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + uniform_index(rng, candidates.size() - i);
    std::swap(candidates[i], candidates[j]);
    out.triples.push_back(candidates[i]);
  }
  out.shortfall = take < need;
  return out;
}

std::optional<RelationSplit> split_relation(const KnowledgeGraph& kg, RelationId r, double alpha,
                                            const SplitConfig& cfg, SplitSkip* skip) {
  const std::size_t n = kg.pairs(r).size();
  if (n < 2) {
    if (skip != nullptr) {
      *skip = {r, "relation has " + std::to_string(n) + " positive triple(s); need at least 2"};
    }
    return std::nullopt;
  }

  RelationSplit split;
  split.rel = r;
  Rng split_rng(derive_seed(cfg.seed, SeedPurpose::split, {index(r)}));
  std::tie(split.train_pos, split.test_pos) = split_positives(kg, r, alpha, split_rng);
  if (!cfg.with_negatives) return split;

  const std::size_t want_train = retained_count(1.0 / cfg.ratio, split.train_pos.size());
  const std::size_t want_test = retained_count(1.0 / cfg.ratio, split.test_pos.size());
  const std::size_t want = want_train + want_test;

  // Train and test negatives come from one joint draw, so they are disjoint.
  Rng neg_rng(derive_seed(cfg.seed, SeedPurpose::negatives, {index(r)}));
  NegativeSample neg = sample_negatives(kg, r, want, cfg.negative_mode, neg_rng);
  split.negative_shortfall = neg.shortfall;

  std::size_t n_train = want_train;
  if (neg.triples.size() < want) {
    const double share = want == 0 ? 0.0 : static_cast<double>(want_train) / want;
    n_train = std::min(want_train, retained_count(share, neg.triples.size()));
  }
  const auto split_at = neg.triples.begin() + static_cast<std::ptrdiff_t>(n_train);
  split.train_neg.assign(neg.triples.begin(), split_at);
  split.test_neg.assign(split_at, neg.triples.end());
  sort_triples(split.train_neg);
  sort_triples(split.test_neg);
  return split;
}

const RelationSplit* SplitSet::find(RelationId r) const {
  auto it = std::lower_bound(splits.begin(), splits.end(), r,
                             [](const RelationSplit& s, RelationId id) { return s.rel < id; });
  return it != splits.end() && it->rel == r ? &*it : nullptr;
}

SplitSet build_splits(const KnowledgeGraph& kg, const SplitConfig& cfg) {
  return build_splits(kg, cfg, {});
}

SplitSet build_splits(const KnowledgeGraph& kg, const SplitConfig& cfg,
                      const std::map<RelationId, double>& alphas) {
  cfg.validate();
  SplitSet set;
  TripleSet removed;
  for (RelationId r : kg.indexed_relations()) {
    double alpha = cfg.alpha;
    if (auto it = alphas.find(r); it != alphas.end()) alpha = it->second;
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("per-relation alpha out of (0, 1)");
    SplitSkip skip;
    if (auto split = split_relation(kg, r, alpha, cfg, &skip)) {
      removed.insert(split->test_pos.begin(), split->test_pos.end());
      set.splits.push_back(std::move(*split));
    } else {
      set.skipped.push_back(std::move(skip));
    }
  }
  set.generalized.kind = RetainedGraph::Kind::generalized;
  set.generalized.corpus.reserve(kg.triple_count() - removed.size());
  for (const Triple& t : kg.triples()) {
    if (!removed.contains(t)) set.generalized.corpus.push_back(t);
  }
  return set;
}

RetainedGraph specialized_corpus(const KnowledgeGraph& kg, const RelationSplit& split) {
  RetainedGraph g;
  g.kind = RetainedGraph::Kind::specialized;
  g.rel = split.rel;
  // test_pos is sorted by (head, rel, tail); all share rel.
  g.corpus.reserve(kg.triple_count() - split.test_pos.size());
  for (const Triple& t : kg.triples()) {
    if (t.rel == split.rel && std::binary_search(split.test_pos.begin(), split.test_pos.end(), t)) {
      continue;
    }
    g.corpus.push_back(t);
  }
  return g;
}

std::map<RelationId, double> ablation_alphas(const KnowledgeGraph& kg, std::uint64_t seed) {
  std::map<RelationId, double> out;
  for (RelationId r : kg.indexed_relations()) {
    Rng rng(derive_seed(seed, SeedPurpose::ablation, {index(r)}));
    out[r] = uniform_real(rng, 0.1, 0.9);
  }
  return out;
}

void write_splits(const KnowledgeGraph& kg, const SplitSet& splits,
                  const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto write = [&](const fs::path& p, const std::vector<Triple>& triples) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw DataError("cannot write " + p.string());
    write_tsv(kg, triples, out);
  };
  write(dir / "corpus.tsv", splits.generalized.corpus);
  std::ofstream index_out(dir / "relations.tsv", std::ios::binary);
  for (const RelationSplit& s : splits.splits) {
    const fs::path rel_dir = dir / std::to_string(index(s.rel));
    fs::create_directories(rel_dir);
    index_out << index(s.rel) << '\t' << kg.relation_name(s.rel) << '\n';
    write(rel_dir / "train_pos.tsv", s.train_pos);
    write(rel_dir / "test_pos.tsv", s.test_pos);
    write(rel_dir / "train_neg.tsv", s.train_neg);
    write(rel_dir / "test_neg.tsv", s.test_neg);
  }
}

}  // namespace kgbench
