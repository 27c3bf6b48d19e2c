#pragma once

// Retained graphs and per-relation classifier examples.
//
// For each relation r, Pos_r is partitioned into train positives (a fraction
// alpha, kept in the embedding corpus) and test positives (removed from it).
// Negatives are sampled 1:1 against positives from triples absent from the
// graph. The generalized corpus removes the test positives of every relation;
// the specialized corpus for r removes only those of r.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "kgbench/ids.hpp"
#include "kgbench/knowledge_graph.hpp"
#include "kgbench/random.hpp"

namespace kgbench {

enum class NegativeMode { semantic, unrestricted };

using TripleSet = std::unordered_set<Triple, TripleHash>;

struct SplitConfig {
  double alpha = 0.8;
  std::uint64_t seed = 0;
  NegativeMode negative_mode = NegativeMode::semantic;
  // Positives per negative; 1.0 gives the balanced 1:1 setting.
  double ratio = 1.0;
  // Ranking-only studies need the positive partition but no negatives.
  bool with_negatives = true;

  // Throws ConfigError unless 0 < alpha < 1 and ratio > 0.
  void validate() const;
};

struct RelationSplit {
  RelationId rel{};
  std::vector<Triple> train_pos;
  std::vector<Triple> test_pos;
  std::vector<Triple> train_neg;
  std::vector<Triple> test_neg;
  // Fewer negatives than requested because the candidate space ran out.
  bool negative_shortfall = false;
};

struct SplitSkip {
  RelationId rel{};
  std::string reason;
};

struct RetainedGraph {
  enum class Kind { specialized, generalized };
  Kind kind = Kind::generalized;
  std::optional<RelationId> rel;  // set for specialized corpora
  std::vector<Triple> corpus;
};

// round(alpha * n) with halves rounded up.
std::size_t retained_count(double alpha, std::size_t n);

// Uniform partition of Pos_r into (train, test) with |train| = retained_count.
std::pair<std::vector<Triple>, std::vector<Triple>> split_positives(const KnowledgeGraph& kg,
                                                                   RelationId r, double alpha,
                                                                   Rng& rng);

struct NegativeSample {
  std::vector<Triple> triples;
  bool shortfall = false;
};

// `count` distinct triples (h, r, t) not in the graph and not in `exclude`.
// Semantic mode draws h from dom(r) and t from range(r); unrestricted mode
// draws any two distinct entities. Rejection sampling falls back to explicit
// enumeration when the candidate space is small or acceptance stalls.
NegativeSample sample_negatives(const KnowledgeGraph& kg, RelationId r, std::size_t count,
                                NegativeMode mode, Rng& rng, const TripleSet* exclude = nullptr);

// Builds the split for one relation. Returns nullopt (with `skip` filled in)
// when the relation has fewer than two positives.
std::optional<RelationSplit> split_relation(const KnowledgeGraph& kg, RelationId r, double alpha,
                                            const SplitConfig& cfg, SplitSkip* skip = nullptr);

struct SplitSet {
  RetainedGraph generalized;
  std::vector<RelationSplit> splits;  // relation id order
  std::vector<SplitSkip> skipped;

  const RelationSplit* find(RelationId r) const;
};

SplitSet build_splits(const KnowledgeGraph& kg, const SplitConfig& cfg);

// Per-relation retain fractions (relations absent from the map use cfg.alpha).
SplitSet build_splits(const KnowledgeGraph& kg, const SplitConfig& cfg,
                      const std::map<RelationId, double>& alphas);

// Pos_KG minus the test positives of `split.rel`.
RetainedGraph specialized_corpus(const KnowledgeGraph& kg, const RelationSplit& split);

// Independent Uniform[0.1, 0.9] retain fraction per indexed relation.
std::map<RelationId, double> ablation_alphas(const KnowledgeGraph& kg, std::uint64_t seed);

// corpus.tsv plus <relation>/{train_pos,test_pos,train_neg,test_neg}.tsv.
// Relation directories are named by relation id.
void write_splits(const KnowledgeGraph& kg, const SplitSet& splits,
                  const std::filesystem::path& dir);

}  // namespace kgbench
