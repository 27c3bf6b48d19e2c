#pragma once

// Mean rank / mean reciprocal rank over head- and tail-replacement queries.

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>

#include "kgbench/factor.hpp"
#include "kgbench/ids.hpp"
#include "kgbench/knowledge_graph.hpp"

namespace kgbench {

enum class RankMode { raw, filtered };
enum class Side { head, tail };

struct RankResult {
  double mr = 0.0;
  double mrr = 0.0;
  std::size_t n_queries = 0;  // ranks averaged (two per usable test triple)
  std::size_t n_skipped = 0;  // test triples outside the model vocabulary
  RankMode mode = RankMode::filtered;
};

// Rank of `truth` among `scores` (indexed by entity id). Candidates for which
// `excluded` returns true are ignored. With g candidates scoring strictly
// higher and e others tied with the truth, rank = g + 1 + ceil(e / 2).
std::size_t rank_of(std::span<const double> scores, std::size_t truth,
                    const std::function<bool(std::size_t)>& excluded = {});

// Throws std::out_of_range when the triple lies outside the model vocabulary.
std::size_t rank_triple(const FactorModel& model, const KnowledgeGraph& kg, const Triple& triple,
                        Side side, RankMode mode);

// Throws std::invalid_argument when no query is usable.
RankResult evaluate_ranking(const FactorModel& model, std::span<const Triple> test,
                            const KnowledgeGraph& kg, RankMode mode);

std::string_view to_string(RankMode mode);

}  // namespace kgbench
