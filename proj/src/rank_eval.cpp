#include "kgbench/rank_eval.hpp"

#include <stdexcept>
#include <vector>

namespace kgbench {
namespace {

bool in_vocabulary(const FactorModel& model, const Triple& t) {
  return index(t.head) < model.entity_count() && index(t.tail) < model.entity_count() &&
         index(t.rel) < model.relation_count();
}

void score_candidates(const FactorModel& model, const Triple& t, Side side,
                      std::vector<double>& out) {
  out.resize(model.entity_count());
  Triple probe = t;
  for (std::uint32_t e = 0; e < model.entity_count(); ++e) {
    (side == Side::head ? probe.head : probe.tail) = EntityId{e};
    out[e] = model.score(probe);
  }
}

std::size_t rank_with_scores(const FactorModel& model, const KnowledgeGraph& kg,
                             const Triple& t, Side side, RankMode mode,
                             std::vector<double>& scores) {
  score_candidates(model, t, side, scores);
  const std::size_t truth = index(side == Side::head ? t.head : t.tail);
  if (mode == RankMode::raw) return rank_of(scores, truth);
  return rank_of(scores, truth, [&](std::size_t e) {
    Triple probe = t;
    (side == Side::head ? probe.head : probe.tail) = EntityId{static_cast<std::uint32_t>(e)};
    return kg.contains(probe);
  });
}

}  // namespace

std::size_t rank_of(std::span<const double> scores, std::size_t truth,
                    const std::function<bool(std::size_t)>& excluded) {
  if (truth >= scores.size()) throw std::out_of_range("rank_of: truth outside candidates");
  const double target = scores[truth];
  std::size_t greater = 0, equal = 0;
  for (std::size_t e = 0; e < scores.size(); ++e) {
    if (e == truth) continue;
    if (scores[e] < target) continue;
    if (excluded && excluded(e)) continue;
    if (scores[e] > target) {
      ++greater;
    } else {
      ++equal;
    }
  }
  return greater + 1 + (equal + 1) / 2;
}

std::size_t rank_triple(const FactorModel& model, const KnowledgeGraph& kg, const Triple& triple,
                        Side side, RankMode mode) {
  if (!in_vocabulary(model, triple)) throw std::out_of_range("triple outside model vocabulary");
  std::vector<double> scores;
  return rank_with_scores(model, kg, triple, side, mode, scores);
}

RankResult evaluate_ranking(const FactorModel& model, std::span<const Triple> test,
                            const KnowledgeGraph& kg, RankMode mode) {
  RankResult res;
  res.mode = mode;
  std::vector<double> scores;
  double rank_sum = 0.0, rr_sum = 0.0;
  for (const Triple& t : test) {
    if (!in_vocabulary(model, t)) {
      ++res.n_skipped;
      continue;
    }
    for (Side side : {Side::head, Side::tail}) {
      const auto rank = static_cast<double>(rank_with_scores(model, kg, t, side, mode, scores));
      rank_sum += rank;
      rr_sum += 1.0 / rank;
      ++res.n_queries;
    }
  }
  if (res.n_queries == 0) throw std::invalid_argument("evaluate_ranking: no usable queries");
  res.mr = rank_sum / static_cast<double>(res.n_queries);
  res.mrr = rr_sum / static_cast<double>(res.n_queries);
  return res;
}

std::string_view to_string(RankMode mode) {
  return mode == RankMode::raw ? "raw" : "filtered";
}

}  // namespace kgbench
