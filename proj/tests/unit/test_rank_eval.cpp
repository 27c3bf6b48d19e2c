#include <doctest.h>

#include "kgbench/rank_eval.hpp"
#include "support.hpp"

using namespace kgbench;
using doctest::Approx;

namespace {

// Model whose entity rows are set directly so scores are easy to control:
// DistMult with d = 1 and relation weight 1 gives score(h, r, t) = h * t.
FactorModel scalar_model(const std::vector<double>& entity_values, std::size_t relations = 1) {
  FactorModel m(FactorKind::distmult, 1, entity_values.size(), relations);
  for (std::size_t e = 0; e < entity_values.size(); ++e) {
    m.entity(EntityId{static_cast<std::uint32_t>(e)})[0] = entity_values[e];
  }
  for (std::size_t r = 0; r < relations; ++r) m.relation(RelationId{static_cast<std::uint32_t>(r)})[0] = 1.0;
  return m;
}

}  // namespace

TEST_CASE("rank counting rule") {
  CHECK(rank_of(std::vector<double>{5, 1, 2}, 0) == 1);
  CHECK(rank_of(std::vector<double>{1, 5, 4}, 0) == 3);  // two strictly above
  CHECK(rank_of(std::vector<double>{2, 2, 1}, 0) == 2);  // one tie: 1 + ceil(1/2)
  CHECK(rank_of(std::vector<double>{2, 2, 2}, 0) == 2);  // two ties: 1 + 1
  CHECK(rank_of(std::vector<double>{2, 2, 2, 2}, 0) == 3);
  CHECK(rank_of(std::vector<double>{7}, 0) == 1);
  CHECK(rank_of(std::vector<double>{1, 5, 4}, 0, [](std::size_t) { return true; }) == 1);
  CHECK_THROWS(rank_of(std::vector<double>{1}, 3));
}

TEST_CASE("filtered rank drops other known positives") {
  // entities a, b, c, d with values 1, 4, 3, 2; query (a, r, ?) true tail d.
  const auto kg = kgtest::make_kg({{"a", "r", "d"}, {"a", "r", "b"}, {"a", "r", "c"}});
  std::vector<double> vals(kg.entity_count());
  vals[index(kgtest::ent(kg, "a"))] = 1;
  vals[index(kgtest::ent(kg, "b"))] = 4;
  vals[index(kgtest::ent(kg, "c"))] = 3;
  vals[index(kgtest::ent(kg, "d"))] = 2;
  const FactorModel m = scalar_model(vals);
  const Triple q = kgtest::triple(kg, "a", "r", "d");
  CHECK(rank_triple(m, kg, q, Side::tail, RankMode::raw) == 3);
  CHECK(rank_triple(m, kg, q, Side::tail, RankMode::filtered) == 1);
}

TEST_CASE("ranking metrics") {
  SUBCASE("mean of reciprocal ranks") {
    // raw ranks via rank_of over hand-chosen score vectors: 1, 2, 4
    const std::vector<std::size_t> ranks{rank_of(std::vector<double>{9, 1}, 0),
                                         rank_of(std::vector<double>{5, 9, 1}, 0),
                                         rank_of(std::vector<double>{1, 2, 3, 4}, 0)};
    CHECK(ranks == std::vector<std::size_t>{1, 2, 4});
    double mrr = 0.0;
    for (auto r : ranks) mrr += 1.0 / static_cast<double>(r);
    CHECK(mrr / 3 == Approx(0.58333333333).epsilon(1e-9));
  }
  SUBCASE("perfect model") {
    const auto kg = kgtest::make_kg({{"a", "r", "a"}});
    const FactorModel m = scalar_model({1.0});
    const auto res = evaluate_ranking(m, kg.triples(), kg, RankMode::raw);
    CHECK(res.mr == 1.0);
    CHECK(res.mrr == 1.0);
    CHECK(res.n_queries == 2);
  }
  SUBCASE("out-of-vocabulary triples are skipped and counted") {
    const auto kg = kgtest::make_kg({{"a", "r", "b"}, {"b", "r", "c"}});
    const FactorModel m = scalar_model({1.0, 2.0});  // entity c unknown
    const auto res = evaluate_ranking(m, kg.triples(), kg, RankMode::filtered);
    CHECK(res.n_skipped == 1);
    CHECK(res.n_queries == 2);
    CHECK_THROWS(evaluate_ranking(m, std::span<const Triple>(), kg, RankMode::raw));
  }
}

TEST_CASE("filtered rank never exceeds raw rank and matches the sort oracle") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto kg = kgtest::random_kg(seed, 20, 3, 60);
    FactorConfig cfg;
    cfg.kind = seed % 2 == 0 ? FactorKind::distmult : FactorKind::complex;
    cfg.dim = 3;
    cfg.seed = seed;
    const FactorModel m = init_factor(kg, cfg);
    for (const Triple& t : kg.triples()) {
      for (Side side : {Side::head, Side::tail}) {
        const auto raw = rank_triple(m, kg, t, side, RankMode::raw);
        const auto filt = rank_triple(m, kg, t, side, RankMode::filtered);
        CHECK(filt <= raw);
        std::vector<double> scores(kg.entity_count());
        std::vector<bool> none(kg.entity_count(), false), known(kg.entity_count(), false);
        for (std::uint32_t e = 0; e < kg.entity_count(); ++e) {
          Triple c = t;
          (side == Side::head ? c.head : c.tail) = EntityId{e};
          scores[e] = m.score(c);
          known[e] = kg.contains(c);
        }
        const std::size_t truth = index(side == Side::head ? t.head : t.tail);
        CHECK(raw == kgtest::oracle_rank(scores, truth, none));
        CHECK(filt == kgtest::oracle_rank(scores, truth, known));
      }
    }
  }
}

TEST_CASE("lowering the true score below one more competitor lowers MRR") {
  const auto kg = kgtest::make_kg({{"a", "r", "b"}, {"c", "s", "d"}});
  std::vector<double> vals(kg.entity_count(), 0.0);
  vals[index(kgtest::ent(kg, "a"))] = 1.0;
  vals[index(kgtest::ent(kg, "b"))] = 2.5;
  vals[index(kgtest::ent(kg, "c"))] = 3.0;
  vals[index(kgtest::ent(kg, "d"))] = 1.0;
  const Triple q = kgtest::triple(kg, "a", "r", "b");
  const auto before = evaluate_ranking(scalar_model(vals, 2), std::span<const Triple>(&q, 1), kg, RankMode::raw);
  vals[index(kgtest::ent(kg, "b"))] = 0.5;
  const auto after = evaluate_ranking(scalar_model(vals, 2), std::span<const Triple>(&q, 1), kg, RankMode::raw);
  CHECK(after.mrr < before.mrr);
  CHECK(after.mr > before.mr);
}
