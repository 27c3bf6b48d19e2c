#include <doctest.h>

#include <algorithm>
#include <set>

#include "kgbench/errors.hpp"
#include "kgbench/splits.hpp"
#include "support.hpp"

using namespace kgbench;
using kgtest::make_kg;
using kgtest::rel;

namespace {

KnowledgeGraph chain_kg(std::size_t n) {
  std::vector<kgtest::NamedTriple> rows;
  for (std::size_t i = 0; i < n; ++i) {
    rows.emplace_back("h" + std::to_string(i), "r", "t" + std::to_string(i));
  }
  return make_kg(rows);
}

}  // namespace

TEST_CASE("retained counts round half up") {
  CHECK(retained_count(0.8, 10) == 8);
  CHECK(retained_count(0.5, 3) == 2);
  CHECK(retained_count(0.5, 5) == 3);
  CHECK(retained_count(0.2, 1) == 0);
  CHECK(retained_count(0.5, 1) == 1);
  CHECK(retained_count(0.7, 10) == 7);  // 7.000000000000001 in binary
}

TEST_CASE("positive partition sizes") {
  SUBCASE("10 at 0.8") {
    const auto kg = chain_kg(10);
    Rng rng(1);
    auto [train, test] = split_positives(kg, rel(kg, "r"), 0.8, rng);
    CHECK(train.size() == 8);
    CHECK(test.size() == 2);
  }
  SUBCASE("3 at 0.5") {
    const auto kg = chain_kg(3);
    Rng rng(1);
    auto [train, test] = split_positives(kg, rel(kg, "r"), 0.5, rng);
    CHECK(train.size() == 2);
    CHECK(test.size() == 1);
  }
  SUBCASE("same seed, same partition") {
    const auto kg = chain_kg(40);
    Rng a(9), b(9);
    CHECK(split_positives(kg, rel(kg, "r"), 0.5, a) == split_positives(kg, rel(kg, "r"), 0.5, b));
  }
  SUBCASE("union is Pos_r and parts are disjoint") {
    const auto kg = chain_kg(25);
    Rng rng(3);
    auto [train, test] = split_positives(kg, rel(kg, "r"), 0.6, rng);
    std::set<Triple> all(train.begin(), train.end());
    for (const Triple& t : test) CHECK(all.insert(t).second);
    CHECK(all.size() == 25);
  }
}

TEST_CASE("semantic negatives from dom x range minus positives") {
  const auto kg = make_kg({{"a", "r", "b"}, {"a", "r", "c"}, {"b", "r", "c"}});
  Rng rng(5);
  const auto neg = sample_negatives(kg, rel(kg, "r"), 1, NegativeMode::semantic, rng);
  REQUIRE(neg.triples.size() == 1);
  CHECK_FALSE(neg.shortfall);
  CHECK(neg.triples[0] == kgtest::triple(kg, "b", "r", "b"));

  Rng rng2(5);
  const auto more = sample_negatives(kg, rel(kg, "r"), 2, NegativeMode::semantic, rng2);
  CHECK(more.triples.size() == 1);
  CHECK(more.shortfall);
}

TEST_CASE("complete bipartite relation has no negatives") {
  const auto kg = make_kg({{"a", "r", "x"}, {"a", "r", "y"}, {"b", "r", "x"}, {"b", "r", "y"}});
  Rng rng(1);
  const auto neg = sample_negatives(kg, rel(kg, "r"), 3, NegativeMode::semantic, rng);
  CHECK(neg.triples.empty());
  CHECK(neg.shortfall);
}

TEST_CASE("zero requested negatives") {
  const auto kg = chain_kg(3);
  Rng rng(1);
  const auto neg = sample_negatives(kg, rel(kg, "r"), 0, NegativeMode::semantic, rng);
  CHECK(neg.triples.empty());
  CHECK_FALSE(neg.shortfall);
}

TEST_CASE("unrestricted negatives avoid self pairs and positives") {
  const auto kg = chain_kg(30);
  Rng rng(2);
  const auto neg = sample_negatives(kg, rel(kg, "r"), 200, NegativeMode::unrestricted, rng);
  CHECK(neg.triples.size() == 200);
  std::set<Triple> seen;
  for (const Triple& t : neg.triples) {
    CHECK(t.head != t.tail);
    CHECK_FALSE(kg.contains(t));
    CHECK(seen.insert(t).second);
  }
}

TEST_CASE("exclusion set is honoured") {
  const auto kg = make_kg({{"a", "r", "b"}, {"a", "r", "c"}, {"b", "r", "c"}});
  TripleSet exclude{kgtest::triple(kg, "b", "r", "b")};
  Rng rng(1);
  const auto neg = sample_negatives(kg, rel(kg, "r"), 1, NegativeMode::semantic, rng, &exclude);
  CHECK(neg.triples.empty());
  CHECK(neg.shortfall);
}

TEST_CASE("dense relations fall back to enumeration") {
  // 20 x 20 with every pair but three asserted.
  std::vector<kgtest::NamedTriple> rows;
  for (int h = 0; h < 20; ++h) {
    for (int t = 0; t < 20; ++t) {
      if (h == t && h < 3) continue;
      rows.emplace_back("h" + std::to_string(h), "r", "t" + std::to_string(t));
    }
  }
  // dom and range use distinct names, so the 3 skipped pairs are the only negatives
  const auto kg = make_kg(rows);
  Rng rng(4);
  const auto neg = sample_negatives(kg, rel(kg, "r"), 3, NegativeMode::semantic, rng);
  CHECK(neg.triples.size() == 3);
  CHECK_FALSE(neg.shortfall);
}

TEST_CASE("relation split invariants") {
  const auto kg = make_kg({{"a", "r", "b"}, {"a", "r", "c"}, {"b", "r", "c"}, {"c", "r", "d"},
                           {"d", "r", "a"}, {"a", "s", "d"}, {"e", "s", "f"}});
  SplitConfig cfg;
  cfg.alpha = 0.6;
  cfg.seed = 11;
  SplitSkip skip;
  const auto split = split_relation(kg, rel(kg, "r"), cfg.alpha, cfg, &skip);
  REQUIRE(split.has_value());
  CHECK(split->train_pos.size() == 3);
  CHECK(split->test_pos.size() == 2);
  if (!split->negative_shortfall) {
    CHECK(split->train_neg.size() == split->train_pos.size());
    CHECK(split->test_neg.size() == split->test_pos.size());
  }
  std::set<Triple> negs;
  for (const auto* v : {&split->train_neg, &split->test_neg}) {
    for (const Triple& t : *v) {
      CHECK_FALSE(kg.contains(t));
      CHECK(negs.insert(t).second);
    }
  }
}

TEST_CASE("relations with a single positive are skipped with a reason") {
  const auto kg = make_kg({{"a", "r", "b"}, {"a", "s", "b"}, {"b", "s", "c"}});
  SplitConfig cfg;
  const SplitSet set = build_splits(kg, cfg);
  REQUIRE(set.skipped.size() == 1);
  CHECK(set.skipped[0].rel == rel(kg, "r"));
  CHECK_FALSE(set.skipped[0].reason.empty());
  CHECK(set.splits.size() == 1);
  CHECK(set.find(rel(kg, "r")) == nullptr);
  CHECK(set.find(rel(kg, "s")) != nullptr);
}

TEST_CASE("config validation") {
  SplitConfig cfg;
  cfg.alpha = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.alpha = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.alpha = 0.5;
  cfg.ratio = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  const auto kg = chain_kg(4);
  SplitConfig bad;
  bad.alpha = 1.0;
  CHECK_THROWS_AS(build_splits(kg, bad), ConfigError);
}

TEST_CASE("generalized and specialized corpora") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto kg = kgtest::random_kg(seed, 30, 5, 200);
    SplitConfig cfg;
    cfg.alpha = 0.5;
    cfg.seed = seed;
    const SplitSet set = build_splits(kg, cfg);

    // Generalized corpus = train positives of split relations plus skipped relations' triples.
    std::size_t expected = 0;
    for (const auto& s : set.splits) expected += s.train_pos.size();
    for (const auto& s : set.skipped) expected += kg.triples_of(s.rel).size();
    CHECK(set.generalized.corpus.size() == expected);

    const std::set<Triple> general(set.generalized.corpus.begin(), set.generalized.corpus.end());
    for (const auto& s : set.splits) {
      const RetainedGraph spec = specialized_corpus(kg, s);
      const std::set<Triple> special(spec.corpus.begin(), spec.corpus.end());
      CHECK(std::includes(special.begin(), special.end(), general.begin(), general.end()));
      CHECK(special.size() == kg.triple_count() - s.test_pos.size());
      for (const Triple& t : s.test_pos) {
        CHECK_FALSE(special.contains(t));
        CHECK_FALSE(general.contains(t));
      }
      for (const Triple& t : s.train_pos) {
        CHECK(special.contains(t));
        CHECK(general.contains(t));
      }
    }
  }
}

TEST_CASE("splits depend only on seed and relation") {
  const auto kg = kgtest::random_kg(77);
  SplitConfig cfg;
  cfg.seed = 5;
  const SplitSet a = build_splits(kg, cfg);
  const SplitSet b = build_splits(kg, cfg);
  REQUIRE(a.splits.size() == b.splits.size());
  for (std::size_t i = 0; i < a.splits.size(); ++i) {
    CHECK(a.splits[i].train_pos == b.splits[i].train_pos);
    CHECK(a.splits[i].test_neg == b.splits[i].test_neg);
  }
  // A lone split_relation call sees the same streams as build_splits.
  const auto& first = a.splits.front();
  const auto alone = split_relation(kg, first.rel, cfg.alpha, cfg);
  REQUIRE(alone.has_value());
  CHECK(alone->test_pos == first.test_pos);
  CHECK(alone->train_neg == first.train_neg);

  cfg.seed = 6;
  const SplitSet c = build_splits(kg, cfg);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.splits.size(); ++i) any_diff |= a.splits[i].test_pos != c.splits[i].test_pos;
  CHECK(any_diff);
}

TEST_CASE("positive-only splits skip negative sampling") {
  const auto kg = chain_kg(10);
  SplitConfig cfg;
  cfg.with_negatives = false;
  const auto split = split_relation(kg, rel(kg, "r"), 0.5, cfg);
  REQUIRE(split.has_value());
  CHECK(split->train_neg.empty());
  CHECK(split->test_neg.empty());
  CHECK(split->test_pos.size() == 5);
}

TEST_CASE("ablation fractions") {
  std::vector<kgtest::NamedTriple> rows;
  for (int r = 0; r < 8; ++r) rows.emplace_back("a", "r" + std::to_string(r), "b");
  const auto kg = make_kg(rows);
  CHECK(ablation_alphas(kg, 3) == ablation_alphas(kg, 3));
  std::size_t all_equal = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto alphas = ablation_alphas(kg, seed);
    CHECK(alphas.size() == 8);
    std::set<double> distinct;
    for (const auto& [r, a] : alphas) {
      CHECK(a >= 0.1);
      CHECK(a <= 0.9);
      distinct.insert(a);
    }
    all_equal += distinct.size() == 1;
  }
  CHECK(all_equal == 0);
}

TEST_CASE("per-relation alphas drive the partition") {
  const auto kg = make_kg({{"a", "r", "b"}, {"a", "r", "c"}, {"a", "r", "d"}, {"a", "r", "e"},
                           {"a", "s", "b"}, {"a", "s", "c"}, {"a", "s", "d"}, {"a", "s", "e"}});
  SplitConfig cfg;
  cfg.with_negatives = false;
  const SplitSet set = build_splits(kg, cfg, {{rel(kg, "r"), 0.25}, {rel(kg, "s"), 0.75}});
  CHECK(set.find(rel(kg, "r"))->train_pos.size() == 1);
  CHECK(set.find(rel(kg, "s"))->train_pos.size() == 3);
  CHECK_THROWS_AS(build_splits(kg, cfg, {{rel(kg, "r"), 1.5}}), ConfigError);
}

TEST_CASE("splits serialize to tsv files") {
  const auto kg = chain_kg(6);
  SplitConfig cfg;
  cfg.negative_mode = NegativeMode::unrestricted;
  const SplitSet set = build_splits(kg, cfg);
  kgtest::TempDir dir("splits");
  write_splits(kg, set, dir.path());
  const std::string rel_dir = std::to_string(index(rel(kg, "r")));
  for (const char* f : {"train_pos.tsv", "test_pos.tsv", "train_neg.tsv", "test_neg.tsv"}) {
    CHECK(std::filesystem::exists(dir.path() / rel_dir / f));
  }
  const auto test_pos = load_graph(dir.path() / rel_dir / "test_pos.tsv");
  CHECK(test_pos.triple_count() == set.splits[0].test_pos.size());
  CHECK(kgtest::read_file(dir / "relations.tsv") == rel_dir + "\tr\n");
}
