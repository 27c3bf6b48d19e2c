#include <doctest.h>

#include <sstream>

#include "kgbench/descriptors.hpp"
#include "support.hpp"

using namespace kgbench;
using doctest::Approx;
using kgtest::make_kg;
using kgtest::rel;

TEST_CASE("mu") {
  SUBCASE("single pair is complete") {
    const auto kg = make_kg({{"a", "r", "b"}});
    CHECK(mu(kg, rel(kg, "r")) == 1.0);
  }
  SUBCASE("three of four dom x range pairs") {
    const auto kg = make_kg({{"a", "r", "b"}, {"a", "r", "c"}, {"b", "r", "c"}});
    CHECK(mu(kg, rel(kg, "r")) == 0.75);
  }
  SUBCASE("complete bipartite") {
    std::vector<kgtest::NamedTriple> rows;
    for (const char* h : {"a", "b", "c"}) {
      for (const char* t : {"x", "y"}) rows.emplace_back(h, "r", t);
    }
    const auto kg = make_kg(rows);
    CHECK(mu(kg, rel(kg, "r")) == 1.0);
  }
  SUBCASE("unindexed relation throws") {
    const auto kg = make_kg({{"a", "r", "b"}, {"a", "s", "b"}});
    const Triple keep = kgtest::triple(kg, "a", "r", "b");
    const auto sub = kg.subgraph(std::span<const Triple>(&keep, 1));
    CHECK_THROWS(mu(sub, rel(kg, "s")));
  }
}

TEST_CASE("z") {
  SUBCASE("four entities, three positives") {
    const auto kg = make_kg({{"a", "r", "b"}, {"a", "r", "c"}, {"b", "r", "c"}, {"d", "s", "a"}});
    CHECK(z(kg, rel(kg, "r")) == 0.25);
  }
  SUBCASE("two entities, one triple") {
    const auto kg = make_kg({{"a", "r", "b"}});
    CHECK(z(kg, rel(kg, "r")) == 0.5);
  }
  SUBCASE("unindexed relation gives zero") {
    const auto kg = make_kg({{"a", "r", "b"}, {"a", "s", "b"}});
    const Triple keep = kgtest::triple(kg, "a", "r", "b");
    const auto sub = kg.subgraph(std::span<const Triple>(&keep, 1));
    CHECK(z(sub, rel(kg, "s")) == 0.0);
  }
}

TEST_CASE("jaccard over instances") {
  const auto kg = make_kg({{"a", "r1", "b"},
                           {"a", "r1", "c"},
                           {"b", "r1", "c"},
                           {"a", "r2", "b"},
                           {"c", "r2", "d"},
                           {"x", "r3", "y"}});
  CHECK(jaccard_instances(kg, rel(kg, "r1"), rel(kg, "r1")) == 1.0);
  CHECK(jaccard_instances(kg, rel(kg, "r1"), rel(kg, "r2")) == 0.25);
  CHECK(jaccard_instances(kg, rel(kg, "r1"), rel(kg, "r3")) == 0.0);
}

TEST_CASE("jaccard over participating entities") {
  const auto kg = make_kg({{"a", "r1", "b"},
                           {"b", "r1", "c"},
                           {"a", "r2", "b"},
                           {"c", "r2", "d"},
                           {"x", "r3", "y"}});
  CHECK(jaccard_entities(kg, rel(kg, "r1"), rel(kg, "r1")) == 1.0);
  CHECK(jaccard_entities(kg, rel(kg, "r1"), rel(kg, "r2")) == 0.75);
  CHECK(jaccard_entities(kg, rel(kg, "r1"), rel(kg, "r3")) == 0.0);
}

TEST_CASE("frobenius norm") {
  CHECK(frobenius(SquareMatrix::identity(2)) == Approx(1.41421356237).epsilon(1e-10));
  SquareMatrix s = SquareMatrix::identity(2);
  s(0, 1) = s(1, 0) = 0.25;
  CHECK(frobenius(s) == Approx(std::sqrt(2.125)).epsilon(1e-12));
  CHECK(frobenius(SquareMatrix(3)) == 0.0);
}

TEST_CASE("describe on the toy graph") {
  const auto kg = make_kg({{"a", "r1", "b"}, {"a", "r1", "c"}, {"b", "r1", "c"}, {"a", "r2", "b"},
                           {"c", "r2", "d"}});
  const DescriptorReport rep = describe(kg);
  REQUIRE(rep.relations.size() == 2);
  // r2: dom {a, c}, range {b, d}, 2 positives
  const double mu_r2 = 2.0 / 4.0;
  CHECK(rep.mu_mean == Approx((0.75 + mu_r2) / 2).epsilon(1e-12));
  CHECK(rep.triple_count == 5);
  CHECK(rep.s(0, 1) == 0.25);
  CHECK(rep.s_prime(0, 1) == 0.75);
  CHECK(rep.frob_s == Approx(std::sqrt(2.0 + 2 * 0.0625)).epsilon(1e-12));
}

TEST_CASE("descriptor invariants on random graphs") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto kg = kgtest::random_kg(seed);
    const auto rep = describe(kg);
    const std::size_t n = rep.relations.size();
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(rep.mu[i] > 0.0);
      CHECK(rep.mu[i] <= 1.0);
      CHECK(rep.z[i] > 0.0);
      // self-loops count as positives but not in |E|(|E|-1)
      const double e = static_cast<double>(kg.entity_count());
      CHECK(rep.z[i] * (e - 1.0) <= e + 1e-12);
      CHECK(rep.s(i, i) == 1.0);
      CHECK(rep.s_prime(i, i) == 1.0);
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(rep.s(i, j) == rep.s(j, i));
        CHECK(rep.s_prime(i, j) == rep.s_prime(j, i));
        CHECK(rep.s(i, j) >= 0.0);
        CHECK(rep.s(i, j) <= 1.0);
        CHECK(rep.s_prime(i, j) >= 0.0);
        CHECK(rep.s_prime(i, j) <= 1.0);
      }
    }
    CHECK(rep.frob_s >= std::sqrt(static_cast<double>(n)) - 1e-12);
    CHECK(rep.frob_s_prime >= std::sqrt(static_cast<double>(n)) - 1e-12);
  }
}

TEST_CASE("matrix csv has a name header row and column") {
  const auto kg = make_kg({{"a", "r,1", "b"}, {"a", "r2", "b"}});
  const auto rep = describe(kg);
  std::ostringstream out;
  write_matrix_csv(rep.s, rep.relation_names, out);
  CHECK(out.str() == "relation,\"r,1\",r2\n\"r,1\",1,1\nr2,1,1\n");
}
