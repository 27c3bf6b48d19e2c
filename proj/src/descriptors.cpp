#include "kgbench/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <ostream>
#include <stdexcept>

#include "kgbench/csv.hpp"
#include "kgbench/stats.hpp"

namespace kgbench {
namespace {

template <class T>
std::size_t intersection_size(std::span<const T> a, std::span<const T> b) {
  std::size_t count = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

template <class T>
double jaccard(std::span<const T> a, std::span<const T> b) {
  const std::size_t inter = intersection_size(a, b);
  const std::size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<EntityId> participants(const KnowledgeGraph& kg, RelationId r) {
  auto dom = kg.domain_of(r);
  auto ran = kg.range_of(r);
  std::vector<EntityId> out;
  out.reserve(dom.size() + ran.size());
  std::set_union(dom.begin(), dom.end(), ran.begin(), ran.end(), std::back_inserter(out));
  return out;
}

}  // namespace

SquareMatrix SquareMatrix::identity(std::size_t n) {
  SquareMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double mu(const KnowledgeGraph& kg, RelationId r) {
  if (!kg.is_indexed(r)) throw std::invalid_argument("mu: relation has no triples");
  const double candidates =
      static_cast<double>(kg.domain_of(r).size()) * static_cast<double>(kg.range_of(r).size());
  return static_cast<double>(kg.pairs(r).size()) / candidates;
}

double z(const KnowledgeGraph& kg, RelationId r) {
  const std::size_t n = kg.entity_count();
  if (n < 2) throw std::invalid_argument("z: graph needs at least two entities");
  return static_cast<double>(kg.pairs(r).size()) /
         (static_cast<double>(n) * static_cast<double>(n - 1));
}

double jaccard_instances(const KnowledgeGraph& kg, RelationId r1, RelationId r2) {
  return jaccard(kg.pairs(r1), kg.pairs(r2));
}

double jaccard_entities(const KnowledgeGraph& kg, RelationId r1, RelationId r2) {
  const auto x1 = participants(kg, r1);
  const auto x2 = participants(kg, r2);
  return jaccard(std::span<const EntityId>(x1), std::span<const EntityId>(x2));
}

double frobenius(const SquareMatrix& m) {
  double sum = 0.0;
  for (double v : m.data()) sum += v * v;
  return std::sqrt(sum);
}

DescriptorReport describe(const KnowledgeGraph& kg) {
  DescriptorReport rep;
  rep.entity_count = kg.entity_count();
  rep.relation_count = kg.relation_count();
  rep.triple_count = kg.triple_count();
  rep.relations = kg.indexed_relations();

  const std::size_t n = rep.relations.size();
  std::vector<std::vector<EntityId>> xs;
  xs.reserve(n);
  for (RelationId r : rep.relations) {
    rep.relation_names.push_back(kg.relation_name(r));
    rep.positives.push_back(kg.pairs(r).size());
    rep.mu.push_back(mu(kg, r));
    rep.z.push_back(kg.entity_count() >= 2 ? z(kg, r) : 0.0);
    xs.push_back(participants(kg, r));
  }

  rep.s = SquareMatrix::identity(n);
  rep.s_prime = SquareMatrix::identity(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = jaccard(kg.pairs(rep.relations[i]), kg.pairs(rep.relations[j]));
      const double sp =
          jaccard(std::span<const EntityId>(xs[i]), std::span<const EntityId>(xs[j]));
      rep.s(i, j) = rep.s(j, i) = s;
      rep.s_prime(i, j) = rep.s_prime(j, i) = sp;
    }
  }
  rep.frob_s = frobenius(rep.s);
  rep.frob_s_prime = frobenius(rep.s_prime);

  const Summary mu_summary = summarize(rep.mu);
  const Summary z_summary = summarize(rep.z);
  rep.mu_mean = mu_summary.mean;
  rep.mu_sd = mu_summary.sd;
  rep.z_mean = z_summary.mean;
  rep.z_sd = z_summary.sd;
  return rep;
}

void write_matrix_csv(const SquareMatrix& m, const std::vector<std::string>& names,
                      std::ostream& out) {
  if (names.size() != m.size()) throw std::invalid_argument("matrix/name size mismatch");
  out << "relation";
  for (const auto& name : names) out << ',' << csv_field(name);
  out << '\n';
  const auto old_precision = out.precision(17);
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << csv_field(names[i]);
    for (std::size_t j = 0; j < m.size(); ++j) out << ',' << m(i, j);
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace kgbench
