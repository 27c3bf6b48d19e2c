#pragma once

// Relation-centric connectivity and similarity descriptors:
//   mu(r)  = |Pos_r| / (|dom(r)| * |range(r)|)
//   z(r)   = |Pos_r| / (|E| * (|E| - 1))
//   S      = Jaccard over shared (head, tail) instances
//   S'     = Jaccard over shared participating entities (dom ∪ range)

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "kgbench/ids.hpp"
#include "kgbench/knowledge_graph.hpp"

namespace kgbench {

class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  const std::vector<double>& data() const noexcept { return data_; }

  static SquareMatrix identity(std::size_t n);

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

double mu(const KnowledgeGraph& kg, RelationId r);
// Throws std::invalid_argument when the graph has fewer than two entities.
double z(const KnowledgeGraph& kg, RelationId r);
double jaccard_instances(const KnowledgeGraph& kg, RelationId r1, RelationId r2);
double jaccard_entities(const KnowledgeGraph& kg, RelationId r1, RelationId r2);
double frobenius(const SquareMatrix& m);

struct DescriptorReport {
  std::size_t entity_count = 0;
  std::size_t relation_count = 0;
  std::size_t triple_count = 0;
  // Indexed relations only, in id order; all per-relation vectors and matrix
  // rows follow this order.
  std::vector<RelationId> relations;
  std::vector<std::string> relation_names;
  std::vector<std::size_t> positives;
  std::vector<double> mu;
  std::vector<double> z;
  SquareMatrix s;
  SquareMatrix s_prime;
  double frob_s = 0.0;
  double frob_s_prime = 0.0;
  double mu_mean = 0.0;
  double mu_sd = 0.0;
  double z_mean = 0.0;
  double z_sd = 0.0;
};

DescriptorReport describe(const KnowledgeGraph& kg);

// Row-major CSV with a header row and a leading column of relation names.
void write_matrix_csv(const SquareMatrix& m, const std::vector<std::string>& names,
                      std::ostream& out);

}  // namespace kgbench
