#pragma once

// Shallow entity embedding model trained with a sampled softmax: for every
// corpus triple (h, _, t) the score sim(h, t) competes against sim(h, e_k) for
// k entities drawn uniformly from the corpus vocabulary.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "kgbench/ids.hpp"
#include "kgbench/knowledge_graph.hpp"

namespace kgbench {

enum class Similarity { dot, cosine };

struct ShallowConfig {
  std::size_t dim = 50;
  std::size_t epochs = 10;
  std::size_t negatives_k = 10;
  double learning_rate = 0.05;
  std::uint64_t seed = 0;
  Similarity similarity = Similarity::dot;

  void validate() const;
};

// Dense entity table. Rows of absent entities are zero and never exposed.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::size_t entity_count, std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t entity_count() const noexcept { return present_.size(); }
  std::size_t present_count() const noexcept;

  bool present(EntityId e) const { return present_.at(index(e)) != 0; }
  void set_present(EntityId e, bool value) { present_.at(index(e)) = value ? 1 : 0; }

  // nullopt for absent entities.
  std::optional<std::span<const double>> find(EntityId e) const;
  std::span<double> row(EntityId e);
  std::span<const double> row(EntityId e) const;

  friend bool operator==(const EmbeddingTable&, const EmbeddingTable&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
  std::vector<unsigned char> present_;
};

// Dot product. Throws std::invalid_argument on dimension mismatch.
double similarity(std::span<const double> u, std::span<const double> v);

struct SoftmaxLoss {
  double loss = 0.0;
  double d_pos = 0.0;
  std::vector<double> d_neg;
};

// -log(exp(pos) / (exp(pos) + sum_k exp(neg_k))), max-shifted, with the
// derivative with respect to every input score.
SoftmaxLoss softmax_loss(double pos_sim, std::span<const double> neg_sims);

// Loss of a single training example as a function of the embedding rows,
// with gradients accumulated (added) into the grad_* spans. Exposed so the
// gradient used by training can be checked numerically.
double shallow_example_loss(std::span<const double> anchor, std::span<const double> positive,
                            std::span<const std::span<const double>> negatives,
                            Similarity sim, std::span<double> grad_anchor,
                            std::span<double> grad_positive,
                            std::span<const std::span<double>> grad_negatives);

EmbeddingTable train_shallow(std::span<const Triple> corpus, const KnowledgeGraph& kg,
                             const ShallowConfig& cfg);

// Header line "<entity_count_present> <dim>", then "name<TAB>v1 ... vd".
void write_embeddings_tsv(const EmbeddingTable& table, const KnowledgeGraph& kg,
                          std::ostream& out);
EmbeddingTable read_embeddings_tsv(std::istream& in, const KnowledgeGraph& kg);

}  // namespace kgbench
