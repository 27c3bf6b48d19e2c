#pragma once

// DistMult and ComplEx link scorers trained with a pointwise logistic loss
// over corrupted negatives and Adam.
//
// Each entity/relation owns one parameter row. DistMult rows hold d reals.
// ComplEx rows hold 2d reals: the d real parts followed by the d imaginary
// parts.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "kgbench/ids.hpp"
#include "kgbench/knowledge_graph.hpp"

namespace kgbench {

enum class FactorKind { distmult, complex };

struct FactorConfig {
  FactorKind kind = FactorKind::distmult;
  std::size_t dim = 200;
  std::size_t epochs = 50;
  std::size_t negatives = 10;
  std::size_t batch_size = 128;
  double learning_rate = 1e-3;
  double l2 = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

class FactorModel {
 public:
  FactorModel() = default;
  FactorModel(FactorKind kind, std::size_t dim, std::size_t entity_count,
              std::size_t relation_count);

  FactorKind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return dim_; }
  // Reals per row: dim for DistMult, 2 * dim for ComplEx.
  std::size_t width() const noexcept { return width_; }
  std::size_t entity_count() const noexcept { return entity_count_; }
  std::size_t relation_count() const noexcept { return relation_count_; }

  std::span<double> entity(EntityId e);
  std::span<const double> entity(EntityId e) const;
  std::span<double> relation(RelationId r);
  std::span<const double> relation(RelationId r) const;

  // All parameters: entity rows, then relation rows.
  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }

  double score(const Triple& t) const;

  friend bool operator==(const FactorModel&, const FactorModel&) = default;

 private:
  FactorKind kind_ = FactorKind::distmult;
  std::size_t dim_ = 0;
  std::size_t width_ = 0;
  std::size_t entity_count_ = 0;
  std::size_t relation_count_ = 0;
  std::vector<double> params_;
};

// sum_i h_i r_i t_i. Throws std::invalid_argument on length mismatch.
double score_distmult(std::span<const double> h, std::span<const double> r,
                      std::span<const double> t);

// Re(sum_i h_i r_i conj(t_i)) over [re | im] packed vectors of length 2d.
double score_complex(std::span<const double> h, std::span<const double> r,
                     std::span<const double> t);

// Adds scale * d score / d(h, r, t) into the gradient spans.
void score_gradient(FactorKind kind, std::span<const double> h, std::span<const double> r,
                    std::span<const double> t, double scale, std::span<double> gh,
                    std::span<double> gr, std::span<double> gt);

// Logistic loss of one labelled triple: -log sigma(s) for positives,
// -log(1 - sigma(s)) for negatives. Gradients are accumulated.
double pointwise_loss(FactorKind kind, std::span<const double> h, std::span<const double> r,
                      std::span<const double> t, bool positive, std::span<double> gh,
                      std::span<double> gr, std::span<double> gt);

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double learning_rate = 1e-3;
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;

  AdamState() = default;
  AdamState(std::size_t size, double lr) : learning_rate(lr), m(size, 0.0), v(size, 0.0) {}
};

// Bias-corrected Adam update over the whole parameter vector.
// Throws std::invalid_argument when shapes differ.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

// Adam update restricted to the given rows (row-sparse, as in sparse Adam):
// moments of untouched rows are left as they are. The step counter advances
// once per call.
void adam_step_rows(std::span<double> params, std::span<const double> grads, AdamState& state,
                    std::span<const std::size_t> rows, std::size_t width);

// Uniform(-1/sqrt(d), 1/sqrt(d)) initialization.
FactorModel init_factor(const KnowledgeGraph& kg, const FactorConfig& cfg);

// Negatives corrupt the head or tail and are rejected if they occur in
// `corpus`. Zero epochs returns the initialization unchanged.
FactorModel train_factor(std::span<const Triple> corpus, const KnowledgeGraph& kg,
                         const FactorConfig& cfg);

// Binary checkpoint: magic "KGFM", u32 version, u32 kind, u64 dim,
// u64 entity count, u64 relation count, then little-endian float64 params.
void save_checkpoint(const FactorModel& model, std::ostream& out);
FactorModel load_checkpoint(std::istream& in);

}  // namespace kgbench
