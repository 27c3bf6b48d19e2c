#include "kgbench/shallow.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "kgbench/errors.hpp"
#include "kgbench/random.hpp"

namespace kgbench {
namespace {

void check_dims(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("embedding dimension mismatch");
}

// Similarity value plus the scalar coefficients of its gradient:
//   d sim / d u = cu_v * v + cu_u * u,   d sim / d v = cv_u * u + cv_v * v.
struct SimGrad {
  double value = 0.0;
  double cu_v = 0.0, cu_u = 0.0;
  double cv_u = 0.0, cv_v = 0.0;
};

SimGrad sim_with_grad(std::span<const double> u, std::span<const double> v, Similarity kind) {
  const double uv = similarity(u, v);
  if (kind == Similarity::dot) return {uv, 1.0, 0.0, 1.0, 0.0};
  const double nu = std::sqrt(similarity(u, u));
  const double nv = std::sqrt(similarity(v, v));
  if (nu == 0.0 || nv == 0.0) return {};
  const double c = uv / (nu * nv);
  return {c, 1.0 / (nu * nv), -c / (nu * nu), 1.0 / (nu * nv), -c / (nv * nv)};
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

}  // namespace

void ShallowConfig::validate() const {
  if (dim == 0) throw ConfigError("embedding dimension must be at least 1");
  if (epochs == 0) throw ConfigError("epochs must be at least 1");
  if (negatives_k == 0) throw ConfigError("negatives per positive must be at least 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
}

EmbeddingTable::EmbeddingTable(std::size_t entity_count, std::size_t dim)
    : dim_(dim), data_(entity_count * dim, 0.0), present_(entity_count, 0) {}

std::size_t EmbeddingTable::present_count() const noexcept {
  return static_cast<std::size_t>(std::count(present_.begin(), present_.end(), 1));
}

std::optional<std::span<const double>> EmbeddingTable::find(EntityId e) const {
  if (index(e) >= present_.size() || present_[index(e)] == 0) return std::nullopt;
  return row(e);
}

std::span<double> EmbeddingTable::row(EntityId e) {
  return std::span<double>(data_).subspan(static_cast<std::size_t>(index(e)) * dim_, dim_);
}

std::span<const double> EmbeddingTable::row(EntityId e) const {
  return std::span<const double>(data_).subspan(static_cast<std::size_t>(index(e)) * dim_, dim_);
}

double similarity(std::span<const double> u, std::span<const double> v) {
  check_dims(u.size(), v.size());
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

SoftmaxLoss softmax_loss(double pos_sim, std::span<const double> neg_sims) {
  if (neg_sims.empty()) throw std::invalid_argument("softmax_loss needs at least one negative");
  double m = pos_sim;
  for (double s : neg_sims) m = std::max(m, s);
  double z = std::exp(pos_sim - m);
  for (double s : neg_sims) z += std::exp(s - m);

  SoftmaxLoss out;
  out.loss = std::log(z) - (pos_sim - m);
  out.d_pos = std::exp(pos_sim - m) / z - 1.0;
  out.d_neg.reserve(neg_sims.size());
  for (double s : neg_sims) out.d_neg.push_back(std::exp(s - m) / z);
  return out;
}

double shallow_example_loss(std::span<const double> anchor, std::span<const double> positive,
                            std::span<const std::span<const double>> negatives,
                            Similarity sim, std::span<double> grad_anchor,
                            std::span<double> grad_positive,
                            std::span<const std::span<double>> grad_negatives) {
  check_dims(anchor.size(), positive.size());
  if (grad_negatives.size() != negatives.size()) {
    throw std::invalid_argument("gradient buffer count mismatch");
  }
  const SimGrad pos = sim_with_grad(anchor, positive, sim);
  std::vector<SimGrad> negs;
  std::vector<double> neg_values;
  negs.reserve(negatives.size());
  for (auto n : negatives) {
    negs.push_back(sim_with_grad(anchor, n, sim));
    neg_values.push_back(negs.back().value);
  }
  const SoftmaxLoss loss = softmax_loss(pos.value, neg_values);

  axpy(loss.d_pos * pos.cu_v, positive, grad_anchor);
  axpy(loss.d_pos * pos.cu_u, anchor, grad_anchor);
  axpy(loss.d_pos * pos.cv_u, anchor, grad_positive);
  axpy(loss.d_pos * pos.cv_v, positive, grad_positive);
  for (std::size_t k = 0; k < negatives.size(); ++k) {
    const double g = loss.d_neg[k];
    axpy(g * negs[k].cu_v, negatives[k], grad_anchor);
    axpy(g * negs[k].cu_u, anchor, grad_anchor);
    axpy(g * negs[k].cv_u, anchor, grad_negatives[k]);
    axpy(g * negs[k].cv_v, negatives[k], grad_negatives[k]);
  }
  return loss.loss;
}

EmbeddingTable train_shallow(std::span<const Triple> corpus, const KnowledgeGraph& kg,
                             const ShallowConfig& cfg) {
  cfg.validate();
  if (corpus.empty()) throw std::invalid_argument("train_shallow: empty corpus");
  const std::size_t d = cfg.dim;
  EmbeddingTable table(kg.entity_count(), d);
  for (const Triple& t : corpus) {
    table.set_present(t.head, true);
    table.set_present(t.tail, true);
  }
  std::vector<EntityId> vocab;
  for (std::uint32_t e = 0; e < kg.entity_count(); ++e) {
    if (table.present(EntityId{e})) vocab.push_back(EntityId{e});
  }

  Rng rng(derive_seed(cfg.seed, SeedPurpose::embedding));
  const double bound = 1.0 / (2.0 * static_cast<double>(d));
  for (EntityId e : vocab) {
    for (double& x : table.row(e)) x = uniform_real(rng, -bound, bound);
  }

  const std::size_t k = cfg.negatives_k;
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  // Per-step scratch: values are copied so the gradient uses pre-update rows.
  std::vector<double> anchor(d), positive(d), neg_values(k * d);
  std::vector<double> g_anchor(d), g_positive(d), g_neg(k * d);
  std::vector<std::span<const double>> neg_views(k);
  std::vector<std::span<double>> g_neg_views(k);
  for (std::size_t m = 0; m < k; ++m) {
    neg_views[m] = std::span<const double>(neg_values).subspan(m * d, d);
    g_neg_views[m] = std::span<double>(g_neg).subspan(m * d, d);
  }
  std::vector<EntityId> neg_ids(k);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle(std::span<std::size_t>(order), rng);
    for (std::size_t idx : order) {
      const Triple& t = corpus[idx];
      for (std::size_t m = 0; m < k; ++m) {
        EntityId e = vocab[uniform_index(rng, vocab.size())];
        for (int retry = 0; e == t.tail && vocab.size() > 1 && retry < 16; ++retry) {
          e = vocab[uniform_index(rng, vocab.size())];
        }
        neg_ids[m] = e;
        auto src = table.row(e);
        std::copy(src.begin(), src.end(), neg_values.begin() + static_cast<std::ptrdiff_t>(m * d));
      }
      auto h_row = table.row(t.head);
      auto t_row = table.row(t.tail);
      std::copy(h_row.begin(), h_row.end(), anchor.begin());
      std::copy(t_row.begin(), t_row.end(), positive.begin());
      std::fill(g_anchor.begin(), g_anchor.end(), 0.0);
      std::fill(g_positive.begin(), g_positive.end(), 0.0);
      std::fill(g_neg.begin(), g_neg.end(), 0.0);

      shallow_example_loss(anchor, positive, neg_views, cfg.similarity, g_anchor, g_positive,
                           g_neg_views);

      axpy(-cfg.learning_rate, g_anchor, table.row(t.head));
      axpy(-cfg.learning_rate, g_positive, table.row(t.tail));
      for (std::size_t m = 0; m < k; ++m) axpy(-cfg.learning_rate, g_neg_views[m], table.row(neg_ids[m]));
    }
  }
  return table;
}

void write_embeddings_tsv(const EmbeddingTable& table, const KnowledgeGraph& kg,
                          std::ostream& out) {
  const auto old_precision = out.precision(17);
  out << table.present_count() << '\t' << table.dim() << '\n';
  for (std::uint32_t e = 0; e < table.entity_count(); ++e) {
    auto row = table.find(EntityId{e});
    if (!row) continue;
    out << kg.entity_name(EntityId{e});
    for (double v : *row) out << '\t' << v;
    out << '\n';
  }
  out.precision(old_precision);
}

EmbeddingTable read_embeddings_tsv(std::istream& in, const KnowledgeGraph& kg) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("embedding file: missing header");
  std::size_t count = 0, dim = 0;
  {
    std::istringstream header(line);
    if (!(header >> count >> dim) || dim == 0) throw DataError("embedding file: bad header");
  }
  EmbeddingTable table(kg.entity_count(), dim);
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw DataError("embedding file: truncated");
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError("embedding file: missing values");
    auto id = kg.find_entity(std::string_view(line).substr(0, tab));
    if (!id) throw DataError("embedding file: unknown entity " + line.substr(0, tab));
    auto row = table.row(*id);
    std::size_t pos = tab;
    for (std::size_t j = 0; j < dim; ++j) {
      if (pos == std::string::npos || pos >= line.size()) {
        throw DataError("embedding file: too few values");
      }
      const std::size_t next = line.find('\t', pos + 1);
      row[j] = std::stod(line.substr(pos + 1, next == std::string::npos ? next : next - pos - 1));
      pos = next;
    }
    if (pos != std::string::npos) throw DataError("embedding file: too many values");
    table.set_present(*id, true);
  }
  return table;
}

}  // namespace kgbench
