#include "kgbench/factor.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

#include "kgbench/errors.hpp"
#include "kgbench/random.hpp"

namespace kgbench {
namespace {

constexpr std::array<char, 4> kMagic = {'K', 'G', 'F', 'M'};
constexpr std::uint32_t kVersion = 1;

void check_lengths(std::size_t h, std::size_t r, std::size_t t) {
  if (h != r || r != t) throw std::invalid_argument("score: vector length mismatch");
}

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

template <class T>
void write_le(std::ostream& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  auto bits = std::bit_cast<U>(value);
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <class T>
T read_le(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  std::array<unsigned char, sizeof(U)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw DataError("checkpoint: truncated");
  }
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(bytes[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

}  // namespace

void FactorConfig::validate() const {
  if (dim == 0) throw ConfigError("embedding dimension must be at least 1");
  if (batch_size == 0) throw ConfigError("batch size must be at least 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (l2 < 0.0) throw ConfigError("l2 weight must be non-negative");
}

FactorModel::FactorModel(FactorKind kind, std::size_t dim, std::size_t entity_count,
                         std::size_t relation_count)
    : kind_(kind),
      dim_(dim),
      width_(kind == FactorKind::complex ? 2 * dim : dim),
      entity_count_(entity_count),
      relation_count_(relation_count),
      params_((entity_count + relation_count) * width_, 0.0) {}

std::span<double> FactorModel::entity(EntityId e) {
  if (index(e) >= entity_count_) throw std::out_of_range("entity outside model vocabulary");
  return std::span<double>(params_).subspan(index(e) * width_, width_);
}

std::span<const double> FactorModel::entity(EntityId e) const {
  if (index(e) >= entity_count_) throw std::out_of_range("entity outside model vocabulary");
  return std::span<const double>(params_).subspan(index(e) * width_, width_);
}

std::span<double> FactorModel::relation(RelationId r) {
  if (index(r) >= relation_count_) throw std::out_of_range("relation outside model vocabulary");
  return std::span<double>(params_).subspan((entity_count_ + index(r)) * width_, width_);
}

std::span<const double> FactorModel::relation(RelationId r) const {
  if (index(r) >= relation_count_) throw std::out_of_range("relation outside model vocabulary");
  return std::span<const double>(params_).subspan((entity_count_ + index(r)) * width_, width_);
}

double FactorModel::score(const Triple& t) const {
  const auto h = entity(t.head);
  const auto r = relation(t.rel);
  const auto tl = entity(t.tail);
  return kind_ == FactorKind::distmult ? score_distmult(h, r, tl) : score_complex(h, r, tl);
}

double score_distmult(std::span<const double> h, std::span<const double> r,
                      std::span<const double> t) {
  check_lengths(h.size(), r.size(), t.size());
  double s = 0.0;
  // h * t first keeps score(h, r, t) == score(t, r, h) bit for bit.
  for (std::size_t i = 0; i < h.size(); ++i) s += r[i] * (h[i] * t[i]);
  return s;
}

double score_complex(std::span<const double> h, std::span<const double> r,
                     std::span<const double> t) {
  check_lengths(h.size(), r.size(), t.size());
  if (h.size() % 2 != 0) throw std::invalid_argument("score_complex: odd vector length");
  const std::size_t d = h.size() / 2;
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double a = h[i], b = h[d + i];
    const double c = r[i], dd = r[d + i];
    const double e = t[i], f = t[d + i];
    s += (a * c - b * dd) * e + (a * dd + b * c) * f;
  }
  return s;
}

void score_gradient(FactorKind kind, std::span<const double> h, std::span<const double> r,
                    std::span<const double> t, double scale, std::span<double> gh,
                    std::span<double> gr, std::span<double> gt) {
  check_lengths(h.size(), r.size(), t.size());
  check_lengths(gh.size(), gr.size(), gt.size());
  check_lengths(h.size(), gh.size(), gh.size());
  if (kind == FactorKind::distmult) {
    for (std::size_t i = 0; i < h.size(); ++i) {
      gh[i] += scale * r[i] * t[i];
      gr[i] += scale * h[i] * t[i];
      gt[i] += scale * h[i] * r[i];
    }
    return;
  }
  const std::size_t d = h.size() / 2;
  for (std::size_t i = 0; i < d; ++i) {
    const double a = h[i], b = h[d + i];
    const double c = r[i], dd = r[d + i];
    const double e = t[i], f = t[d + i];
    gh[i] += scale * (c * e + dd * f);
    gh[d + i] += scale * (c * f - dd * e);
    gr[i] += scale * (a * e + b * f);
    gr[d + i] += scale * (a * f - b * e);
    gt[i] += scale * (a * c - b * dd);
    gt[d + i] += scale * (a * dd + b * c);
  }
}

double pointwise_loss(FactorKind kind, std::span<const double> h, std::span<const double> r,
                      std::span<const double> t, bool positive, std::span<double> gh,
                      std::span<double> gr, std::span<double> gt) {
  const double s = kind == FactorKind::distmult ? score_distmult(h, r, t) : score_complex(h, r, t);
  const double dloss = sigmoid(s) - (positive ? 1.0 : 0.0);
  score_gradient(kind, h, r, t, dloss, gh, gr, gt);
  return positive ? softplus(-s) : softplus(s);
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
  if (params.size() != grads.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw std::invalid_argument("adam_step: shape mismatch");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

void adam_step_rows(std::span<double> params, std::span<const double> grads, AdamState& state,
                    std::span<const std::size_t> rows, std::size_t width) {
  if (params.size() != grads.size() || state.m.size() != params.size() ||
      state.v.size() != params.size() || width == 0 || params.size() % width != 0) {
    throw std::invalid_argument("adam_step_rows: shape mismatch");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t row : rows) {
    if ((row + 1) * width > params.size()) throw std::out_of_range("adam_step_rows: row");
    for (std::size_t i = row * width; i < (row + 1) * width; ++i) {
      state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
      state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
      params[i] -= state.learning_rate * (state.m[i] / c1) / (std::sqrt(state.v[i] / c2) + state.epsilon);
    }
  }
}

FactorModel init_factor(const KnowledgeGraph& kg, const FactorConfig& cfg) {
  cfg.validate();
  FactorModel model(cfg.kind, cfg.dim, kg.entity_count(), kg.relation_count());
  Rng rng(derive_seed(cfg.seed, SeedPurpose::factor, {0}));
  const double bound = 1.0 / std::sqrt(static_cast<double>(cfg.dim));
  for (double& p : model.parameters()) p = uniform_real(rng, -bound, bound);
  return model;
}

FactorModel train_factor(std::span<const Triple> corpus, const KnowledgeGraph& kg,
                         const FactorConfig& cfg) {
  FactorModel model = init_factor(kg, cfg);
  if (cfg.epochs == 0) return model;
  if (corpus.empty()) throw std::invalid_argument("train_factor: empty corpus");

  const std::size_t w = model.width();
  const std::size_t n_ent = model.entity_count();
  auto params = model.parameters();
  std::vector<double> grads(params.size(), 0.0);
  std::vector<unsigned char> touched(n_ent + model.relation_count(), 0);
  std::vector<std::size_t> rows;
  AdamState adam(params.size(), cfg.learning_rate);
  Rng rng(derive_seed(cfg.seed, SeedPurpose::factor, {1}));

  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  // Corruptions are checked against the training corpus only; held-out
  // triples are unknown to the model.
  const std::unordered_set<Triple, TripleHash> known(corpus.begin(), corpus.end());
  // Per-example gradients, scaled into the batch buffer afterwards.
  std::vector<double> gh(w), gr(w), gt(w);

  auto grad_row = [&](std::size_t row) {
    if (!touched[row]) {
      touched[row] = 1;
      rows.push_back(row);
    }
    return std::span<double>(grads).subspan(row * w, w);
  };
  auto param_row = [&](std::size_t row) {
    return std::span<const double>(params).subspan(row * w, w);
  };

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle(std::span<std::size_t>(order), rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const double scale = 1.0 / static_cast<double>((end - start) * (1 + cfg.negatives));
      for (std::size_t b = start; b < end; ++b) {
        const Triple& pos = corpus[order[b]];
        auto add_example = [&](const Triple& t, bool positive) {
          const std::size_t hr = index(t.head), rr = n_ent + index(t.rel), tr = index(t.tail);
          std::fill(gh.begin(), gh.end(), 0.0);
          std::fill(gr.begin(), gr.end(), 0.0);
          std::fill(gt.begin(), gt.end(), 0.0);
          pointwise_loss(cfg.kind, param_row(hr), param_row(rr), param_row(tr), positive, gh, gr, gt);
          auto bh = grad_row(hr);
          for (std::size_t i = 0; i < w; ++i) bh[i] += scale * gh[i];
          auto br = grad_row(rr);
          for (std::size_t i = 0; i < w; ++i) br[i] += scale * gr[i];
          auto bt = grad_row(tr);
          for (std::size_t i = 0; i < w; ++i) bt[i] += scale * gt[i];
        };
        add_example(pos, true);
        for (std::size_t k = 0; k < cfg.negatives; ++k) {
          Triple neg = pos;
          for (int attempt = 0; attempt < 16; ++attempt) {
            const auto e = EntityId{static_cast<std::uint32_t>(uniform_index(rng, n_ent))};
            neg = pos;
            if (uniform_index(rng, 2) == 0) {
              neg.head = e;
            } else {
              neg.tail = e;
            }
            if (!known.contains(neg)) break;
          }
          if (known.contains(neg)) continue;
          add_example(neg, false);
        }
      }
      if (cfg.l2 > 0.0) {
        for (std::size_t row : rows) {
          for (std::size_t i = row * w; i < (row + 1) * w; ++i) grads[i] += cfg.l2 * params[i];
        }
      }
      std::sort(rows.begin(), rows.end());
      adam_step_rows(params, grads, adam, rows, w);
      for (std::size_t row : rows) {
        std::fill(grads.begin() + static_cast<std::ptrdiff_t>(row * w),
                  grads.begin() + static_cast<std::ptrdiff_t>((row + 1) * w), 0.0);
        touched[row] = 0;
      }
      rows.clear();
    }
  }
  return model;
}

void save_checkpoint(const FactorModel& model, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  write_le<std::uint32_t>(out, kVersion);
  write_le<std::uint32_t>(out, model.kind() == FactorKind::distmult ? 0u : 1u);
  write_le<std::uint64_t>(out, model.dim());
  write_le<std::uint64_t>(out, model.entity_count());
  write_le<std::uint64_t>(out, model.relation_count());
  for (double p : model.parameters()) write_le<double>(out, p);
  if (!out) throw DataError("checkpoint: write failed");
}

FactorModel load_checkpoint(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw DataError("checkpoint: bad magic");
  }
  if (read_le<std::uint32_t>(in) != kVersion) throw DataError("checkpoint: unsupported version");
  const auto kind_code = read_le<std::uint32_t>(in);
  if (kind_code > 1) throw DataError("checkpoint: unknown model kind");
  const auto dim = read_le<std::uint64_t>(in);
  const auto n_ent = read_le<std::uint64_t>(in);
  const auto n_rel = read_le<std::uint64_t>(in);
  if (dim == 0 || dim > (1u << 20) || n_ent > (1ull << 32) || n_rel > (1ull << 32)) {
    throw DataError("checkpoint: implausible header");
  }
  FactorModel model(kind_code == 0 ? FactorKind::distmult : FactorKind::complex, dim, n_ent, n_rel);
  for (double& p : model.parameters()) {
    p = read_le<double>(in);
    if (!std::isfinite(p)) throw DataError("checkpoint: non-finite parameter");
  }
  if (in.peek() != std::char_traits<char>::eof()) throw DataError("checkpoint: trailing bytes");
  return model;
}

}  // namespace kgbench
