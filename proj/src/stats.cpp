#include "kgbench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace kgbench {

Summary summarize(std::span<const double> values) {
  Summary s;
  s.n = values.size();
  if (s.n == 0) return s;
  // Welford; constant input gives exactly sd 0
  double mean = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (double v : values) {
    ++k;
    const double delta = v - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (v - mean);
  }
  s.mean = mean;
  if (s.n > 1) s.sd = std::sqrt(m2 / static_cast<double>(s.n - 1));
  return s;
}

std::vector<double> midranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share rank (i + j) / 2 + 1.
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: length mismatch");
  if (x.size() < 3) throw std::invalid_argument("spearman: need at least 3 points");
  const auto rx = midranks(x);
  const auto ry = midranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::string to_string(EmbeddingKind kind) {
  return kind == EmbeddingKind::specialized ? "specialized" : "generalized";
}

AggregateReport aggregate_runs(std::span<const KindedRecord> records) {
  struct Columns {
    std::vector<double> f1, auc, miss_train, miss_test;
  };
  std::map<std::pair<EmbeddingKind, RelationId>, Columns> groups;
  for (const KindedRecord& kr : records) {
    Columns& c = groups[{kr.kind, kr.record.rel}];
    c.f1.push_back(kr.record.f1);
    c.auc.push_back(kr.record.roc_auc);
    c.miss_train.push_back(kr.record.missing_train_ratio);
    c.miss_test.push_back(kr.record.missing_test_ratio);
  }
  // Sorting before summation makes the floating-point result order-free.
  auto sorted_summary = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    return summarize(v);
  };

  AggregateReport report;
  std::map<EmbeddingKind, Columns> means;
  for (auto& [key, cols] : groups) {
    RelationAggregate agg;
    agg.kind = key.first;
    agg.rel = key.second;
    agg.f1 = sorted_summary(cols.f1);
    agg.roc_auc = sorted_summary(cols.auc);
    agg.missing_train = sorted_summary(cols.miss_train);
    agg.missing_test = sorted_summary(cols.miss_test);
    Columns& m = means[key.first];
    m.f1.push_back(agg.f1.mean);
    m.auc.push_back(agg.roc_auc.mean);
    m.miss_train.push_back(agg.missing_train.mean);
    m.miss_test.push_back(agg.missing_test.mean);
    report.per_relation.push_back(agg);
  }
  for (auto& [kind, cols] : means) {
    KindAggregate k;
    k.relations = cols.f1.size();
    k.f1 = summarize(cols.f1);
    k.roc_auc = summarize(cols.auc);
    k.missing_train = summarize(cols.miss_train);
    k.missing_test = summarize(cols.miss_test);
    report.overall[kind] = k;
  }
  return report;
}

CorrelationReport correlate(std::span<const CorrelationPoint> points,
                            const std::vector<std::string>& metrics,
                            const std::vector<std::string>& descriptors) {
  CorrelationReport rep;
  rep.metrics = metrics;
  rep.descriptors = descriptors;
  rep.n_points = points.size();
  for (const auto& metric : metrics) {
    auto& row = rep.cells.emplace_back();
    for (const auto& desc : descriptors) {
      std::vector<double> xs, ys;
      for (const auto& p : points) {
        auto m = p.metrics.find(metric);
        auto d = p.descriptors.find(desc);
        if (m == p.metrics.end() || d == p.descriptors.end()) continue;
        if (!std::isfinite(m->second) || !std::isfinite(d->second)) continue;
        xs.push_back(m->second);
        ys.push_back(d->second);
      }
      row.push_back(xs.size() >= 3 ? spearman(xs, ys) : std::nullopt);
    }
  }
  return rep;
}

}  // namespace kgbench
