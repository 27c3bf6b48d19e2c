#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgbench/ids.hpp"
#include "kgbench/link_eval.hpp"

namespace kgbench {

struct Summary {
  double mean = 0.0;
  double sd = 0.0;  // sample SD (n - 1); 0 when n < 2
  std::size_t n = 0;
};

Summary summarize(std::span<const double> values);

// Average (1-based) ranks; ties share the mean of their positions.
std::vector<double> midranks(std::span<const double> values);

// Pearson correlation of midranks. nullopt when either side has constant
// ranks. Throws std::invalid_argument on length mismatch or fewer than 3 points.
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

enum class EmbeddingKind { specialized, generalized };

std::string to_string(EmbeddingKind kind);

struct KindedRecord {
  EmbeddingKind kind = EmbeddingKind::generalized;
  EvalRecord record;
};

struct RelationAggregate {
  RelationId rel{};
  EmbeddingKind kind = EmbeddingKind::generalized;
  Summary f1, roc_auc, missing_train, missing_test;
};

struct KindAggregate {
  // Distribution over relations of the per-relation means.
  Summary f1, roc_auc, missing_train, missing_test;
  std::size_t relations = 0;
};

struct AggregateReport {
  std::vector<RelationAggregate> per_relation;  // sorted by (kind, relation)
  std::map<EmbeddingKind, KindAggregate> overall;
};

// Means over runs per (relation, kind); independent of record order.
AggregateReport aggregate_runs(std::span<const KindedRecord> records);

// One correlation observation: named metric values and descriptor values.
struct CorrelationPoint {
  std::map<std::string, double> metrics;
  std::map<std::string, double> descriptors;
};

struct CorrelationReport {
  std::vector<std::string> metrics;
  std::vector<std::string> descriptors;
  // cells[i][j] = spearman(metric i, descriptor j); nullopt when undefined.
  std::vector<std::vector<std::optional<double>>> cells;
  std::size_t n_points = 0;
};

// Points missing a requested metric or descriptor are ignored for that cell.
CorrelationReport correlate(std::span<const CorrelationPoint> points,
                            const std::vector<std::string>& metrics,
                            const std::vector<std::string>& descriptors);

// Descriptor column names used throughout the reports.
inline const std::vector<std::string>& descriptor_columns() {
  static const std::vector<std::string> columns = {"frob_S", "frob_S_prime", "num_triples",
                                                   "mean_mu", "mean_z"};
  return columns;
}

}  // namespace kgbench
