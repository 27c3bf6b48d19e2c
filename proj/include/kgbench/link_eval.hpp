#pragma once

// Per-relation binary link classifiers: entity embeddings are combined into a
// link feature, a logistic regression is fit on the train examples, and F1 /
// ROC-AUC are measured on the test examples. Examples whose head or tail has
// no embedding are dropped and counted.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "kgbench/ids.hpp"
#include "kgbench/shallow.hpp"
#include "kgbench/splits.hpp"

namespace kgbench {

enum class CombineOp { concat, sum, mean, hadamard };

std::size_t combined_dim(CombineOp op, std::size_t dim);

// Throws std::invalid_argument on dimension mismatch.
std::vector<double> combine(CombineOp op, std::span<const double> u, std::span<const double> v);

// Row-major feature matrix.
class FeatureMatrix {
 public:
  explicit FeatureMatrix(std::size_t cols = 0) : cols_(cols) {}

  std::size_t rows() const noexcept { return cols_ == 0 ? 0 : data_.size() / cols_; }
  std::size_t cols() const noexcept { return cols_; }
  void add_row(std::span<const double> row);
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }

 private:
  std::size_t cols_;
  std::vector<double> data_;
};

struct LogRegConfig {
  // Objective: sum_i logloss_i + l2 / 2 * ||w||^2 (bias unpenalized).
  double l2 = 1.0;
  std::size_t max_iterations = 500;
  double tolerance = 1e-6;
};

struct LogisticRegression {
  std::vector<double> weights;
  double bias = 0.0;
  std::size_t iterations = 0;

  double decision(std::span<const double> x) const;
  double predict_proba(std::span<const double> x) const;
};

// Full-batch gradient descent with Armijo backtracking. Labels are 0/1.
// Throws UnevaluableError when only one class is present.
LogisticRegression fit_logreg(const FeatureMatrix& x, std::span<const int> labels,
                              const LogRegConfig& cfg = {});

// F1 of the positive class at `threshold`; 0 when there are no true
// positives (including the no-positive-predictions-or-labels case).
double f1_score(std::span<const double> probabilities, std::span<const int> labels,
                double threshold = 0.5);

// Rank-statistic AUC with midranks for ties. Throws std::invalid_argument
// unless both classes are present.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

struct EvalRecord {
  RelationId rel{};
  std::size_t run = 0;
  double f1 = 0.0;
  double roc_auc = 0.0;
  double missing_train_ratio = 0.0;
  double missing_test_ratio = 0.0;
  std::size_t n_train_used = 0;
  std::size_t n_test_used = 0;
  std::size_t n_train_total = 0;
  std::size_t n_test_total = 0;
};

// Throws UnevaluableError when a side is empty or single-class after drops.
EvalRecord evaluate_relation(const RelationSplit& split, const EmbeddingTable& table, CombineOp op,
                             std::size_t run = 0, const LogRegConfig& cfg = {});

std::string_view to_string(CombineOp op);

}  // namespace kgbench
