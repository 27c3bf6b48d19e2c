#include "kgbench/link_eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kgbench/errors.hpp"
#include "kgbench/stats.hpp"

namespace kgbench {
namespace {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

void check_labels(std::size_t n, std::span<const int> labels) {
  if (labels.size() != n) throw std::invalid_argument("label count mismatch");
}

double objective(const FeatureMatrix& x, std::span<const int> y, std::span<const double> w,
                 double b, double l2) {
  double f = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto row = x.row(i);
    double s = b;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * row[j];
    f += softplus(s) - (y[i] != 0 ? s : 0.0);
  }
  double norm2 = 0.0;
  for (double v : w) norm2 += v * v;
  return f + 0.5 * l2 * norm2;
}

}  // namespace

std::size_t combined_dim(CombineOp op, std::size_t dim) {
  return op == CombineOp::concat ? 2 * dim : dim;
}

std::vector<double> combine(CombineOp op, std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw std::invalid_argument("combine: dimension mismatch");
  std::vector<double> out;
  out.reserve(combined_dim(op, u.size()));
  switch (op) {
    case CombineOp::concat:
      out.insert(out.end(), u.begin(), u.end());
      out.insert(out.end(), v.begin(), v.end());
      break;
    case CombineOp::sum:
      for (std::size_t i = 0; i < u.size(); ++i) out.push_back(u[i] + v[i]);
      break;
    case CombineOp::mean:
      for (std::size_t i = 0; i < u.size(); ++i) out.push_back(0.5 * (u[i] + v[i]));
      break;
    case CombineOp::hadamard:
      for (std::size_t i = 0; i < u.size(); ++i) out.push_back(u[i] * v[i]);
      break;
  }
  return out;
}

std::string_view to_string(CombineOp op) {
  switch (op) {
    case CombineOp::concat: return "concat";
    case CombineOp::sum: return "sum";
    case CombineOp::mean: return "mean";
    case CombineOp::hadamard: return "hadamard";
  }
  return "?";
}

void FeatureMatrix::add_row(std::span<const double> row) {
  if (row.size() != cols_) throw std::invalid_argument("feature row width mismatch");
  data_.insert(data_.end(), row.begin(), row.end());
}

double LogisticRegression::decision(std::span<const double> x) const {
  if (x.size() != weights.size()) throw std::invalid_argument("feature width mismatch");
  double s = bias;
  for (std::size_t j = 0; j < x.size(); ++j) s += weights[j] * x[j];
  return s;
}

double LogisticRegression::predict_proba(std::span<const double> x) const {
  return sigmoid(decision(x));
}

LogisticRegression fit_logreg(const FeatureMatrix& x, std::span<const int> labels,
                              const LogRegConfig& cfg) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  check_labels(n, labels);
  const auto n_pos = static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(),
                                                            [](int y) { return y != 0; }));
  if (n_pos == 0 || n_pos == n) throw UnevaluableError("classifier needs both classes");
  if (cfg.l2 < 0.0) throw ConfigError("l2 must be non-negative");

  LogisticRegression model;
  model.weights.assign(p, 0.0);
  std::vector<double> grad_w(p), trial_w(p);

  // Lipschitz bound of the gradient gives a safe first step.
  double sq = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (double v : x.row(i)) sq += v * v;
  }
  double step = 1.0 / (0.25 * sq + cfg.l2);

  double f = objective(x, labels, model.weights, model.bias, cfg.l2);
  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    double grad_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = x.row(i);
      const double r = sigmoid(model.decision(row)) - (labels[i] != 0 ? 1.0 : 0.0);
      for (std::size_t j = 0; j < p; ++j) grad_w[j] += r * row[j];
      grad_b += r;
    }
    double gnorm2 = grad_b * grad_b;
    for (std::size_t j = 0; j < p; ++j) {
      grad_w[j] += cfg.l2 * model.weights[j];
      gnorm2 += grad_w[j] * grad_w[j];
    }
    model.iterations = it;
    if (std::sqrt(gnorm2) < cfg.tolerance) break;

    step *= 2.0;
    for (;;) {
      for (std::size_t j = 0; j < p; ++j) trial_w[j] = model.weights[j] - step * grad_w[j];
      const double trial_b = model.bias - step * grad_b;
      const double trial_f = objective(x, labels, trial_w, trial_b, cfg.l2);
      if (trial_f <= f - 0.5 * step * gnorm2 || step < 1e-20) {
        model.weights.swap(trial_w);
        model.bias = trial_b;
        f = trial_f;
        break;
      }
      step *= 0.5;
    }
    model.iterations = it + 1;
  }
  return model;
}

double f1_score(std::span<const double> probabilities, std::span<const int> labels,
                double threshold) {
  check_labels(probabilities.size(), labels);
  if (probabilities.empty()) throw std::invalid_argument("f1_score: no examples");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool predicted = probabilities[i] > threshold;
    const bool actual = labels[i] != 0;
    tp += predicted && actual;
    fp += predicted && !actual;
    fn += !predicted && actual;
  }
  if (tp == 0) return 0.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  check_labels(scores.size(), labels);
  const std::vector<double> ranks = midranks(scores);
  double pos_rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0) {
      pos_rank_sum += ranks[i];
      ++n_pos;
    }
  }
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("roc_auc needs both classes");
  const double np = static_cast<double>(n_pos);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

EvalRecord evaluate_relation(const RelationSplit& split, const EmbeddingTable& table, CombineOp op,
                             std::size_t run, const LogRegConfig& cfg) {
  EvalRecord rec;
  rec.rel = split.rel;
  rec.run = run;

  auto build = [&](const std::vector<Triple>& pos, const std::vector<Triple>& neg,
                   FeatureMatrix& x, std::vector<int>& y) {
    std::size_t used = 0;
    for (int label : {1, 0}) {
      for (const Triple& t : label == 1 ? pos : neg) {
        auto h = table.find(t.head);
        auto tl = table.find(t.tail);
        if (!h || !tl) continue;
        x.add_row(combine(op, *h, *tl));
        y.push_back(label);
        ++used;
      }
    }
    return used;
  };

  const std::size_t width = combined_dim(op, table.dim());
  FeatureMatrix x_train(width), x_test(width);
  std::vector<int> y_train, y_test;
  rec.n_train_total = split.train_pos.size() + split.train_neg.size();
  rec.n_test_total = split.test_pos.size() + split.test_neg.size();
  rec.n_train_used = build(split.train_pos, split.train_neg, x_train, y_train);
  rec.n_test_used = build(split.test_pos, split.test_neg, x_test, y_test);
  auto ratio = [](std::size_t used, std::size_t total) {
    return total == 0 ? 0.0 : static_cast<double>(total - used) / static_cast<double>(total);
  };
  rec.missing_train_ratio = ratio(rec.n_train_used, rec.n_train_total);
  rec.missing_test_ratio = ratio(rec.n_test_used, rec.n_test_total);

  if (rec.n_test_used == 0) throw UnevaluableError("no usable test examples");
  const auto test_pos = std::count(y_test.begin(), y_test.end(), 1);
  if (test_pos == 0 || static_cast<std::size_t>(test_pos) == y_test.size()) {
    throw UnevaluableError("test examples are single-class");
  }
  const LogisticRegression model = fit_logreg(x_train, y_train, cfg);

  // AUC uses raw decision values; saturated probabilities would add spurious ties.
  std::vector<double> decision(x_test.rows()), proba(x_test.rows());
  for (std::size_t i = 0; i < x_test.rows(); ++i) {
    decision[i] = model.decision(x_test.row(i));
    proba[i] = sigmoid(decision[i]);
  }
  rec.f1 = f1_score(proba, y_test);
  rec.roc_auc = roc_auc(decision, y_test);
  return rec;
}

}  // namespace kgbench
