#include "kgbench/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "kgbench/csv.hpp"
#include "kgbench/errors.hpp"

namespace kgbench {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Runs body(i) for i in [0, n) on up to `threads` workers. The first exception
// is rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string to_string(NegativeMode m) {
  return m == NegativeMode::semantic ? "semantic" : "unrestricted";
}

std::string to_string(RankModeSelection m) {
  switch (m) {
    case RankModeSelection::raw: return "raw";
    case RankModeSelection::filtered: return "filtered";
    case RankModeSelection::both: return "both";
  }
  return "both";
}

std::vector<RankMode> rank_modes(RankModeSelection sel) {
  switch (sel) {
    case RankModeSelection::raw: return {RankMode::raw};
    case RankModeSelection::filtered: return {RankMode::filtered};
    case RankModeSelection::both: return {RankMode::raw, RankMode::filtered};
  }
  return {};
}

std::uint64_t run_seed(std::uint64_t master, std::size_t run) {
  return derive_seed(master, SeedPurpose::run, {static_cast<std::uint64_t>(run)});
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json summary_to_json(const Summary& s) {
  return {{"mean", number(s.mean)}, {"sd", number(s.sd)}, {"n", s.n}};
}

json config_to_json(const RunConfig& cfg, bool ablation) {
  json j;
  j["input"] = cfg.input.generic_string();
  j["runs"] = cfg.runs;
  j["seed"] = cfg.seed;
  j["deterministic"] = cfg.deterministic;
  if (ablation) {
    j["models"] = json::array();
    if (cfg.model) {
      j["models"].push_back(to_string(*cfg.model));
    } else {
      j["models"] = {"distmult", "complex"};
    }
    j["rank_mode"] = to_string(cfg.rank_mode);
  } else {
    j["alpha"] = cfg.alpha;
    j["model"] = to_string(cfg.model.value_or(ModelKind::shallow));
    j["combine"] = std::string(to_string(cfg.combine));
    j["generalized_only"] = cfg.generalized_only;
    j["classifier"] = {{"l2", cfg.classifier.l2},
                       {"max_iterations", cfg.classifier.max_iterations},
                       {"tolerance", cfg.classifier.tolerance}};
  }
  j["neg_mode"] = to_string(cfg.neg_mode);
  auto opt = [](const auto& v) { return v ? json(*v) : json(nullptr); };
  j["dim"] = opt(cfg.dim);
  j["epochs"] = opt(cfg.epochs);
  j["neg_k"] = opt(cfg.neg_k);
  j["learning_rate"] = opt(cfg.learning_rate);
  j["run_timeout_seconds"] = opt(cfg.run_timeout_seconds);
  return j;
}

json correlation_to_json(const CorrelationReport& rep) {
  json cells = json::array();
  for (std::size_t i = 0; i < rep.metrics.size(); ++i) {
    json row = json::object();
    for (std::size_t j = 0; j < rep.descriptors.size(); ++j) {
      const auto& c = rep.cells[i][j];
      row[rep.descriptors[j]] = c ? number(*c) : json(nullptr);
    }
    cells.push_back({{"metric", rep.metrics[i]}, {"rho", row}});
  }
  return {{"n_points", rep.n_points}, {"metrics", rep.metrics},
          {"descriptors", rep.descriptors}, {"cells", cells}};
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError("cannot write " + p.string());
  out << text;
  if (!out) throw DataError("write failed: " + p.string());
}

void prepare_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw ConfigError("output directory not writable: " + dir.string());
  }
}

json timings_json(const Timings& t) {
  return {{"total_seconds", t.total_seconds}, {"run_seconds", t.run_seconds}};
}

std::string fmt_double(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::shallow: return "shallow";
    case ModelKind::distmult: return "distmult";
    case ModelKind::complex: return "complex";
  }
  return "shallow";
}

void RunConfig::validate() const {
  if (runs < 1) throw ConfigError("runs must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie strictly between 0 and 1");
  if (dim && *dim == 0) throw ConfigError("dim must be positive");
  if (neg_k && *neg_k == 0) throw ConfigError("neg-k must be positive");
  if (learning_rate && !(*learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (run_timeout_seconds && !(*run_timeout_seconds > 0.0)) {
    throw ConfigError("run timeout must be positive");
  }
  if (!(classifier.l2 >= 0.0)) throw ConfigError("classifier l2 must be non-negative");
  if (model.value_or(ModelKind::shallow) == ModelKind::shallow) {
    shallow_config(0).validate();
  } else {
    factor_config(FactorKind::distmult, 0).validate();
  }
}

ShallowConfig RunConfig::shallow_config(std::uint64_t s) const {
  ShallowConfig c;
  if (dim) c.dim = *dim;
  if (epochs) c.epochs = *epochs;
  if (neg_k) c.negatives_k = *neg_k;
  if (learning_rate) c.learning_rate = *learning_rate;
  c.seed = s;
  return c;
}

FactorConfig RunConfig::factor_config(FactorKind kind, std::uint64_t s) const {
  FactorConfig c;
  c.kind = kind;
  if (dim) c.dim = *dim;
  if (epochs) c.epochs = *epochs;
  if (neg_k) c.negatives = *neg_k;
  if (learning_rate) c.learning_rate = *learning_rate;
  c.seed = s;
  return c;
}

EmbeddingTable train_entity_embeddings(std::span<const Triple> corpus, const KnowledgeGraph& kg,
                                       const RunConfig& cfg, std::uint64_t seed) {
  const ModelKind kind = cfg.model.value_or(ModelKind::shallow);
  if (kind == ModelKind::shallow) return train_shallow(corpus, kg, cfg.shallow_config(seed));

  const FactorKind fk = kind == ModelKind::distmult ? FactorKind::distmult : FactorKind::complex;
  const FactorModel model = train_factor(corpus, kg, cfg.factor_config(fk, seed));
  EmbeddingTable table(kg.entity_count(), model.width());
  for (const Triple& t : corpus) {
    for (EntityId e : {t.head, t.tail}) {
      if (table.present(e)) continue;
      auto src = model.entity(e);
      std::copy(src.begin(), src.end(), table.row(e).begin());
      table.set_present(e, true);
    }
  }
  return table;
}

RunReport run_benchmark(const KnowledgeGraph& kg, const RunConfig& cfg) {
  cfg.validate();
  const auto t0 = Clock::now();
  RunReport rep;
  rep.config = cfg;
  rep.descriptors = describe(kg);
  rep.relations = kg.indexed_relations();
  const std::size_t threads = cfg.threads;

  const std::vector<EmbeddingKind> kinds =
      cfg.generalized_only ? std::vector<EmbeddingKind>{EmbeddingKind::generalized}
                           : std::vector<EmbeddingKind>{EmbeddingKind::specialized,
                                                        EmbeddingKind::generalized};

  for (std::size_t j = 1; j <= cfg.runs; ++j) {
    const auto run_start = Clock::now();
    const std::uint64_t seed = run_seed(cfg.seed, j);
    SplitConfig sc;
    sc.alpha = cfg.alpha;
    sc.seed = seed;
    sc.negative_mode = cfg.neg_mode;
    const SplitSet splits = build_splits(kg, sc);

    auto over_budget = [&] {
      return cfg.run_timeout_seconds && seconds_since(run_start) > *cfg.run_timeout_seconds;
    };

    // One slot per (kind, relation) in report order, filled by whichever worker runs it.
    struct Slot {
      std::optional<KindedRecord> record;
      std::optional<SkipRecord> skip;
    };
    std::map<std::pair<EmbeddingKind, RelationId>, Slot> slots;
    for (EmbeddingKind k : kinds) {
      for (RelationId r : rep.relations) slots[{k, r}];
    }
    for (const SplitSkip& s : splits.skipped) {
      for (EmbeddingKind k : kinds) slots[{k, s.rel}].skip = SkipRecord{j, s.rel, k, s.reason};
    }

    auto evaluate = [&](const RelationSplit& split, const EmbeddingTable& table, EmbeddingKind k) {
      Slot& slot = slots.at({k, split.rel});
      try {
        EvalRecord rec = evaluate_relation(split, table, cfg.combine, j, cfg.classifier);
        slot.record = KindedRecord{k, rec};
      } catch (const std::exception& e) {
        slot.skip = SkipRecord{j, split.rel, k, e.what()};
      }
    };

    // Task 0 trains the generalized embeddings; tasks 1..n handle one
    // relation's specialized embeddings each.
    std::optional<EmbeddingTable> generalized;
    std::string generalized_error;
    const std::size_t n_special = cfg.generalized_only ? 0 : splits.splits.size();
    parallel_for(1 + n_special, threads, [&](std::size_t task) {
      if (task == 0) {
        try {
          generalized = train_entity_embeddings(
              splits.generalized.corpus, kg, cfg,
              derive_seed(seed, SeedPurpose::embedding, {0}));
        } catch (const std::exception& e) {
          generalized_error = e.what();
        }
        return;
      }
      const RelationSplit& split = splits.splits[task - 1];
      if (over_budget()) {
        slots.at({EmbeddingKind::specialized, split.rel}).skip =
            SkipRecord{j, split.rel, EmbeddingKind::specialized, "run time budget exceeded"};
        return;
      }
      try {
        const RetainedGraph corpus = specialized_corpus(kg, split);
        const EmbeddingTable table = train_entity_embeddings(
            corpus.corpus, kg, cfg,
            derive_seed(seed, SeedPurpose::embedding, {1, index(split.rel)}));
        evaluate(split, table, EmbeddingKind::specialized);
      } catch (const std::exception& e) {
        slots.at({EmbeddingKind::specialized, split.rel}).skip =
            SkipRecord{j, split.rel, EmbeddingKind::specialized, e.what()};
      }
    });

    parallel_for(splits.splits.size(), threads, [&](std::size_t i) {
      const RelationSplit& split = splits.splits[i];
      if (!generalized) {
        slots.at({EmbeddingKind::generalized, split.rel}).skip = SkipRecord{
            j, split.rel, EmbeddingKind::generalized, "embedding training failed: " + generalized_error};
        return;
      }
      evaluate(split, *generalized, EmbeddingKind::generalized);
    });

    for (auto& [key, slot] : slots) {
      if (slot.record) {
        rep.records.push_back(*slot.record);
      } else if (slot.skip) {
        rep.skips.push_back(*slot.skip);
      } else {
        rep.skips.push_back(SkipRecord{j, key.second, key.first, "not evaluated"});
      }
    }
    rep.timings.run_seconds.push_back(seconds_since(run_start));
  }

  rep.aggregates = aggregate_runs(rep.records);
  rep.timings.total_seconds = seconds_since(t0);
  return rep;
}

AblationReport run_ablation(const KnowledgeGraph& kg, const RunConfig& cfg) {
  {
    RunConfig check = cfg;
    if (!check.model) check.model = ModelKind::distmult;
    check.validate();
  }
  std::vector<ModelKind> models;
  if (cfg.model) {
    if (*cfg.model == ModelKind::shallow) {
      throw ConfigError("ablation ranks with distmult or complex models only");
    }
    models.push_back(*cfg.model);
  } else {
    models = {ModelKind::distmult, ModelKind::complex};
  }
  const std::vector<RankMode> modes = rank_modes(cfg.rank_mode);

  const auto t0 = Clock::now();
  AblationReport rep;
  rep.config = cfg;
  rep.descriptors = describe(kg);

  struct RunData {
    std::vector<Triple> train;
    std::vector<Triple> test;
  };
  std::vector<RunData> data(cfg.runs);
  for (std::size_t j = 1; j <= cfg.runs; ++j) {
    const std::uint64_t seed = run_seed(cfg.seed, j);
    AblationRun run;
    run.run = j;
    run.alphas = ablation_alphas(kg, seed);
    SplitConfig sc;
    sc.seed = seed;
    sc.negative_mode = cfg.neg_mode;
    sc.with_negatives = false;
    SplitSet splits = build_splits(kg, sc, run.alphas);
    RunData& d = data[j - 1];
    d.train = std::move(splits.generalized.corpus);
    for (const RelationSplit& s : splits.splits) {
      d.test.insert(d.test.end(), s.test_pos.begin(), s.test_pos.end());
    }
    std::sort(d.test.begin(), d.test.end());
    run.train_triples = d.train.size();
    run.test_triples = d.test.size();
    if (!d.test.empty()) run.test_descriptors = descriptor_values(describe(kg.subgraph(d.test)));
    rep.runs.push_back(std::move(run));
  }

  // Both models of one run share the run's splits and model seed.
  std::vector<RankRecord> ranks(models.size() * cfg.runs);
  std::vector<double> task_seconds(ranks.size(), 0.0);
  parallel_for(ranks.size(), cfg.threads, [&](std::size_t task) {
    const auto start = Clock::now();
    const ModelKind model = models[task / cfg.runs];
    const std::size_t j = task % cfg.runs + 1;
    const RunData& d = data[j - 1];
    const FactorKind fk = model == ModelKind::distmult ? FactorKind::distmult : FactorKind::complex;
    RankRecord& rec = ranks[task];
    rec.model = model;
    rec.run = j;
    try {
      const FactorModel trained = train_factor(
          d.train, kg, cfg.factor_config(fk, derive_seed(run_seed(cfg.seed, j), SeedPurpose::factor)));
      for (RankMode m : modes) rec.results.push_back(evaluate_ranking(trained, d.test, kg, m));
    } catch (const std::exception& e) {
      rec.results.clear();
      rec.error = e.what();
    }
    task_seconds[task] = seconds_since(start);
  });
  rep.ranks = std::move(ranks);

  rep.timings.run_seconds.assign(cfg.runs, 0.0);
  for (std::size_t t = 0; t < task_seconds.size(); ++t) {
    rep.timings.run_seconds[t % cfg.runs] += task_seconds[t];
  }

  for (ModelKind model : models) {
    std::vector<CorrelationPoint> points;
    std::vector<std::string> metrics;
    for (RankMode m : modes) {
      metrics.push_back("mrr_" + std::string(to_string(m)));
      metrics.push_back("mr_" + std::string(to_string(m)));
    }
    for (const RankRecord& rec : rep.ranks) {
      if (rec.model != model) continue;
      CorrelationPoint p;
      p.descriptors = rep.runs[rec.run - 1].test_descriptors;
      for (const RankResult& r : rec.results) {
        p.metrics["mrr_" + std::string(to_string(r.mode))] = r.mrr;
        p.metrics["mr_" + std::string(to_string(r.mode))] = r.mr;
      }
      points.push_back(std::move(p));
    }
    rep.correlations[to_string(model)] = correlate(points, metrics, descriptor_columns());
  }
  rep.timings.total_seconds = seconds_since(t0);
  return rep;
}

std::map<std::string, double> descriptor_values(const DescriptorReport& rep) {
  return {{"frob_S", rep.frob_s},
          {"frob_S_prime", rep.frob_s_prime},
          {"num_triples", static_cast<double>(rep.triple_count)},
          {"mean_mu", rep.mu_mean},
          {"mean_z", rep.z_mean}};
}

json to_json(const DescriptorReport& rep, bool include_matrices) {
  json j;
  j["entities"] = rep.entity_count;
  j["relations"] = rep.relation_count;
  j["triples"] = rep.triple_count;
  j["indexed_relations"] = rep.relations.size();
  json rels = json::array();
  for (std::size_t i = 0; i < rep.relations.size(); ++i) {
    rels.push_back({{"id", index(rep.relations[i])},
                    {"name", rep.relation_names[i]},
                    {"positives", rep.positives[i]},
                    {"mu", number(rep.mu[i])},
                    {"z", number(rep.z[i])}});
  }
  j["per_relation"] = rels;
  j["mean_mu"] = number(rep.mu_mean);
  j["sd_mu"] = number(rep.mu_sd);
  j["mean_z"] = number(rep.z_mean);
  j["sd_z"] = number(rep.z_sd);
  j["frob_S"] = number(rep.frob_s);
  j["frob_S_prime"] = number(rep.frob_s_prime);
  if (include_matrices) {
    auto matrix = [](const SquareMatrix& m) {
      json rows = json::array();
      for (std::size_t a = 0; a < m.size(); ++a) {
        json row = json::array();
        for (std::size_t b = 0; b < m.size(); ++b) row.push_back(m(a, b));
        rows.push_back(row);
      }
      return rows;
    };
    j["S"] = matrix(rep.s);
    j["S_prime"] = matrix(rep.s_prime);
  }
  return j;
}

json to_json(const RunReport& rep) {
  json j;
  j["kind"] = "run";
  j["config"] = config_to_json(rep.config, false);
  j["descriptors"] = to_json(rep.descriptors, false);
  std::map<std::uint32_t, std::string> names;
  for (std::size_t i = 0; i < rep.descriptors.relations.size(); ++i) {
    names[index(rep.descriptors.relations[i])] = rep.descriptors.relation_names[i];
  }
  json records = json::array();
  for (const KindedRecord& kr : rep.records) {
    const EvalRecord& r = kr.record;
    records.push_back({{"run", r.run},
                       {"relation", names[index(r.rel)]},
                       {"relation_id", index(r.rel)},
                       {"kind", to_string(kr.kind)},
                       {"f1", number(r.f1)},
                       {"auc", number(r.roc_auc)},
                       {"miss_train", number(r.missing_train_ratio)},
                       {"miss_test", number(r.missing_test_ratio)},
                       {"n_train", r.n_train_used},
                       {"n_test", r.n_test_used},
                       {"n_train_total", r.n_train_total},
                       {"n_test_total", r.n_test_total}});
  }
  j["records"] = records;

  json skips = json::array();
  for (const SkipRecord& s : rep.skips) {
    skips.push_back({{"run", s.run},
                     {"relation", names[index(s.rel)]},
                     {"relation_id", index(s.rel)},
                     {"kind", to_string(s.kind)},
                     {"reason", s.reason}});
  }
  j["skips"] = skips;

  json per_rel = json::array();
  for (const RelationAggregate& a : rep.aggregates.per_relation) {
    per_rel.push_back({{"relation", names[index(a.rel)]},
                       {"relation_id", index(a.rel)},
                       {"kind", to_string(a.kind)},
                       {"f1", summary_to_json(a.f1)},
                       {"auc", summary_to_json(a.roc_auc)},
                       {"miss_train", summary_to_json(a.missing_train)},
                       {"miss_test", summary_to_json(a.missing_test)}});
  }
  j["aggregates"] = {{"per_relation", per_rel}, {"overall", summary_json(rep)["overall"]}};
  return j;
}

json summary_json(const RunReport& rep) {
  json overall = json::object();
  for (const auto& [kind, agg] : rep.aggregates.overall) {
    overall[to_string(kind)] = {{"relations", agg.relations},
                                {"f1", summary_to_json(agg.f1)},
                                {"auc", summary_to_json(agg.roc_auc)},
                                {"miss_train", summary_to_json(agg.missing_train)},
                                {"miss_test", summary_to_json(agg.missing_test)}};
  }
  return {{"records", rep.records.size()}, {"skips", rep.skips.size()}, {"overall", overall}};
}

json to_json(const AblationReport& rep) {
  json j;
  j["kind"] = "ablation";
  j["config"] = config_to_json(rep.config, true);
  j["descriptors"] = to_json(rep.descriptors, false);
  json runs = json::array();
  for (const AblationRun& r : rep.runs) {
    json alphas = json::object();
    for (const auto& [rel, a] : r.alphas) alphas[std::to_string(index(rel))] = a;
    json desc = json::object();
    for (const auto& [k, v] : r.test_descriptors) desc[k] = number(v);
    runs.push_back({{"run", r.run},
                    {"alphas", alphas},
                    {"train_triples", r.train_triples},
                    {"test_triples", r.test_triples},
                    {"test_descriptors", desc}});
  }
  j["runs"] = runs;
  json ranks = json::array();
  for (const RankRecord& rec : rep.ranks) {
    for (const RankResult& r : rec.results) {
      ranks.push_back({{"model", to_string(rec.model)},
                       {"run", rec.run},
                       {"mode", std::string(to_string(r.mode))},
                       {"mr", number(r.mr)},
                       {"mrr", number(r.mrr)},
                       {"n_queries", r.n_queries},
                       {"n_skipped", r.n_skipped}});
    }
  }
  j["ranks"] = ranks;
  json failures = json::array();
  for (const RankRecord& rec : rep.ranks) {
    if (!rec.error.empty()) {
      failures.push_back({{"model", to_string(rec.model)}, {"run", rec.run}, {"reason", rec.error}});
    }
  }
  j["skips"] = failures;
  json corr = json::object();
  for (const auto& [model, c] : rep.correlations) corr[model] = correlation_to_json(c);
  j["correlations"] = corr;
  return j;
}

std::vector<std::size_t> histogram(std::span<const double> values, double bin_width) {
  if (!(bin_width > 0.0 && bin_width <= 1.0)) throw std::invalid_argument("bad bin width");
  const auto bins = static_cast<std::size_t>(std::ceil(1.0 / bin_width - 1e-9));
  std::vector<std::size_t> counts(bins, 0);
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) continue;
    auto b = static_cast<std::size_t>(std::floor(v / bin_width + 1e-9));
    counts[std::min(b, bins - 1)]++;
  }
  return counts;
}

void write_run_outputs(const RunReport& rep, const std::filesystem::path& dir) {
  prepare_dir(dir);
  write_text(dir / "report.json", to_json(rep).dump(2) + "\n");
  write_text(dir / "summary.json", summary_json(rep).dump(2) + "\n");
  write_text(dir / "timings.json", timings_json(rep.timings).dump(2) + "\n");

  std::map<std::uint32_t, std::string> names;
  for (std::size_t i = 0; i < rep.descriptors.relations.size(); ++i) {
    names[index(rep.descriptors.relations[i])] = rep.descriptors.relation_names[i];
  }
  for (EmbeddingKind kind : {EmbeddingKind::specialized, EmbeddingKind::generalized}) {
    std::ostringstream csv;
    csv << "run,relation,f1,auc,miss_train,miss_test,n_train,n_test\n";
    for (const KindedRecord& kr : rep.records) {
      if (kr.kind != kind) continue;
      const EvalRecord& r = kr.record;
      csv << r.run << ',' << csv_field(names[index(r.rel)]) << ',' << fmt_double(r.f1) << ','
          << fmt_double(r.roc_auc) << ',' << fmt_double(r.missing_train_ratio) << ','
          << fmt_double(r.missing_test_ratio) << ',' << r.n_train_used << ',' << r.n_test_used
          << '\n';
    }
    write_text(dir / ("records_" + to_string(kind) + ".csv"), csv.str());
  }

  constexpr double width = 0.05;
  std::ostringstream hist;
  hist << "kind,metric,bin_lo,bin_hi,count\n";
  for (const auto& [kind, agg] : rep.aggregates.overall) {
    std::map<std::string, std::vector<double>> cols;
    for (const RelationAggregate& a : rep.aggregates.per_relation) {
      if (a.kind != kind) continue;
      cols["f1"].push_back(a.f1.mean);
      cols["miss_train"].push_back(a.missing_train.mean);
      cols["miss_test"].push_back(a.missing_test.mean);
    }
    for (const auto& [metric, values] : cols) {
      const auto counts = histogram(values, width);
      for (std::size_t b = 0; b < counts.size(); ++b) {
        hist << to_string(kind) << ',' << metric << ',' << fmt_double(b * width) << ','
             << fmt_double(std::min(1.0, (b + 1) * width)) << ',' << counts[b] << '\n';
      }
    }
  }
  write_text(dir / "histograms.csv", hist.str());
}

void write_ablation_outputs(const AblationReport& rep, const std::filesystem::path& dir) {
  prepare_dir(dir);
  write_text(dir / "report.json", to_json(rep).dump(2) + "\n");
  write_text(dir / "timings.json", timings_json(rep.timings).dump(2) + "\n");
  std::ostringstream csv;
  csv << "model,run,mode,mr,mrr,n_queries\n";
  for (const RankRecord& rec : rep.ranks) {
    for (const RankResult& r : rec.results) {
      csv << to_string(rec.model) << ',' << rec.run << ',' << to_string(r.mode) << ','
          << fmt_double(r.mr) << ',' << fmt_double(r.mrr) << ',' << r.n_queries << '\n';
    }
  }
  write_text(dir / "ranking.csv", csv.str());
  std::ostringstream corr;
  write_correlation_csv(rep.correlations, corr);
  write_text(dir / "correlation_report.csv", corr.str());
}

void write_descriptor_outputs(const DescriptorReport& rep, const std::filesystem::path& json_path,
                              const std::optional<std::filesystem::path>& csv_dir) {
  if (json_path.has_parent_path()) prepare_dir(json_path.parent_path());
  write_text(json_path, to_json(rep, true).dump(2) + "\n");
  if (csv_dir) {
    prepare_dir(*csv_dir);
    std::ostringstream s, sp;
    write_matrix_csv(rep.s, rep.relation_names, s);
    write_matrix_csv(rep.s_prime, rep.relation_names, sp);
    write_text(*csv_dir / "S.csv", s.str());
    write_text(*csv_dir / "S_prime.csv", sp.str());
  }
}

std::map<std::string, CorrelationReport> correlate_reports(
    const std::vector<std::filesystem::path>& reports) {
  std::vector<CorrelationPoint> per_run, per_graph;
  std::set<std::string> metric_names;
  for (std::filesystem::path p : reports) {
    if (std::filesystem::is_directory(p)) p /= "report.json";
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError("cannot read report " + p.string());
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw DataError(p.string() + ": " + e.what());
    }
    std::map<std::string, double> desc;
    try {
      const json& d = j.at("descriptors");
      desc = {{"frob_S", d.at("frob_S").get<double>()},
              {"frob_S_prime", d.at("frob_S_prime").get<double>()},
              {"num_triples", d.at("triples").get<double>()},
              {"mean_mu", d.at("mean_mu").get<double>()},
              {"mean_z", d.at("mean_z").get<double>()}};

      // run -> metric -> values to average
      std::map<std::size_t, std::map<std::string, std::vector<double>>> by_run;
      const std::string kind = j.at("kind").get<std::string>();
      if (kind == "run") {
        for (const json& r : j.at("records")) {
          if (r.at("f1").is_null()) continue;
          const std::string k = r.at("kind").get<std::string>();
          by_run[r.at("run").get<std::size_t>()]["f1_" + k].push_back(r.at("f1").get<double>());
          if (!r.at("auc").is_null()) {
            by_run[r.at("run").get<std::size_t>()]["auc_" + k].push_back(r.at("auc").get<double>());
          }
        }
      } else if (kind == "ablation") {
        for (const json& r : j.at("ranks")) {
          const std::string suffix =
              r.at("model").get<std::string>() + "_" + r.at("mode").get<std::string>();
          auto& m = by_run[r.at("run").get<std::size_t>()];
          if (!r.at("mrr").is_null()) m["mrr_" + suffix].push_back(r.at("mrr").get<double>());
          if (!r.at("mr").is_null()) m["mr_" + suffix].push_back(r.at("mr").get<double>());
        }
      } else {
        throw DataError(p.string() + ": unknown report kind '" + kind + "'");
      }

      std::map<std::string, std::vector<double>> graph_values;
      for (auto& [run, metrics] : by_run) {
        CorrelationPoint pt;
        pt.descriptors = desc;
        for (auto& [name, values] : metrics) {
          std::sort(values.begin(), values.end());
          const double mean = summarize(values).mean;
          pt.metrics[name] = mean;
          graph_values[name].push_back(mean);
          metric_names.insert(name);
        }
        per_run.push_back(std::move(pt));
      }
      CorrelationPoint g;
      g.descriptors = desc;
      for (auto& [name, values] : graph_values) {
        std::sort(values.begin(), values.end());
        g.metrics[name] = summarize(values).mean;
      }
      per_graph.push_back(std::move(g));
    } catch (const json::exception& e) {
      throw DataError(p.string() + ": malformed report: " + e.what());
    }
  }
  const std::vector<std::string> metrics(metric_names.begin(), metric_names.end());
  return {{"per_run", correlate(per_run, metrics, descriptor_columns())},
          {"per_graph", correlate(per_graph, metrics, descriptor_columns())}};
}

void write_correlation_csv(const std::map<std::string, CorrelationReport>& reports,
                           std::ostream& out) {
  out << "group,metric,descriptor,rho,n_points\n";
  for (const auto& [group, rep] : reports) {
    for (std::size_t i = 0; i < rep.metrics.size(); ++i) {
      for (std::size_t j = 0; j < rep.descriptors.size(); ++j) {
        const auto& c = rep.cells[i][j];
        out << csv_field(group) << ',' << csv_field(rep.metrics[i]) << ','
            << csv_field(rep.descriptors[j]) << ',' << (c ? fmt_double(*c) : std::string()) << ','
            << rep.n_points << '\n';
      }
    }
  }
}

}  // namespace kgbench
