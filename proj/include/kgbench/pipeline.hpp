#pragma once

// End-to-end benchmark drivers.
//
// run_benchmark: J repeated random sub-sampling runs. Each run builds one set
// of relation splits, trains generalized embeddings once on the corpus with
// every relation's test positives removed, trains specialized embeddings per
// relation, and evaluates both on the same splits.
//
// run_ablation: J runs of random per-relation retain fractions; DistMult and
// ComplEx are trained on the retained triples of each run and ranked on the
// removed ones.
//
// Every random choice is seeded from (master seed, run, relation, purpose), so
// results do not depend on the worker count.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgbench/descriptors.hpp"
#include "kgbench/factor.hpp"
#include "kgbench/knowledge_graph.hpp"
#include "kgbench/link_eval.hpp"
#include "kgbench/rank_eval.hpp"
#include "kgbench/shallow.hpp"
#include "kgbench/splits.hpp"
#include "kgbench/stats.hpp"

namespace kgbench {

enum class ModelKind { shallow, distmult, complex };
enum class RankModeSelection { raw, filtered, both };

std::string to_string(ModelKind kind);

struct RunConfig {
  std::filesystem::path input;
  double alpha = 0.8;
  std::size_t runs = 10;
  // run: defaults to shallow. ablate: unset means both DistMult and ComplEx.
  std::optional<ModelKind> model;
  // Unset values take the model defaults (shallow: 50/10/10, factor: 200/50/10).
  std::optional<std::size_t> dim;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> neg_k;
  std::optional<double> learning_rate;
  CombineOp combine = CombineOp::concat;
  NegativeMode neg_mode = NegativeMode::semantic;
  bool generalized_only = false;
  std::uint64_t seed = 42;
  bool deterministic = false;
  RankModeSelection rank_mode = RankModeSelection::both;
  std::size_t threads = 1;
  // Relations not started within this many seconds of a run's start are skipped.
  std::optional<double> run_timeout_seconds;
  LogRegConfig classifier;

  // Throws ConfigError.
  void validate() const;

  ShallowConfig shallow_config(std::uint64_t seed) const;
  FactorConfig factor_config(FactorKind kind, std::uint64_t seed) const;
};

struct SkipRecord {
  std::size_t run = 0;
  RelationId rel{};
  EmbeddingKind kind = EmbeddingKind::generalized;
  std::string reason;
};

struct Timings {
  double total_seconds = 0.0;
  std::vector<double> run_seconds;
};

struct RunReport {
  RunConfig config;
  DescriptorReport descriptors;
  std::vector<RelationId> relations;
  std::vector<KindedRecord> records;  // sorted by (run, kind, relation)
  std::vector<SkipRecord> skips;      // same order
  AggregateReport aggregates;
  Timings timings;
};

struct RankRecord {
  ModelKind model = ModelKind::distmult;
  std::size_t run = 0;
  std::vector<RankResult> results;  // one per evaluated mode
  std::string error;                // set when training or ranking failed
};

struct AblationRun {
  std::size_t run = 0;
  std::map<RelationId, double> alphas;
  std::size_t train_triples = 0;
  std::size_t test_triples = 0;
  // Descriptors of the graph formed by this run's removed (test) triples.
  std::map<std::string, double> test_descriptors;
};

struct AblationReport {
  RunConfig config;
  DescriptorReport descriptors;
  std::vector<AblationRun> runs;
  std::vector<RankRecord> ranks;  // sorted by (model, run)
  // Per model: MRR/MR against the per-run test-graph descriptors.
  std::map<std::string, CorrelationReport> correlations;
  Timings timings;
};

// Embeddings for link classification from any model kind. Factor models
// expose their entity rows (ComplEx: real parts followed by imaginary parts);
// entities absent from the corpus are marked missing.
EmbeddingTable train_entity_embeddings(std::span<const Triple> corpus, const KnowledgeGraph& kg,
                                       const RunConfig& cfg, std::uint64_t seed);

RunReport run_benchmark(const KnowledgeGraph& kg, const RunConfig& cfg);
AblationReport run_ablation(const KnowledgeGraph& kg, const RunConfig& cfg);

// Global descriptor values keyed by descriptor_columns().
std::map<std::string, double> descriptor_values(const DescriptorReport& rep);

nlohmann::json to_json(const DescriptorReport& rep, bool include_matrices = true);
nlohmann::json to_json(const RunReport& rep);
nlohmann::json to_json(const AblationReport& rep);
nlohmann::json summary_json(const RunReport& rep);

// report.json, summary.json, records_{specialized,generalized}.csv,
// histograms.csv, timings.json.
void write_run_outputs(const RunReport& rep, const std::filesystem::path& dir);
// report.json, ranking.csv, correlation_report.csv, timings.json.
void write_ablation_outputs(const AblationReport& rep, const std::filesystem::path& dir);
// report.json plus optional matrix CSVs (S.csv, S_prime.csv) under csv_dir.
void write_descriptor_outputs(const DescriptorReport& rep, const std::filesystem::path& json_path,
                              const std::optional<std::filesystem::path>& csv_dir);

// Correlates run/ablate report.json files against the full-graph descriptors
// they carry. "per_run" uses one point per (report, run) with the graph's
// descriptors repeated; "per_graph" averages each report's runs first.
std::map<std::string, CorrelationReport> correlate_reports(
    const std::vector<std::filesystem::path>& reports);
void write_correlation_csv(const std::map<std::string, CorrelationReport>& reports,
                           std::ostream& out);

// Fixed-width [0, 1] histogram; 1.0 falls in the last bin.
std::vector<std::size_t> histogram(std::span<const double> values, double bin_width = 0.05);

}  // namespace kgbench
