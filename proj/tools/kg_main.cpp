// kg: descriptors, benchmark runs, ablations and correlations over KG corpora.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "kgbench/errors.hpp"
#include "kgbench/pipeline.hpp"

namespace fs = std::filesystem;
using namespace kgbench;

namespace {

constexpr int kConfigError = 1;
constexpr int kDataError = 2;

const std::map<std::string, ModelKind> kModels = {
    {"shallow", ModelKind::shallow}, {"distmult", ModelKind::distmult}, {"complex", ModelKind::complex}};
const std::map<std::string, CombineOp> kCombine = {{"concat", CombineOp::concat},
                                                   {"sum", CombineOp::sum},
                                                   {"mean", CombineOp::mean},
                                                   {"hadamard", CombineOp::hadamard}};
const std::map<std::string, NegativeMode> kNegModes = {{"semantic", NegativeMode::semantic},
                                                       {"unrestricted", NegativeMode::unrestricted}};
const std::map<std::string, RankModeSelection> kRankModes = {{"raw", RankModeSelection::raw},
                                                             {"filtered", RankModeSelection::filtered},
                                                             {"both", RankModeSelection::both}};

struct Options {
  RunConfig cfg;
  std::string model;
  std::string combine = "concat";
  std::string neg_mode = "semantic";
  std::string rank_mode = "both";
  std::string out = "out";
  std::optional<std::string> csv_dir;
  std::vector<std::string> reports;
  std::size_t dim = 0, epochs = 0, neg_k = 0;
  double lr = 0.0;
  double timeout = 0.0;
};

void add_run_flags(CLI::App* app, Options& o, bool ablation) {
  app->add_option("--input", o.cfg.input, "Corpus file or directory with train/valid/test.txt")
      ->required();
  if (!ablation) {
    app->add_option("--alpha", o.cfg.alpha, "Retain fraction in (0, 1)")->capture_default_str();
    app->add_option("--combine", o.combine, "Pair feature operator")
        ->check(CLI::IsMember(kCombine))
        ->capture_default_str();
    app->add_flag("--generalized-only", o.cfg.generalized_only,
                  "Skip specialized embeddings");
  } else {
    app->add_option("--rank-mode", o.rank_mode, "Ranking protocol")
        ->check(CLI::IsMember(kRankModes))
        ->capture_default_str();
  }
  app->add_option("--runs", o.cfg.runs, "Repeated sub-sampling runs")->capture_default_str();
  app->add_option("--model", o.model, ablation ? "distmult or complex (default: both)"
                                               : "shallow, distmult or complex")
      ->check(CLI::IsMember({"shallow", "distmult", "complex"}));
  app->add_option("--dim", o.dim, "Embedding dimension");
  app->add_option("--epochs", o.epochs, "Training epochs");
  app->add_option("--neg-k", o.neg_k, "Negatives per positive during training");
  app->add_option("--lr", o.lr, "Learning rate");
  app->add_option("--neg-mode", o.neg_mode, "Negative generation")
      ->check(CLI::IsMember(kNegModes))
      ->capture_default_str();
  app->add_option("--seed", o.cfg.seed, "Master seed")->capture_default_str();
  app->add_flag("--deterministic", o.cfg.deterministic, "Single worker thread");
  app->add_option("--threads", o.cfg.threads, "Worker threads")->capture_default_str();
  app->add_option("--run-timeout", o.timeout, "Per-run wall-clock budget in seconds");
  app->add_option("--out", o.out, "Output directory")->capture_default_str();
}

void finish_config(Options& o, const CLI::App* app) {
  if (!o.model.empty()) o.cfg.model = kModels.at(o.model);
  o.cfg.combine = kCombine.at(o.combine);
  o.cfg.neg_mode = kNegModes.at(o.neg_mode);
  o.cfg.rank_mode = kRankModes.at(o.rank_mode);
  if (app->count("--dim")) o.cfg.dim = o.dim;
  if (app->count("--epochs")) o.cfg.epochs = o.epochs;
  if (app->count("--neg-k")) o.cfg.neg_k = o.neg_k;
  if (app->count("--lr")) o.cfg.learning_rate = o.lr;
  if (app->count("--run-timeout")) o.cfg.run_timeout_seconds = o.timeout;
  if (o.cfg.deterministic) o.cfg.threads = 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge graph descriptor and embedding benchmark"};
  app.require_subcommand(1);
  Options o;
  o.cfg.threads = std::max(1u, std::thread::hardware_concurrency());

  auto* stats = app.add_subcommand("stats", "Print entity, relation and triple counts");
  stats->add_option("--input", o.cfg.input, "Corpus file or directory")->required();

  auto* describe_cmd = app.add_subcommand("describe", "Compute relation descriptors");
  describe_cmd->add_option("--input", o.cfg.input, "Corpus file or directory")->required();
  describe_cmd->add_option("--out", o.out, "JSON output path (- for stdout)")
      ->capture_default_str();
  describe_cmd->add_option("--csv", o.csv_dir, "Directory for S.csv and S_prime.csv");

  auto* run = app.add_subcommand("run", "Specialized vs generalized link classification");
  add_run_flags(run, o, false);

  auto* ablate = app.add_subcommand("ablate", "Random ablation with ranking evaluation");
  add_run_flags(ablate, o, true);

  auto* corr = app.add_subcommand("correlate", "Correlate report metrics with descriptors");
  corr->add_option("reports", o.reports, "report.json files or output directories")->required();
  corr->add_option("--out", o.out, "CSV output path (- for stdout)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*stats) {
      const KnowledgeGraph kg = load_graph(o.cfg.input);
      nlohmann::json j = {{"entities", kg.entity_count()},
                          {"relations", kg.relation_count()},
                          {"triples", kg.triple_count()}};
      std::cout << j.dump(2) << '\n';
    } else if (*describe_cmd) {
      const KnowledgeGraph kg = load_graph(o.cfg.input);
      const DescriptorReport rep = describe(kg);
      std::optional<fs::path> csv;
      if (o.csv_dir) csv = fs::path(*o.csv_dir);
      if (o.out == "-") {
        std::cout << to_json(rep, true).dump(2) << '\n';
        if (csv) write_descriptor_outputs(rep, *csv / "report.json", csv);
      } else {
        fs::path out = o.out;
        if (fs::is_directory(out) || !out.has_extension()) out /= "descriptors.json";
        write_descriptor_outputs(rep, out, csv);
      }
    } else if (*run) {
      finish_config(o, run);
      o.cfg.validate();
      const KnowledgeGraph kg = load_graph(o.cfg.input);
      const RunReport rep = run_benchmark(kg, o.cfg);
      write_run_outputs(rep, o.out);
      std::cout << summary_json(rep).dump(2) << '\n';
    } else if (*ablate) {
      finish_config(o, ablate);
      o.cfg.validate();
      if (o.cfg.model == ModelKind::shallow) {
        throw ConfigError("ablate supports --model distmult or complex");
      }
      const KnowledgeGraph kg = load_graph(o.cfg.input);
      const AblationReport rep = run_ablation(kg, o.cfg);
      write_ablation_outputs(rep, o.out);
      std::cout << "wrote " << (fs::path(o.out) / "report.json").string() << '\n';
    } else if (*corr) {
      std::vector<fs::path> paths(o.reports.begin(), o.reports.end());
      const auto reports = correlate_reports(paths);
      if (o.out == "-") {
        write_correlation_csv(reports, std::cout);
      } else {
        fs::path out = o.out;
        if (fs::is_directory(out) || !out.has_extension()) {
          fs::create_directories(out);
          out /= "correlation_report.csv";
        }
        std::ofstream f(out, std::ios::binary);
        if (!f) throw ConfigError("cannot write " + out.string());
        write_correlation_csv(reports, f);
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
  return 0;
}
