#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "brava/eval.hpp"
#include "brava/graph.hpp"
#include "brava/model.hpp"
#include "brava/train.hpp"

namespace brava {

enum class TrainMix { sf, hrg, mix };
enum class ComponentFilter { none, weak, strong };

/// Everything a batch run needs. The config file is flat "key = value" text;
/// "[section]" headers only group keys, and every key doubles as a CLI flag
/// "--key value".
struct PipelineConfig {
  // training recipe
  std::size_t sf_count = 3;
  std::size_t hrg_count = 3;
  std::size_t nodes = 2000;
  std::size_t sf_attach = 4;
  TrainMix train_mix = TrainMix::mix;
  std::uint64_t seed = 1;  // graph generation
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};  // one trained model each
  std::optional<std::filesystem::path> param_table;

  Hyperparams hp;
  std::size_t epochs = 10;
  std::size_t pairs_per_node = 20;
  double lr = 5e-3;

  std::filesystem::path workdir = "brava-work";
  std::optional<std::filesystem::path> cache_dir;
  std::vector<std::filesystem::path> test_graphs;
  bool directed = false;  // how test graphs are read
  ComponentFilter component = ComponentFilter::none;
  std::size_t threads = 0;

  // Sets one field from its textual form; throws ConfigError on unknown keys
  // or bad values.
  void set(const std::string& key, const std::string& value);
  void validate() const;

  std::filesystem::path cache_path() const { return cache_dir.value_or(workdir / "cache"); }
  std::filesystem::path graphs_dir() const { return workdir / "graphs"; }
  std::filesystem::path models_dir() const { return workdir / "models"; }
  std::filesystem::path reports_dir() const { return workdir / "reports"; }
  std::filesystem::path model_path(std::uint64_t training_seed) const;

  static const std::vector<std::string>& keys();
  static PipelineConfig load(const std::filesystem::path& path);
  // Merges a config file into this config (later values win).
  void merge_file(const std::filesystem::path& path);
};

struct ManifestEntry {
  std::string file;  // relative to the graphs directory
  std::string generator;
  nlohmann::json params;
  std::uint64_t seed;
  std::size_t nodes;
  std::size_t edges;
};

std::vector<ManifestEntry> cmd_generate(const PipelineConfig& cfg);
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& graphs_dir);

// Content hash of a file (FNV-1a, 64 bit) used as the ground-truth cache key.
std::uint64_t file_hash(const std::filesystem::path& path);

struct GroundTruth {
  std::filesystem::path file;
  bool cache_hit = false;
  std::vector<std::int64_t> ids;  // node labels
  std::vector<double> scores;
};

// Exact betweenness of the pruned graph (pruned = true) or of the whole
// graph, cached under cache_dir by content hash and mode.
GroundTruth cmd_ground_truth(const std::filesystem::path& graph_file, bool directed,
                             const std::filesystem::path& cache_dir, bool pruned = true);

struct TrainedModel {
  std::uint64_t seed;
  std::filesystem::path model_file;
  std::filesystem::path log_file;
  ModelParams params;
  std::vector<EpochLog> log;
};

// Loads (generating if needed) the training graphs, their cached ground truth,
// and trains one model per configured seed.
std::vector<TrainingSample> load_training_samples(const PipelineConfig& cfg);
std::vector<TrainedModel> cmd_train(const PipelineConfig& cfg);

struct InferenceTiming {
  double prune_seconds = 0.0;
  double features_seconds = 0.0;
  double forward_seconds = 0.0;
  double total() const { return prune_seconds + features_seconds + forward_seconds; }
};

struct Inference {
  std::vector<std::int64_t> ids;
  std::vector<double> scores;
  InferenceTiming timing;
};

// prune -> degree mass -> eval forward -> reinsert. Timing excludes I/O.
Inference infer(const Graph& g, const ModelParams& params);

// Reads a graph file the way test graphs are read (optional largest component).
Graph load_graph(const std::filesystem::path& path, bool directed, ComponentFilter component);

Inference cmd_infer(const std::filesystem::path& model_file, const std::filesystem::path& graph_file,
                    bool directed, ComponentFilter component,
                    const std::optional<std::filesystem::path>& out);

struct EvaluateRequest {
  std::filesystem::path graph_file;
  bool directed = false;
  ComponentFilter component = ComponentFilter::none;
  std::optional<std::filesystem::path> model_file;  // predict with a model...
  std::optional<std::filesystem::path> pred_file;   // ...or read scores
  std::optional<std::filesystem::path> truth_file;  // default: exact, cached
  std::filesystem::path cache_dir = "brava-cache";
  std::optional<std::filesystem::path> report_file;
};

RankingReport cmd_evaluate(const EvaluateRequest& req);

struct SummaryRow {
  std::string graph;
  std::size_t nodes;
  std::size_t edges;
  std::vector<double> tau_per_seed;
  double mean_tau;
  double std_tau;  // population std over seeds
  std::optional<double> degree_tau;
  double mean_infer_seconds;
};

// Mean and population standard deviation.
std::pair<double, double> mean_std(std::span<const double> v);

/// generate -> ground truth -> train per seed -> evaluate every test graph
/// with every model. Writes summary.csv (deterministic columns only) and
/// timing.csv (wall-clock inference time) under the workdir.
std::vector<SummaryRow> cmd_pipeline(const PipelineConfig& cfg);

}  // namespace brava
