#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "brava/centrality.hpp"
#include "brava/graph.hpp"
#include "brava/model.hpp"
#include "brava/preprocess.hpp"
#include "brava/rng.hpp"

namespace brava {

// A pruned graph, its exact betweenness, and cached model inputs.
struct TrainingSample {
  Graph graph;
  CentralityVector truth;
  ModelInputs inputs;
};

// Prunes `g`, computes exact betweenness on the reduced graph and caches the
// degree-mass features for the given hop order.
TrainingSample make_training_sample(const Graph& g, std::size_t hop_order);
TrainingSample make_training_sample(Graph pruned, CentralityVector truth, std::size_t hop_order);

struct NodePair {
  NodeId u;
  NodeId v;
  int y;  // +1 when truth[u] > truth[v], else -1
};

// Uniform ordered pairs of distinct nodes, redrawn on ties in truth.
std::vector<NodePair> sample_pairs(const TrainingSample& sample, std::size_t count, Rng& rng);

inline double margin_ranking_loss(double s_u, double s_v, int y) {
  return std::max(0.0, 1.0 - static_cast<double>(y) * (s_u - s_v));
}

struct LossAndGrads {
  double loss;
  ModelParams grads;
};

// One train-mode forward (dropout from rng), mean margin loss over `pairs`,
// and its exact gradient.
LossAndGrads loss_and_gradients(const TrainingSample& sample, std::span<const NodePair> pairs,
                                const ModelParams& params, Rng& rng, Mode mode = Mode::train);

struct AdamOptions {
  double lr = 5e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct OptimizerState {
  AdamOptions options;
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;

  OptimizerState() = default;
  OptimizerState(const ModelParams& p, AdamOptions opts);
};

// Bias-corrected Adam; throws NumericError on a non-finite gradient.
void adam_step(ModelParams& params, const ModelParams& grads, OptimizerState& state);

struct TrainOptions {
  std::size_t epochs = 10;
  std::size_t pairs_per_node = 20;
  AdamOptions adam;
  std::uint64_t seed = 0;
};

struct EpochLog {
  std::size_t epoch;
  double mean_loss;
  double wall_seconds;
};

struct TrainResult {
  ModelParams params;
  OptimizerState optimizer;
  std::vector<EpochLog> log;
};

/// Pairwise ranking training. Each epoch visits the samples in a seeded
/// shuffled order and takes one Adam step per sample on pairs_per_node * n
/// fresh pairs. Initialization, shuffling, pair sampling and dropout all draw
/// from generators derived from `opts.seed`.
TrainResult train(std::span<const TrainingSample> samples, const Hyperparams& hp,
                  const TrainOptions& opts);

// CSV "epoch,mean_loss,wall_seconds".
void save_training_log(const std::filesystem::path& path, std::span<const EpochLog> log);

// Model json plus Adam moments and step counter.
void save_checkpoint(const std::filesystem::path& path, const ModelParams& p,
                     const OptimizerState& state);
std::pair<ModelParams, OptimizerState> load_checkpoint(const std::filesystem::path& path);

}  // namespace brava
