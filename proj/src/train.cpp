#include "brava/train.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "brava/error.hpp"

namespace brava {

TrainingSample make_training_sample(const Graph& g, std::size_t hop_order) {
  PruneResult pr = prune(g);
  CentralityVector truth = brandes_betweenness(pr.reduced);
  return make_training_sample(std::move(pr.reduced), std::move(truth), hop_order);
}

TrainingSample make_training_sample(Graph pruned, CentralityVector truth, std::size_t hop_order) {
  if (truth.size() != pruned.num_nodes()) {
    throw ContractError("ground truth length does not match the pruned graph");
  }
  TrainingSample s;
  s.inputs = make_inputs(pruned, hop_order);
  s.graph = std::move(pruned);
  s.truth = std::move(truth);
  return s;
}

std::vector<NodePair> sample_pairs(const TrainingSample& sample, std::size_t count, Rng& rng) {
  const auto& truth = sample.truth;
  const std::size_t n = truth.size();
  const bool rankable =
      n >= 2 && std::any_of(truth.begin(), truth.end(), [&](double x) { return x != truth[0]; });
  if (!rankable) throw ContractError("unrankable sample: all ground-truth scores are equal");

  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  std::uniform_int_distribution<std::size_t> second(0, n - 2);
  std::vector<NodePair> pairs;
  pairs.reserve(count);
  while (pairs.size() < count) {
    const std::size_t u = first(rng);
    std::size_t v = second(rng);
    if (v >= u) ++v;
    if (truth[u] == truth[v]) continue;
    pairs.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v), truth[u] > truth[v] ? 1 : -1});
  }
  return pairs;
}

LossAndGrads loss_and_gradients(const TrainingSample& sample, std::span<const NodePair> pairs,
                                const ModelParams& params, Rng& rng, Mode mode) {
  const ForwardTrace trace = forward_trace(sample.graph, sample.inputs, params, mode, &rng);
  const auto& s = trace.scores;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(s.size());
  double loss = 0.0;
  const double inv = pairs.empty() ? 0.0 : 1.0 / static_cast<double>(pairs.size());
  for (const auto& p : pairs) {
    const double l = margin_ranking_loss(s[p.u], s[p.v], p.y);
    loss += l;
    // Subgradient 0 on the flat side, including the hinge point itself.
    if (l > 0.0) {
      grad[p.u] -= p.y * inv;
      grad[p.v] += p.y * inv;
    }
  }
  return {loss * inv, backward(sample.graph, trace, params, grad)};
}

OptimizerState::OptimizerState(const ModelParams& p, AdamOptions opts)
    : options(opts), m(p.size(), 0.0), v(p.size(), 0.0) {}

void adam_step(ModelParams& params, const ModelParams& grads, OptimizerState& state) {
  const auto g = grads.values();
  auto w = params.values();
  if (g.size() != w.size() || state.m.size() != w.size() || state.v.size() != w.size()) {
    throw ContractError("adam_step shape mismatch");
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!std::isfinite(g[i])) {
      throw NumericError("non-finite gradient at parameter " + std::to_string(i) + " (step " +
                         std::to_string(state.step + 1) + "): " + std::to_string(g[i]));
    }
  }
  const auto& o = state.options;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(o.beta1, t);
  const double c2 = 1.0 - std::pow(o.beta2, t);
  for (std::size_t i = 0; i < g.size(); ++i) {
    state.m[i] = o.beta1 * state.m[i] + (1.0 - o.beta1) * g[i];
    state.v[i] = o.beta2 * state.v[i] + (1.0 - o.beta2) * g[i] * g[i];
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    w[i] -= o.lr * m_hat / (std::sqrt(v_hat) + o.eps);
  }
}

TrainResult train(std::span<const TrainingSample> samples, const Hyperparams& hp,
                  const TrainOptions& opts) {
  if (samples.empty()) throw ContractError("train needs at least one sample");
  TrainResult result;
  result.params = init_params(hp, derive_seed(opts.seed, 0));
  result.optimizer = OptimizerState(result.params, opts.adam);
  Rng shuffle_rng(derive_seed(opts.seed, 1));
  Rng pair_rng(derive_seed(opts.seed, 2));
  Rng dropout_rng(derive_seed(opts.seed, 3));

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double total = 0.0;
    for (std::size_t idx : order) {
      const auto& sample = samples[idx];
      const auto pairs = sample_pairs(sample, opts.pairs_per_node * sample.graph.num_nodes(), pair_rng);
      auto [loss, grads] = loss_and_gradients(sample, pairs, result.params, dropout_rng);
      adam_step(result.params, grads, result.optimizer);
      total += loss;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.log.push_back({epoch + 1, total / static_cast<double>(samples.size()), secs});
  }
  return result;
}

void save_training_log(const std::filesystem::path& path, std::span<const EpochLog> log) {
  std::string out = "epoch,mean_loss,wall_seconds\n";
  for (const auto& e : log) {
    out += std::to_string(e.epoch) + "," + format_double(e.mean_loss) + "," +
           format_double(e.wall_seconds) + "\n";
  }
  write_file_atomic(path, out);
}

void save_checkpoint(const std::filesystem::path& path, const ModelParams& p,
                     const OptimizerState& state) {
  auto j = model_to_json(p);
  j["optimizer"] = {{"kind", "adam"},
                    {"lr", state.options.lr},
                    {"beta1", state.options.beta1},
                    {"beta2", state.options.beta2},
                    {"eps", state.options.eps},
                    {"step", state.step},
                    {"m", state.m},
                    {"v", state.v}};
  write_file_atomic(path, j.dump(1) + "\n");
}

std::pair<ModelParams, OptimizerState> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  ModelParams p = model_from_json(j);
  if (!j.contains("optimizer")) throw ParseError(path.string() + ": no optimizer state");
  try {
    const auto& o = j.at("optimizer");
    AdamOptions opts{o.at("lr").get<double>(), o.at("beta1").get<double>(),
                     o.at("beta2").get<double>(), o.at("eps").get<double>()};
    OptimizerState state(p, opts);
    state.step = o.at("step").get<std::uint64_t>();
    state.m = o.at("m").get<std::vector<double>>();
    state.v = o.at("v").get<std::vector<double>>();
    if (state.m.size() != p.size() || state.v.size() != p.size()) {
      throw ParseError(path.string() + ": optimizer moments do not match the model");
    }
    return {std::move(p), std::move(state)};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": malformed optimizer state: " + e.what());
  }
}

}  // namespace brava
