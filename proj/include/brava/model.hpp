#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "brava/centrality.hpp"
#include "brava/graph.hpp"
#include "brava/rng.hpp"
#include "json.hpp"

namespace brava {

struct Hyperparams {
  std::size_t hop_order = 6;
  std::size_t hidden = 12;
  std::size_t depth = 2;
  std::vector<std::size_t> mlp_hidden{24, 24};
  double dropout = 0.3;
  // With depth 0, score the embedding directly with the MLP instead of
  // returning zeros.
  bool mlp_on_embedding = false;

  void validate() const;
  // Layer widths of the scoring head: hidden, mlp_hidden..., 1.
  std::vector<std::size_t> mlp_widths() const;

  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

struct TensorSpec {
  std::string name;
  std::size_t rows;
  std::size_t cols;
  std::size_t offset;

  friend bool operator==(const TensorSpec&, const TensorSpec&) = default;
};

std::vector<TensorSpec> param_layout(const Hyperparams& hp);

// Closed-form parameter count: m*h + h + L*(h^2 + h) + sum over MLP layers.
std::size_t param_count(const Hyperparams& hp);

using ConstTensor = Eigen::Map<const RowMatrix>;
using Tensor = Eigen::Map<RowMatrix>;

/// All learnable values in one flat buffer, addressed through the layout.
/// Gradients use the same type, so optimizer and finite-difference code can
/// walk the flat buffer directly.
class ModelParams {
 public:
  ModelParams() = default;
  explicit ModelParams(Hyperparams hp);

  const Hyperparams& hyperparams() const { return hp_; }
  const std::vector<TensorSpec>& layout() const { return layout_; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  Tensor tensor(std::size_t i);
  ConstTensor tensor(std::size_t i) const;

  std::size_t embed_weight() const { return 0; }
  std::size_t embed_bias() const { return 1; }
  std::size_t mp_weight(std::size_t layer) const { return 2 + 2 * layer; }
  std::size_t mp_bias(std::size_t layer) const { return 3 + 2 * layer; }
  std::size_t mlp_weight(std::size_t k) const { return 2 + 2 * hp_.depth + 2 * k; }
  std::size_t mlp_bias(std::size_t k) const { return 3 + 2 * hp_.depth + 2 * k; }
  std::size_t mlp_layers() const { return hp_.mlp_hidden.size() + 1; }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  Hyperparams hp_;
  std::vector<TensorSpec> layout_;
  std::vector<double> values_;
};

inline std::size_t param_count(const ModelParams& p) { return p.size(); }

// Glorot-uniform weights, zero biases.
ModelParams init_params(const Hyperparams& hp, std::uint64_t seed);

// Divides each column by its maximum; all-zero columns stay zero.
RowMatrix normalize_columns(const RowMatrix& x);

// ReLU(normalize_columns(masses) * W + b).
RowMatrix embed(const DegreeMassMatrix& masses, const ModelParams& p);

// Normalized degree-mass features over A (in) and A^T (out).
struct ModelInputs {
  RowMatrix in_features;
  RowMatrix out_features;
};
ModelInputs make_inputs(const Graph& g, std::size_t hop_order);

enum class Mode { train, eval };

struct MlpTrace {
  std::vector<RowMatrix> inputs;  // input of each linear layer
  std::vector<RowMatrix> pre;     // pre-activation of each linear layer
  std::vector<RowMatrix> masks;   // dropout multipliers, hidden layers, train only
};

struct DirectionTrace {
  RowMatrix features;
  RowMatrix embed_pre;
  std::vector<RowMatrix> hidden;  // H^(0)..H^(L), rows unit-norm for l >= 1
  std::vector<RowMatrix> pre;     // A H^(l) W^(l) + b^(l)
  std::vector<Eigen::VectorXd> row_norms;
  std::vector<MlpTrace> heads;
  Eigen::VectorXd y;
};

struct ForwardTrace {
  DirectionTrace in;
  DirectionTrace out;
  Eigen::VectorXd scores;
};

/// Dual-direction forward pass. The in-direction propagates over A and the
/// out-direction over A^T with the same layer weights; after every layer a
/// shared MLP adds a scalar to that direction's running score, and the final
/// score is the elementwise product of the two. Dropout (train mode) is drawn
/// from `rng` and only touches the MLP hidden activations.
ForwardTrace forward_trace(const Graph& g, const ModelInputs& inputs, const ModelParams& p,
                           Mode mode, Rng* rng);

Eigen::VectorXd forward(const Graph& g, const ModelInputs& inputs, const ModelParams& p,
                        Mode mode, Rng* rng);
Eigen::VectorXd forward(const Graph& g, const ModelParams& p, Mode mode, Rng* rng);

// Reverse pass: gradient of sum_i grad_scores[i] * scores[i] w.r.t. every
// parameter, reusing the activations and dropout masks stored in `trace`.
ModelParams backward(const Graph& g, const ForwardTrace& trace, const ModelParams& p,
                     const Eigen::VectorXd& grad_scores);

nlohmann::json hyperparams_to_json(const Hyperparams& hp);
Hyperparams hyperparams_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const ModelParams& p);
// Validates tensor shapes and the stored parameter count.
ModelParams model_from_json(const nlohmann::json& j);
void save_model(const std::filesystem::path& path, const ModelParams& p);
ModelParams load_model(const std::filesystem::path& path);

}  // namespace brava
