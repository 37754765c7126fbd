#include "brava/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "brava/error.hpp"

namespace brava {

void Hyperparams::validate() const {
  if (hop_order < 1) throw ConfigError("hop order must be >= 1");
  if (hidden < 1) throw ConfigError("hidden dimension must be >= 1");
  for (auto w : mlp_hidden) {
    if (w < 1) throw ConfigError("MLP widths must be >= 1");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
}

std::vector<std::size_t> Hyperparams::mlp_widths() const {
  std::vector<std::size_t> w{hidden};
  w.insert(w.end(), mlp_hidden.begin(), mlp_hidden.end());
  w.push_back(1);
  return w;
}

std::vector<TensorSpec> param_layout(const Hyperparams& hp) {
  std::vector<TensorSpec> layout;
  std::size_t offset = 0;
  auto add = [&](std::string name, std::size_t rows, std::size_t cols) {
    layout.push_back({std::move(name), rows, cols, offset});
    offset += rows * cols;
  };
  add("embed.weight", hp.hop_order, hp.hidden);
  add("embed.bias", 1, hp.hidden);
  for (std::size_t l = 0; l < hp.depth; ++l) {
    add("mp." + std::to_string(l) + ".weight", hp.hidden, hp.hidden);
    add("mp." + std::to_string(l) + ".bias", 1, hp.hidden);
  }
  const auto widths = hp.mlp_widths();
  for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
    add("mlp." + std::to_string(k) + ".weight", widths[k], widths[k + 1]);
    add("mlp." + std::to_string(k) + ".bias", 1, widths[k + 1]);
  }
  return layout;
}

std::size_t param_count(const Hyperparams& hp) {
  const std::size_t m = hp.hop_order, h = hp.hidden;
  std::size_t count = m * h + h + hp.depth * (h * h + h);
  const auto widths = hp.mlp_widths();
  for (std::size_t k = 0; k + 1 < widths.size(); ++k) count += widths[k] * widths[k + 1] + widths[k + 1];
  return count;
}

ModelParams::ModelParams(Hyperparams hp) : hp_(std::move(hp)), layout_(param_layout(hp_)) {
  hp_.validate();
  const auto& last = layout_.back();
  values_.assign(last.offset + last.rows * last.cols, 0.0);
}

Tensor ModelParams::tensor(std::size_t i) {
  const auto& t = layout_.at(i);
  return Tensor(values_.data() + t.offset, static_cast<Eigen::Index>(t.rows),
                static_cast<Eigen::Index>(t.cols));
}

ConstTensor ModelParams::tensor(std::size_t i) const {
  const auto& t = layout_.at(i);
  return ConstTensor(values_.data() + t.offset, static_cast<Eigen::Index>(t.rows),
                     static_cast<Eigen::Index>(t.cols));
}

ModelParams init_params(const Hyperparams& hp, std::uint64_t seed) {
  ModelParams p(hp);
  Rng rng(derive_seed(seed, 0x1a17));
  for (std::size_t i = 0; i < p.layout().size(); ++i) {
    const auto& spec = p.layout()[i];
    if (spec.name.ends_with(".bias")) continue;
    const double a = std::sqrt(6.0 / static_cast<double>(spec.rows + spec.cols));
    std::uniform_real_distribution<double> dist(-a, a);
    auto t = p.tensor(i);
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.cols(); ++c) t(r, c) = dist(rng);
    }
  }
  return p;
}

RowMatrix normalize_columns(const RowMatrix& x) {
  RowMatrix out = x;
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    const double mx = out.rows() > 0 ? out.col(c).maxCoeff() : 0.0;
    if (mx > 0.0) out.col(c) /= mx;
  }
  return out;
}

namespace {

RowMatrix affine(const RowMatrix& x, const ConstTensor& w, const ConstTensor& b) {
  RowMatrix out = x * w;
  out.rowwise() += b.row(0);
  return out;
}

RowMatrix relu(const RowMatrix& x) { return x.cwiseMax(0.0); }

RowMatrix relu_mask(const RowMatrix& pre) {
  return (pre.array() > 0.0).cast<double>().matrix();
}

void check_features(const RowMatrix& features, const ModelParams& p, std::size_t n) {
  if (static_cast<std::size_t>(features.cols()) != p.hyperparams().hop_order ||
      static_cast<std::size_t>(features.rows()) != n) {
    throw ContractError("feature matrix is " + std::to_string(features.rows()) + "x" +
                        std::to_string(features.cols()) + ", expected " + std::to_string(n) +
                        "x" + std::to_string(p.hyperparams().hop_order));
  }
}

MlpTrace run_mlp(const RowMatrix& input, const ModelParams& p, Mode mode, Rng* rng) {
  const std::size_t layers = p.mlp_layers();
  const double drop = p.hyperparams().dropout;
  const bool use_dropout = mode == Mode::train && drop > 0.0;
  if (use_dropout && rng == nullptr) throw ContractError("train mode needs an rng");
  MlpTrace t;
  t.inputs.push_back(input);
  for (std::size_t k = 0; k < layers; ++k) {
    t.pre.push_back(affine(t.inputs.back(), p.tensor(p.mlp_weight(k)), p.tensor(p.mlp_bias(k))));
    if (k + 1 == layers) break;
    RowMatrix act = relu(t.pre.back());
    if (use_dropout) {
      std::bernoulli_distribution keep(1.0 - drop);
      const double scale = 1.0 / (1.0 - drop);
      RowMatrix mask(act.rows(), act.cols());
      for (Eigen::Index r = 0; r < mask.rows(); ++r) {
        for (Eigen::Index c = 0; c < mask.cols(); ++c) mask(r, c) = keep(*rng) ? scale : 0.0;
      }
      act = act.cwiseProduct(mask);
      t.masks.push_back(std::move(mask));
    }
    t.inputs.push_back(std::move(act));
  }
  return t;
}

// Returns the gradient w.r.t. the MLP input and accumulates parameter grads.
RowMatrix mlp_backward(const MlpTrace& t, const Eigen::VectorXd& grad_y, const ModelParams& p,
                       ModelParams& grads) {
  RowMatrix g = grad_y;
  for (std::size_t k = p.mlp_layers(); k-- > 0;) {
    grads.tensor(p.mlp_weight(k)).noalias() += t.inputs[k].transpose() * g;
    grads.tensor(p.mlp_bias(k)).row(0) += g.colwise().sum();
    RowMatrix g_in = g * p.tensor(p.mlp_weight(k)).transpose();
    if (k == 0) return g_in;
    if (!t.masks.empty()) g_in = g_in.cwiseProduct(t.masks[k - 1]);
    g = g_in.cwiseProduct(relu_mask(t.pre[k - 1]));
  }
  return g;  // unreachable: the head has at least one layer
}

DirectionTrace run_direction(const Graph& op, const RowMatrix& features, const ModelParams& p,
                             Mode mode, Rng* rng) {
  const auto& hp = p.hyperparams();
  DirectionTrace d;
  d.features = features;
  d.embed_pre = affine(features, p.tensor(p.embed_weight()), p.tensor(p.embed_bias()));
  d.hidden.push_back(relu(d.embed_pre));
  d.y = Eigen::VectorXd::Zero(features.rows());
  if (hp.depth == 0 && hp.mlp_on_embedding) {
    d.heads.push_back(run_mlp(d.hidden[0], p, mode, rng));
    d.y += d.heads.back().pre.back().col(0);
  }
  RowMatrix agg;
  for (std::size_t l = 0; l < hp.depth; ++l) {
    const RowMatrix projected = d.hidden[l] * p.tensor(p.mp_weight(l));
    spmm(op, projected, agg);
    agg.rowwise() += p.tensor(p.mp_bias(l)).row(0);
    RowMatrix act = relu(agg);
    Eigen::VectorXd norms = act.rowwise().norm();
    for (Eigen::Index r = 0; r < act.rows(); ++r) {
      if (norms[r] > 0.0) act.row(r) /= norms[r];
    }
    d.pre.push_back(agg);
    d.row_norms.push_back(std::move(norms));
    d.hidden.push_back(std::move(act));
    d.heads.push_back(run_mlp(d.hidden.back(), p, mode, rng));
    d.y += d.heads.back().pre.back().col(0);
  }
  return d;
}

void direction_backward(const Graph& adjoint, const DirectionTrace& d, const ModelParams& p,
                        const Eigen::VectorXd& grad_y, ModelParams& grads) {
  const auto& hp = p.hyperparams();
  const Eigen::Index n = d.features.rows();
  const Eigen::Index h = static_cast<Eigen::Index>(hp.hidden);
  std::vector<RowMatrix> g_hidden(hp.depth + 1, RowMatrix::Zero(n, h));
  if (hp.depth == 0 && hp.mlp_on_embedding) {
    g_hidden[0] += mlp_backward(d.heads[0], grad_y, p, grads);
  }
  for (std::size_t l = 0; l < hp.depth; ++l) {
    g_hidden[l + 1] += mlp_backward(d.heads[l], grad_y, p, grads);
  }
  RowMatrix g_m;
  for (std::size_t l = hp.depth; l-- > 0;) {
    const RowMatrix& out = d.hidden[l + 1];
    const RowMatrix& g_out = g_hidden[l + 1];
    // Through x / ||x||: (g - y (y . g)) / ||x||.
    RowMatrix g_pre(n, h);
    for (Eigen::Index r = 0; r < n; ++r) {
      const double norm = d.row_norms[l][r];
      if (norm > 0.0) {
        g_pre.row(r) = (g_out.row(r) - out.row(r) * out.row(r).dot(g_out.row(r))) / norm;
      } else {
        g_pre.row(r).setZero();
      }
    }
    g_pre = g_pre.cwiseProduct(relu_mask(d.pre[l]));
    grads.tensor(p.mp_bias(l)).row(0) += g_pre.colwise().sum();
    spmm(adjoint, g_pre, g_m);
    grads.tensor(p.mp_weight(l)).noalias() += d.hidden[l].transpose() * g_m;
    g_hidden[l].noalias() += g_m * p.tensor(p.mp_weight(l)).transpose();
  }
  const RowMatrix g_embed = g_hidden[0].cwiseProduct(relu_mask(d.embed_pre));
  grads.tensor(p.embed_weight()).noalias() += d.features.transpose() * g_embed;
  grads.tensor(p.embed_bias()).row(0) += g_embed.colwise().sum();
}

}  // namespace

RowMatrix embed(const DegreeMassMatrix& masses, const ModelParams& p) {
  check_features(masses.values, p, static_cast<std::size_t>(masses.values.rows()));
  return relu(affine(normalize_columns(masses.values), p.tensor(p.embed_weight()),
                     p.tensor(p.embed_bias())));
}

ModelInputs make_inputs(const Graph& g, std::size_t hop_order) {
  ModelInputs in;
  in.in_features = normalize_columns(degree_mass(g, hop_order).values);
  if (g.directed()) {
    in.out_features = normalize_columns(degree_mass(transpose(g), hop_order).values);
  } else {
    in.out_features = in.in_features;
  }
  return in;
}

ForwardTrace forward_trace(const Graph& g, const ModelInputs& inputs, const ModelParams& p,
                           Mode mode, Rng* rng) {
  check_features(inputs.in_features, p, g.num_nodes());
  check_features(inputs.out_features, p, g.num_nodes());
  ForwardTrace t;
  t.in = run_direction(g, inputs.in_features, p, mode, rng);
  t.out = run_direction(transpose(g), inputs.out_features, p, mode, rng);
  t.scores = t.in.y.cwiseProduct(t.out.y);
  return t;
}

Eigen::VectorXd forward(const Graph& g, const ModelInputs& inputs, const ModelParams& p,
                        Mode mode, Rng* rng) {
  return forward_trace(g, inputs, p, mode, rng).scores;
}

Eigen::VectorXd forward(const Graph& g, const ModelParams& p, Mode mode, Rng* rng) {
  return forward(g, make_inputs(g, p.hyperparams().hop_order), p, mode, rng);
}

ModelParams backward(const Graph& g, const ForwardTrace& trace, const ModelParams& p,
                     const Eigen::VectorXd& grad_scores) {
  if (grad_scores.size() != trace.scores.size()) {
    throw ContractError("score gradient length mismatch");
  }
  ModelParams grads(p.hyperparams());
  const Eigen::VectorXd g_in = grad_scores.cwiseProduct(trace.out.y);
  const Eigen::VectorXd g_out = grad_scores.cwiseProduct(trace.in.y);
  // The in-direction applied A, so its adjoint is A^T, and vice versa.
  direction_backward(transpose(g), trace.in, p, g_in, grads);
  direction_backward(g, trace.out, p, g_out, grads);
  return grads;
}

nlohmann::json hyperparams_to_json(const Hyperparams& hp) {
  return {{"hop_order", hp.hop_order},     {"hidden", hp.hidden},
          {"depth", hp.depth},             {"mlp_hidden", hp.mlp_hidden},
          {"dropout", hp.dropout},         {"mlp_on_embedding", hp.mlp_on_embedding}};
}

Hyperparams hyperparams_from_json(const nlohmann::json& j) {
  Hyperparams hp;
  hp.hop_order = j.at("hop_order").get<std::size_t>();
  hp.hidden = j.at("hidden").get<std::size_t>();
  hp.depth = j.at("depth").get<std::size_t>();
  hp.mlp_hidden = j.at("mlp_hidden").get<std::vector<std::size_t>>();
  hp.dropout = j.at("dropout").get<double>();
  hp.mlp_on_embedding = j.value("mlp_on_embedding", false);
  hp.validate();
  return hp;
}

nlohmann::json model_to_json(const ModelParams& p) {
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& spec : p.layout()) {
    const auto first = p.values().begin() + static_cast<std::ptrdiff_t>(spec.offset);
    tensors.push_back({{"name", spec.name},
                       {"shape", {spec.rows, spec.cols}},
                       {"data", std::vector<double>(first, first + static_cast<std::ptrdiff_t>(
                                                                       spec.rows * spec.cols))}});
  }
  return {{"format", "brava-gnn"},
          {"version", 1},
          {"hyperparams", hyperparams_to_json(p.hyperparams())},
          {"param_count", p.size()},
          {"tensors", std::move(tensors)}};
}

ModelParams model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != "brava-gnn" || j.at("version") != 1) {
      throw ParseError("unsupported model format");
    }
    ModelParams p(hyperparams_from_json(j.at("hyperparams")));
    if (j.at("param_count").get<std::size_t>() != p.size()) {
      throw ParseError("param_count " + j.at("param_count").dump() + " does not match layout (" +
                       std::to_string(p.size()) + ")");
    }
    const auto& tensors = j.at("tensors");
    if (tensors.size() != p.layout().size()) throw ParseError("tensor count mismatch");
    for (std::size_t i = 0; i < tensors.size(); ++i) {
      const auto& spec = p.layout()[i];
      const auto& t = tensors[i];
      const auto shape = t.at("shape").get<std::vector<std::size_t>>();
      const auto data = t.at("data").get<std::vector<double>>();
      if (t.at("name") != spec.name || shape != std::vector<std::size_t>{spec.rows, spec.cols} ||
          data.size() != spec.rows * spec.cols) {
        throw ParseError("tensor '" + spec.name + "' has unexpected name or shape");
      }
      std::copy(data.begin(), data.end(), p.values().begin() + static_cast<std::ptrdiff_t>(spec.offset));
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed model json: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const ModelParams& p) {
  write_file_atomic(path, model_to_json(p).dump(1) + "\n");
}

ModelParams load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model " + path.string());
  try {
    return model_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace brava
