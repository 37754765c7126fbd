#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "brava/centrality.hpp"
#include "brava/error.hpp"
#include "brava/eval.hpp"
#include "brava/model.hpp"
#include "brava/parallel.hpp"
#include "brava/pipeline.hpp"
#include "brava/preprocess.hpp"
#include "brava/synth.hpp"
#include "brava/train.hpp"

namespace py = pybind11;
using namespace brava;

namespace {

Graph graph_from_edges(const std::vector<std::pair<std::int64_t, std::int64_t>>& edges, bool directed) {
  return build_graph(EdgeList{edges, directed});
}

std::vector<std::pair<std::int64_t, std::int64_t>> graph_edges(const Graph& g) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  const auto labels = g.labels();
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    for (NodeId v : g.out_neighbors(u)) {
      if (g.directed() || u < v) out.emplace_back(labels[u], labels[v]);
    }
  }
  return out;
}

py::dict summary_row(const SummaryRow& r) {
  py::dict d;
  d["graph"] = r.graph;
  d["nodes"] = r.nodes;
  d["edges"] = r.edges;
  d["tau_per_seed"] = r.tau_per_seed;
  d["mean_tau"] = r.mean_tau;
  d["std_tau"] = r.std_tau;
  d["degree_tau"] = r.degree_tau;
  d["mean_infer_seconds"] = r.mean_infer_seconds;
  return d;
}

}  // namespace

PYBIND11_MODULE(_brava, m) {
  m.doc() = "Learned betweenness ranking: graphs, exact centrality, model, training, evaluation";

  py::register_exception<Error>(m, "BravaError", PyExc_RuntimeError);

  m.def("set_num_threads", &set_num_threads, py::arg("n"));
  m.def("num_threads", &num_threads);

  py::class_<Graph>(m, "Graph")
      .def(py::init(&graph_from_edges), py::arg("edges"), py::arg("directed") = false,
           "Build from (source, target) id pairs; ids are compacted in first-seen order.")
      .def_property_readonly("num_nodes", &Graph::num_nodes)
      .def_property_readonly("num_edges", &Graph::num_edges)
      .def_property_readonly("num_arcs", &Graph::num_arcs)
      .def_property_readonly("directed", &Graph::directed)
      .def_property_readonly("labels",
                             [](const Graph& g) {
                               return std::vector<std::int64_t>(g.labels().begin(), g.labels().end());
                             })
      .def("edges", &graph_edges)
      .def("out_neighbors",
           [](const Graph& g, NodeId v) {
             if (v >= g.num_nodes()) throw py::index_error("node out of range");
             const auto r = g.out_neighbors(v);
             return std::vector<NodeId>(r.begin(), r.end());
           })
      .def("transpose", &Graph::transposed)
      .def("__eq__", [](const Graph& a, const Graph& b) { return a == b; })
      .def("__repr__", [](const Graph& g) {
        return "<Graph n=" + std::to_string(g.num_nodes()) + " edges=" + std::to_string(g.num_edges()) +
               (g.directed() ? " directed>" : " undirected>");
      });

  py::enum_<ComponentFilter>(m, "ComponentFilter")
      .value("none", ComponentFilter::none)
      .value("weak", ComponentFilter::weak)
      .value("strong", ComponentFilter::strong);

  m.def("load_graph", &load_graph, py::arg("path"), py::arg("directed") = false,
        py::arg("component") = ComponentFilter::none);
  m.def("save_edge_list", &save_edge_list, py::arg("path"), py::arg("graph"));
  m.def(
      "largest_component",
      [](const Graph& g, bool strong) {
        return largest_component(g, strong ? ComponentMode::strong : ComponentMode::weak).graph;
      },
      py::arg("graph"), py::arg("strong") = false);

  m.def("betweenness", &brandes_betweenness, py::arg("graph"));
  m.def("brute_force_betweenness", &brute_force_betweenness, py::arg("graph"));
  m.def(
      "degree_mass", [](const Graph& g, std::size_t m) { return degree_mass(g, m).values; },
      py::arg("graph"), py::arg("hop_order") = 6);

  m.def(
      "prune",
      [](const Graph& g) {
        const auto pr = prune(g);
        std::vector<std::pair<NodeId, std::string>> removed;
        for (const auto& r : pr.removed) removed.emplace_back(r.node, to_string(r.reason));
        return py::make_tuple(pr.reduced, pr.kept, removed);
      },
      py::arg("graph"), "Returns (reduced graph, kept original indices, [(index, reason)]).");

  m.def(
      "generate_hyperbolic",
      [](std::size_t n, double gamma, double avg_degree, double temperature, std::uint64_t seed) {
        return generate_hyperbolic({n, gamma, avg_degree, temperature, seed});
      },
      py::arg("n"), py::arg("gamma") = 2.5, py::arg("avg_degree") = 8.0, py::arg("temperature") = 0.0,
      py::arg("seed") = 0);
  m.def("generate_scale_free", &generate_scale_free, py::arg("n"), py::arg("attach_m") = 4,
        py::arg("seed") = 0);

  m.def("kendall_tau_b", [](const std::vector<double>& x, const std::vector<double>& y) {
    return kendall_tau_b(x, y);
  });
  m.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) { return pearson(x, y); });
  m.def(
      "min_rank", [](const std::vector<double>& s, bool descending) { return min_rank(s, descending); },
      py::arg("scores"), py::arg("descending") = true);
  m.def(
      "estimate_gamma",
      [](const std::vector<double>& degrees, std::optional<double> k_min) {
        return estimate_gamma(degrees, k_min);
      },
      py::arg("degrees"), py::arg("k_min") = py::none());

  py::class_<Hyperparams>(m, "Hyperparams")
      .def(py::init<>())
      .def_readwrite("hop_order", &Hyperparams::hop_order)
      .def_readwrite("hidden", &Hyperparams::hidden)
      .def_readwrite("depth", &Hyperparams::depth)
      .def_readwrite("mlp_hidden", &Hyperparams::mlp_hidden)
      .def_readwrite("dropout", &Hyperparams::dropout)
      .def_readwrite("mlp_on_embedding", &Hyperparams::mlp_on_embedding);

  py::class_<ModelParams>(m, "Model")
      .def_property_readonly("param_count", [](const ModelParams& p) { return param_count(p); })
      .def_property_readonly("hyperparams", &ModelParams::hyperparams)
      .def("save", [](const ModelParams& p, const std::filesystem::path& path) { save_model(path, p); });
  m.def("init_model", &init_params, py::arg("hyperparams") = Hyperparams{}, py::arg("seed") = 0);
  m.def("load_model", &load_model, py::arg("path"));
  m.def(
      "forward",
      [](const Graph& g, const ModelParams& p) { return forward(g, p, Mode::eval, nullptr); },
      py::arg("graph"), py::arg("model"), "Eval-mode scores of every node (no pruning).");
  m.def(
      "infer", [](const Graph& g, const ModelParams& p) { return infer(g, p).scores; }, py::arg("graph"),
      py::arg("model"), "prune, score, reinsert: one score per node of the input graph.");
  m.def(
      "train",
      [](const std::vector<Graph>& graphs, const Hyperparams& hp, std::size_t epochs, std::uint64_t seed,
         double lr) {
        std::vector<TrainingSample> samples;
        for (const auto& g : graphs) samples.push_back(make_training_sample(g, hp.hop_order));
        TrainOptions o;
        o.epochs = epochs;
        o.seed = seed;
        o.adam.lr = lr;
        auto r = train(samples, hp, o);
        std::vector<double> losses;
        for (const auto& e : r.log) losses.push_back(e.mean_loss);
        return py::make_tuple(std::move(r.params), losses);
      },
      py::arg("graphs"), py::arg("hyperparams") = Hyperparams{}, py::arg("epochs") = 10,
      py::arg("seed") = 1, py::arg("lr") = 5e-3, "Returns (model, per-epoch mean loss).");

  py::class_<PipelineConfig>(m, "PipelineConfig")
      .def(py::init<>())
      .def_static("load", &PipelineConfig::load, py::arg("path"))
      .def_static("keys", &PipelineConfig::keys)
      .def("set", &PipelineConfig::set, py::arg("key"), py::arg("value"))
      .def("validate", &PipelineConfig::validate)
      .def_readwrite("workdir", &PipelineConfig::workdir)
      .def_readwrite("test_graphs", &PipelineConfig::test_graphs)
      .def_readwrite("seeds", &PipelineConfig::seeds)
      .def_readwrite("hyperparams", &PipelineConfig::hp);

  m.def(
      "cmd_generate",
      [](const PipelineConfig& cfg) {
        std::vector<std::string> files;
        for (const auto& e : cmd_generate(cfg)) files.push_back(e.file);
        return files;
      },
      py::arg("config"));
  m.def(
      "cmd_ground_truth",
      [](const std::filesystem::path& graph, bool directed, const std::filesystem::path& cache_dir,
         bool pruned) {
        const auto gt = cmd_ground_truth(graph, directed, cache_dir, pruned);
        return py::make_tuple(gt.ids, gt.scores, gt.cache_hit);
      },
      py::arg("graph_file"), py::arg("directed") = false, py::arg("cache_dir") = "brava-cache",
      py::arg("pruned") = true);
  m.def(
      "cmd_train",
      [](const PipelineConfig& cfg) {
        std::vector<std::filesystem::path> files;
        for (const auto& t : cmd_train(cfg)) files.push_back(t.model_file);
        return files;
      },
      py::arg("config"));
  m.def(
      "cmd_pipeline",
      [](const PipelineConfig& cfg) {
        py::list rows;
        for (const auto& r : cmd_pipeline(cfg)) rows.append(summary_row(r));
        return rows;
      },
      py::arg("config"));
}
