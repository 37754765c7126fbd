#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "brava/error.hpp"
#include "brava/parallel.hpp"
#include "brava/pipeline.hpp"

namespace {

using brava::PipelineConfig;

bool is_flag_key(const std::string& key) { return key == "directed" || key == "mlp-on-embedding"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"brava: learned betweenness ranking toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::map<std::string, std::string> overrides;
  std::map<std::string, bool> flags;
  app.add_option("--config", config_path, "flat key = value config file")->check(CLI::ExistingFile);
  for (const auto& key : PipelineConfig::keys()) {
    if (is_flag_key(key)) {
      app.add_flag("--" + key, flags[key]);
    } else {
      app.add_option("--" + key, overrides[key]);
    }
  }
  app.get_option("--train-mix")->check(CLI::IsMember({"sf", "hrg", "mix"}));
  app.get_option("--component")->check(CLI::IsMember({"none", "weak", "strong"}));

  auto* generate = app.add_subcommand("generate", "write synthetic training graphs and manifest");
  auto* ground = app.add_subcommand("ground-truth", "exact betweenness of a graph file (cached)");
  auto* train = app.add_subcommand("train", "train one model per seed");
  auto* infer = app.add_subcommand("infer", "score every node of a graph with a model");
  auto* evaluate = app.add_subcommand("evaluate", "ranking report against exact betweenness");
  auto* pipeline = app.add_subcommand("pipeline", "generate, train and evaluate end to end");
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::string graph_file;
  std::string out_file;
  bool full = false;
  ground->add_option("graph", graph_file, "edge list")->required()->check(CLI::ExistingFile);
  ground->add_option("--out", out_file, "also copy the scores here");
  ground->add_flag("--full", full, "score the whole graph instead of the pruned one");

  std::string model_file;
  infer->add_option("--model", model_file)->required()->check(CLI::ExistingFile);
  infer->add_option("graph", graph_file)->required()->check(CLI::ExistingFile);
  infer->add_option("--out", out_file, "score file (default: stdout)");

  std::string pred_file;
  std::string truth_file;
  std::string report_file;
  evaluate->add_option("graph", graph_file)->required()->check(CLI::ExistingFile);
  auto* model_opt = evaluate->add_option("--model", model_file)->check(CLI::ExistingFile);
  auto* pred_opt = evaluate->add_option("--pred", pred_file, "score file to evaluate")->check(CLI::ExistingFile);
  model_opt->excludes(pred_opt);
  evaluate->add_option("--truth", truth_file, "true score file (default: exact, cached)")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--report", report_file, "per-node CSV report");

  std::vector<std::string> test_graphs;
  pipeline->add_option("--test-graph", test_graphs, "edge list to evaluate (repeatable)")
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    PipelineConfig cfg;
    if (!config_path.empty()) cfg.merge_file(config_path);
    for (const auto& [key, value] : overrides) {
      if (!value.empty()) cfg.set(key, value);
    }
    for (const auto& [key, on] : flags) {
      if (on) cfg.set(key, "true");
    }
    for (const auto& t : test_graphs) cfg.test_graphs.emplace_back(t);
    brava::set_num_threads(cfg.threads);

    if (generate->parsed()) {
      const auto entries = brava::cmd_generate(cfg);
      std::cout << "wrote " << entries.size() << " graphs to " << cfg.graphs_dir().string() << "\n";
    } else if (ground->parsed()) {
      const auto gt = brava::cmd_ground_truth(graph_file, cfg.directed, cfg.cache_path(), !full);
      if (!out_file.empty()) brava::save_scores(out_file, gt.ids, gt.scores);
      std::cout << gt.file.string() << "\n";
    } else if (train->parsed()) {
      for (const auto& m : brava::cmd_train(cfg)) std::cout << m.model_file.string() << "\n";
    } else if (infer->parsed()) {
      std::optional<std::filesystem::path> out;
      if (!out_file.empty()) out = out_file;
      const auto inf = brava::cmd_infer(model_file, graph_file, cfg.directed, cfg.component, out);
      if (!out) {
        for (std::size_t i = 0; i < inf.ids.size(); ++i) {
          std::cout << inf.ids[i] << '\t' << brava::format_double(inf.scores[i]) << '\n';
        }
      }
      std::cerr << "inference seconds: prune " << inf.timing.prune_seconds << ", features "
                << inf.timing.features_seconds << ", forward " << inf.timing.forward_seconds
                << ", total " << inf.timing.total() << "\n";
    } else if (evaluate->parsed()) {
      brava::EvaluateRequest req;
      req.graph_file = graph_file;
      req.directed = cfg.directed;
      req.component = cfg.component;
      req.cache_dir = cfg.cache_path();
      if (!model_file.empty()) req.model_file = model_file;
      if (!pred_file.empty()) req.pred_file = pred_file;
      if (!truth_file.empty()) req.truth_file = truth_file;
      if (!report_file.empty()) req.report_file = report_file;
      const auto report = brava::cmd_evaluate(req);
      std::cout << report.summary_json().dump() << "\n";
    } else if (pipeline->parsed()) {
      const auto rows = brava::cmd_pipeline(cfg);
      std::cout << "graph,nodes,mean_tau_b,std_tau_b,degree_tau_b\n";
      for (const auto& r : rows) {
        std::cout << r.graph << "," << r.nodes << "," << brava::format_double(r.mean_tau) << ","
                  << brava::format_double(r.std_tau) << "," << brava::format_tau(r.degree_tau)
                  << "\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
