// Acceptance runner: one PASS/FAIL line per criterion.
//
//   acceptance [--only N] [--workdir DIR]
//
// Exit status is nonzero when any selected criterion fails.

#include <chrono>
#include <cstring>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "brava/centrality.hpp"
#include "brava/eval.hpp"
#include "brava/model.hpp"
#include "brava/parallel.hpp"
#include "brava/pipeline.hpp"
#include "brava/preprocess.hpp"
#include "brava/synth.hpp"
#include "../gradcheck.hpp"

using namespace brava;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and budgets.
constexpr double kBetweennessTol = 1e-9;     // absolute
constexpr double kDegreeMassRelTol = 1e-9;   // relative
constexpr double kTauTol = 1e-12;            // absolute
constexpr double kGradRelTol = 1e-4;
constexpr double kGradStep = 1e-5;
constexpr std::size_t kExpectedParams = 1333;
constexpr double kMeanDegreeLo = 6.8, kMeanDegreeHi = 9.2;
constexpr double kGammaLo = 2.2, kGammaHi = 2.8;
constexpr double kMinDeskTau = 0.60;

constexpr double kBudgetC1 = 10, kBudgetC2 = 5, kBudgetC3 = 10, kBudgetC4 = 30, kBudgetC7 = 120,
                 kBudgetC8 = 15 * 60;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;  // 0 = no runtime bound
  std::function<Outcome(const fs::path&)> run;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

Outcome c1_betweenness(const fs::path&) {
  Rng rng(1001);
  std::uniform_int_distribution<std::size_t> size(2, 30);
  std::uniform_real_distribution<double> prob(0.1, 0.5);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Graph g = testing::random_graph(size(rng), prob(rng), i % 2 == 1, rng);
    const auto fast = brandes_betweenness(g);
    const auto slow = brute_force_betweenness(g);
    for (std::size_t v = 0; v < fast.size(); ++v) worst = std::max(worst, std::abs(fast[v] - slow[v]));
  }
  return {worst <= kBetweennessTol, "200 graphs, max |diff| = " + fmt(worst)};
}

Outcome c2_degree_mass(const fs::path&) {
  Rng rng(1002);
  std::uniform_int_distribution<std::size_t> size(1, 50);
  std::uniform_real_distribution<double> prob(0.02, 0.4);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Graph g = testing::random_graph(size(rng), prob(rng), i % 2 == 1, rng);
    const auto a = testing::dense_adjacency(g);
    for (std::size_t m : {1, 6, 12}) {
      const auto sparse = degree_mass(g, m);
      const Eigen::VectorXd dense = testing::dense_degree_mass(a, m);
      for (NodeId v = 0; v < g.num_nodes(); ++v) {
        worst = std::max(worst, testing::rel_error(sparse.values(v, m - 1), dense(v), 1.0));
      }
    }
  }
  return {worst <= kDegreeMassRelTol, "100 graphs x m in {1,6,12}, max rel diff = " + fmt(worst)};
}

Outcome c3_tau(const fs::path&) {
  Rng rng(1003);
  std::uniform_int_distribution<std::size_t> len(2, 200);
  std::uniform_int_distribution<int> levels(1, 20);
  double worst = 0.0;
  int undefined_mismatch = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = len(rng);
    const auto x = testing::tied_vector(n, levels(rng), rng);
    const auto y = testing::tied_vector(n, levels(rng), rng);
    const auto fast = kendall_tau_b(x, y);
    const auto slow = testing::tau_b_pairs(x, y);
    if (fast.has_value() != slow.has_value()) {
      ++undefined_mismatch;
    } else if (fast) {
      worst = std::max(worst, std::abs(*fast - *slow));
    }
  }
  return {worst <= kTauTol && undefined_mismatch == 0,
          "1000 vectors, max |diff| = " + fmt(worst) +
              ", undefined mismatches = " + std::to_string(undefined_mismatch)};
}

Outcome c4_gradients(const fs::path&) {
  Rng rng(1004);
  Graph g;
  do {
    g = testing::random_graph(12, 0.3, true, rng);
  } while (largest_component(g, ComponentMode::weak).graph.num_nodes() != 12);
  TrainingSample s;
  s.graph = g;
  s.truth = brute_force_betweenness(g);
  s.inputs = make_inputs(g, 6);
  Rng pair_rng(7);
  const auto pairs = sample_pairs(s, 20 * 12, pair_rng);
  const auto p = init_params(Hyperparams{}, 1004);
  const auto gc = testing::gradient_check(s, pairs, p, kGradStep);
  return {gc.max_rel_error <= kGradRelTol,
          std::to_string(gc.checked) + " parameters, max rel error = " + fmt(gc.max_rel_error) +
              " (index " + std::to_string(gc.worst_index) + ")"};
}

Outcome c5_param_count(const fs::path&) {
  const std::size_t n = param_count(init_params(Hyperparams{}, 0));
  return {n == kExpectedParams, "param_count = " + std::to_string(n)};
}

Outcome c6_pruning(const fs::path&) {
  Rng rng(1006);
  std::uniform_int_distribution<std::size_t> size(2, 30);
  std::uniform_real_distribution<double> prob(0.05, 0.5);
  std::size_t removed = 0, violations = 0;
  for (int i = 0; i < 200; ++i) {
    const Graph g = testing::random_graph(size(rng), prob(rng), i % 2 == 1, rng);
    const auto bc = brute_force_betweenness(g);
    for (const auto& r : prune(g).removed) {
      ++removed;
      violations += bc[r.node] != 0.0;
    }
  }
  return {violations == 0, "200 graphs, " + std::to_string(removed) + " pruned nodes, " +
                               std::to_string(violations) + " with nonzero betweenness"};
}

Outcome c7_generator(const fs::path&) {
  const Graph g = generate_hyperbolic({20000, 2.5, 8.0, 0.1, 20240607});
  std::vector<double> deg(g.num_nodes());
  for (NodeId v = 0; v < g.num_nodes(); ++v) deg[v] = static_cast<double>(g.out_degree(v));
  const double mean = static_cast<double>(g.num_arcs()) / g.num_nodes();
  const double gamma = estimate_gamma(deg);
  const bool ok = mean >= kMeanDegreeLo && mean <= kMeanDegreeHi && gamma >= kGammaLo && gamma <= kGammaHi;
  return {ok, "mean degree = " + fmt(mean) + ", estimated gamma = " + fmt(gamma) +
                  " (k_min = " + fmt(default_k_min(deg)) + ")"};
}

fs::path netscience_path() {
  if (const char* env = std::getenv("BRAVA_NETSCIENCE")) return env;
  return fs::path(BRAVA_DATA_DIR) / "ca-netscience.edges";
}

PipelineConfig desk_config(const fs::path& workdir) {
  PipelineConfig cfg;  // defaults: 3 SF + 3 HRG, n = 2000, 10 epochs, seeds 1..5
  cfg.workdir = workdir;
  return cfg;
}

Outcome c8_end_to_end(const fs::path& workdir) {
  const fs::path graph = netscience_path();
  if (!fs::exists(graph)) {
    return {false, "dataset unavailable: " + graph.string() +
                       " not found (set BRAVA_NETSCIENCE or see README)"};
  }
  auto cfg = desk_config(workdir / "c8");
  cfg.test_graphs = {graph};
  const auto rows = cmd_pipeline(cfg);
  const auto& r = rows.at(0);
  const bool ok = r.mean_tau >= kMinDeskTau && r.degree_tau && r.mean_tau > *r.degree_tau;
  return {ok, r.graph + " (" + std::to_string(r.nodes) + " nodes, " + std::to_string(r.edges) +
                  " edges): mean tau_b = " + fmt(r.mean_tau) + " +- " + fmt(r.std_tau) +
                  ", degree tau_b = " + format_tau(r.degree_tau)};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome c9_determinism(const fs::path& workdir) {
  const fs::path test_graph = workdir / "c9-test.edges";
  save_edge_list(test_graph, generate_hyperbolic({400, 2.6, 5.0, 0.2, 9}));
  std::string summaries[2];
  for (int run = 0; run < 2; ++run) {
    PipelineConfig cfg;
    cfg.workdir = workdir / ("c9-run" + std::to_string(run));
    fs::remove_all(cfg.workdir);
    cfg.nodes = 500;
    cfg.sf_count = 2;
    cfg.hrg_count = 2;
    cfg.epochs = 3;
    cfg.seeds = {1, 2, 3};
    cfg.threads = 4;
    cfg.test_graphs = {test_graph};
    set_num_threads(cfg.threads);
    cmd_pipeline(cfg);
    summaries[run] = read_file(cfg.workdir / "summary.csv");
  }
  set_num_threads(0);
  const bool ok = !summaries[0].empty() && summaries[0] == summaries[1];
  return {ok, "two runs at 4 threads, summary.csv " + std::string(ok ? "identical" : "differs")};
}

Outcome c10_symmetry(const fs::path&) {
  Rng rng(1010);
  std::uniform_int_distribution<std::size_t> size(2, 60);
  std::uniform_real_distribution<double> prob(0.05, 0.4);
  const auto p = init_params(Hyperparams{}, 1010);
  int asym = 0, negative = 0;
  for (int i = 0; i < 50; ++i) {
    const Graph g = testing::random_graph(size(rng), prob(rng), false, rng);
    const auto tr = forward_trace(g, make_inputs(g, 6), p, Mode::eval, nullptr);
    bool same = tr.in.y.size() == tr.out.y.size();
    for (Eigen::Index v = 0; same && v < tr.in.y.size(); ++v) {
      same = std::memcmp(&tr.in.y[v], &tr.out.y[v], sizeof(double)) == 0;
    }
    asym += !same;
    negative += tr.scores.size() > 0 && tr.scores.minCoeff() < 0.0;
  }
  return {asym == 0 && negative == 0, "50 graphs, " + std::to_string(asym) + " asymmetric, " +
                                          std::to_string(negative) + " with negative scores"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  std::string workdir = (fs::temp_directory_path() / "brava-acceptance").string();
  app.add_option("--only", only, "run a single criterion (1-10)")->check(CLI::Range(1, 10));
  app.add_option("--workdir", workdir);
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(workdir);

  const std::vector<Criterion> criteria{
      {1, "oracle equivalence: betweenness", kBudgetC1, c1_betweenness},
      {2, "oracle equivalence: degree mass", kBudgetC2, c2_degree_mass},
      {3, "oracle equivalence: kendall tau-b", kBudgetC3, c3_tau},
      {4, "gradient check", kBudgetC4, c4_gradients},
      {5, "parameter count", 0, c5_param_count},
      {6, "pruning soundness", 0, c6_pruning},
      {7, "hyperbolic generator fidelity", kBudgetC7, c7_generator},
      {8, "desk-scale end-to-end on ca-netscience", kBudgetC8, c8_end_to_end},
      {9, "pipeline determinism", 0, c9_determinism},
      {10, "undirected symmetry", 0, c10_symmetry},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(workdir);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = fmt(secs) + " s";
    if (c.budget_seconds > 0) {
      timing += " of " + fmt(c.budget_seconds) + " s budget";
      if (secs >= c.budget_seconds) {
        o.pass = false;
        o.detail += "; over runtime budget";
      }
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  C" << c.id << " " << c.name << ": " << o.detail
              << " [" << timing << "]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
