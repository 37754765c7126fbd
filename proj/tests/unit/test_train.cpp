#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <limits>
#include <map>

#include "brava/error.hpp"
#include "brava/synth.hpp"
#include "brava/train.hpp"
#include "../support.hpp"

using namespace brava;

namespace {

TrainingSample sample_from_truth(std::vector<double> truth) {
  TrainingSample s;
  s.graph = Graph::from_arcs(truth.size(), false, {});
  s.truth = std::move(truth);
  s.inputs = make_inputs(s.graph, 6);
  return s;
}

}  // namespace

TEST_CASE("margin ranking loss") {
  CHECK(margin_ranking_loss(2.0, 0.0, 1) == 0.0);
  CHECK(margin_ranking_loss(0.0, 0.0, 1) == 1.0);
  CHECK(margin_ranking_loss(0.5, 0.0, -1) == 1.5);
  // depends on differences only
  CHECK(margin_ranking_loss(0.3 + 7.0, -0.2 + 7.0, 1) == doctest::Approx(margin_ranking_loss(0.3, -0.2, 1)));
}

TEST_CASE("pair sampling") {
  SUBCASE("two nodes are labeled consistently") {
    const auto s = sample_from_truth({5.0, 1.0});
    Rng rng(1);
    for (const auto& p : sample_pairs(s, 200, rng)) {
      CHECK(p.u != p.v);
      CHECK(p.y == (p.u == 0 ? 1 : -1));
    }
  }
  SUBCASE("ties are never emitted") {
    const auto s = sample_from_truth({1, 1, 2, 2, 3, 0, 0});
    Rng rng(2);
    for (const auto& p : sample_pairs(s, 1000, rng)) CHECK(s.truth[p.u] != s.truth[p.v]);
  }
  SUBCASE("unrankable") {
    const auto s = sample_from_truth({4, 4, 4});
    Rng rng(3);
    CHECK_THROWS_AS(sample_pairs(s, 10, rng), ContractError);
  }
  SUBCASE("non-tied unordered pairs are equally likely") {
    const auto s = sample_from_truth({0, 1, 2, 3, 3, 4, 5, 6, 7, 8});
    Rng rng(4);
    const std::size_t draws = 1'000'000;
    std::map<std::pair<NodeId, NodeId>, std::size_t> count;
    for (const auto& p : sample_pairs(s, draws, rng)) ++count[{std::min(p.u, p.v), std::max(p.u, p.v)}];
    const std::size_t pairs = 45 - 1;
    REQUIRE(count.size() == pairs);
    const double expect = static_cast<double>(draws) / pairs;
    const double sigma = std::sqrt(expect * (1.0 - 1.0 / pairs));
    for (const auto& [pair, c] : count) CHECK(std::abs(static_cast<double>(c) - expect) < 3.5 * sigma);
  }
}

TEST_CASE("loss and gradients are batch-mean invariant") {
  Rng rng(5);
  const Graph g = testing::random_graph(20, 0.25, false, rng);
  const auto s = make_training_sample(g, 6);
  if (s.graph.num_nodes() < 2) return;
  const auto p = init_params(Hyperparams{}, 1);
  Rng pr(6);
  auto pairs = sample_pairs(s, 50, pr);
  auto doubled = pairs;
  doubled.insert(doubled.end(), pairs.begin(), pairs.end());
  Rng a(0), b(0);
  const auto one = loss_and_gradients(s, pairs, p, a, Mode::eval);
  const auto two = loss_and_gradients(s, doubled, p, b, Mode::eval);
  CHECK(one.loss == doctest::Approx(two.loss));
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(one.grads.values()[i] == doctest::Approx(two.grads.values()[i]).epsilon(1e-12));
  }
}

TEST_CASE("adam") {
  const Hyperparams hp;
  SUBCASE("zero gradient leaves parameters unchanged") {
    auto p = init_params(hp, 1);
    const auto before = p;
    OptimizerState st(p, AdamOptions{});
    adam_step(p, ModelParams(hp), st);
    CHECK(p == before);
    CHECK(st.step == 1);
  }
  SUBCASE("first step closed form") {
    auto p = init_params(hp, 1);
    const auto before = p;
    ModelParams g(hp);
    Rng rng(2);
    std::normal_distribution<double> nd(0.0, 1e-3);
    for (auto& x : g.values()) x = nd(rng);
    AdamOptions o;
    OptimizerState st(p, o);
    adam_step(p, g, st);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double gi = g.values()[i];
      const double expect = before.values()[i] - o.lr * gi / (std::abs(gi) + o.eps);
      CHECK(p.values()[i] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  SUBCASE("non-finite gradient aborts") {
    auto p = init_params(hp, 1);
    ModelParams g(hp);
    g.values()[17] = std::numeric_limits<double>::quiet_NaN();
    OptimizerState st(p, AdamOptions{});
    CHECK_THROWS_AS(adam_step(p, g, st), NumericError);
  }
}

TEST_CASE("training loop") {
  const Graph g = generate_scale_free(200, 3, 11);
  const std::vector<TrainingSample> samples{make_training_sample(g, 6)};
  const Hyperparams hp;
  SUBCASE("zero epochs return the initial parameters") {
    TrainOptions o;
    o.epochs = 0;
    o.seed = 3;
    const auto r = train(samples, hp, o);
    CHECK(r.params == init_params(hp, derive_seed(3, 0)));
    CHECK(r.log.empty());
  }
  SUBCASE("log length and determinism") {
    TrainOptions o;
    o.epochs = 4;
    o.seed = 8;
    const auto a = train(samples, hp, o);
    const auto b = train(samples, hp, o);
    CHECK(a.log.size() == 4);
    CHECK(a.params == b.params);
    CHECK(a.optimizer.m == b.optimizer.m);
    for (std::size_t e = 0; e < 4; ++e) CHECK(a.log[e].mean_loss == b.log[e].mean_loss);
  }
  SUBCASE("loss falls over the first epochs for most seeds") {
    // Dropout noise on near-zero initial scores is larger than three Adam
    // steps of progress, so this check runs without it.
    Hyperparams quiet = hp;
    quiet.dropout = 0.0;
    int falling = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      TrainOptions o;
      o.epochs = 3;
      o.seed = seed;
      const auto r = train(samples, quiet, o);
      falling += r.log[1].mean_loss <= r.log[0].mean_loss && r.log[2].mean_loss <= r.log[1].mean_loss;
    }
    CHECK(falling >= 4);
  }
  SUBCASE("no samples") { CHECK_THROWS_AS(train({}, hp, TrainOptions{}), ContractError); }
}

TEST_CASE("checkpoint round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "brava-test-train";
  std::filesystem::create_directories(dir);
  const Graph g = generate_scale_free(120, 2, 1);
  const std::vector<TrainingSample> samples{make_training_sample(g, 6)};
  TrainOptions o;
  o.epochs = 2;
  const auto r = train(samples, Hyperparams{}, o);
  save_checkpoint(dir / "ckpt.json", r.params, r.optimizer);
  const auto [p, st] = load_checkpoint(dir / "ckpt.json");
  CHECK(p == r.params);
  CHECK(st.step == r.optimizer.step);
  CHECK(st.m == r.optimizer.m);
  CHECK(st.v == r.optimizer.v);
  // a checkpoint is also a loadable model
  CHECK(load_model(dir / "ckpt.json") == r.params);
  save_training_log(dir / "log.csv", r.log);
  std::ifstream in(dir / "log.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "epoch,mean_loss,wall_seconds");
}
