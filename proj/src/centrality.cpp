#include "brava/centrality.hpp"

#include <limits>

#include "brava/error.hpp"
#include "brava/parallel.hpp"

namespace brava {

namespace {

struct BrandesWorkspace {
  explicit BrandesWorkspace(std::size_t n)
      : dist(n, -1), sigma(n, 0.0), delta(n, 0.0) {
    order.reserve(n);
  }
  std::vector<std::int64_t> dist;
  std::vector<double> sigma;
  std::vector<double> delta;
  std::vector<NodeId> order;
};

void accumulate_source(const Graph& g, NodeId s, BrandesWorkspace& ws,
                       std::vector<double>& out) {
  auto& [dist, sigma, delta, order] = ws;
  order.clear();
  dist[s] = 0;
  sigma[s] = 1.0;
  order.push_back(s);
  for (std::size_t head = 0; head < order.size(); ++head) {
    const NodeId v = order[head];
    for (NodeId w : g.out_neighbors(v)) {
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        order.push_back(w);
      }
      if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
    }
  }
  // Reverse BFS order; predecessors of w are its in-neighbors one level up.
  for (std::size_t i = order.size(); i-- > 0;) {
    const NodeId w = order[i];
    const double coeff = (1.0 + delta[w]) / sigma[w];
    for (NodeId v : g.in_neighbors(w)) {
      if (dist[v] >= 0 && dist[v] + 1 == dist[w]) delta[v] += sigma[v] * coeff;
    }
    if (w != s) out[w] += delta[w];
  }
  for (NodeId v : order) {
    dist[v] = -1;
    sigma[v] = 0.0;
    delta[v] = 0.0;
  }
}

}  // namespace

CentralityVector brandes_betweenness(const Graph& g) {
  const std::size_t n = g.num_nodes();
  const std::size_t chunks = chunk_count(n);
  std::vector<std::vector<double>> partial(chunks, std::vector<double>(n, 0.0));
  parallel_chunks(n, [&](std::size_t begin, std::size_t end, std::size_t c) {
    BrandesWorkspace ws(n);
    for (std::size_t s = begin; s < end; ++s) {
      accumulate_source(g, static_cast<NodeId>(s), ws, partial[c]);
    }
  });
  CentralityVector bc(n, 0.0);
  for (const auto& p : partial) {
    for (std::size_t v = 0; v < n; ++v) bc[v] += p[v];
  }
  return bc;
}

CentralityVector brute_force_betweenness(const Graph& g) {
  const std::size_t n = g.num_nodes();
  if (n > kBruteForceMaxNodes) {
    throw ContractError("brute_force_betweenness is limited to 64 nodes");
  }
  constexpr int inf = std::numeric_limits<int>::max();
  std::vector<std::vector<int>> dist(n, std::vector<int>(n, inf));
  std::vector<std::vector<double>> paths(n, std::vector<double>(n, 0.0));
  for (NodeId s = 0; s < n; ++s) {
    // Level-synchronous BFS; paths[s][w] sums counts over predecessors.
    std::vector<NodeId> frontier{s};
    dist[s][s] = 0;
    paths[s][s] = 1.0;
    for (int level = 0; !frontier.empty(); ++level) {
      std::vector<NodeId> next;
      for (NodeId v : frontier) {
        for (NodeId w : g.out_neighbors(v)) {
          if (dist[s][w] == inf) {
            dist[s][w] = level + 1;
            next.push_back(w);
          }
        }
      }
      for (NodeId w : next) {
        for (NodeId v : g.in_neighbors(w)) {
          if (dist[s][v] == level) paths[s][w] += paths[s][v];
        }
      }
      frontier = std::move(next);
    }
  }
  CentralityVector bc(n, 0.0);
  for (NodeId s = 0; s < n; ++s) {
    for (NodeId t = 0; t < n; ++t) {
      if (s == t || dist[s][t] == inf) continue;
      for (NodeId v = 0; v < n; ++v) {
        if (v == s || v == t || dist[s][v] == inf || dist[v][t] == inf) continue;
        if (dist[s][v] + dist[v][t] == dist[s][t]) {
          bc[v] += paths[s][v] * paths[v][t] / paths[s][t];
        }
      }
    }
  }
  return bc;
}

void spmm(const Graph& g, const RowMatrix& x, RowMatrix& y) {
  const std::size_t n = g.num_nodes();
  if (static_cast<std::size_t>(x.rows()) != n) throw ContractError("spmm row mismatch");
  y.setZero(x.rows(), x.cols());
  for (NodeId v = 0; v < n; ++v) {
    auto row = y.row(v);
    for (NodeId w : g.out_neighbors(v)) row += x.row(w);
  }
}

DegreeMassMatrix degree_mass(const Graph& g, std::size_t hop_order) {
  if (hop_order < 1) throw ContractError("degree_mass needs hop order >= 1");
  const std::size_t n = g.num_nodes();
  DegreeMassMatrix dm;
  dm.degree.resize(static_cast<Eigen::Index>(n));
  for (NodeId v = 0; v < n; ++v) dm.degree[v] = static_cast<double>(g.out_degree(v));
  dm.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(hop_order));

  Eigen::VectorXd walk = dm.degree;
  Eigen::VectorXd next(walk.size());
  Eigen::VectorXd mass = dm.degree;
  for (std::size_t k = 1; k <= hop_order; ++k) {
    for (NodeId v = 0; v < n; ++v) {
      double acc = 0.0;
      for (NodeId w : g.out_neighbors(v)) acc += walk[w];
      next[v] = acc;
    }
    walk.swap(next);
    mass += walk;
    dm.values.col(static_cast<Eigen::Index>(k - 1)) = mass;
  }
  return dm;
}

}  // namespace brava
