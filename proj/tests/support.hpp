#pragma once

// Random inputs and independent reference implementations shared by the unit
// tests and the acceptance runner. Nothing here calls the code it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "brava/graph.hpp"
#include "brava/rng.hpp"

namespace brava::testing {

// Erdos-Renyi G(n, p) on exactly n nodes (isolated nodes kept).
inline Graph random_graph(std::size_t n, double p, bool directed, Rng& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<NodeId, NodeId>> arcs;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = directed ? 0 : u + 1; v < n; ++v) {
      if (u != v && coin(rng)) arcs.emplace_back(u, v);
    }
  }
  return Graph::from_arcs(n, directed, arcs);
}

inline Eigen::MatrixXd dense_adjacency(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    for (NodeId v : g.out_neighbors(u)) a(u, v) = 1.0;
  }
  return a;
}

// (sum_{k=0..m} A^k) d with d the row sums of A.
inline Eigen::VectorXd dense_degree_mass(const Eigen::MatrixXd& a, std::size_t m) {
  const Eigen::VectorXd d = a.rowwise().sum();
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  Eigen::MatrixXd total = power;
  for (std::size_t k = 1; k <= m; ++k) {
    power = power * a;
    total += power;
  }
  return total * d;
}

// Betweenness by enumerating every shortest path explicitly (tiny graphs only).
inline std::vector<double> enumerate_paths_betweenness(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<double> bc(n, 0.0);
  for (NodeId s = 0; s < n; ++s) {
    std::vector<int> dist(n, -1);
    std::vector<NodeId> queue{s};
    dist[s] = 0;
    for (std::size_t i = 0; i < queue.size(); ++i) {
      for (NodeId w : g.out_neighbors(queue[i])) {
        if (dist[w] < 0) {
          dist[w] = dist[queue[i]] + 1;
          queue.push_back(w);
        }
      }
    }
    for (NodeId t = 0; t < n; ++t) {
      if (t == s || dist[t] < 0) continue;
      std::vector<std::vector<NodeId>> paths;
      std::vector<NodeId> path{s};
      auto dfs = [&](auto&& self, NodeId v) -> void {
        if (v == t) {
          paths.push_back(path);
          return;
        }
        for (NodeId w : g.out_neighbors(v)) {
          if (dist[w] == dist[v] + 1 && dist[w] <= dist[t]) {
            path.push_back(w);
            self(self, w);
            path.pop_back();
          }
        }
      };
      dfs(dfs, s);
      for (const auto& p : paths) {
        for (std::size_t i = 1; i + 1 < p.size(); ++i) bc[p[i]] += 1.0 / paths.size();
      }
    }
  }
  return bc;
}

// Kendall tau-b by classifying all n(n-1)/2 pairs.
inline std::optional<double> tau_b_pairs(const std::vector<double>& x, const std::vector<double>& y) {
  double c = 0, d = 0, tx = 0, ty = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0 && dy == 0) continue;
      if (dx == 0) {
        tx += 1;
      } else if (dy == 0) {
        ty += 1;
      } else if ((dx > 0) == (dy > 0)) {
        c += 1;
      } else {
        d += 1;
      }
    }
  }
  const double denom = std::sqrt((c + d + tx) * (c + d + ty));
  if (denom == 0) return std::nullopt;
  return (c - d) / denom;
}

// Vector of small integers so ties are frequent.
inline std::vector<double> tied_vector(std::size_t n, int levels, Rng& rng) {
  std::uniform_int_distribution<int> pick(0, levels - 1);
  std::vector<double> v(n);
  for (auto& x : v) x = pick(rng);
  return v;
}

// Two-pass textbook Pearson.
inline double pearson_two_pass(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Draws from P(k) proportional to k^-gamma on [k_min, k_max] by inverse CDF
// over the explicit table.
inline std::vector<double> discrete_power_law(std::size_t count, double gamma, int k_min,
                                              int k_max, Rng& rng) {
  std::vector<double> cdf;
  double total = 0.0;
  for (int k = k_min; k <= k_max; ++k) {
    total += std::pow(static_cast<double>(k), -gamma);
    cdf.push_back(total);
  }
  std::uniform_real_distribution<double> u(0.0, total);
  std::vector<double> out(count);
  for (auto& k : out) {
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u(rng));
    k = k_min + static_cast<double>(it - cdf.begin());
  }
  return out;
}

// Reachability closure (Floyd-Warshall style) for component oracles.
inline std::vector<std::vector<bool>> reachability(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  for (NodeId u = 0; u < n; ++u) {
    r[u][u] = true;
    for (NodeId v : g.out_neighbors(u)) r[u][v] = true;
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!r[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (r[k][j]) r[i][j] = true;
      }
    }
  }
  return r;
}

// Relative error with an absolute floor so near-zero entries compare by
// absolute difference.
inline double rel_error(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace brava::testing
