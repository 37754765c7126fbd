#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "brava/graph.hpp"

namespace brava {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Raw (unnormalized) betweenness summed over ordered (s, t) pairs. For
// undirected graphs every unordered pair is therefore counted twice.
using CentralityVector = std::vector<double>;

/// Exact betweenness by Brandes' algorithm: one BFS and one reverse dependency
/// sweep per source. Sources are split across num_threads() workers whose
/// partial sums are reduced in worker order.
CentralityVector brandes_betweenness(const Graph& g);

/// Test oracle, independent of dependency accumulation: all-pairs BFS distance
/// and path-count tables, then sigma_st(v) = sigma_sv * sigma_vt whenever v
/// lies on a shortest s-t path. Refuses graphs above 64 nodes.
CentralityVector brute_force_betweenness(const Graph& g);

inline constexpr std::size_t kBruteForceMaxNodes = 64;

struct DegreeMassMatrix {
  // n x m; column j holds the (j+1)-th order degree mass.
  RowMatrix values;
  // Out-degree of the supplied adjacency.
  Eigen::VectorXd degree;
};

// Degree masses d^(1)..d^(m), d^(j) = sum_{k=0..j} A^k d with d the row sums
// of A. Pass the transpose to get masses over incoming arcs.
DegreeMassMatrix degree_mass(const Graph& g, std::size_t hop_order);

// y = A * x where A is the adjacency of g (row v sums x over out-neighbors).
void spmm(const Graph& g, const RowMatrix& x, RowMatrix& y);

}  // namespace brava
