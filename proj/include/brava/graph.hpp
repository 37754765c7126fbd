#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace brava {

using NodeId = std::uint32_t;
using ArcIndex = std::uint64_t;

struct EdgeList {
  std::vector<std::pair<std::int64_t, std::int64_t>> edges;
  bool directed = false;
};

/// Immutable unweighted graph in CSR form.
///
/// Undirected graphs store both orientations of every edge, so a single
/// traversal path serves both cases. Every graph also carries its reverse
/// adjacency (in-neighbors); for undirected graphs that is the same storage.
/// Rows are sorted by target id and free of self-loops and duplicates.
///
/// Each node keeps the external label it was created from (the id in the
/// source edge list), which survives subgraph extraction.
class Graph {
 public:
  Graph();

  // Builds from an arc list over nodes [0, n). Self-loops and duplicate arcs
  // are dropped; undirected input is symmetrized. Labels default to 0..n-1.
  static Graph from_arcs(std::size_t n, bool directed,
                         std::span<const std::pair<NodeId, NodeId>> arcs,
                         std::vector<std::int64_t> labels = {});

  std::size_t num_nodes() const { return n_; }
  // Number of stored arcs (twice the edge count for undirected graphs).
  std::size_t num_arcs() const { return out_->targets.size(); }
  // Edge count as a user would state it: arcs for directed graphs, unordered
  // pairs for undirected ones.
  std::size_t num_edges() const { return directed_ ? num_arcs() : num_arcs() / 2; }
  bool directed() const { return directed_; }

  std::span<const NodeId> out_neighbors(NodeId v) const { return out_->row(v); }
  std::span<const NodeId> in_neighbors(NodeId v) const { return in_->row(v); }
  std::size_t out_degree(NodeId v) const { return out_->row(v).size(); }
  std::size_t in_degree(NodeId v) const { return in_->row(v).size(); }

  std::span<const ArcIndex> row_offsets() const { return out_->offsets; }
  std::span<const NodeId> col_indices() const { return out_->targets; }

  bool has_arc(NodeId u, NodeId v) const;

  std::span<const std::int64_t> labels() const { return *labels_; }

  // O(1): swaps the forward and reverse adjacency.
  Graph transposed() const;

  friend bool operator==(const Graph& a, const Graph& b);

 private:
  struct Csr {
    std::vector<ArcIndex> offsets;
    std::vector<NodeId> targets;
    std::span<const NodeId> row(NodeId v) const {
      return {targets.data() + offsets[v], targets.data() + offsets[v + 1]};
    }
  };

  static Csr make_csr(std::size_t n, std::vector<std::pair<NodeId, NodeId>>& arcs);

  std::size_t n_ = 0;
  bool directed_ = false;
  std::shared_ptr<const Csr> out_;
  std::shared_ptr<const Csr> in_;
  std::shared_ptr<const std::vector<std::int64_t>> labels_;
};

// Compacts ids to [0, n) in first-seen order (source before target, edges in
// input order); the original ids become the node labels.
Graph build_graph(const EdgeList& edges, bool directed);
inline Graph build_graph(const EdgeList& edges) { return build_graph(edges, edges.directed); }

inline Graph transpose(const Graph& g) { return g.transposed(); }

enum class ComponentMode { weak, strong };

struct ComponentResult {
  Graph graph;
  // old index -> new index, -1 for nodes outside the component.
  std::vector<std::int64_t> index_map;
};

// Induced subgraph on the largest weakly/strongly connected node set. Ties go
// to the component containing the smallest original id (label). `strong` on an
// undirected graph behaves as `weak`.
ComponentResult largest_component(const Graph& g, ComponentMode mode);

// Induced subgraph on the nodes flagged in `keep`; returns the graph and the
// new->old index list.
std::pair<Graph, std::vector<NodeId>> induced_subgraph(const Graph& g,
                                                       const std::vector<bool>& keep);

// SNAP-style text: one "src dst" pair per line, lines starting with '#'
// skipped, blank lines ignored.
EdgeList load_edge_list(const std::filesystem::path& path, bool directed = false);
void save_edge_list(const std::filesystem::path& path, const Graph& g);

// "id<TAB>score" lines, shortest round-trip float formatting.
void save_scores(const std::filesystem::path& path, std::span<const std::int64_t> ids,
                 std::span<const double> scores);
std::pair<std::vector<std::int64_t>, std::vector<double>> load_scores(
    const std::filesystem::path& path);

// Writes via a sibling temp file and renames, so readers never observe a
// partially written file.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string format_double(double v);

}  // namespace brava
