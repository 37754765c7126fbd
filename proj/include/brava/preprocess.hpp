#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "brava/graph.hpp"

namespace brava {

enum class RemovalReason { leaf, clique_neighborhood };

const char* to_string(RemovalReason r);

struct RemovedNode {
  NodeId node;  // index in the original graph
  RemovalReason reason;
};

struct PruneResult {
  Graph reduced;
  std::vector<NodeId> kept;  // reduced index -> original index
  std::vector<RemovedNode> removed;
  std::size_t original_nodes = 0;
};

/// Drops nodes that cannot be an intermediate vertex of any shortest path:
/// fewer than two distinct neighbors, or a neighborhood that is a clique
/// (directed: every in-neighbor x has an arc to every out-neighbor y != x).
/// Both rules are evaluated once against the original graph.
PruneResult prune(const Graph& g);

// Scatters reduced-graph scores back to original indices. Removed nodes share
// the sentinel min(reduced_scores) - 1 (or 0 when nothing survived).
std::vector<double> reinsert_scores(const PruneResult& pr, std::span<const double> reduced_scores);

// CSV "id,reason" with original node labels.
void save_removal_report(const std::filesystem::path& path, const Graph& original,
                         const PruneResult& pr);

}  // namespace brava
