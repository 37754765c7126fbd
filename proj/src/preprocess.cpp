#include "brava/preprocess.hpp"

#include <algorithm>
#include <string>

#include "brava/error.hpp"

namespace brava {

const char* to_string(RemovalReason r) {
  switch (r) {
    case RemovalReason::leaf:
      return "leaf";
    case RemovalReason::clique_neighborhood:
      return "clique-neighborhood";
  }
  return "unknown";
}

namespace {

std::size_t distinct_neighbor_count(const Graph& g, NodeId v) {
  const auto out = g.out_neighbors(v);
  if (!g.directed()) return out.size();
  const auto in = g.in_neighbors(v);
  // Both rows are sorted; count the size of the union.
  std::size_t i = 0, j = 0, count = 0;
  while (i < out.size() || j < in.size()) {
    if (j == in.size() || (i < out.size() && out[i] < in[j])) {
      ++i;
    } else if (i == out.size() || in[j] < out[i]) {
      ++j;
    } else {
      ++i;
      ++j;
    }
    ++count;
  }
  return count;
}

bool neighborhood_is_clique(const Graph& g, NodeId v) {
  for (NodeId x : g.in_neighbors(v)) {
    for (NodeId y : g.out_neighbors(v)) {
      if (x != y && !g.has_arc(x, y)) return false;
    }
  }
  return true;
}

}  // namespace

PruneResult prune(const Graph& g) {
  const std::size_t n = g.num_nodes();
  PruneResult pr;
  pr.original_nodes = n;
  std::vector<bool> keep(n, true);
  for (NodeId v = 0; v < n; ++v) {
    if (distinct_neighbor_count(g, v) < 2) {
      keep[v] = false;
      pr.removed.push_back({v, RemovalReason::leaf});
    } else if (neighborhood_is_clique(g, v)) {
      keep[v] = false;
      pr.removed.push_back({v, RemovalReason::clique_neighborhood});
    }
  }
  auto [reduced, kept] = induced_subgraph(g, keep);
  pr.reduced = std::move(reduced);
  pr.kept = std::move(kept);
  return pr;
}

std::vector<double> reinsert_scores(const PruneResult& pr, std::span<const double> reduced_scores) {
  if (reduced_scores.size() != pr.kept.size()) {
    throw ContractError("reduced score count " + std::to_string(reduced_scores.size()) +
                        " does not match reduced graph size " + std::to_string(pr.kept.size()));
  }
  const double sentinel =
      reduced_scores.empty()
          ? 0.0
          : *std::min_element(reduced_scores.begin(), reduced_scores.end()) - 1.0;
  std::vector<double> full(pr.original_nodes, sentinel);
  for (std::size_t i = 0; i < pr.kept.size(); ++i) full[pr.kept[i]] = reduced_scores[i];
  return full;
}

void save_removal_report(const std::filesystem::path& path, const Graph& original,
                         const PruneResult& pr) {
  std::string out = "id,reason\n";
  for (const auto& r : pr.removed) {
    out += std::to_string(original.labels()[r.node]);
    out += ',';
    out += to_string(r.reason);
    out += '\n';
  }
  write_file_atomic(path, out);
}

}  // namespace brava
