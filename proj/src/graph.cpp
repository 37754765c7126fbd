#include "brava/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>

#include "brava/error.hpp"

namespace brava {

Graph::Graph()
    : out_(std::make_shared<const Csr>(Csr{{0}, {}})),
      in_(out_),
      labels_(std::make_shared<const std::vector<std::int64_t>>()) {}

Graph::Csr Graph::make_csr(std::size_t n, std::vector<std::pair<NodeId, NodeId>>& arcs) {
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
  Csr csr;
  csr.offsets.assign(n + 1, 0);
  csr.targets.reserve(arcs.size());
  for (const auto& [u, v] : arcs) {
    ++csr.offsets[u + 1];
    csr.targets.push_back(v);
  }
  std::partial_sum(csr.offsets.begin(), csr.offsets.end(), csr.offsets.begin());
  return csr;
}

Graph Graph::from_arcs(std::size_t n, bool directed,
                       std::span<const std::pair<NodeId, NodeId>> arcs,
                       std::vector<std::int64_t> labels) {
  if (n > std::numeric_limits<NodeId>::max()) throw ContractError("graph too large");
  if (labels.empty()) {
    labels.resize(n);
    std::iota(labels.begin(), labels.end(), std::int64_t{0});
  }
  if (labels.size() != n) throw ContractError("label count does not match node count");

  std::vector<std::pair<NodeId, NodeId>> fwd;
  fwd.reserve(directed ? arcs.size() : 2 * arcs.size());
  for (const auto& [u, v] : arcs) {
    if (u >= n || v >= n) throw ContractError("arc endpoint out of range");
    if (u == v) continue;
    fwd.emplace_back(u, v);
    if (!directed) fwd.emplace_back(v, u);
  }

  Graph g;
  g.n_ = n;
  g.directed_ = directed;
  g.labels_ = std::make_shared<const std::vector<std::int64_t>>(std::move(labels));
  if (directed) {
    std::vector<std::pair<NodeId, NodeId>> rev;
    rev.reserve(fwd.size());
    for (const auto& [u, v] : fwd) rev.emplace_back(v, u);
    g.out_ = std::make_shared<const Csr>(make_csr(n, fwd));
    g.in_ = std::make_shared<const Csr>(make_csr(n, rev));
  } else {
    g.out_ = std::make_shared<const Csr>(make_csr(n, fwd));
    g.in_ = g.out_;
  }
  return g;
}

bool Graph::has_arc(NodeId u, NodeId v) const {
  const auto row = out_neighbors(u);
  return std::binary_search(row.begin(), row.end(), v);
}

Graph Graph::transposed() const {
  Graph t = *this;
  std::swap(t.out_, t.in_);
  return t;
}

bool operator==(const Graph& a, const Graph& b) {
  return a.n_ == b.n_ && a.directed_ == b.directed_ && a.out_->offsets == b.out_->offsets &&
         a.out_->targets == b.out_->targets && *a.labels_ == *b.labels_;
}

Graph build_graph(const EdgeList& edges, bool directed) {
  std::unordered_map<std::int64_t, NodeId> index;
  std::vector<std::int64_t> labels;
  auto id_of = [&](std::int64_t raw) {
    if (raw < 0) throw ContractError("negative node id " + std::to_string(raw));
    auto [it, inserted] = index.try_emplace(raw, static_cast<NodeId>(labels.size()));
    if (inserted) labels.push_back(raw);
    return it->second;
  };
  std::vector<std::pair<NodeId, NodeId>> arcs;
  arcs.reserve(edges.edges.size());
  for (const auto& [s, t] : edges.edges) {
    const NodeId u = id_of(s);
    const NodeId v = id_of(t);
    arcs.emplace_back(u, v);
  }
  const std::size_t n = labels.size();
  return Graph::from_arcs(n, directed, arcs, std::move(labels));
}

std::pair<Graph, std::vector<NodeId>> induced_subgraph(const Graph& g,
                                                       const std::vector<bool>& keep) {
  const std::size_t n = g.num_nodes();
  if (keep.size() != n) throw ContractError("keep mask length mismatch");
  std::vector<std::int64_t> new_index(n, -1);
  std::vector<NodeId> old_of_new;
  std::vector<std::int64_t> labels;
  for (NodeId v = 0; v < n; ++v) {
    if (!keep[v]) continue;
    new_index[v] = static_cast<std::int64_t>(old_of_new.size());
    old_of_new.push_back(v);
    labels.push_back(g.labels()[v]);
  }
  std::vector<std::pair<NodeId, NodeId>> arcs;
  for (NodeId v : old_of_new) {
    for (NodeId w : g.out_neighbors(v)) {
      if (new_index[w] < 0) continue;
      // Undirected graphs already store both orientations; keep one so
      // from_arcs does not double them.
      if (!g.directed() && w < v) continue;
      arcs.emplace_back(static_cast<NodeId>(new_index[v]), static_cast<NodeId>(new_index[w]));
    }
  }
  Graph sub = Graph::from_arcs(old_of_new.size(), g.directed(), arcs, std::move(labels));
  return {std::move(sub), std::move(old_of_new)};
}

namespace {

// Component id per node; ids are assigned in order of each component's
// smallest node index.
std::vector<std::size_t> weak_components(const Graph& g) {
  const std::size_t n = g.num_nodes();
  constexpr auto unset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> comp(n, unset);
  std::vector<NodeId> stack;
  std::size_t next = 0;
  for (NodeId s = 0; s < n; ++s) {
    if (comp[s] != unset) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      for (auto nbrs : {g.out_neighbors(v), g.in_neighbors(v)}) {
        for (NodeId w : nbrs) {
          if (comp[w] == unset) {
            comp[w] = next;
            stack.push_back(w);
          }
        }
      }
    }
    ++next;
  }
  return comp;
}

// Iterative Tarjan.
std::vector<std::size_t> strong_components(const Graph& g) {
  const std::size_t n = g.num_nodes();
  constexpr auto unset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(n, unset), low(n, 0), comp(n, unset);
  std::vector<bool> on_stack(n, false);
  std::vector<NodeId> scc_stack;
  struct Frame {
    NodeId v;
    std::size_t next_arc;
  };
  std::vector<Frame> call;
  std::size_t counter = 0;
  std::size_t next_comp = 0;

  for (NodeId root = 0; root < n; ++root) {
    if (index[root] != unset) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    scc_stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      const auto nbrs = g.out_neighbors(f.v);
      if (f.next_arc < nbrs.size()) {
        const NodeId w = nbrs[f.next_arc++];
        if (index[w] == unset) {
          index[w] = low[w] = counter++;
          scc_stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const NodeId v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        NodeId w;
        do {
          w = scc_stack.back();
          scc_stack.pop_back();
          on_stack[w] = false;
          comp[w] = next_comp;
        } while (w != v);
        ++next_comp;
      }
    }
  }
  return comp;
}

}  // namespace

ComponentResult largest_component(const Graph& g, ComponentMode mode) {
  const std::size_t n = g.num_nodes();
  if (n == 0) throw ContractError("largest_component requires at least one node");
  const bool strong = mode == ComponentMode::strong && g.directed();
  const auto comp = strong ? strong_components(g) : weak_components(g);

  const std::size_t ncomp = *std::max_element(comp.begin(), comp.end()) + 1;
  std::vector<std::size_t> size(ncomp, 0);
  std::vector<std::int64_t> min_label(ncomp, std::numeric_limits<std::int64_t>::max());
  const auto labels = g.labels();
  for (NodeId v = 0; v < n; ++v) {
    ++size[comp[v]];
    min_label[comp[v]] = std::min(min_label[comp[v]], labels[v]);
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < ncomp; ++c) {
    if (size[c] > size[best] || (size[c] == size[best] && min_label[c] < min_label[best])) {
      best = c;
    }
  }
  std::vector<bool> keep(n);
  for (NodeId v = 0; v < n; ++v) keep[v] = comp[v] == best;
  auto [sub, old_of_new] = induced_subgraph(g, keep);
  std::vector<std::int64_t> map(n, -1);
  for (std::size_t i = 0; i < old_of_new.size(); ++i) {
    map[old_of_new[i]] = static_cast<std::int64_t>(i);
  }
  return {std::move(sub), std::move(map)};
}

namespace {

bool parse_int(std::string_view tok, std::int64_t& out) {
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) toks.push_back(line.substr(i, j - i));
    i = j;
  }
  return toks;
}

}  // namespace

EdgeList load_edge_list(const std::filesystem::path& path, bool directed) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open edge list " + path.string());
  EdgeList list;
  list.directed = directed;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] == '#') continue;
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() != 2) {
      throw ParseError(path.string() + ": expected two node ids", lineno);
    }
    std::int64_t s = 0, t = 0;
    if (!parse_int(toks[0], s) || !parse_int(toks[1], t)) {
      throw ParseError(path.string() + ": non-integer token", lineno);
    }
    if (s < 0 || t < 0) throw ParseError(path.string() + ": negative node id", lineno);
    list.edges.emplace_back(s, t);
  }
  if (in.bad()) throw IoError("read error on " + path.string());
  return list;
}

void save_edge_list(const std::filesystem::path& path, const Graph& g) {
  std::string out;
  const auto labels = g.labels();
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    for (NodeId w : g.out_neighbors(v)) {
      if (!g.directed() && w < v) continue;
      out += std::to_string(labels[v]);
      out += ' ';
      out += std::to_string(labels[w]);
      out += '\n';
    }
  }
  write_file_atomic(path, out);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw NumericError("cannot format double");
  return {buf, ptr};
}

void save_scores(const std::filesystem::path& path, std::span<const std::int64_t> ids,
                 std::span<const double> scores) {
  if (ids.size() != scores.size()) throw ContractError("ids/scores length mismatch");
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out += std::to_string(ids[i]);
    out += '\t';
    out += format_double(scores[i]);
    out += '\n';
  }
  write_file_atomic(path, out);
}

std::pair<std::vector<std::int64_t>, std::vector<double>> load_scores(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open score file " + path.string());
  std::vector<std::int64_t> ids;
  std::vector<double> scores;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto toks = split_ws(line);
    std::int64_t id = 0;
    double s = 0;
    if (toks.size() != 2 || !parse_int(toks[0], id)) {
      throw ParseError(path.string() + ": expected 'id<TAB>score'", lineno);
    }
    const auto* end = toks[1].data() + toks[1].size();
    auto [ptr, ec] = std::from_chars(toks[1].data(), end, s);
    if (ec != std::errc() || ptr != end) {
      throw ParseError(path.string() + ": bad score value", lineno);
    }
    ids.push_back(id);
    scores.push_back(s);
  }
  return {std::move(ids), std::move(scores)};
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp." + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << contents;
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace brava
