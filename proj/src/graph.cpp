#include "pw/graph.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>
#include <unordered_set>

namespace pw {

VertexSet set_union_of(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

VertexSet set_intersection_of(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

VertexSet set_difference_of(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

bool set_contains(const VertexSet& s, int v) {
  return std::binary_search(s.begin(), s.end(), v);
}

bool set_is_subset(const VertexSet& a, const VertexSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

DirectedGraph DirectedGraph::build(
    const std::vector<std::string>& vertex_names,
    const std::vector<std::pair<std::string, std::string>>& edges) {
  DirectedGraph g;
  g.names_ = vertex_names;
  std::unordered_map<std::string, int> index;
  for (int i = 0; i < static_cast<int>(vertex_names.size()); ++i) {
    auto [it, inserted] = index.emplace(vertex_names[i], i);
    if (!inserted) {
      fail(ErrorCode::DuplicateVertex, "vertex '" + vertex_names[i] + "'");
    }
  }
  g.parents_.resize(vertex_names.size());
  g.children_.resize(vertex_names.size());
  std::unordered_set<int64_t> seen;
  for (const auto& [from, to] : edges) {
    auto fi = index.find(from);
    auto ti = index.find(to);
    if (fi == index.end()) {
      fail(ErrorCode::UnknownEndpoint, "edge source '" + from + "'");
    }
    if (ti == index.end()) {
      fail(ErrorCode::UnknownEndpoint, "edge target '" + to + "'");
    }
    int64_t code = static_cast<int64_t>(fi->second) *
                       static_cast<int64_t>(vertex_names.size()) +
                   ti->second;
    if (!seen.insert(code).second) {
      fail(ErrorCode::DuplicateEdge, "edge " + from + " -> " + to);
    }
    g.children_[fi->second].push_back(ti->second);
    g.parents_[ti->second].push_back(fi->second);
    ++g.edge_count_;
  }
  for (auto& v : g.parents_) std::sort(v.begin(), v.end());
  for (auto& v : g.children_) std::sort(v.begin(), v.end());
  return g;
}

const std::string& DirectedGraph::name_of(int v) const {
  check_vertex(v);
  return names_[v];
}

bool DirectedGraph::has_vertex(std::string_view name) const {
  for (const auto& n : names_) {
    if (n == name) return true;
  }
  return false;
}

int DirectedGraph::index_of(std::string_view name) const {
  for (int i = 0; i < vertex_count(); ++i) {
    if (names_[i] == name) return i;
  }
  fail(ErrorCode::UnknownVertex, "vertex '" + std::string(name) + "'");
}

void DirectedGraph::check_vertex(int v) const {
  if (v < 0 || v >= vertex_count()) {
    fail(ErrorCode::UnknownVertex, "index " + std::to_string(v));
  }
}

const VertexSet& DirectedGraph::parents(int v) const {
  check_vertex(v);
  return parents_[v];
}

const VertexSet& DirectedGraph::children(int v) const {
  check_vertex(v);
  return children_[v];
}

VertexSet DirectedGraph::parents_of(const VertexSet& vs) const {
  VertexSet out;
  for (int v : vs) out = set_union_of(out, parents(v));
  return out;
}

VertexSet DirectedGraph::children_of(const VertexSet& vs) const {
  VertexSet out;
  for (int v : vs) out = set_union_of(out, children(v));
  return out;
}

namespace {

VertexSet reach(const std::vector<VertexSet>& step, const VertexSet& start,
                int n) {
  std::vector<char> hit(n, 0);
  std::deque<int> queue;
  for (int v : start) {
    for (int u : step[v]) {
      if (!hit[u]) {
        hit[u] = 1;
        queue.push_back(u);
      }
    }
  }
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int u : step[v]) {
      if (!hit[u]) {
        hit[u] = 1;
        queue.push_back(u);
      }
    }
  }
  VertexSet out;
  for (int v = 0; v < n; ++v) {
    if (hit[v]) out.push_back(v);
  }
  return out;
}

}  // namespace

VertexSet DirectedGraph::ancestors(const VertexSet& vs) const {
  for (int v : vs) check_vertex(v);
  return reach(parents_, vs, vertex_count());
}

VertexSet DirectedGraph::descendants(const VertexSet& vs) const {
  for (int v : vs) check_vertex(v);
  return reach(children_, vs, vertex_count());
}

bool DirectedGraph::has_edge(int from, int to) const {
  check_vertex(from);
  check_vertex(to);
  return set_contains(children_[from], to);
}

std::vector<std::pair<std::string, std::string>> DirectedGraph::edge_list()
    const {
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(edge_count_);
  for (int v = 0; v < vertex_count(); ++v) {
    for (int c : children_[v]) out.emplace_back(names_[v], names_[c]);
  }
  return out;
}

DirectedGraph DirectedGraph::induced_subgraph(const VertexSet& keep) const {
  for (int v : keep) check_vertex(v);
  std::vector<std::string> names;
  names.reserve(keep.size());
  std::vector<char> kept(vertex_count(), 0);
  for (int v : keep) kept[v] = 1;
  // keep declaration order
  for (int v = 0; v < vertex_count(); ++v) {
    if (kept[v]) names.push_back(names_[v]);
  }
  std::vector<std::pair<std::string, std::string>> edges;
  for (int v = 0; v < vertex_count(); ++v) {
    if (!kept[v]) continue;
    for (int c : children_[v]) {
      if (kept[c]) edges.emplace_back(names_[v], names_[c]);
    }
  }
  return build(names, edges);
}

std::vector<int> DirectedGraph::topological_order() const {
  std::vector<int> indegree(vertex_count());
  for (int v = 0; v < vertex_count(); ++v) {
    indegree[v] = static_cast<int>(parents_[v].size());
  }
  // min-index selection keeps the order deterministic
  std::vector<int> order;
  order.reserve(vertex_count());
  std::vector<char> emitted(vertex_count(), 0);
  for (int step = 0; step < vertex_count(); ++step) {
    int pick = -1;
    for (int v = 0; v < vertex_count(); ++v) {
      if (!emitted[v] && indegree[v] == 0) {
        pick = v;
        break;
      }
    }
    if (pick < 0) fail(ErrorCode::CyclicGraph, "graph has a directed cycle");
    emitted[pick] = 1;
    order.push_back(pick);
    for (int c : children_[pick]) --indegree[c];
  }
  return order;
}

bool DirectedGraph::is_acyclic() const {
  // Self-loops keep their vertex at indegree >= 1, so q -> q is a cycle.
  try {
    topological_order();
  } catch (const Error&) {
    return false;
  }
  return true;
}

bool DirectedGraph::operator==(const DirectedGraph& other) const {
  return names_ == other.names_ && parents_ == other.parents_;
}

}  // namespace pw
