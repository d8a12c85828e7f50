#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pw/errors.hpp"

namespace pw {

// Vertex sets are sorted vectors of dense indices. Every query is
// deterministic given the declaration order of the vertices.
using VertexSet = std::vector<int>;

VertexSet set_union_of(const VertexSet& a, const VertexSet& b);
VertexSet set_intersection_of(const VertexSet& a, const VertexSet& b);
VertexSet set_difference_of(const VertexSet& a, const VertexSet& b);
bool set_contains(const VertexSet& s, int v);
bool set_is_subset(const VertexSet& a, const VertexSet& b);

// Immutable after construction; queries are read-only and safe to share.
class DirectedGraph {
 public:
  static DirectedGraph build(
      const std::vector<std::string>& vertex_names,
      const std::vector<std::pair<std::string, std::string>>& edges);

  int vertex_count() const { return static_cast<int>(names_.size()); }
  int edge_count() const { return edge_count_; }
  const std::vector<std::string>& vertex_names() const { return names_; }
  const std::string& name_of(int v) const;
  bool has_vertex(std::string_view name) const;
  int index_of(std::string_view name) const;

  const VertexSet& parents(int v) const;
  const VertexSet& children(int v) const;
  VertexSet parents_of(const VertexSet& vs) const;
  VertexSet children_of(const VertexSet& vs) const;

  // Reachability via at least one edge; a vertex is its own ancestor only
  // when it lies on a directed cycle.
  VertexSet ancestors(const VertexSet& vs) const;
  VertexSet descendants(const VertexSet& vs) const;

  bool has_edge(int from, int to) const;
  std::vector<std::pair<std::string, std::string>> edge_list() const;

  DirectedGraph induced_subgraph(const VertexSet& keep) const;

  bool is_acyclic() const;
  // Kahn's algorithm, ties broken by declaration index.
  std::vector<int> topological_order() const;

  void check_vertex(int v) const;

  bool operator==(const DirectedGraph& other) const;

 private:
  std::vector<std::string> names_;
  std::vector<VertexSet> parents_;
  std::vector<VertexSet> children_;
  int edge_count_ = 0;
};

}  // namespace pw
