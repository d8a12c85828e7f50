#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pw/graph.hpp"
#include "pw/rational.hpp"

namespace pw {

struct VariableDecl {
  std::string name;
  int cardinality = 0;  // 0 = unspecified (allowed for latents only)
};

// A DAG over visible and latent vertices with per-visible outcome
// cardinalities. Vertices are indexed visibles-first, each block in
// declaration order. Immutable once built.
class CausalStructure {
 public:
  static CausalStructure make(
      const std::vector<VariableDecl>& visibles,
      const std::vector<VariableDecl>& latents,
      const std::vector<std::pair<std::string, std::string>>& edges);

  const DirectedGraph& graph() const { return graph_; }
  int vertex_count() const { return graph_.vertex_count(); }
  int visible_count() const { return visible_count_; }
  int latent_count() const { return graph_.vertex_count() - visible_count_; }

  bool is_visible(int v) const;
  bool is_latent(int v) const;
  const VertexSet& visible_set() const { return visibles_; }
  const VertexSet& latent_set() const { return latents_; }

  // 0 when the latent cardinality was left unspecified.
  int cardinality(int v) const;
  const std::string& name_of(int v) const { return graph_.name_of(v); }
  int index_of(std::string_view name) const { return graph_.index_of(name); }

  VertexSet vpa(int q) const;
  VertexSet lpa(int q) const;

  CausalStructure with_latent_cardinality(int latent, int card) const;

  bool operator==(const CausalStructure& other) const;

 private:
  DirectedGraph graph_;
  int visible_count_ = 0;
  std::vector<int> cards_;
  VertexSet visibles_;
  VertexSet latents_;
};

CausalStructure exogenize(const CausalStructure& g, int latent);
CausalStructure simplicial_reduce(const CausalStructure& g);

struct NormalizeDelta {
  std::vector<std::pair<std::string, std::string>> edges_added;
  std::vector<std::pair<std::string, std::string>> edges_removed;
  std::vector<std::string> latents_removed;
  std::vector<std::string> latents_added;
};

// Exogenize every latent, drop nested and childless latents, then give each
// uncovered visible a fresh private exogenous latent parent. The result is
// exo-simplicial and observationally equivalent to the input.
CausalStructure normalize(const CausalStructure& g,
                          NormalizeDelta* delta = nullptr);

bool is_exo_simplicial(const CausalStructure& g);

// Children sets of the latents, canonical-sorted.
std::vector<VertexSet> simplicial_facets(const CausalStructure& g);

// Maximal set of visible vertices connected to the latent by undirected
// paths that alternate visible/latent vertices.
VertexSet district(const CausalStructure& g, int latent);

struct CardinalityBound {
  int latent = -1;
  VertexSet district_set;
  VertexSet conditioning;     // visible parents of the district, outside it
  VertexSet descendant_part;  // descendants of the latent inside the district
  VertexSet remainder;
  BigInt bound;
};

// Free-parameter count of the conditional table over the district, minus the
// part pinned by the remainder's marginal:
//   |Omega_conditioning| * (|Omega_district| - |Omega_remainder|),
// clamped to >= 1. This counting rule is our reading of the affine dimension
// of the conditional simplex; see README for the caveat.
CardinalityBound cardinality_bound(const CausalStructure& g, int latent);

// max over latents of cardinality_bound(...).bound; 1 when no latents.
BigInt max_cardinality_bound(const CausalStructure& g);

}  // namespace pw
