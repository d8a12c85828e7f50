#include "pw/structure.hpp"

#include <algorithm>
#include <unordered_set>

namespace pw {

namespace {

struct Decomposed {
  std::vector<VariableDecl> visibles;
  std::vector<VariableDecl> latents;
  std::vector<std::pair<std::string, std::string>> edges;
};

Decomposed decompose(const CausalStructure& g) {
  Decomposed d;
  for (int v : g.visible_set()) {
    d.visibles.push_back({g.name_of(v), g.cardinality(v)});
  }
  for (int l : g.latent_set()) {
    d.latents.push_back({g.name_of(l), g.cardinality(l)});
  }
  d.edges = g.graph().edge_list();
  return d;
}

}  // namespace

CausalStructure CausalStructure::make(
    const std::vector<VariableDecl>& visibles,
    const std::vector<VariableDecl>& latents,
    const std::vector<std::pair<std::string, std::string>>& edges) {
  CausalStructure g;
  std::vector<std::string> names;
  for (const auto& d : visibles) {
    if (d.cardinality < 1) {
      fail(ErrorCode::CardinalityMismatch,
           "visible '" + d.name + "' needs a cardinality >= 1");
    }
    names.push_back(d.name);
    g.cards_.push_back(d.cardinality);
  }
  for (const auto& d : latents) {
    if (d.cardinality < 0) {
      fail(ErrorCode::CardinalityMismatch,
           "latent '" + d.name + "' has a negative cardinality");
    }
    names.push_back(d.name);
    g.cards_.push_back(d.cardinality);
  }
  g.graph_ = DirectedGraph::build(names, edges);
  g.visible_count_ = static_cast<int>(visibles.size());
  for (int i = 0; i < g.graph_.vertex_count(); ++i) {
    (i < g.visible_count_ ? g.visibles_ : g.latents_).push_back(i);
  }
  if (!g.graph_.is_acyclic()) {
    fail(ErrorCode::CyclicGraph, "causal structure has a directed cycle");
  }
  return g;
}

bool CausalStructure::is_visible(int v) const {
  graph_.check_vertex(v);
  return v < visible_count_;
}

bool CausalStructure::is_latent(int v) const { return !is_visible(v); }

int CausalStructure::cardinality(int v) const {
  graph_.check_vertex(v);
  return cards_[v];
}

VertexSet CausalStructure::vpa(int q) const {
  VertexSet out;
  for (int p : graph_.parents(q)) {
    if (is_visible(p)) out.push_back(p);
  }
  return out;
}

VertexSet CausalStructure::lpa(int q) const {
  VertexSet out;
  for (int p : graph_.parents(q)) {
    if (is_latent(p)) out.push_back(p);
  }
  return out;
}

CausalStructure CausalStructure::with_latent_cardinality(int latent,
                                                         int card) const {
  if (!is_latent(latent)) {
    fail(ErrorCode::NotLatent, "'" + name_of(latent) + "' is visible");
  }
  CausalStructure g = *this;
  g.cards_[latent] = card;
  return g;
}

bool CausalStructure::operator==(const CausalStructure& other) const {
  return graph_ == other.graph_ && visible_count_ == other.visible_count_ &&
         cards_ == other.cards_;
}

CausalStructure exogenize(const CausalStructure& g, int latent) {
  if (!g.is_latent(latent)) {
    fail(ErrorCode::NotLatent, "'" + g.name_of(latent) + "' is visible");
  }
  const VertexSet& pa = g.graph().parents(latent);
  if (pa.empty()) return g;
  const VertexSet& ch = g.graph().children(latent);

  Decomposed d = decompose(g);
  const std::string& lname = g.name_of(latent);
  std::erase_if(d.edges, [&](const auto& e) { return e.second == lname; });
  for (int p : pa) {
    for (int c : ch) {
      if (!g.graph().has_edge(p, c)) {
        d.edges.emplace_back(g.name_of(p), g.name_of(c));
      }
    }
  }
  return CausalStructure::make(d.visibles, d.latents, d.edges);
}

namespace {

CausalStructure drop_latent(const CausalStructure& g, int latent) {
  Decomposed d = decompose(g);
  const std::string& lname = g.name_of(latent);
  std::erase_if(d.latents,
                [&](const VariableDecl& v) { return v.name == lname; });
  std::erase_if(d.edges, [&](const auto& e) {
    return e.first == lname || e.second == lname;
  });
  return CausalStructure::make(d.visibles, d.latents, d.edges);
}

// First deletable latent under the reduction rules, -1 if none. Childless
// latents go first; for containment, the contained latent goes, and for
// equal children sets the one with the larger index goes.
int find_reducible_latent(const CausalStructure& g) {
  for (int l : g.latent_set()) {
    if (g.graph().children(l).empty()) return l;
  }
  for (int l1 : g.latent_set()) {
    const VertexSet& c1 = g.graph().children(l1);
    for (int l2 : g.latent_set()) {
      if (l1 == l2) continue;
      const VertexSet& c2 = g.graph().children(l2);
      if (!set_is_subset(c1, c2)) continue;
      if (c1.size() == c2.size() && l1 < l2) continue;
      return l1;
    }
  }
  return -1;
}

}  // namespace

CausalStructure simplicial_reduce(const CausalStructure& g) {
  for (int l : g.latent_set()) {
    if (!g.graph().parents(l).empty()) {
      fail(ErrorCode::LatentNotExogenous,
           "latent '" + g.name_of(l) + "' has parents");
    }
  }
  CausalStructure out = g;
  for (int l = find_reducible_latent(out); l >= 0;
       l = find_reducible_latent(out)) {
    out = drop_latent(out, l);
  }
  return out;
}

CausalStructure normalize(const CausalStructure& g, NormalizeDelta* delta) {
  CausalStructure out = g;

  // Exogenize until no latent has parents. A latent stays exogenous once
  // processed: no step creates an edge into a vertex without in-edges.
  bool changed = true;
  while (changed) {
    changed = false;
    for (int l : out.latent_set()) {
      if (!out.graph().parents(l).empty()) {
        out = exogenize(out, l);
        changed = true;
        break;
      }
    }
  }

  out = simplicial_reduce(out);

  // Covering: every visible without a latent parent gets a fresh private
  // exogenous latent, so deterministic tables can carry its local noise.
  Decomposed d = decompose(out);
  std::unordered_set<std::string> taken;
  for (const auto& v : d.visibles) taken.insert(v.name);
  for (const auto& l : d.latents) taken.insert(l.name);
  std::vector<std::string> added_latents;
  for (int v : out.visible_set()) {
    if (!out.lpa(v).empty()) continue;
    std::string base = "e_" + out.name_of(v);
    std::string name = base;
    for (int k = 2; taken.count(name); ++k) {
      name = base + "_" + std::to_string(k);
    }
    taken.insert(name);
    d.latents.push_back({name, 0});
    d.edges.emplace_back(name, out.name_of(v));
    added_latents.push_back(name);
  }
  CausalStructure covered = CausalStructure::make(d.visibles, d.latents, d.edges);

  if (delta) {
    auto edge_key = [](const std::pair<std::string, std::string>& e) {
      return e.first + "\t" + e.second;
    };
    std::unordered_set<std::string> before, after;
    for (const auto& e : g.graph().edge_list()) before.insert(edge_key(e));
    for (const auto& e : covered.graph().edge_list()) after.insert(edge_key(e));
    for (const auto& e : covered.graph().edge_list()) {
      if (!before.count(edge_key(e))) delta->edges_added.push_back(e);
    }
    for (const auto& e : g.graph().edge_list()) {
      if (!after.count(edge_key(e))) delta->edges_removed.push_back(e);
    }
    std::unordered_set<std::string> final_names(
        covered.graph().vertex_names().begin(),
        covered.graph().vertex_names().end());
    for (int l : g.latent_set()) {
      if (!final_names.count(g.name_of(l))) {
        delta->latents_removed.push_back(g.name_of(l));
      }
    }
    delta->latents_added = added_latents;
  }
  return covered;
}

bool is_exo_simplicial(const CausalStructure& g) {
  std::vector<VertexSet> facets;
  for (int l : g.latent_set()) {
    if (!g.graph().parents(l).empty()) return false;
    const VertexSet& ch = g.graph().children(l);
    if (ch.empty()) return false;
    for (int c : ch) {
      if (g.is_latent(c)) return false;
    }
    facets.push_back(ch);
  }
  for (size_t i = 0; i < facets.size(); ++i) {
    for (size_t j = 0; j < facets.size(); ++j) {
      if (i != j && set_is_subset(facets[i], facets[j])) return false;
    }
  }
  VertexSet covered;
  for (const auto& f : facets) covered = set_union_of(covered, f);
  return covered == g.visible_set();
}

std::vector<VertexSet> simplicial_facets(const CausalStructure& g) {
  std::vector<VertexSet> facets;
  for (int l : g.latent_set()) facets.push_back(g.graph().children(l));
  std::sort(facets.begin(), facets.end());
  return facets;
}

VertexSet district(const CausalStructure& g, int latent) {
  if (!g.is_latent(latent)) {
    fail(ErrorCode::NotLatent, "'" + g.name_of(latent) + "' is visible");
  }
  if (!is_exo_simplicial(g)) {
    fail(ErrorCode::NotExoSimplicial, "district needs an exo-simplicial input");
  }
  // BFS over the bipartite adjacency latent ~ ch(latent).
  std::vector<char> seen_latent(g.vertex_count(), 0);
  std::vector<char> seen_visible(g.vertex_count(), 0);
  std::vector<int> frontier{latent};
  seen_latent[latent] = 1;
  while (!frontier.empty()) {
    int l = frontier.back();
    frontier.pop_back();
    for (int v : g.graph().children(l)) {
      if (seen_visible[v]) continue;
      seen_visible[v] = 1;
      for (int l2 : g.lpa(v)) {
        if (!seen_latent[l2]) {
          seen_latent[l2] = 1;
          frontier.push_back(l2);
        }
      }
    }
  }
  VertexSet out;
  for (int v : g.visible_set()) {
    if (seen_visible[v]) out.push_back(v);
  }
  return out;
}

namespace {

BigInt outcome_space(const CausalStructure& g, const VertexSet& vs) {
  BigInt n = 1;
  for (int v : vs) n *= g.cardinality(v);
  return n;
}

}  // namespace

CardinalityBound cardinality_bound(const CausalStructure& g, int latent) {
  CardinalityBound b;
  b.latent = latent;
  b.district_set = district(g, latent);

  VertexSet visible_parents;
  for (int v : b.district_set) {
    visible_parents = set_union_of(visible_parents, g.vpa(v));
  }
  b.conditioning = set_difference_of(visible_parents, b.district_set);
  b.descendant_part =
      set_intersection_of(g.graph().descendants({latent}), b.district_set);
  b.remainder = set_difference_of(b.district_set, b.descendant_part);

  b.bound = outcome_space(g, b.conditioning) *
            (outcome_space(g, b.district_set) - outcome_space(g, b.remainder));
  if (b.bound < 1) b.bound = 1;
  return b;
}

BigInt max_cardinality_bound(const CausalStructure& g) {
  BigInt best = 1;
  for (int l : g.latent_set()) {
    BigInt b = cardinality_bound(g, l).bound;
    if (b > best) best = b;
  }
  return best;
}

}  // namespace pw
