#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "pw/distribution.hpp"
#include "pw/structure.hpp"

namespace pw {

// Key layout for the deterministic response table of each visible vertex.
// Components: visible parents in topological order, then latent parents in
// declaration order. Keys pack big-endian so numeric order equals
// lexicographic tuple order.
struct TableShape {
  struct Row {
    int visible = -1;
    std::vector<int> vpa;      // topologically sorted
    std::vector<int> lpa;      // declaration-index sorted
    std::vector<int> radices;  // one per key component
    int64_t key_count = 0;
  };

  std::vector<Row> rows;        // one per visible, declaration order
  std::vector<int> topo_rows;   // row indices in visible topological order

  int64_t pack_key(int row, const std::vector<int>& components) const;
  std::vector<int> unpack_key(int row, int64_t key) const;
};

TableShape make_table_shape(const CausalStructure& g,
                            const std::vector<int>& latent_cards);

// Partial deterministic response tables; -1 marks unassigned entries.
struct FunctionTable {
  std::vector<std::vector<int16_t>> values;

  static FunctionTable empty(const TableShape& shape);
  bool operator==(const FunctionTable&) const = default;
};

struct LatentSpec {
  std::vector<int> cardinalities;                    // declaration order
  std::vector<std::vector<Rational>> distributions;  // empty = uniform

  static LatentSpec uniform(std::vector<int> cards);
  bool is_uniform() const;
};

// A causal structure, latent cardinalities and a (possibly partial) response
// table. Worlds are derived views, one per latent valuation.
class WorldsDiagram {
 public:
  WorldsDiagram(std::shared_ptr<const CausalStructure> structure,
                std::vector<int> latent_cards);

  const CausalStructure& structure() const { return *structure_; }
  std::shared_ptr<const CausalStructure> structure_ptr() const {
    return structure_;
  }
  const std::vector<int>& latent_cards() const { return latent_cards_; }
  const TableShape& shape() const { return shape_; }
  const FunctionTable& table() const { return table_; }
  FunctionTable& table() { return table_; }

  int64_t world_count() const { return world_count_; }
  std::vector<int> unpack_world(int64_t world) const;
  int64_t pack_world(const std::vector<int>& lambda) const;

 private:
  std::shared_ptr<const CausalStructure> structure_;
  std::vector<int> latent_cards_;
  TableShape shape_;
  FunctionTable table_;
  int64_t world_count_ = 1;
};

struct WorldEvaluation {
  std::vector<int16_t> values;  // per visible, declaration order; -1 unknown
  bool total = false;
  int blocked_row = -1;     // topologically first row whose key is computable
  int64_t blocked_key = -1; // but unassigned; -1 when none
};

// Evaluates visibles in topological order; a vertex whose key is computable
// but unassigned blocks, and vertices downstream of a block stay unknown.
WorldEvaluation evaluate_world(const WorldsDiagram& d,
                               const std::vector<int>& lambda);

// All (row, key) pairs queried when evaluating every world against the
// current table. Keys outside this set are superfluous.
std::vector<std::pair<int, int64_t>> reachable_keys(const WorldsDiagram& d);

// Probabilistic sum over worlds of point masses at the world observations.
// Requires the table to be total on reachable keys.
Distribution simulate(const WorldsDiagram& d, const LatentSpec& latents);
CountVector simulate_uniform_counts(const WorldsDiagram& d);

// Relabels the latent components of every key; the world observed at the
// permuted valuation equals the original world's observation.
WorldsDiagram apply_latent_permutation(
    const WorldsDiagram& d, const std::vector<std::vector<int>>& perms);

inline constexpr uint64_t kDefaultOrbitCap = 1000000;

// Precomputed inverse key relabelings, one entry per group element of the
// latent relabeling action: inverse_key_maps[g][row][key] is the key whose
// value lands at `key` after relabeling.
struct OrbitMaps {
  std::vector<std::vector<std::vector<int32_t>>> inverse_key_maps;
};

OrbitMaps make_orbit_maps(const WorldsDiagram& d,
                          uint64_t orbit_cap = kDefaultOrbitCap);
bool is_canonical_table(const FunctionTable& t, const OrbitMaps& maps);

// Partial-table pruning test: false when no completion can be canonical.
bool partial_canonical_possible(const FunctionTable& t, const OrbitMaps& maps);

// Lexicographically minimal table encoding over the full latent-relabeling
// orbit. Idempotent and orbit-invariant.
WorldsDiagram canonical_form(const WorldsDiagram& d,
                             uint64_t orbit_cap = kDefaultOrbitCap);

// True when no relabeling yields a strictly smaller encoding.
bool is_canonical_form(const WorldsDiagram& d,
                       uint64_t orbit_cap = kDefaultOrbitCap);

// A complete functional causal model with uniform-ready latent cardinalities.
struct Model {
  std::shared_ptr<const CausalStructure> structure;
  std::vector<int> latent_cards;
  FunctionTable table;
};

WorldsDiagram diagram_of(const Model& model);

}  // namespace pw
