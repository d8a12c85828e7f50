#pragma once

#include <optional>

#include "pw/possibilistic.hpp"

namespace pw {

struct EnumerationOptions {
  uint64_t node_budget = 100000000ULL;  // hard cap, exceeding throws
  bool symmetry_reduction = true;
  bool keep_witnesses = false;
  int threads = 1;
};

// All distributions induced by uniform latent distributions at fixed latent
// cardinalities, stored as exact count vectors over prod(k_l), deduplicated
// and canonically sorted.
struct UniformSet {
  VariableList vars;
  std::vector<int> latent_cards;
  int64_t denominator = 1;
  std::vector<std::vector<int64_t>> counts;
  std::vector<Model> witnesses;  // parallel to counts when kept
  uint64_t nodes_explored = 0;

  Distribution member(size_t index) const;
};

// Depth-first enumeration over reachable table entries only; non-canonical
// assignments under the latent relabeling group are skipped when symmetry
// reduction is on. The resulting set is identical either way.
UniformSet enumerate_uniform(const CausalStructure& g,
                             const std::vector<int>& latent_cards,
                             const EnumerationOptions& options = {});

struct NearestMember {
  Rational delta;
  size_t index = 0;
};

NearestMember min_distance_to_uniform(const Distribution& p,
                                      const UniformSet& u);

struct HierarchyResult {
  int order = 0;
  BigInt c_bound;
  Rational epsilon;
  bool pass = false;
  Rational min_delta;
  std::optional<Distribution> nearest;
  std::optional<Model> witness;
  size_t member_count = 0;
  uint64_t nodes_explored = 0;
};

struct OrderTestOptions {
  std::optional<BigInt> c_override;  // affects epsilon only
  EnumerationOptions enumeration;
};

// Order-K feasibility test: every latent cardinality is set to K, epsilon
// comes from the cardinality bounds (or the override), and the minimum exact
// distance to the uniformly induced set decides pass/fail.
HierarchyResult order_k_test(const CausalStructure& g, const Distribution& p,
                             int order, const OrderTestOptions& options = {});

}  // namespace pw
