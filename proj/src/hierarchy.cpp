#include "pw/hierarchy.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <thread>

namespace pw {

namespace {

struct EnumInstance {
  std::shared_ptr<const CausalStructure> structure;
  std::vector<int> latent_cards;
  TableShape shape;
  int64_t world_count = 1;
  int visible_count = 0;
  std::vector<std::vector<int64_t>> latent_offset;  // [row][world]
  std::vector<std::vector<int64_t>> vpa_stride;     // [row][j]
  std::vector<int> out_card;                        // per row
  VariableList vars;
  int64_t space = 1;
  OrbitMaps orbit;
  bool use_symmetry = true;
  uint64_t budget = 0;
};

EnumInstance build_enum_instance(const CausalStructure& g,
                                 const std::vector<int>& latent_cards,
                                 const EnumerationOptions& options) {
  if (!is_exo_simplicial(g)) {
    fail(ErrorCode::NotExoSimplicial,
         "enumeration needs an exo-simplicial structure");
  }
  EnumInstance inst;
  inst.structure = std::make_shared<const CausalStructure>(g);
  inst.latent_cards = latent_cards;
  inst.shape = make_table_shape(g, latent_cards);
  inst.visible_count = g.visible_count();
  for (int c : latent_cards) inst.world_count *= c;

  for (int v : g.visible_set()) {
    inst.vars.names.push_back(g.name_of(v));
    inst.vars.cardinalities.push_back(g.cardinality(v));
    inst.out_card.push_back(g.cardinality(v));
  }
  inst.space = inst.vars.outcome_space_size();

  std::vector<int> lambda(g.latent_count());
  for (size_t row = 0; row < inst.shape.rows.size(); ++row) {
    const auto& r = inst.shape.rows[row];
    std::vector<int64_t> strides(r.radices.size(), 1);
    for (size_t i = r.radices.size(); i-- > 1;) {
      strides[i - 1] = strides[i] * r.radices[i];
    }
    inst.vpa_stride.emplace_back(strides.begin(),
                                 strides.begin() + r.vpa.size());
    std::vector<int64_t> offsets(inst.world_count);
    for (int64_t world = 0; world < inst.world_count; ++world) {
      int64_t rem = world;
      for (size_t i = lambda.size(); i-- > 0;) {
        lambda[i] = static_cast<int>(rem % latent_cards[i]);
        rem /= latent_cards[i];
      }
      int64_t off = 0;
      for (size_t i = 0; i < r.lpa.size(); ++i) {
        off += lambda[r.lpa[i] - inst.visible_count] *
               strides[r.vpa.size() + i];
      }
      offsets[world] = off;
    }
    inst.latent_offset.push_back(std::move(offsets));
  }

  inst.use_symmetry = options.symmetry_reduction;
  if (inst.use_symmetry) {
    WorldsDiagram d(inst.structure, latent_cards);
    inst.orbit = make_orbit_maps(d);
  }
  inst.budget = options.node_budget;
  return inst;
}

using Table = std::vector<std::vector<int16_t>>;

// Returns the first blocked (row, key) scanning worlds from start_world, or
// {-1,-1,-1} when every world is total. Assignments only complete worlds, so
// the first incomplete world index never decreases along a search path.
struct Blocked {
  int64_t world = -1;
  int row = -1;
  int64_t key = -1;
};

Blocked first_blocked(const EnumInstance& inst, const Table& table,
                      int64_t start_world, std::vector<int16_t>& values) {
  for (int64_t world = start_world; world < inst.world_count; ++world) {
    values.assign(inst.visible_count, -1);
    for (int row : inst.shape.topo_rows) {
      const auto& r = inst.shape.rows[row];
      int64_t key = inst.latent_offset[row][world];
      bool computable = true;
      for (size_t j = 0; j < r.vpa.size(); ++j) {
        int16_t pv = values[r.vpa[j]];
        if (pv < 0) {
          computable = false;
          break;
        }
        key += pv * inst.vpa_stride[row][j];
      }
      if (!computable) continue;
      int16_t value = table[row][key];
      if (value >= 0) {
        values[row] = value;
      } else {
        return Blocked{world, row, key};
      }
    }
  }
  return Blocked{};
}

std::vector<int64_t> counts_of(const EnumInstance& inst, const Table& table) {
  std::vector<int64_t> counts(inst.space, 0);
  std::vector<int16_t> values;
  for (int64_t world = 0; world < inst.world_count; ++world) {
    values.assign(inst.visible_count, -1);
    for (int row : inst.shape.topo_rows) {
      const auto& r = inst.shape.rows[row];
      int64_t key = inst.latent_offset[row][world];
      for (size_t j = 0; j < r.vpa.size(); ++j) {
        key += values[r.vpa[j]] * inst.vpa_stride[row][j];
      }
      values[row] = table[row][key];
    }
    int64_t idx = 0;
    for (int v = 0; v < inst.visible_count; ++v) {
      idx = idx * inst.out_card[v] + values[v];
    }
    ++counts[idx];
  }
  return counts;
}

struct WorkerResult {
  std::map<std::vector<int64_t>, Table> found;
  uint64_t nodes = 0;
};

void enum_dfs(const EnumInstance& inst, Table& table, int64_t start_world,
              std::atomic<uint64_t>& total_nodes, WorkerResult& out,
              bool keep_witnesses) {
  std::vector<int16_t> values;
  Blocked b = first_blocked(inst, table, start_world, values);
  if (b.row < 0) {
    if (inst.use_symmetry) {
      FunctionTable ft;
      ft.values = std::move(table);
      bool canonical = is_canonical_table(ft, inst.orbit);
      table = std::move(ft.values);
      if (!canonical) return;
    }
    auto counts = counts_of(inst, table);
    auto it = out.found.find(counts);
    if (it == out.found.end()) {
      out.found.emplace(std::move(counts),
                        keep_witnesses ? table : Table{});
    }
    return;
  }
  for (int16_t value = 0; value < inst.out_card[b.row]; ++value) {
    ++out.nodes;
    if (total_nodes.fetch_add(1) + 1 > inst.budget) {
      fail(ErrorCode::EnumerationBudgetExceeded,
           "enumeration exceeded " + std::to_string(inst.budget) + " nodes");
    }
    table[b.row][b.key] = value;
    bool viable = true;
    if (inst.use_symmetry) {
      FunctionTable ft;
      ft.values = std::move(table);
      viable = partial_canonical_possible(ft, inst.orbit);
      table = std::move(ft.values);
    }
    if (viable) enum_dfs(inst, table, b.world, total_nodes, out, keep_witnesses);
    table[b.row][b.key] = -1;
  }
}

}  // namespace

Distribution UniformSet::member(size_t index) const {
  CountVector cv;
  cv.vars = vars;
  cv.denominator = denominator;
  cv.counts = counts.at(index);
  return cv.to_distribution();
}

UniformSet enumerate_uniform(const CausalStructure& g,
                             const std::vector<int>& latent_cards,
                             const EnumerationOptions& options) {
  EnumInstance inst = build_enum_instance(g, latent_cards, options);

  UniformSet result;
  result.vars = inst.vars;
  result.latent_cards = latent_cards;
  result.denominator = inst.world_count;

  Table empty_table;
  for (const auto& row : inst.shape.rows) {
    empty_table.emplace_back(row.key_count, int16_t(-1));
  }

  std::atomic<uint64_t> total_nodes{0};
  std::vector<int16_t> scratch;
  Blocked root = first_blocked(inst, empty_table, 0, scratch);

  std::vector<WorkerResult> slots;
  if (root.row < 0) {
    // zero-visible corner: the empty table is the single member
    WorkerResult only;
    Table t = empty_table;
    enum_dfs(inst, t, 0, total_nodes, only, options.keep_witnesses);
    slots.push_back(std::move(only));
  } else {
    int card = inst.out_card[root.row];
    slots.resize(card);
    int threads = std::max(1, options.threads);
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&]() {
      try {
        for (int value = next.fetch_add(1); value < card;
             value = next.fetch_add(1)) {
          Table table = empty_table;
          ++slots[value].nodes;
          if (total_nodes.fetch_add(1) + 1 > inst.budget) {
            fail(ErrorCode::EnumerationBudgetExceeded,
                 "enumeration exceeded " + std::to_string(inst.budget) +
                     " nodes");
          }
          table[root.row][root.key] = static_cast<int16_t>(value);
          enum_dfs(inst, table, root.world, total_nodes, slots[value],
                   options.keep_witnesses);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    };
    if (threads == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(work);
      for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
  }

  // merge in canonical branch order so witnesses are worker-count independent
  std::map<std::vector<int64_t>, Table> merged;
  uint64_t nodes = 0;
  for (auto& slot : slots) {
    nodes += slot.nodes;
    for (auto& [counts, table] : slot.found) {
      merged.emplace(counts, std::move(table));
    }
  }
  result.nodes_explored = nodes;
  for (auto& [counts, table] : merged) {
    result.counts.push_back(counts);
    if (options.keep_witnesses) {
      Model m;
      m.structure = inst.structure;
      m.latent_cards = latent_cards;
      m.table.values = std::move(table);
      result.witnesses.push_back(std::move(m));
    }
  }
  return result;
}

NearestMember min_distance_to_uniform(const Distribution& p,
                                      const UniformSet& u) {
  if (!(p.variables() == u.vars)) {
    fail(ErrorCode::VariableMismatch,
         "distribution variables do not match the uniform set");
  }
  if (u.counts.empty()) {
    fail(ErrorCode::EmptySupport, "uniform set has no members");
  }
  std::vector<Rational> dense(u.vars.outcome_space_size(), Rational(0));
  for (const auto& [outcome, q] : p.entries()) {
    dense[pack_outcome(u.vars, outcome)] = q;
  }
  NearestMember best;
  for (size_t i = 0; i < u.counts.size(); ++i) {
    Rational delta = 0;
    const auto& counts = u.counts[i];
    for (size_t c = 0; c < counts.size(); ++c) {
      delta += rational_abs(dense[c] - Rational(counts[c], u.denominator));
    }
    if (i == 0 || delta < best.delta) {
      best.delta = delta;
      best.index = i;
    }
  }
  return best;
}

HierarchyResult order_k_test(const CausalStructure& g, const Distribution& p,
                             int order, const OrderTestOptions& options) {
  if (order < 1) fail(ErrorCode::UsageError, "order must be >= 1");

  VariableList visible_vars;
  for (int v : g.visible_set()) {
    visible_vars.names.push_back(g.name_of(v));
    visible_vars.cardinalities.push_back(g.cardinality(v));
  }
  if (!(visible_vars == p.variables())) {
    fail(ErrorCode::VariableMismatch,
         "distribution variables do not match the structure's visibles");
  }

  CausalStructure normalized = normalize(g);
  int nl = normalized.latent_count();

  BigInt c_bound = options.c_override ? *options.c_override
                                      : max_cardinality_bound(normalized);
  EpsilonBound eps = epsilon_bound(nl, c_bound, BigInt(order));

  EnumerationOptions enum_options = options.enumeration;
  enum_options.keep_witnesses = true;
  std::vector<int> cards(nl, order);
  UniformSet u = enumerate_uniform(normalized, cards, enum_options);

  NearestMember nearest = min_distance_to_uniform(p, u);

  HierarchyResult result;
  result.order = order;
  result.c_bound = c_bound;
  result.epsilon = eps.epsilon;
  result.min_delta = nearest.delta;
  result.pass = nearest.delta <= eps.epsilon;
  result.nearest = u.member(nearest.index);
  result.witness = u.witnesses.at(nearest.index);
  result.member_count = u.counts.size();
  result.nodes_explored = u.nodes_explored;
  return result;
}

}  // namespace pw
