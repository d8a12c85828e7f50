#include "pw/worlds.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace pw {

namespace {
constexpr int64_t kMaxKeysPerRow = int64_t(1) << 22;
constexpr int64_t kMaxWorlds = int64_t(1) << 22;
}  // namespace

int64_t TableShape::pack_key(int row, const std::vector<int>& components) const {
  const Row& r = rows[row];
  int64_t key = 0;
  for (size_t i = 0; i < r.radices.size(); ++i) {
    key = key * r.radices[i] + components[i];
  }
  return key;
}

std::vector<int> TableShape::unpack_key(int row, int64_t key) const {
  const Row& r = rows[row];
  std::vector<int> out(r.radices.size());
  for (size_t i = r.radices.size(); i-- > 0;) {
    out[i] = static_cast<int>(key % r.radices[i]);
    key /= r.radices[i];
  }
  return out;
}

TableShape make_table_shape(const CausalStructure& g,
                            const std::vector<int>& latent_cards) {
  if (static_cast<int>(latent_cards.size()) != g.latent_count()) {
    fail(ErrorCode::CardinalityMismatch,
         "expected " + std::to_string(g.latent_count()) +
             " latent cardinalities");
  }
  for (int c : latent_cards) {
    if (c < 1) fail(ErrorCode::CardinalityMismatch, "latent cardinality < 1");
  }

  std::vector<int> topo = g.graph().topological_order();
  std::vector<int> rank(g.vertex_count());
  for (size_t i = 0; i < topo.size(); ++i) rank[topo[i]] = static_cast<int>(i);

  // latent_cards is indexed by position in the latent block
  auto latent_card = [&](int l) {
    return latent_cards[l - g.visible_count()];
  };

  TableShape shape;
  for (int v : g.visible_set()) {
    TableShape::Row row;
    row.visible = v;
    row.vpa = g.vpa(v);
    std::sort(row.vpa.begin(), row.vpa.end(),
              [&](int a, int b) { return rank[a] < rank[b]; });
    row.lpa = g.lpa(v);  // already index-sorted
    row.key_count = 1;
    for (int p : row.vpa) {
      row.radices.push_back(g.cardinality(p));
      row.key_count *= g.cardinality(p);
    }
    for (int l : row.lpa) {
      row.radices.push_back(latent_card(l));
      row.key_count *= latent_card(l);
    }
    if (row.key_count > kMaxKeysPerRow) {
      fail(ErrorCode::CardinalityMismatch,
           "table for '" + g.name_of(v) + "' too large");
    }
    shape.rows.push_back(std::move(row));
  }
  for (int q : topo) {
    if (g.is_visible(q)) shape.topo_rows.push_back(q);
  }
  return shape;
}

FunctionTable FunctionTable::empty(const TableShape& shape) {
  FunctionTable t;
  t.values.reserve(shape.rows.size());
  for (const auto& row : shape.rows) {
    t.values.emplace_back(row.key_count, int16_t(-1));
  }
  return t;
}

LatentSpec LatentSpec::uniform(std::vector<int> cards) {
  LatentSpec spec;
  spec.cardinalities = std::move(cards);
  spec.distributions.resize(spec.cardinalities.size());
  return spec;
}

bool LatentSpec::is_uniform() const {
  for (size_t i = 0; i < distributions.size(); ++i) {
    const auto& d = distributions[i];
    if (d.empty()) continue;
    for (const auto& p : d) {
      if (p != Rational(1, cardinalities[i])) return false;
    }
  }
  return true;
}

WorldsDiagram::WorldsDiagram(std::shared_ptr<const CausalStructure> structure,
                             std::vector<int> latent_cards)
    : structure_(std::move(structure)), latent_cards_(std::move(latent_cards)) {
  shape_ = make_table_shape(*structure_, latent_cards_);
  table_ = FunctionTable::empty(shape_);
  for (int c : latent_cards_) {
    world_count_ *= c;
    if (world_count_ > kMaxWorlds) {
      fail(ErrorCode::CardinalityMismatch, "too many worlds");
    }
  }
}

std::vector<int> WorldsDiagram::unpack_world(int64_t world) const {
  std::vector<int> lambda(latent_cards_.size());
  for (size_t i = latent_cards_.size(); i-- > 0;) {
    lambda[i] = static_cast<int>(world % latent_cards_[i]);
    world /= latent_cards_[i];
  }
  return lambda;
}

int64_t WorldsDiagram::pack_world(const std::vector<int>& lambda) const {
  int64_t world = 0;
  for (size_t i = 0; i < lambda.size(); ++i) {
    world = world * latent_cards_[i] + lambda[i];
  }
  return world;
}

WorldEvaluation evaluate_world(const WorldsDiagram& d,
                               const std::vector<int>& lambda) {
  const CausalStructure& g = d.structure();
  if (static_cast<int>(lambda.size()) != g.latent_count()) {
    fail(ErrorCode::CardinalityMismatch, "latent valuation arity mismatch");
  }
  for (size_t i = 0; i < lambda.size(); ++i) {
    if (lambda[i] < 0 || lambda[i] >= d.latent_cards()[i]) {
      fail(ErrorCode::CardinalityMismatch, "latent valuation out of range");
    }
  }

  WorldEvaluation eval;
  eval.values.assign(g.visible_count(), int16_t(-1));
  std::vector<int> comps;
  for (int row : d.shape().topo_rows) {
    const auto& r = d.shape().rows[row];
    comps.clear();
    bool computable = true;
    for (int p : r.vpa) {
      if (eval.values[p] < 0) {
        computable = false;
        break;
      }
      comps.push_back(eval.values[p]);
    }
    if (!computable) continue;
    for (int l : r.lpa) comps.push_back(lambda[l - g.visible_count()]);
    int64_t key = d.shape().pack_key(row, comps);
    int16_t value = d.table().values[row][key];
    if (value >= 0) {
      eval.values[row] = value;
    } else if (eval.blocked_row < 0) {
      eval.blocked_row = row;
      eval.blocked_key = key;
    }
  }
  eval.total = std::all_of(eval.values.begin(), eval.values.end(),
                           [](int16_t v) { return v >= 0; });
  return eval;
}

std::vector<std::pair<int, int64_t>> reachable_keys(const WorldsDiagram& d) {
  std::set<std::pair<int, int64_t>> keys;
  const CausalStructure& g = d.structure();
  std::vector<int> comps;
  for (int64_t w = 0; w < d.world_count(); ++w) {
    std::vector<int> lambda = d.unpack_world(w);
    std::vector<int16_t> values(g.visible_count(), -1);
    for (int row : d.shape().topo_rows) {
      const auto& r = d.shape().rows[row];
      comps.clear();
      bool computable = true;
      for (int p : r.vpa) {
        if (values[p] < 0) {
          computable = false;
          break;
        }
        comps.push_back(values[p]);
      }
      if (!computable) continue;
      for (int l : r.lpa) comps.push_back(lambda[l - g.visible_count()]);
      int64_t key = d.shape().pack_key(row, comps);
      keys.emplace(row, key);
      values[row] = d.table().values[row][key];
    }
  }
  return {keys.begin(), keys.end()};
}

Distribution simulate(const WorldsDiagram& d, const LatentSpec& latents) {
  const CausalStructure& g = d.structure();
  if (latents.cardinalities != d.latent_cards()) {
    fail(ErrorCode::CardinalityMismatch,
         "latent spec does not match the diagram");
  }
  for (size_t i = 0; i < latents.distributions.size(); ++i) {
    const auto& dist = latents.distributions[i];
    if (dist.empty()) continue;
    if (static_cast<int>(dist.size()) != latents.cardinalities[i]) {
      fail(ErrorCode::CardinalityMismatch, "latent distribution arity");
    }
    Rational total = std::accumulate(dist.begin(), dist.end(), Rational(0));
    if (total != 1) {
      fail(ErrorCode::WeightSumNotOne, "latent distribution sums to " +
                                           format_rational(total));
    }
  }

  VariableList vars;
  for (int v : g.visible_set()) {
    vars.names.push_back(g.name_of(v));
    vars.cardinalities.push_back(g.cardinality(v));
  }

  std::map<OutcomeTuple, Rational> probs;
  std::vector<std::string> blocked;
  for (int64_t w = 0; w < d.world_count(); ++w) {
    std::vector<int> lambda = d.unpack_world(w);
    WorldEvaluation eval = evaluate_world(d, lambda);
    if (!eval.total) {
      if (eval.blocked_row >= 0 && blocked.size() < 8) {
        blocked.push_back(
            g.name_of(eval.blocked_row) + "@" +
            std::to_string(eval.blocked_key));
      }
      continue;
    }
    if (!blocked.empty()) continue;
    Rational weight = 1;
    for (size_t i = 0; i < lambda.size(); ++i) {
      const auto& dist = latents.distributions[i];
      weight *= dist.empty() ? Rational(1, latents.cardinalities[i])
                             : dist[lambda[i]];
    }
    OutcomeTuple outcome(eval.values.begin(), eval.values.end());
    probs[outcome] += weight;
  }
  if (!blocked.empty()) {
    std::string msg = "unassigned table entries:";
    for (const auto& b : blocked) msg += " " + b;
    fail(ErrorCode::IncompleteTable, msg);
  }
  return Distribution(std::move(vars), std::move(probs));
}

CountVector simulate_uniform_counts(const WorldsDiagram& d) {
  const CausalStructure& g = d.structure();
  CountVector cv;
  for (int v : g.visible_set()) {
    cv.vars.names.push_back(g.name_of(v));
    cv.vars.cardinalities.push_back(g.cardinality(v));
  }
  cv.denominator = d.world_count();
  cv.counts.assign(cv.vars.outcome_space_size(), 0);
  for (int64_t w = 0; w < d.world_count(); ++w) {
    WorldEvaluation eval = evaluate_world(d, d.unpack_world(w));
    if (!eval.total) {
      fail(ErrorCode::IncompleteTable,
           "world " + std::to_string(w) + " is blocked");
    }
    int64_t idx = 0;
    for (size_t i = 0; i < eval.values.size(); ++i) {
      idx = idx * cv.vars.cardinalities[i] + eval.values[i];
    }
    ++cv.counts[idx];
  }
  return cv;
}

WorldsDiagram apply_latent_permutation(
    const WorldsDiagram& d, const std::vector<std::vector<int>>& perms) {
  const CausalStructure& g = d.structure();
  if (static_cast<int>(perms.size()) != g.latent_count()) {
    fail(ErrorCode::NotABijection, "one permutation per latent required");
  }
  for (size_t i = 0; i < perms.size(); ++i) {
    std::vector<char> seen(d.latent_cards()[i], 0);
    if (static_cast<int>(perms[i].size()) != d.latent_cards()[i]) {
      fail(ErrorCode::NotABijection, "permutation arity mismatch");
    }
    for (int x : perms[i]) {
      if (x < 0 || x >= d.latent_cards()[i] || seen[x]) {
        fail(ErrorCode::NotABijection, "not a bijection");
      }
      seen[x] = 1;
    }
  }

  WorldsDiagram out(d.structure_ptr(), d.latent_cards());
  for (size_t row = 0; row < d.shape().rows.size(); ++row) {
    const auto& r = d.shape().rows[row];
    size_t vpa_len = r.vpa.size();
    for (int64_t key = 0; key < r.key_count; ++key) {
      int16_t value = d.table().values[row][key];
      if (value < 0) continue;
      std::vector<int> comps = d.shape().unpack_key(static_cast<int>(row), key);
      for (size_t i = 0; i < r.lpa.size(); ++i) {
        int latent_pos = r.lpa[i] - g.visible_count();
        comps[vpa_len + i] = perms[latent_pos][comps[vpa_len + i]];
      }
      out.table().values[row][d.shape().pack_key(static_cast<int>(row), comps)] =
          value;
    }
  }
  return out;
}

namespace {

uint64_t factorial_u64(int n) {
  uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Visits every member of the product permutation group in a fixed order.
template <typename Fn>
void for_each_group_element(const std::vector<int>& cards, Fn&& fn) {
  std::vector<std::vector<std::vector<int>>> per_latent;
  for (int c : cards) {
    std::vector<std::vector<int>> perms;
    std::vector<int> p(c);
    std::iota(p.begin(), p.end(), 0);
    do {
      perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    per_latent.push_back(std::move(perms));
  }
  std::vector<size_t> pick(cards.size(), 0);
  while (true) {
    std::vector<std::vector<int>> combo;
    combo.reserve(cards.size());
    for (size_t i = 0; i < cards.size(); ++i) {
      combo.push_back(per_latent[i][pick[i]]);
    }
    fn(combo);
    size_t i = 0;
    for (; i < cards.size(); ++i) {
      if (++pick[i] < per_latent[i].size()) break;
      pick[i] = 0;
    }
    if (i == cards.size()) break;
  }
}

void check_orbit_cap(const std::vector<int>& cards, uint64_t cap) {
  uint64_t orbit = 1;
  for (int c : cards) {
    orbit *= factorial_u64(c);
    if (orbit > cap) {
      fail(ErrorCode::OrbitTooLarge,
           "orbit size exceeds cap " + std::to_string(cap));
    }
  }
}

}  // namespace

OrbitMaps make_orbit_maps(const WorldsDiagram& d, uint64_t orbit_cap) {
  check_orbit_cap(d.latent_cards(), orbit_cap);
  const CausalStructure& g = d.structure();
  OrbitMaps maps;
  for_each_group_element(
      d.latent_cards(), [&](const std::vector<std::vector<int>>& perms) {
        std::vector<std::vector<int32_t>> per_row;
        for (size_t row = 0; row < d.shape().rows.size(); ++row) {
          const auto& r = d.shape().rows[row];
          std::vector<int32_t> inv(r.key_count);
          for (int64_t key = 0; key < r.key_count; ++key) {
            std::vector<int> comps =
                d.shape().unpack_key(static_cast<int>(row), key);
            for (size_t i = 0; i < r.lpa.size(); ++i) {
              int latent_pos = r.lpa[i] - g.visible_count();
              comps[r.vpa.size() + i] =
                  perms[latent_pos][comps[r.vpa.size() + i]];
            }
            inv[d.shape().pack_key(static_cast<int>(row), comps)] =
                static_cast<int32_t>(key);
          }
          per_row.push_back(std::move(inv));
        }
        maps.inverse_key_maps.push_back(std::move(per_row));
      });
  return maps;
}

// The relabeled table at (row, key) holds the original value at the inverse
// image of key; comparing lazily avoids building orbit members.
bool is_canonical_table(const FunctionTable& t, const OrbitMaps& maps) {
  for (const auto& per_row : maps.inverse_key_maps) {
    for (size_t row = 0; row < t.values.size(); ++row) {
      const auto& inv = per_row[row];
      const auto& vals = t.values[row];
      int cmp = 0;
      for (size_t key = 0; key < vals.size(); ++key) {
        int16_t relabeled = vals[inv[key]];
        if (relabeled != vals[key]) {
          cmp = relabeled < vals[key] ? -1 : 1;
          break;
        }
      }
      if (cmp < 0) return false;
      if (cmp > 0) break;  // this group element is larger, try the next
    }
  }
  return true;
}

// Partial-table variant: false once some relabeling is strictly smaller on a
// fully decided prefix, since every completion then relabels to something
// smaller and cannot be canonical. Unassigned cells make a group element
// inconclusive, never a prune.
bool partial_canonical_possible(const FunctionTable& t, const OrbitMaps& maps) {
  for (const auto& per_row : maps.inverse_key_maps) {
    bool decided = false;
    for (size_t row = 0; row < t.values.size() && !decided; ++row) {
      const auto& inv = per_row[row];
      const auto& vals = t.values[row];
      for (size_t key = 0; key < vals.size(); ++key) {
        int16_t relabeled = vals[inv[key]];
        int16_t original = vals[key];
        if (relabeled < 0 || original < 0) {
          decided = true;  // inconclusive
          break;
        }
        if (relabeled != original) {
          if (relabeled < original) return false;
          decided = true;  // this element is larger everywhere that matters
          break;
        }
      }
    }
  }
  return true;
}

WorldsDiagram canonical_form(const WorldsDiagram& d, uint64_t orbit_cap) {
  OrbitMaps maps = make_orbit_maps(d, orbit_cap);
  FunctionTable best = d.table();
  for (const auto& per_row : maps.inverse_key_maps) {
    FunctionTable candidate = d.table();
    for (size_t row = 0; row < candidate.values.size(); ++row) {
      for (size_t key = 0; key < candidate.values[row].size(); ++key) {
        candidate.values[row][key] = d.table().values[row][per_row[row][key]];
      }
    }
    if (candidate.values < best.values) best = std::move(candidate);
  }
  WorldsDiagram out(d.structure_ptr(), d.latent_cards());
  out.table() = std::move(best);
  return out;
}

bool is_canonical_form(const WorldsDiagram& d, uint64_t orbit_cap) {
  return is_canonical_table(d.table(), make_orbit_maps(d, orbit_cap));
}

WorldsDiagram diagram_of(const Model& model) {
  WorldsDiagram d(model.structure, model.latent_cards);
  d.table() = model.table;
  return d;
}

}  // namespace pw
