#include "pw/possibilistic.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <memory>
#include <thread>

namespace pw {

namespace {

// Preprocessed instance shared read-only across workers. Keys decompose as
// key = latent_offset[row][world] + sum_j value(vpa_j) * vpa_stride[row][j].
struct Instance {
  std::shared_ptr<const CausalStructure> structure;  // normalized
  SupportSet sigma;
  std::vector<int> latent_cards;
  TableShape shape;
  int64_t world_count = 1;
  int visible_count = 0;
  bool pin_diagonal = true;

  std::vector<std::vector<int16_t>> events;       // [event][visible]
  std::vector<std::vector<int64_t>> latent_offset;  // [row][world]
  std::vector<std::vector<int64_t>> vpa_stride;     // [row][j]
};

struct State {
  std::vector<std::vector<int16_t>> table;
  std::vector<std::pair<int, int64_t>> trail;
  SearchStats stats;
};

struct Branch {
  bool found = false;
  int row = -1;
  int64_t key = -1;
  uint64_t value_mask = 0;
};

Instance build_instance(const CausalStructure& raw, const SupportSet& sigma,
                        const SolveOptions& options) {
  VariableList visible_vars;
  for (int v : raw.visible_set()) {
    visible_vars.names.push_back(raw.name_of(v));
    visible_vars.cardinalities.push_back(raw.cardinality(v));
  }
  if (!(visible_vars == sigma.vars)) {
    fail(ErrorCode::CardinalityMismatch,
         "support variables do not match the structure's visibles");
  }

  Instance inst;
  inst.structure =
      std::make_shared<const CausalStructure>(normalize(raw));
  inst.sigma = sigma;
  inst.visible_count = inst.structure->visible_count();

  int w = sigma.size();
  int card = options.latent_cardinality.value_or(w);
  if (card < 1) {
    fail(ErrorCode::UsageError, "latent cardinality must be >= 1");
  }
  inst.pin_diagonal = card == w;
  inst.latent_cards.assign(inst.structure->latent_count(), card);
  inst.shape = make_table_shape(*inst.structure, inst.latent_cards);

  for (int c : inst.latent_cards) inst.world_count *= c;

  for (const auto& e : sigma.events) {
    inst.events.emplace_back(e.begin(), e.end());
  }

  int nl = inst.structure->latent_count();
  std::vector<int> lambda(nl);
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
        lambda[i] = static_cast<int>(rem % inst.latent_cards[i]);
        rem /= inst.latent_cards[i];
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
  return inst;
}

// Evaluates one world against the current table. values[v] < 0 marks
// unknown; blocked rows are those with a computable but unassigned key.
void eval_world(const Instance& inst, const State& state, int64_t world,
                std::vector<int16_t>& values,
                std::vector<std::pair<int, int64_t>>& blocked) {
  values.assign(inst.visible_count, -1);
  blocked.clear();
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
    int16_t value = state.table[row][key];
    if (value >= 0) {
      values[row] = value;
    } else {
      blocked.emplace_back(row, key);
    }
  }
}

bool assign(State& state, int row, int64_t key, int16_t value) {
  int16_t current = state.table[row][key];
  if (current >= 0) return current == value;
  state.table[row][key] = value;
  state.trail.emplace_back(row, key);
  return true;
}

void rewind(State& state, size_t mark) {
  while (state.trail.size() > mark) {
    auto [row, key] = state.trail.back();
    state.trail.pop_back();
    state.table[row][key] = -1;
  }
}

// Unit propagation to fixpoint. Every world keeps at least one compatible
// support event; blocked entries whose compatible events all agree get
// forced. Off the diagonal route, events that no world can still produce
// prune the branch (coverage).
bool propagate(const Instance& inst, State& state, Branch* branch) {
  std::vector<int16_t> values;
  std::vector<std::pair<int, int64_t>> blocked;
  std::vector<uint64_t> masks;

  bool changed = true;
  while (changed) {
    changed = false;
    if (branch) *branch = Branch{};
    int best_count = -1;
    std::vector<char> covered(inst.events.size(), 0);

    for (int64_t world = 0; world < inst.world_count; ++world) {
      eval_world(inst, state, world, values, blocked);

      int count = 0;
      masks.assign(blocked.size(), 0);
      for (size_t e = 0; e < inst.events.size(); ++e) {
        const auto& event = inst.events[e];
        bool match = true;
        for (int v = 0; v < inst.visible_count; ++v) {
          if (values[v] >= 0 && values[v] != event[v]) {
            match = false;
            break;
          }
        }
        if (!match) continue;
        ++count;
        covered[e] = 1;
        for (size_t b = 0; b < blocked.size(); ++b) {
          masks[b] |= uint64_t(1) << event[blocked[b].first];
        }
      }
      if (count == 0) return false;

      for (size_t b = 0; b < blocked.size(); ++b) {
        uint64_t mask = masks[b];
        if ((mask & (mask - 1)) == 0) {
          int16_t forced = static_cast<int16_t>(std::countr_zero(mask));
          if (!assign(state, blocked[b].first, blocked[b].second, forced)) {
            return false;
          }
          changed = true;
        }
      }

      if (!changed && branch && !blocked.empty()) {
        if (best_count < 0 || count < best_count) {
          best_count = count;
          branch->found = true;
          branch->row = blocked.front().first;
          branch->key = blocked.front().second;
          branch->value_mask = masks.front();
        }
      }
    }

    if (!inst.pin_diagonal) {
      for (size_t e = 0; e < inst.events.size(); ++e) {
        if (!covered[e]) return false;
      }
    }
  }
  return true;
}

Certificate make_certificate(const Instance& inst, const State& state) {
  Certificate cert;
  cert.model.structure = inst.structure;
  cert.model.latent_cards = inst.latent_cards;
  cert.model.table.values = state.table;
  if (inst.pin_diagonal) cert.diagonal_events = inst.sigma.events;
  return cert;
}

std::optional<Certificate> dfs(const Instance& inst, State& state) {
  Branch branch;
  if (!propagate(inst, state, &branch)) return std::nullopt;
  if (!branch.found) return make_certificate(inst, state);

  int card = inst.structure->cardinality(branch.row);
  for (int16_t value = 0; value < card; ++value) {
    if (!(branch.value_mask & (uint64_t(1) << value))) continue;
    ++state.stats.nodes;
    size_t mark = state.trail.size();
    assign(state, branch.row, branch.key, value);
    auto result = dfs(inst, state);
    rewind(state, mark);
    if (result) return result;
    ++state.stats.backtracks;
  }
  return std::nullopt;
}

void seed_diagonal(const Instance& inst, State& state) {
  for (size_t i = 0; i < inst.events.size(); ++i) {
    // world (i, i, ..., i)
    int64_t world = 0;
    for (int c : inst.latent_cards) world = world * c + static_cast<int>(i);
    for (int row : inst.shape.topo_rows) {
      const auto& r = inst.shape.rows[row];
      int64_t key = inst.latent_offset[row][world];
      for (size_t j = 0; j < r.vpa.size(); ++j) {
        key += inst.events[i][r.vpa[j]] * inst.vpa_stride[row][j];
      }
      if (!assign(state, row, key, inst.events[i][row])) {
        // distinct diagonal worlds never share keys once every visible has
        // a latent parent
        throw std::logic_error("diagonal seeding conflict");
      }
    }
  }
}

}  // namespace

Verdict decide_support(const CausalStructure& g, const SupportSet& sigma,
                       const SolveOptions& options) {
  Instance inst = build_instance(g, sigma, options);

  State root;
  root.table.reserve(inst.shape.rows.size());
  for (const auto& row : inst.shape.rows) {
    root.table.emplace_back(row.key_count, int16_t(-1));
  }
  if (inst.pin_diagonal) seed_diagonal(inst, root);

  Branch branch;
  if (!propagate(inst, root, &branch)) {
    return Verdict{false, std::nullopt, root.stats};
  }
  if (!branch.found) {
    return Verdict{true, make_certificate(inst, root), root.stats};
  }

  int card = inst.structure->cardinality(branch.row);
  std::vector<int16_t> values;
  for (int16_t v = 0; v < card; ++v) {
    if (branch.value_mask & (uint64_t(1) << v)) values.push_back(v);
  }

  int threads = std::max(1, options.threads);
  if (threads == 1 || values.size() <= 1) {
    for (int16_t value : values) {
      ++root.stats.nodes;
      size_t mark = root.trail.size();
      assign(root, branch.row, branch.key, value);
      auto result = dfs(inst, root);
      rewind(root, mark);
      if (result) return Verdict{true, std::move(result), root.stats};
      ++root.stats.backtracks;
    }
    return Verdict{false, std::nullopt, root.stats};
  }

  // Parallel over disjoint root value choices; the reported verdict is the
  // first compatible value in canonical order, independent of worker count.
  struct Slot {
    std::optional<Certificate> result;
    SearchStats stats;
  };
  std::vector<Slot> slots(values.size());
  std::atomic<int> best_value{INT32_MAX};
  std::atomic<size_t> next{0};

  auto work = [&]() {
    for (size_t idx = next.fetch_add(1); idx < values.size();
         idx = next.fetch_add(1)) {
      if (best_value.load() < values[idx]) continue;  // discarded anyway
      State state;
      state.table = root.table;
      state.stats = SearchStats{};
      ++state.stats.nodes;
      assign(state, branch.row, branch.key, values[idx]);
      auto result = dfs(inst, state);
      if (result) {
        int v = values[idx];
        int cur = best_value.load();
        while (v < cur && !best_value.compare_exchange_weak(cur, v)) {
        }
        slots[idx].result = std::move(result);
      } else {
        ++state.stats.backtracks;
      }
      slots[idx].stats = state.stats;
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();

  for (size_t idx = 0; idx < values.size(); ++idx) {
    if (slots[idx].result) {
      return Verdict{true, std::move(slots[idx].result), root.stats};
    }
  }
  SearchStats total = root.stats;
  for (const auto& slot : slots) {
    total.nodes += slot.stats.nodes;
    total.backtracks += slot.stats.backtracks;
  }
  return Verdict{false, std::nullopt, total};
}

bool verify_certificate(const CausalStructure& g, const Certificate& cert,
                        const SupportSet& sigma) {
  if (!cert.model.structure) return false;
  CausalStructure normalized = normalize(g);
  if (!(normalized == *cert.model.structure)) return false;
  if (static_cast<int>(cert.model.latent_cards.size()) !=
      normalized.latent_count()) {
    return false;
  }

  WorldsDiagram d = diagram_of(cert.model);
  SupportSet realized = support(simulate(d, LatentSpec::uniform(cert.model.latent_cards)));
  if (!(realized == sigma)) return false;

  if (!cert.diagonal_events.empty()) {
    if (cert.diagonal_events != sigma.events) return false;
    int w = sigma.size();
    for (int c : cert.model.latent_cards) {
      if (c < w) return false;
    }
    std::vector<int> lambda(cert.model.latent_cards.size());
    for (int i = 0; i < w; ++i) {
      std::fill(lambda.begin(), lambda.end(), i);
      WorldEvaluation eval = evaluate_world(d, lambda);
      if (!eval.total) return false;
      for (size_t v = 0; v < eval.values.size(); ++v) {
        if (eval.values[v] != sigma.events[i][v]) return false;
      }
    }
  }
  return true;
}

}  // namespace pw
