#include "pw/cnf.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace pw {

namespace {

std::string tuple_string(const std::vector<int>& t) {
  std::string s = "(";
  for (size_t i = 0; i < t.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(t[i]);
  }
  return s + ")";
}

}  // namespace

CnfDocument export_cnf(const CausalStructure& g, const SupportSet& sigma) {
  VariableList visible_vars;
  for (int v : g.visible_set()) {
    visible_vars.names.push_back(g.name_of(v));
    visible_vars.cardinalities.push_back(g.cardinality(v));
    if (g.cardinality(v) != 2) {
      fail(ErrorCode::NonBooleanVisible,
           "visible '" + g.name_of(v) + "' has cardinality " +
               std::to_string(g.cardinality(v)));
    }
  }
  if (!(visible_vars == sigma.vars)) {
    fail(ErrorCode::CardinalityMismatch,
         "support variables do not match the structure's visibles");
  }

  auto normalized = std::make_shared<const CausalStructure>(normalize(g));
  int w = sigma.size();
  std::vector<int> cards(normalized->latent_count(), w);
  WorldsDiagram d(normalized, cards);
  const TableShape& shape = d.shape();
  int nv = normalized->visible_count();
  int64_t worlds = d.world_count();

  // O variables first (worlds lexicographic, visibles topological), then the
  // F table variables (visibles topological, keys ascending).
  std::vector<int> topo_pos(nv);
  for (size_t i = 0; i < shape.topo_rows.size(); ++i) {
    topo_pos[shape.topo_rows[i]] = static_cast<int>(i);
  }
  auto o_var = [&](int row, int64_t world) {
    return static_cast<int>(world * nv + topo_pos[row]) + 1;
  };
  int o_count = static_cast<int>(worlds) * nv;
  std::vector<int> f_base(nv, 0);
  int running = o_count;
  for (int row : shape.topo_rows) {
    f_base[row] = running;
    running += static_cast<int>(shape.rows[row].key_count);
  }
  auto f_var = [&](int row, int64_t key) {
    return f_base[row] + static_cast<int>(key) + 1;
  };

  CnfDocument doc;
  doc.variable_count = running;
  doc.legend.resize(running);
  for (int64_t world = 0; world < worlds; ++world) {
    std::vector<int> lambda = d.unpack_world(world);
    for (int row : shape.topo_rows) {
      doc.legend[o_var(row, world) - 1] =
          "O " + normalized->name_of(row) + " world=" + tuple_string(lambda);
    }
  }
  for (int row : shape.topo_rows) {
    const auto& r = shape.rows[row];
    for (int64_t key = 0; key < r.key_count; ++key) {
      std::vector<int> comps = shape.unpack_key(row, key);
      std::vector<int> vpa_part(comps.begin(), comps.begin() + r.vpa.size());
      std::vector<int> lpa_part(comps.begin() + r.vpa.size(), comps.end());
      doc.legend[f_var(row, key) - 1] = "F " + normalized->name_of(row) +
                                        " vpa=" + tuple_string(vpa_part) +
                                        " lpa=" + tuple_string(lpa_part);
    }
  }

  auto lit_eq = [](int var, int value) { return value ? var : -var; };

  // (i) linking: (AND_u O[u]=p_u) -> (O[v] <-> F[v,(p,lambda|lpa)])
  for (int64_t world = 0; world < worlds; ++world) {
    std::vector<int> lambda = d.unpack_world(world);
    for (int row : shape.topo_rows) {
      const auto& r = shape.rows[row];
      int64_t assignments = 1;
      for (size_t j = 0; j < r.vpa.size(); ++j) assignments *= 2;
      for (int64_t p = 0; p < assignments; ++p) {
        std::vector<int> comps(r.vpa.size());
        std::vector<int> antecedent;
        int64_t rem = p;
        for (size_t j = r.vpa.size(); j-- > 0;) {
          comps[j] = static_cast<int>(rem & 1);
          rem >>= 1;
        }
        for (size_t j = 0; j < r.vpa.size(); ++j) {
          antecedent.push_back(-lit_eq(o_var(r.vpa[j], world), comps[j]));
        }
        std::vector<int> key_comps = comps;
        for (int l : r.lpa) {
          key_comps.push_back(lambda[l - nv]);
        }
        int64_t key = shape.pack_key(row, key_comps);
        std::vector<int> c1 = antecedent;
        c1.push_back(-o_var(row, world));
        c1.push_back(f_var(row, key));
        std::vector<int> c2 = antecedent;
        c2.push_back(o_var(row, world));
        c2.push_back(-f_var(row, key));
        doc.clauses.push_back(std::move(c1));
        doc.clauses.push_back(std::move(c2));
      }
    }
  }

  // (ii) diagonal units: world (i,...,i) observes the i-th support event
  for (int i = 0; i < w; ++i) {
    int64_t world = 0;
    for (int c : cards) world = world * c + i;
    for (int row : shape.topo_rows) {
      doc.clauses.push_back({lit_eq(o_var(row, world), sigma.events[i][row])});
    }
  }

  // (iii) support: no world observes an event outside sigma
  int64_t space = visible_vars.outcome_space_size();
  for (int64_t world = 0; world < worlds; ++world) {
    for (int64_t x = 0; x < space; ++x) {
      OutcomeTuple outcome = unpack_outcome(visible_vars, x);
      if (sigma.contains(outcome)) continue;
      std::vector<int> clause;
      for (int row = 0; row < nv; ++row) {
        clause.push_back(-lit_eq(o_var(row, world), outcome[row]));
      }
      doc.clauses.push_back(std::move(clause));
    }
  }
  return doc;
}

std::string to_dimacs(const CnfDocument& doc) {
  std::ostringstream out;
  for (int i = 0; i < doc.variable_count; ++i) {
    out << "c " << (i + 1) << " " << doc.legend[i] << "\n";
  }
  out << "p cnf " << doc.variable_count << " " << doc.clauses.size() << "\n";
  for (const auto& clause : doc.clauses) {
    for (int lit : clause) out << lit << " ";
    out << "0\n";
  }
  return out.str();
}

namespace {

// Counter-based DPLL with unit propagation; complete and deterministic.
class DpllSolver {
 public:
  explicit DpllSolver(const CnfDocument& doc) : doc_(doc) {
    int n = doc.variable_count;
    value_.assign(n + 1, -1);
    pos_occ_.resize(n + 1);
    neg_occ_.resize(n + 1);
    sat_count_.assign(doc.clauses.size(), 0);
    false_count_.assign(doc.clauses.size(), 0);
    for (size_t c = 0; c < doc.clauses.size(); ++c) {
      for (int lit : doc.clauses[c]) {
        (lit > 0 ? pos_occ_ : neg_occ_)[std::abs(lit)].push_back(c);
      }
    }
    // static decision order: occurrence count descending, index ascending
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 1);
    std::vector<size_t> score(n + 1, 0);
    for (int v = 1; v <= n; ++v) {
      score[v] = pos_occ_[v].size() + neg_occ_[v].size();
    }
    std::stable_sort(order_.begin(), order_.end(),
                     [&](int a, int b) { return score[a] > score[b]; });
    phase_.assign(n + 1, 0);
    for (int v = 1; v <= n; ++v) {
      phase_[v] = pos_occ_[v].size() >= neg_occ_[v].size() ? 1 : 0;
    }
  }

  SatResult solve() {
    for (size_t c = 0; c < doc_.clauses.size(); ++c) {
      if (doc_.clauses[c].empty()) return SatResult{false, {}};
    }
    size_t mark = trail_.size();
    for (size_t c = 0; c < doc_.clauses.size(); ++c) {
      if (doc_.clauses[c].size() == 1) {
        if (!enqueue(doc_.clauses[c][0])) return SatResult{false, {}};
      }
    }
    if (!search()) {
      rewind(mark);
      return SatResult{false, {}};
    }
    SatResult result;
    result.satisfiable = true;
    result.assignment.assign(doc_.variable_count, false);
    for (int v = 1; v <= doc_.variable_count; ++v) {
      result.assignment[v - 1] = value_[v] == 1;
    }
    return result;
  }

 private:
  bool enqueue(int lit) {
    int var = std::abs(lit);
    int val = lit > 0 ? 1 : 0;
    if (value_[var] >= 0) return value_[var] == val;
    return assign(var, val);
  }

  bool assign(int var, int val) {
    value_[var] = val;
    trail_.push_back(var);
    const auto& sat_side = val ? pos_occ_[var] : neg_occ_[var];
    const auto& false_side = val ? neg_occ_[var] : pos_occ_[var];
    for (size_t c : sat_side) ++sat_count_[c];
    // counters must stay balanced for rewind, so finish the loop even after
    // a conflict is found
    bool ok = true;
    for (size_t c : false_side) {
      ++false_count_[c];
      if (sat_count_[c] > 0) continue;
      size_t size = doc_.clauses[c].size();
      if (false_count_[c] == size) {
        ok = false;
      } else if (false_count_[c] + 1 == size) {
        units_.push_back(c);
      }
    }
    return ok;
  }

  bool propagate() {
    while (!units_.empty()) {
      size_t c = units_.back();
      units_.pop_back();
      if (sat_count_[c] > 0) continue;
      int pending = 0;
      for (int lit : doc_.clauses[c]) {
        if (value_[std::abs(lit)] < 0) {
          pending = lit;
          break;
        }
      }
      if (pending == 0) {
        if (false_count_[c] == doc_.clauses[c].size()) return false;
        continue;
      }
      if (!enqueue(pending)) return false;
    }
    return true;
  }

  void rewind(size_t mark) {
    units_.clear();
    while (trail_.size() > mark) {
      int var = trail_.back();
      trail_.pop_back();
      int val = value_[var];
      const auto& sat_side = val ? pos_occ_[var] : neg_occ_[var];
      const auto& false_side = val ? neg_occ_[var] : pos_occ_[var];
      for (size_t c : sat_side) --sat_count_[c];
      for (size_t c : false_side) --false_count_[c];
      value_[var] = -1;
    }
  }

  int pick_variable() const {
    for (int v : order_) {
      if (value_[v] < 0) return v;
    }
    return 0;
  }

  bool search() {
    if (!propagate()) return false;
    int var = pick_variable();
    if (var == 0) return true;
    for (int attempt = 0; attempt < 2; ++attempt) {
      int val = attempt == 0 ? phase_[var] : 1 - phase_[var];
      size_t mark = trail_.size();
      if (assign(var, val) && search()) return true;
      rewind(mark);
    }
    return false;
  }

  const CnfDocument& doc_;
  std::vector<int> value_;
  std::vector<std::vector<size_t>> pos_occ_, neg_occ_;
  std::vector<size_t> sat_count_, false_count_;
  std::vector<size_t> units_;
  std::vector<int> order_;
  std::vector<int> phase_;
  std::vector<int> trail_;
};

}  // namespace

SatResult solve_cnf(const CnfDocument& doc) {
  for (const auto& clause : doc.clauses) {
    for (int lit : clause) {
      int var = std::abs(lit);
      if (lit == 0 || var > doc.variable_count) {
        fail(ErrorCode::ParseError, "bad literal in clause");
      }
    }
  }
  DpllSolver solver(doc);
  return solver.solve();
}

}  // namespace pw
