#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pw/possibilistic.hpp"

using pw::CausalStructure;
using pw::OutcomeTuple;
using pw::SupportSet;
using pw::VariableList;

namespace {

CausalStructure w_structure() {
  return CausalStructure::make(
      {{"a", 2}, {"b", 2}, {"c", 2}}, {{"mu", 0}, {"nu", 0}},
      {{"mu", "a"}, {"mu", "b"}, {"nu", "b"}, {"nu", "c"}});
}

CausalStructure instrumental() {
  return CausalStructure::make(
      {{"a", 2}, {"b", 2}, {"c", 2}}, {{"mu", 0}, {"nu", 0}},
      {{"mu", "a"}, {"a", "b"}, {"nu", "b"}, {"b", "c"}, {"nu", "c"}});
}

CausalStructure bell() {
  return CausalStructure::make(
      {{"x", 2}, {"a", 2}, {"b", 2}, {"y", 2}},
      {{"mu", 0}, {"rho", 0}, {"nu", 0}},
      {{"mu", "x"}, {"rho", "a"}, {"rho", "b"}, {"nu", "y"},
       {"x", "a"}, {"y", "b"}});
}

CausalStructure triangle() {
  return CausalStructure::make(
      {{"a", 2}, {"b", 2}, {"c", 2}}, {{"mu", 0}, {"nu", 0}, {"rho", 0}},
      {{"mu", "a"}, {"nu", "a"}, {"mu", "b"}, {"rho", "b"},
       {"rho", "c"}, {"nu", "c"}});
}

CausalStructure evans() {
  return CausalStructure::make(
      {{"a", 2}, {"b", 2}, {"c", 2}, {"d", 2}},
      {{"mu", 0}, {"nu", 0}, {"rho", 0}},
      {{"mu", "a"}, {"rho", "a"}, {"a", "b"}, {"nu", "b"}, {"b", "c"},
       {"mu", "c"}, {"c", "d"}, {"nu", "d"}, {"rho", "d"}});
}

CausalStructure fork_collider() {
  return CausalStructure::make(
      {{"a", 2}, {"b", 2}, {"c", 4}}, {{"mu", 0}, {"nu", 0}},
      {{"mu", "a"}, {"mu", "b"}, {"a", "c"}, {"b", "c"}, {"nu", "c"}});
}

SupportSet make_support(const CausalStructure& g,
                        std::vector<OutcomeTuple> events) {
  VariableList vars;
  for (int v : g.visible_set()) {
    vars.names.push_back(g.name_of(v));
    vars.cardinalities.push_back(g.cardinality(v));
  }
  return SupportSet::make(vars, std::move(events));
}

SupportSet pr_box_support() {
  return make_support(bell(), {{0, 0, 0, 0},
                               {0, 1, 1, 0},
                               {0, 0, 0, 1},
                               {0, 1, 1, 1},
                               {1, 0, 0, 0},
                               {1, 1, 1, 0},
                               {1, 0, 1, 1},
                               {1, 1, 0, 1}});
}

}  // namespace

TEST_CASE("regression anchors") {
  auto w = w_structure();
  CHECK_FALSE(pw::decide_support(w, make_support(w, {{0, 0, 1}, {1, 0, 0}}))
                  .compatible);

  auto inst = instrumental();
  CHECK_FALSE(
      pw::decide_support(inst, make_support(inst, {{0, 0, 0}, {1, 0, 1}}))
          .compatible);

  CHECK_FALSE(pw::decide_support(bell(), pr_box_support()).compatible);

  auto tri = triangle();
  CHECK_FALSE(pw::decide_support(
                  tri, make_support(tri, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}))
                  .compatible);

  auto ev = evans();
  CHECK_FALSE(
      pw::decide_support(
          ev, make_support(ev, {{0, 0, 0, 0}, {1, 0, 1, 0}, {0, 1, 1, 1}}))
          .compatible);

  auto fc = fork_collider();
  auto sigma =
      make_support(fc, {{0, 0, 0}, {0, 0, 2}, {1, 1, 1}, {1, 1, 3}});
  auto verdict = pw::decide_support(fc, sigma);
  REQUIRE(verdict.compatible);
  CHECK(pw::verify_certificate(fc, *verdict.certificate, sigma));
}

TEST_CASE("perfect three-way correlation is out of reach for the triangle") {
  auto tri = triangle();
  auto sigma = make_support(tri, {{0, 0, 0}, {1, 1, 1}});
  CHECK_FALSE(oracles::support_compatible(tri, sigma));
  CHECK_FALSE(pw::decide_support(tri, sigma).compatible);
}

TEST_CASE("certificates verify and mutations are caught") {
  auto fc = fork_collider();
  auto sigma =
      make_support(fc, {{0, 0, 0}, {0, 0, 2}, {1, 1, 1}, {1, 1, 3}});
  auto verdict = pw::decide_support(fc, sigma);
  REQUIRE(verdict.compatible);
  auto cert = *verdict.certificate;
  CHECK(pw::verify_certificate(fc, cert, sigma));

  // flip the entry the all-zero diagonal world reads for the first visible
  pw::WorldsDiagram d = pw::diagram_of(cert.model);
  std::vector<int> lambda(cert.model.latent_cards.size(), 0);
  auto eval = pw::evaluate_world(d, lambda);
  REQUIRE(eval.total);
  const auto& shape = d.shape();
  int row = shape.topo_rows.front();
  std::vector<int> comps;
  for (int l : shape.rows[row].lpa) {
    comps.push_back(0);
  }
  int64_t key = shape.pack_key(row, comps);
  auto mutated = cert;
  int card = fc.cardinality(row);
  mutated.model.table.values[row][key] = static_cast<int16_t>(
      (mutated.model.table.values[row][key] + 1) % card);
  CHECK_FALSE(pw::verify_certificate(fc, mutated, sigma));

  // single-event support with constant tables
  auto single = make_support(fc, {{1, 0, 3}});
  auto v2 = pw::decide_support(fc, single);
  REQUIRE(v2.compatible);
  CHECK(pw::verify_certificate(fc, *v2.certificate, single));
}

TEST_CASE("verdicts agree with the exhaustive oracle on small structures") {
  // two-visible structures, every support
  for (int nv : {1, 2}) {
    for (const auto& g : oracles::small_structures(nv)) {
      VariableList vars;
      for (int v : g.visible_set()) {
        vars.names.push_back(g.name_of(v));
        vars.cardinalities.push_back(g.cardinality(v));
      }
      int space = 1 << nv;
      for (int mask = 1; mask < (1 << space); ++mask) {
        std::vector<OutcomeTuple> events;
        for (int i = 0; i < space; ++i) {
          if (mask & (1 << i)) events.push_back(pw::unpack_outcome(vars, i));
        }
        auto sigma = SupportSet::make(vars, events);
        bool expected = oracles::support_compatible(g, sigma);
        auto verdict = pw::decide_support(g, sigma);
        CHECK(verdict.compatible == expected);
        if (verdict.compatible) {
          CHECK(pw::verify_certificate(g, *verdict.certificate, sigma));
        }
      }
    }
  }

  // three-visible structures, sampled supports (the full sweep lives in the
  // acceptance suite)
  std::mt19937_64 rng(41);
  auto structures = oracles::small_structures(3);
  std::uniform_int_distribution<int> mask_pick(1, 255);
  std::uniform_int_distribution<size_t> g_pick(0, structures.size() - 1);
  for (int round = 0; round < 60; ++round) {
    const auto& g = structures[g_pick(rng)];
    VariableList vars;
    for (int v : g.visible_set()) {
      vars.names.push_back(g.name_of(v));
      vars.cardinalities.push_back(g.cardinality(v));
    }
    int mask = mask_pick(rng);
    std::vector<OutcomeTuple> events;
    for (int i = 0; i < 8; ++i) {
      if (mask & (1 << i)) events.push_back(pw::unpack_outcome(vars, i));
    }
    auto sigma = SupportSet::make(vars, events);
    CHECK(pw::decide_support(g, sigma).compatible ==
          oracles::support_compatible(g, sigma));
  }
}

TEST_CASE("verdicts survive outcome relabeling and event reordering") {
  std::mt19937_64 rng(43);
  auto structures = oracles::small_structures(2);
  std::uniform_int_distribution<size_t> g_pick(0, structures.size() - 1);
  std::uniform_int_distribution<int> mask_pick(1, 15);
  for (int round = 0; round < 40; ++round) {
    const auto& g = structures[g_pick(rng)];
    VariableList vars;
    for (int v : g.visible_set()) {
      vars.names.push_back(g.name_of(v));
      vars.cardinalities.push_back(g.cardinality(v));
    }
    int mask = mask_pick(rng);
    std::vector<OutcomeTuple> events;
    for (int i = 0; i < 4; ++i) {
      if (mask & (1 << i)) events.push_back(pw::unpack_outcome(vars, i));
    }
    auto sigma = SupportSet::make(vars, events);
    bool base = pw::decide_support(g, sigma).compatible;

    // flip the outcome labels of one visible
    std::uniform_int_distribution<int> v_pick(0, g.visible_count() - 1);
    int flip = v_pick(rng);
    auto relabeled = events;
    for (auto& e : relabeled) e[flip] = 1 - e[flip];
    std::shuffle(relabeled.begin(), relabeled.end(), rng);
    auto sigma2 = SupportSet::make(vars, relabeled);
    CHECK(pw::decide_support(g, sigma2).compatible == base);
  }
}

TEST_CASE("auto-normalization makes raw and normal forms agree") {
  // latent with a visible parent plus an uncovered visible
  auto raw = CausalStructure::make(
      {{"a", 2}, {"b", 2}}, {{"l", 0}},
      {{"a", "l"}, {"l", "b"}});
  auto normalized = pw::normalize(raw);
  VariableList vars{{"a", "b"}, {2, 2}};
  for (int mask = 1; mask < 16; ++mask) {
    std::vector<OutcomeTuple> events;
    for (int i = 0; i < 4; ++i) {
      if (mask & (1 << i)) events.push_back(pw::unpack_outcome(vars, i));
    }
    auto sigma = SupportSet::make(vars, events);
    CHECK(pw::decide_support(raw, sigma).compatible ==
          pw::decide_support(normalized, sigma).compatible);
  }
}

TEST_CASE("single-visible structures accept every support") {
  auto lone = CausalStructure::make({{"a", 2}}, {}, {});
  VariableList vars{{"a"}, {2}};
  for (auto events : std::vector<std::vector<OutcomeTuple>>{
           {{0}}, {{1}}, {{0}, {1}}}) {
    auto sigma = SupportSet::make(vars, events);
    auto verdict = pw::decide_support(lone, sigma);
    CHECK(verdict.compatible);
    CHECK(oracles::support_compatible(pw::normalize(lone), sigma));
  }
}

TEST_CASE("exploratory latent cardinalities stay sound for compatible") {
  auto fc = fork_collider();
  auto sigma =
      make_support(fc, {{0, 0, 0}, {0, 0, 2}, {1, 1, 1}, {1, 1, 3}});
  pw::SolveOptions options;
  options.latent_cardinality = 2;  // the generating model is binary
  auto verdict = pw::decide_support(fc, sigma, options);
  REQUIRE(verdict.compatible);
  CHECK(pw::verify_certificate(fc, *verdict.certificate, sigma));
  CHECK(verdict.certificate->diagonal_events.empty());
}

TEST_CASE("search statistics are deterministic across workers") {
  auto tri = triangle();
  auto sigma = make_support(tri, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  auto seq = pw::decide_support(tri, sigma);
  pw::SolveOptions two;
  two.threads = 2;
  auto par = pw::decide_support(tri, sigma, two);
  CHECK(seq.compatible == par.compatible);
  CHECK(seq.stats.nodes == par.stats.nodes);
  CHECK(seq.stats.backtracks == par.stats.backtracks);

  auto again = pw::decide_support(tri, sigma);
  CHECK(again.stats.nodes == seq.stats.nodes);
}

TEST_CASE("input validation") {
  auto w = w_structure();
  VariableList wrong{{"a", "b"}, {2, 2}};
  CHECK_THROWS_AS(
      pw::decide_support(w, SupportSet::make(wrong, {{0, 0}})), pw::Error);
  CHECK_THROWS_AS(SupportSet::make(wrong, {}), pw::Error);
}
