#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pw/hierarchy.hpp"

using pw::CausalStructure;
using pw::Distribution;
using pw::OutcomeTuple;
using pw::Rational;
using pw::UniformSet;
using pw::VariableList;

namespace {

CausalStructure fork_collider() {
  return CausalStructure::make(
      {{"a", 2}, {"b", 2}, {"c", 4}}, {{"mu", 0}, {"nu", 0}},
      {{"mu", "a"}, {"mu", "b"}, {"a", "c"}, {"b", "c"}, {"nu", "c"}});
}

CausalStructure w_structure() {
  return CausalStructure::make(
      {{"a", 2}, {"b", 2}, {"c", 2}}, {{"mu", 0}, {"nu", 0}},
      {{"mu", "a"}, {"mu", "b"}, {"nu", "b"}, {"nu", "c"}});
}

CausalStructure bell() {
  return CausalStructure::make(
      {{"x", 2}, {"a", 2}, {"b", 2}, {"y", 2}},
      {{"mu", 0}, {"rho", 0}, {"nu", 0}},
      {{"mu", "x"}, {"rho", "a"}, {"rho", "b"}, {"nu", "y"},
       {"x", "a"}, {"y", "b"}});
}

Distribution quarter_mixture() {
  VariableList vars{{"a", "b", "c"}, {2, 2, 4}};
  return pw::mixture({{Rational(1, 4), pw::point_mass(vars, {0, 0, 2})},
                      {Rational(1, 4), pw::point_mass(vars, {0, 0, 0})},
                      {Rational(1, 4), pw::point_mass(vars, {1, 1, 3})},
                      {Rational(1, 4), pw::point_mass(vars, {1, 1, 1})}});
}

Distribution pr_box() {
  VariableList vars{{"x", "a", "b", "y"}, {2, 2, 2, 2}};
  std::map<OutcomeTuple, Rational> probs;
  for (int x = 0; x < 2; ++x) {
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        for (int y = 0; y < 2; ++y) {
          if ((a ^ b) == (x & y)) probs[{x, a, b, y}] = Rational(1, 8);
        }
      }
    }
  }
  return Distribution(vars, probs);
}

bool contains_counts(const UniformSet& u, const std::vector<int64_t>& counts) {
  return std::binary_search(u.counts.begin(), u.counts.end(), counts);
}

}  // namespace

TEST_CASE("enumeration contains the worked quarter mixture") {
  auto fc = fork_collider();
  auto u = pw::enumerate_uniform(fc, {2, 2});
  auto target = pw::to_count_vector(quarter_mixture(), 4);
  CHECK(contains_counts(u, target.counts));
}

TEST_CASE("cardinality-one latents give exactly the point masses") {
  auto w = w_structure();
  auto u = pw::enumerate_uniform(w, {1, 1});
  auto expected = oracles::point_mass_outcomes(w);
  REQUIRE(u.counts.size() == expected.size());
  for (const auto& outcome : expected) {
    std::vector<int64_t> counts(8, 0);
    counts[pw::pack_outcome(u.vars, outcome)] = 1;
    CHECK(contains_counts(u, counts));
  }
}

TEST_CASE("symmetry reduction never changes the deduplicated set") {
  std::mt19937_64 rng(51);
  auto structures = oracles::small_structures(3);
  std::uniform_int_distribution<size_t> g_pick(0, structures.size() - 1);
  std::uniform_int_distribution<int> card_pick(1, 2);
  for (int round = 0; round < 8; ++round) {
    const auto& g = structures[g_pick(rng)];
    std::vector<int> cards(g.latent_count());
    for (auto& c : cards) c = card_pick(rng);
    pw::EnumerationOptions with, without;
    without.symmetry_reduction = false;
    auto u1 = pw::enumerate_uniform(g, cards, with);
    auto u2 = pw::enumerate_uniform(g, cards, without);
    CHECK(u1.counts == u2.counts);
  }
}

TEST_CASE("every enumerated member is reproduced by its witness") {
  auto fc = fork_collider();
  pw::EnumerationOptions options;
  options.keep_witnesses = true;
  auto u = pw::enumerate_uniform(fc, {2, 2}, options);
  REQUIRE(u.counts.size() == u.witnesses.size());
  for (size_t i = 0; i < u.counts.size(); ++i) {
    auto d = pw::diagram_of(u.witnesses[i]);
    auto counts = pw::simulate_uniform_counts(d);
    CHECK(counts.counts == u.counts[i]);
  }
}

TEST_CASE("enumeration is worker-count independent") {
  auto b = bell();
  pw::EnumerationOptions one, four;
  one.keep_witnesses = four.keep_witnesses = true;
  four.threads = 4;
  auto u1 = pw::enumerate_uniform(b, {2, 2, 2}, one);
  auto u4 = pw::enumerate_uniform(b, {2, 2, 2}, four);
  CHECK(u1.counts == u4.counts);
  CHECK(u1.nodes_explored == u4.nodes_explored);
  REQUIRE(u1.witnesses.size() == u4.witnesses.size());
  for (size_t i = 0; i < u1.witnesses.size(); ++i) {
    CHECK(u1.witnesses[i].table == u4.witnesses[i].table);
  }
}

TEST_CASE("enumeration budget is a hard error") {
  pw::EnumerationOptions tiny;
  tiny.node_budget = 3;
  CHECK_THROWS_AS(pw::enumerate_uniform(bell(), {2, 2, 2}, tiny), pw::Error);
}

TEST_CASE("min distance scans exactly") {
  auto fc = fork_collider();
  auto u = pw::enumerate_uniform(fc, {2, 2});
  auto p = quarter_mixture();
  auto nearest = pw::min_distance_to_uniform(p, u);
  CHECK(nearest.delta == 0);
  CHECK(u.counts[nearest.index] == pw::to_count_vector(p, 4).counts);

  // linear-scan oracle on random targets
  std::mt19937_64 rng(53);
  std::uniform_int_distribution<int> w(0, 5);
  for (int round = 0; round < 10; ++round) {
    std::vector<int> weights(16);
    int total = 0;
    while (total == 0) {
      for (auto& x : weights) total += (x = w(rng));
    }
    std::map<OutcomeTuple, Rational> probs;
    for (int i = 0; i < 16; ++i) {
      if (weights[i]) {
        probs[pw::unpack_outcome(u.vars, i)] = Rational(weights[i], total);
      }
    }
    Distribution target(u.vars, probs);
    auto got = pw::min_distance_to_uniform(target, u);
    Rational best = -1;
    for (size_t i = 0; i < u.counts.size(); ++i) {
      Rational delta = pw::distance(target, u.member(i));
      if (best < 0 || delta < best) best = delta;
    }
    CHECK(got.delta == best);
  }
}

TEST_CASE("order test passes the generating distribution with zero distance") {
  auto fc = fork_collider();
  auto result = pw::order_k_test(fc, quarter_mixture(), 2);
  CHECK(result.pass);
  CHECK(result.min_delta == 0);
  CHECK(result.c_bound == 12);
  CHECK(result.epsilon == Rational(143, 2));
  REQUIRE(result.witness.has_value());
  auto d = pw::diagram_of(*result.witness);
  CHECK(pw::simulate(d, pw::LatentSpec::uniform(result.witness->latent_cards))
        == *result.nearest);
  CHECK(*result.nearest == quarter_mixture());
}

TEST_CASE("point masses pass at order one via constant tables") {
  auto w = w_structure();
  VariableList vars{{"a", "b", "c"}, {2, 2, 2}};
  auto result = pw::order_k_test(w, pw::point_mass(vars, {1, 0, 1}), 1);
  CHECK(result.pass);
  CHECK(result.min_delta == 0);
}

TEST_CASE("nonlocal box distances shrink then stay away from zero") {
  auto b = bell();
  pw::OrderTestOptions c_one;
  c_one.c_override = pw::BigInt(1);

  auto k1 = pw::order_k_test(b, pr_box(), 1, c_one);
  CHECK(k1.epsilon == 0);
  CHECK(k1.min_delta == Rational(7, 4));
  CHECK_FALSE(k1.pass);

  auto k2 = pw::order_k_test(b, pr_box(), 2, c_one);
  CHECK(k2.min_delta == Rational(1, 2));
  CHECK_FALSE(k2.pass);

  // with the default cardinality bound the small orders stay feasible
  auto relaxed = pw::order_k_test(b, pr_box(), 2);
  CHECK(relaxed.c_bound == 12);
  CHECK(relaxed.pass);
}

TEST_CASE("distributions simulated from uniform models always pass") {
  std::mt19937_64 rng(59);
  auto fc = fork_collider();
  auto shared = std::make_shared<const CausalStructure>(fc);
  for (int round = 0; round < 5; ++round) {
    pw::WorldsDiagram d(shared, {2, 2});
    for (size_t row = 0; row < d.shape().rows.size(); ++row) {
      int card = fc.cardinality(d.shape().rows[row].visible);
      std::uniform_int_distribution<int> pick(0, card - 1);
      for (auto& cell : d.table().values[row]) {
        cell = static_cast<int16_t>(pick(rng));
      }
    }
    auto p = pw::simulate(d, pw::LatentSpec::uniform({2, 2}));
    for (int order : {1, 2}) {
      CHECK(pw::order_k_test(fc, p, order).pass);
    }
  }
}

TEST_CASE("order test validates inputs") {
  auto fc = fork_collider();
  CHECK_THROWS_AS(pw::order_k_test(fc, quarter_mixture(), 0), pw::Error);
  VariableList wrong{{"a", "b"}, {2, 2}};
  CHECK_THROWS_AS(pw::order_k_test(fc, pw::point_mass(wrong, {0, 0}), 1),
                  pw::Error);
}
