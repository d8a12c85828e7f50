#include <memory>
#include <random>

#include "doctest.h"
#include "pw/worlds.hpp"

using pw::CausalStructure;
using pw::Error;
using pw::LatentSpec;
using pw::Rational;
using pw::WorldsDiagram;

namespace {

// chain a -> b -> c with two confounders, non-binary b and c
std::shared_ptr<const CausalStructure> chain_structure() {
  return std::make_shared<const CausalStructure>(CausalStructure::make(
      {{"a", 2}, {"b", 4}, {"c", 4}}, {{"mu", 0}, {"nu", 0}},
      {{"mu", "a"}, {"a", "b"}, {"nu", "b"}, {"b", "c"}, {"mu", "c"},
       {"nu", "c"}}));
}

// the worked deterministic model on the chain structure
WorldsDiagram chain_diagram() {
  auto g = chain_structure();
  WorldsDiagram d(g, {2, 2});
  int a = g->index_of("a"), b = g->index_of("b"), c = g->index_of("c");
  auto set = [&](int row, std::vector<int> comps, int value) {
    d.table().values[row][d.shape().pack_key(row, comps)] =
        static_cast<int16_t>(value);
  };
  set(a, {0}, 0);
  set(a, {1}, 1);
  set(b, {0, 0}, 3);
  set(b, {0, 1}, 1);
  set(b, {1, 0}, 2);
  set(b, {1, 1}, 0);
  set(c, {3, 0, 0}, 0);
  set(c, {1, 0, 1}, 1);
  set(c, {2, 1, 0}, 2);
  set(c, {0, 1, 1}, 3);
  return d;
}

// two visibles sharing one source, feeding a collider with private noise
std::shared_ptr<const CausalStructure> fork_collider_structure() {
  return std::make_shared<const CausalStructure>(CausalStructure::make(
      {{"a", 2}, {"b", 2}, {"c", 4}}, {{"mu", 0}, {"nu", 0}},
      {{"mu", "a"}, {"mu", "b"}, {"a", "c"}, {"b", "c"}, {"nu", "c"}}));
}

WorldsDiagram fork_collider_diagram(bool with_superfluous) {
  auto g = fork_collider_structure();
  WorldsDiagram d(g, {2, 2});
  int a = g->index_of("a"), b = g->index_of("b"), c = g->index_of("c");
  auto set = [&](int row, std::vector<int> comps, int value) {
    d.table().values[row][d.shape().pack_key(row, comps)] =
        static_cast<int16_t>(value);
  };
  set(a, {0}, 0);
  set(a, {1}, 1);
  set(b, {0}, 0);
  set(b, {1}, 1);
  set(c, {0, 0, 0}, 2);
  set(c, {0, 0, 1}, 0);
  set(c, {1, 1, 0}, 3);
  set(c, {1, 1, 1}, 1);
  if (with_superfluous) {
    set(c, {0, 1, 0}, 0);
    set(c, {0, 1, 1}, 1);
    set(c, {1, 0, 0}, 2);
    set(c, {1, 0, 1}, 3);
  }
  return d;
}

WorldsDiagram random_total_diagram(std::mt19937_64& rng,
                                   std::shared_ptr<const CausalStructure> g,
                                   std::vector<int> cards) {
  WorldsDiagram d(std::move(g), std::move(cards));
  for (size_t row = 0; row < d.shape().rows.size(); ++row) {
    int card = d.structure().cardinality(d.shape().rows[row].visible);
    std::uniform_int_distribution<int> pick(0, card - 1);
    for (auto& cell : d.table().values[row]) {
      cell = static_cast<int16_t>(pick(rng));
    }
  }
  return d;
}

std::vector<std::vector<int>> random_perms(std::mt19937_64& rng,
                                           const std::vector<int>& cards) {
  std::vector<std::vector<int>> perms;
  for (int c : cards) {
    std::vector<int> p(c);
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng);
    perms.push_back(p);
  }
  return perms;
}

}  // namespace

TEST_CASE("worked example worlds evaluate as published") {
  auto d = chain_diagram();
  auto w00 = pw::evaluate_world(d, {0, 0});
  CHECK(w00.total);
  CHECK(w00.values == std::vector<int16_t>{0, 3, 0});
  auto w11 = pw::evaluate_world(d, {1, 1});
  CHECK(w11.values == std::vector<int16_t>{1, 0, 3});

  WorldsDiagram empty(chain_structure(), {2, 2});
  auto blocked = pw::evaluate_world(empty, {0, 0});
  CHECK_FALSE(blocked.total);
  CHECK(blocked.blocked_row == empty.structure().index_of("a"));
}

TEST_CASE("simulate reproduces the worked four-world mixture") {
  auto d = chain_diagram();
  auto p = pw::simulate(d, LatentSpec::uniform({2, 2}));
  CHECK(p.entries().size() == 4);
  CHECK(p.probability({0, 3, 0}) == Rational(1, 4));
  CHECK(p.probability({0, 1, 1}) == Rational(1, 4));
  CHECK(p.probability({1, 2, 2}) == Rational(1, 4));
  CHECK(p.probability({1, 0, 3}) == Rational(1, 4));

  auto d2 = fork_collider_diagram(true);
  auto p2 = pw::simulate(d2, LatentSpec::uniform({2, 2}));
  CHECK(p2.probability({0, 0, 2}) == Rational(1, 4));
  CHECK(p2.probability({0, 0, 0}) == Rational(1, 4));
  CHECK(p2.probability({1, 1, 3}) == Rational(1, 4));
  CHECK(p2.probability({1, 1, 1}) == Rational(1, 4));
}

TEST_CASE("constant tables give a point mass under any latent distribution") {
  auto g = fork_collider_structure();
  WorldsDiagram d(g, {2, 3});
  for (size_t row = 0; row < d.shape().rows.size(); ++row) {
    for (auto& cell : d.table().values[row]) cell = 0;
  }
  LatentSpec spec;
  spec.cardinalities = {2, 3};
  spec.distributions = {{Rational(1, 3), Rational(2, 3)},
                        {Rational(1, 2), Rational(1, 4), Rational(1, 4)}};
  auto p = pw::simulate(d, spec);
  CHECK(p.entries().size() == 1);
  CHECK(p.probability({0, 0, 0}) == 1);
}

TEST_CASE("incomplete tables fail simulation with the blocking key") {
  WorldsDiagram empty(chain_structure(), {2, 2});
  CHECK_THROWS_AS(pw::simulate(empty, LatentSpec::uniform({2, 2})), Error);
  try {
    pw::simulate(empty, LatentSpec::uniform({2, 2}));
  } catch (const Error& e) {
    CHECK(e.code() == pw::ErrorCode::IncompleteTable);
  }
}

TEST_CASE("reachable keys exclude superfluous table entries") {
  auto d = fork_collider_diagram(true);
  auto keys = pw::reachable_keys(d);
  int c = d.structure().index_of("c");

  // entries where a and b disagree are never queried
  int64_t superfluous = d.shape().pack_key(c, {1, 0, 1});
  for (const auto& [row, key] : keys) {
    CHECK((row != c || key != superfluous));
  }
  // 2 keys each for a and b, 4 reachable for c
  CHECK(keys.size() == 8);

  // no visible-visible edges: every key of every row is reachable
  auto w = std::make_shared<const CausalStructure>(CausalStructure::make(
      {{"a", 2}, {"b", 2}, {"c", 2}}, {{"mu", 0}, {"nu", 0}},
      {{"mu", "a"}, {"mu", "b"}, {"nu", "b"}, {"nu", "c"}}));
  WorldsDiagram wd(w, {3, 3});
  size_t total = 0;
  for (const auto& row : wd.shape().rows) total += row.key_count;
  CHECK(pw::reachable_keys(wd).size() == total);

  // brute-force oracle: evaluate every world independently
  std::mt19937_64 rng(3);
  for (int round = 0; round < 20; ++round) {
    auto rd = random_total_diagram(rng, fork_collider_structure(), {2, 2});
    std::set<std::pair<int, int64_t>> expected;
    for (int64_t world = 0; world < rd.world_count(); ++world) {
      auto lambda = rd.unpack_world(world);
      // recompute by hand in topological order
      std::vector<int> values(3, -1);
      for (int row : rd.shape().topo_rows) {
        const auto& r = rd.shape().rows[row];
        std::vector<int> comps;
        for (int p : r.vpa) comps.push_back(values[p]);
        for (int l : r.lpa) {
          comps.push_back(lambda[l - rd.structure().visible_count()]);
        }
        int64_t key = rd.shape().pack_key(row, comps);
        expected.insert({row, key});
        values[row] = rd.table().values[row][key];
      }
    }
    auto got = pw::reachable_keys(rd);
    CHECK(got == std::vector<std::pair<int, int64_t>>(expected.begin(),
                                                      expected.end()));
  }
}

TEST_CASE("latent permutations relabel worlds without changing statistics") {
  auto d = fork_collider_diagram(false);

  auto identity = pw::apply_latent_permutation(d, {{0, 1}, {0, 1}});
  CHECK(identity.table() == d.table());

  auto swapped = pw::apply_latent_permutation(d, {{1, 0}, {0, 1}});
  CHECK_FALSE(swapped.table() == d.table());
  CHECK(pw::simulate(swapped, LatentSpec::uniform({2, 2})) ==
        pw::simulate(d, LatentSpec::uniform({2, 2})));

  // obs(pi(lambda)) after = obs(lambda) before
  auto before = pw::evaluate_world(d, {0, 1});
  auto after = pw::evaluate_world(swapped, {1, 1});
  CHECK(before.values == after.values);

  std::mt19937_64 rng(7);
  for (int round = 0; round < 25; ++round) {
    auto rd = random_total_diagram(rng, chain_structure(), {2, 2});
    auto perms = random_perms(rng, {2, 2});
    auto pd = pw::apply_latent_permutation(rd, perms);
    CHECK(pw::simulate(pd, LatentSpec::uniform({2, 2})) ==
          pw::simulate(rd, LatentSpec::uniform({2, 2})));
  }

  CHECK_THROWS_AS(pw::apply_latent_permutation(d, {{0, 0}, {0, 1}}), Error);
  CHECK_THROWS_AS(pw::apply_latent_permutation(d, {{0, 1}}), Error);
}

TEST_CASE("canonical form is idempotent and orbit-invariant") {
  auto base = fork_collider_diagram(true);
  auto canon = pw::canonical_form(base);
  CHECK(pw::canonical_form(canon).table() == canon.table());
  CHECK(pw::is_canonical_form(canon));

  // the relabeled variants collapse to one representative
  auto mu_swapped = pw::apply_latent_permutation(base, {{1, 0}, {0, 1}});
  auto nu_swapped = pw::apply_latent_permutation(base, {{0, 1}, {1, 0}});
  CHECK(pw::canonical_form(mu_swapped).table() == canon.table());
  CHECK(pw::canonical_form(nu_swapped).table() == canon.table());

  std::mt19937_64 rng(11);
  for (int round = 0; round < 25; ++round) {
    auto rd = random_total_diagram(rng, fork_collider_structure(), {2, 2});
    auto perms = random_perms(rng, {2, 2});
    auto pd = pw::apply_latent_permutation(rd, perms);
    CHECK(pw::canonical_form(pd).table() == pw::canonical_form(rd).table());
  }

  WorldsDiagram big(fork_collider_structure(), {6, 6});
  CHECK_THROWS_AS(pw::canonical_form(big, 100), Error);
}

TEST_CASE("world values depend only on ancestral latent coordinates") {
  std::mt19937_64 rng(13);
  auto g = chain_structure();
  for (int round = 0; round < 25; ++round) {
    auto d = random_total_diagram(rng, g, {2, 2});
    // b depends on mu only through a, and on nu directly; scrambling a
    // non-ancestral coordinate of a chosen visible leaves it unchanged
    for (int v : g->visible_set()) {
      pw::VertexSet anc = g->graph().ancestors({v});
      anc = pw::set_union_of(anc, {v});
      std::vector<int> lambda{rng() % 2 ? 1 : 0, rng() % 2 ? 1 : 0};
      auto baseline = pw::evaluate_world(d, lambda);
      for (int l : g->latent_set()) {
        if (pw::set_contains(anc, l)) continue;
        auto scrambled = lambda;
        int pos = l - g->visible_count();
        scrambled[pos] = 1 - scrambled[pos];
        auto other = pw::evaluate_world(d, scrambled);
        CHECK(other.values[v] == baseline.values[v]);
      }
    }
  }
}

TEST_CASE("worlds sharing a key agree on the value") {
  std::mt19937_64 rng(17);
  auto g = fork_collider_structure();
  for (int round = 0; round < 10; ++round) {
    auto d = random_total_diagram(rng, g, {2, 2});
    std::map<std::pair<int, int64_t>, int16_t> seen;
    for (int64_t world = 0; world < d.world_count(); ++world) {
      auto lambda = d.unpack_world(world);
      auto eval = pw::evaluate_world(d, lambda);
      std::vector<int> values(eval.values.begin(), eval.values.end());
      for (int row : d.shape().topo_rows) {
        const auto& r = d.shape().rows[row];
        std::vector<int> comps;
        for (int p : r.vpa) comps.push_back(values[p]);
        for (int l : r.lpa) {
          comps.push_back(lambda[l - g->visible_count()]);
        }
        auto key = std::make_pair(row, d.shape().pack_key(row, comps));
        auto [it, inserted] = seen.emplace(key, eval.values[row]);
        if (!inserted) CHECK(it->second == eval.values[row]);
      }
    }
  }
}

TEST_CASE("uniform simulation yields multiples of the world weight") {
  std::mt19937_64 rng(19);
  for (int round = 0; round < 10; ++round) {
    auto d = random_total_diagram(rng, chain_structure(), {2, 3});
    auto p = pw::simulate(d, LatentSpec::uniform({2, 3}));
    for (const auto& [outcome, q] : p.entries()) {
      Rational scaled = q * 6;
      CHECK(denominator(scaled) == 1);
    }
    auto counts = pw::simulate_uniform_counts(d);
    CHECK(counts.to_distribution() == p);
  }
}
