#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pw/io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitIncompatible = 2;

int default_threads() {
  if (const char* env = std::getenv("PW_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    pw::save_text_file(out_path, text);
  }
}

std::string join_names(const pw::CausalStructure& g, const pw::VertexSet& vs) {
  std::string s = "{";
  for (size_t i = 0; i < vs.size(); ++i) {
    if (i) s += ",";
    s += g.name_of(vs[i]);
  }
  return s + "}";
}

struct LatentCardsArg {
  std::optional<int> all;
  std::vector<std::pair<std::string, int>> per_latent;
};

LatentCardsArg parse_latent_cards(const std::string& text) {
  LatentCardsArg arg;
  if (text.find('=') == std::string::npos) {
    arg.all = std::stoi(text);
    return arg;
  }
  size_t pos = 0;
  while (pos < text.size()) {
    size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    std::string item = text.substr(pos, comma - pos);
    size_t eq = item.find('=');
    if (eq == std::string::npos) {
      pw::fail(pw::ErrorCode::UsageError,
               "--latent-cards wants name=k[,name=k...] or a single integer");
    }
    arg.per_latent.emplace_back(item.substr(0, eq),
                                std::stoi(item.substr(eq + 1)));
    pos = comma + 1;
  }
  return arg;
}

int cmd_normalize(const std::string& structure_path,
                  const std::string& out_path) {
  pw::CausalStructure g =
      pw::structure_from_json(pw::load_json_file(structure_path));
  pw::NormalizeDelta delta;
  pw::CausalStructure normalized = pw::normalize(g, &delta);

  std::ostream& log = out_path.empty() ? std::cerr : std::cout;
  for (const auto& [from, to] : delta.edges_added) {
    log << "added edge " << from << " -> " << to << "\n";
  }
  for (const auto& [from, to] : delta.edges_removed) {
    log << "removed edge " << from << " -> " << to << "\n";
  }
  for (const auto& name : delta.latents_removed) {
    log << "removed latent " << name << "\n";
  }
  for (const auto& name : delta.latents_added) {
    log << "added latent " << name << "\n";
  }
  emit(pw::dump_json(pw::structure_to_json(normalized)), out_path);
  return kExitOk;
}

int cmd_bounds(const std::string& structure_path) {
  pw::CausalStructure g =
      pw::structure_from_json(pw::load_json_file(structure_path));
  pw::CausalStructure normalized = pw::normalize(g);
  for (int l : normalized.latent_set()) {
    pw::CardinalityBound b = pw::cardinality_bound(normalized, l);
    std::cout << "latent=" << normalized.name_of(l)
              << " district=" << join_names(normalized, b.district_set)
              << " conditioning=" << join_names(normalized, b.conditioning)
              << " descendant_part="
              << join_names(normalized, b.descendant_part)
              << " remainder=" << join_names(normalized, b.remainder)
              << " bound=" << b.bound.str() << "\n";
  }
  return kExitOk;
}

int cmd_check(const std::string& structure_path,
              const std::string& observation_path,
              const std::string& certificate_path,
              const std::string& cnf_path, std::optional<int> latent_card,
              int threads) {
  pw::CausalStructure g =
      pw::structure_from_json(pw::load_json_file(structure_path));
  bool was_distribution = false;
  pw::SupportSet sigma = pw::support_or_distribution_from_json(
      pw::load_json_file(observation_path), &was_distribution);

  pw::NormalizeDelta delta;
  pw::normalize(g, &delta);
  std::cout << "normalize: edges_added=" << delta.edges_added.size()
            << " edges_removed=" << delta.edges_removed.size()
            << " latents_removed=" << delta.latents_removed.size()
            << " latents_added=" << delta.latents_added.size() << "\n";
  std::cout << "support: " << sigma.size() << " events over "
            << sigma.vars.arity() << " variables"
            << (was_distribution ? " (reduced from a distribution)" : "")
            << "\n";

  if (!cnf_path.empty()) {
    pw::CnfDocument doc = pw::export_cnf(g, sigma);
    pw::save_text_file(cnf_path, pw::to_dimacs(doc));
    std::cout << "cnf: " << doc.variable_count << " variables, "
              << doc.clauses.size() << " clauses\n";
  }

  pw::SolveOptions options;
  options.threads = threads;
  options.latent_cardinality = latent_card;
  pw::Verdict verdict = pw::decide_support(g, sigma, options);
  if (verdict.compatible) {
    std::cout << "verdict: COMPATIBLE\n";
    if (!certificate_path.empty()) {
      pw::save_text_file(certificate_path,
                         pw::dump_json(pw::certificate_to_json(
                             *verdict.certificate)));
    }
    return kExitOk;
  }
  std::cout << "verdict: INCOMPATIBLE\n";
  std::cout << "nodes: " << verdict.stats.nodes << "\n";
  std::cout << "backtracks: " << verdict.stats.backtracks << "\n";
  return kExitIncompatible;
}

int cmd_simulate(const std::string& structure_path,
                 const std::string& certificate_path,
                 const std::string& out_path) {
  pw::CausalStructure g =
      pw::structure_from_json(pw::load_json_file(structure_path));
  pw::CausalStructure normalized = pw::normalize(g);
  pw::Certificate cert = pw::certificate_from_json(
      pw::load_json_file(certificate_path), normalized);
  pw::WorldsDiagram d = pw::diagram_of(cert.model);
  pw::Distribution p =
      pw::simulate(d, pw::LatentSpec::uniform(cert.model.latent_cards));
  emit(pw::dump_json(pw::distribution_to_json(p)), out_path);
  return kExitOk;
}

int cmd_enumerate(const std::string& structure_path,
                  const std::string& latent_cards_text, bool witnesses,
                  bool no_symmetry, uint64_t budget, int threads,
                  const std::string& out_path) {
  pw::CausalStructure g =
      pw::structure_from_json(pw::load_json_file(structure_path));
  pw::CausalStructure normalized = pw::normalize(g);

  LatentCardsArg arg = parse_latent_cards(latent_cards_text);
  std::vector<int> cards(normalized.latent_count(), arg.all.value_or(0));
  for (const auto& [name, k] : arg.per_latent) {
    int vertex = normalized.index_of(name);
    if (!normalized.is_latent(vertex)) {
      pw::fail(pw::ErrorCode::NotLatent, "'" + name + "' is not latent");
    }
    cards[vertex - normalized.visible_count()] = k;
  }
  for (size_t i = 0; i < cards.size(); ++i) {
    if (cards[i] < 1) {
      pw::fail(pw::ErrorCode::UsageError,
               "missing cardinality for latent '" +
                   normalized.name_of(normalized.latent_set()[i]) + "'");
    }
  }

  pw::EnumerationOptions options;
  options.node_budget = budget;
  options.symmetry_reduction = !no_symmetry;
  options.keep_witnesses = witnesses;
  options.threads = threads;
  pw::UniformSet u = pw::enumerate_uniform(normalized, cards, options);

  std::string out;
  for (size_t i = 0; i < u.counts.size(); ++i) {
    pw::Json record = pw::distribution_to_json(u.member(i));
    if (witnesses) {
      pw::Certificate cert;
      cert.model = u.witnesses[i];
      record["witness"] = pw::certificate_to_json(cert);
    }
    out += pw::dump_json_compact(record) + "\n";
  }
  emit(out, out_path);
  std::cerr << "members: " << u.counts.size()
            << " nodes: " << u.nodes_explored << "\n";
  return kExitOk;
}

int cmd_test_order(const std::string& structure_path,
                   const std::string& distribution_path, int order,
                   const std::string& c_override, uint64_t budget, int threads,
                   const std::string& certificate_path) {
  pw::CausalStructure g =
      pw::structure_from_json(pw::load_json_file(structure_path));
  pw::Distribution p =
      pw::distribution_from_json(pw::load_json_file(distribution_path));

  pw::OrderTestOptions options;
  if (!c_override.empty()) options.c_override = pw::BigInt(c_override);
  options.enumeration.node_budget = budget;
  options.enumeration.threads = threads;
  pw::HierarchyResult result = pw::order_k_test(g, p, order, options);

  std::cout << "order: " << result.order << "\n";
  std::cout << "C: " << result.c_bound.str() << "\n";
  std::cout << "epsilon: " << pw::format_rational(result.epsilon) << "\n";
  std::cout << "min_delta: " << pw::format_rational(result.min_delta) << "\n";
  std::cout << "members: " << result.member_count << "\n";
  std::cout << "verdict: " << (result.pass ? "PASS" : "FAIL") << "\n";
  if (result.pass && !certificate_path.empty() && result.witness) {
    pw::Certificate cert;
    cert.model = *result.witness;
    pw::save_text_file(certificate_path,
                       pw::dump_json(pw::certificate_to_json(cert)));
  }
  return result.pass ? kExitOk : kExitIncompatible;
}

int cmd_distance(const std::string& a_path, const std::string& b_path) {
  pw::Distribution a = pw::distribution_from_json(pw::load_json_file(a_path));
  pw::Distribution b = pw::distribution_from_json(pw::load_json_file(b_path));
  std::cout << pw::format_rational(pw::distance(a, b)) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Possible-worlds causal compatibility solver"};
  app.require_subcommand(1);

  int threads = default_threads();
  app.add_option("--threads", threads, "worker count (default PW_THREADS or 1)");
  int seed = 0;
  app.add_option("--seed", seed,
                 "reserved; the core paths use no randomness");

  std::string structure_path, observation_path, out_path, certificate_path,
      cnf_path, latent_cards_text, c_override, a_path, b_path;
  std::optional<int> latent_card;
  int order = 0;
  uint64_t budget = 100000000ULL;
  bool witnesses = false, no_symmetry = false;

  auto* normalize_cmd =
      app.add_subcommand("normalize", "rewrite to exo-simplicial form");
  normalize_cmd->add_option("structure", structure_path)->required();
  normalize_cmd->add_option("-o,--output", out_path);

  auto* bounds_cmd =
      app.add_subcommand("bounds", "latent cardinality upper bounds");
  bounds_cmd->add_option("structure", structure_path)->required();

  auto* check_cmd =
      app.add_subcommand("check", "decide support compatibility");
  check_cmd->add_option("structure", structure_path)->required();
  check_cmd->add_option("observation", observation_path)->required();
  check_cmd->add_option("--certificate", certificate_path);
  check_cmd->add_option("--cnf", cnf_path);
  int latent_card_value = 0;
  auto* latent_card_opt = check_cmd->add_option(
      "--latent-card", latent_card_value,
      "explore a fixed latent cardinality instead of |support|");

  auto* simulate_cmd =
      app.add_subcommand("simulate", "replay a certificate");
  simulate_cmd->add_option("structure", structure_path)->required();
  simulate_cmd->add_option("certificate", certificate_path)->required();
  simulate_cmd->add_option("-o,--output", out_path);

  auto* enumerate_cmd =
      app.add_subcommand("enumerate", "uniformly induced distributions");
  enumerate_cmd->add_option("structure", structure_path)->required();
  enumerate_cmd->add_option("--latent-cards", latent_cards_text)->required();
  enumerate_cmd->add_flag("--witnesses", witnesses);
  enumerate_cmd->add_flag("--no-symmetry", no_symmetry);
  enumerate_cmd->add_option("--budget", budget);
  enumerate_cmd->add_option("-o,--output", out_path);

  auto* order_cmd = app.add_subcommand("test-order", "order-K compatibility");
  order_cmd->add_option("structure", structure_path)->required();
  order_cmd->add_option("distribution", observation_path)->required();
  order_cmd->add_option("-K,--order", order)->required();
  order_cmd->add_option("--C", c_override);
  order_cmd->add_option("--budget", budget);
  order_cmd->add_option("--certificate", certificate_path);

  auto* distance_cmd = app.add_subcommand("distance", "exact L1 distance");
  distance_cmd->add_option("first", a_path)->required();
  distance_cmd->add_option("second", b_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (normalize_cmd->parsed()) return cmd_normalize(structure_path, out_path);
    if (bounds_cmd->parsed()) return cmd_bounds(structure_path);
    if (check_cmd->parsed()) {
      if (latent_card_opt->count()) latent_card = latent_card_value;
      return cmd_check(structure_path, observation_path, certificate_path,
                       cnf_path, latent_card, threads);
    }
    if (simulate_cmd->parsed()) {
      return cmd_simulate(structure_path, certificate_path, out_path);
    }
    if (enumerate_cmd->parsed()) {
      return cmd_enumerate(structure_path, latent_cards_text, witnesses,
                           no_symmetry, budget, threads, out_path);
    }
    if (order_cmd->parsed()) {
      return cmd_test_order(structure_path, observation_path, order,
                            c_override, budget, threads, certificate_path);
    }
    if (distance_cmd->parsed()) return cmd_distance(a_path, b_path);
  } catch (const pw::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
