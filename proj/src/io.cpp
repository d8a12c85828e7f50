#include "pw/io.hpp"

#include <fstream>
#include <sstream>

namespace pw {

namespace {

void check_fields(const Json& j, const std::vector<std::string>& allowed,
                  const std::string& context) {
  if (!j.is_object()) {
    fail(ErrorCode::ParseError, context + " must be a JSON object");
  }
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(ErrorCode::ParseError,
           "unknown field '" + key + "' in " + context);
    }
  }
}

const Json& require(const Json& j, const std::string& key,
                    const std::string& context) {
  auto it = j.find(key);
  if (it == j.end()) {
    fail(ErrorCode::ParseError, context + " is missing '" + key + "'");
  }
  return *it;
}

int parse_int(const Json& j, const std::string& context) {
  if (!j.is_number_integer()) {
    fail(ErrorCode::ParseError, context + " must be an integer");
  }
  return j.get<int>();
}

std::string parse_string(const Json& j, const std::string& context) {
  if (!j.is_string()) {
    fail(ErrorCode::ParseError, context + " must be a string");
  }
  return j.get<std::string>();
}

OutcomeTuple parse_tuple(const Json& j, const std::string& context) {
  if (!j.is_array()) {
    fail(ErrorCode::ParseError, context + " must be an array");
  }
  OutcomeTuple out;
  for (const auto& x : j) out.push_back(parse_int(x, context + " entry"));
  return out;
}

std::vector<VariableDecl> parse_decls(const Json& j, bool card_required,
                                      const std::string& context) {
  if (!j.is_array()) {
    fail(ErrorCode::ParseError, context + " must be an array");
  }
  std::vector<VariableDecl> out;
  for (const auto& item : j) {
    check_fields(item, {"name", "cardinality"}, context + " entry");
    VariableDecl d;
    d.name = parse_string(require(item, "name", context), context + " name");
    if (item.contains("cardinality")) {
      d.cardinality = parse_int(item["cardinality"], context + " cardinality");
    } else if (card_required) {
      fail(ErrorCode::ParseError,
           context + " entry '" + d.name + "' is missing 'cardinality'");
    }
    out.push_back(std::move(d));
  }
  return out;
}

VariableList parse_variable_list(const Json& j) {
  VariableList vars;
  const Json& names = require(j, "variables", "distribution file");
  const Json& cards = require(j, "cardinalities", "distribution file");
  if (!names.is_array() || !cards.is_array()) {
    fail(ErrorCode::ParseError, "'variables'/'cardinalities' must be arrays");
  }
  for (const auto& n : names) {
    vars.names.push_back(parse_string(n, "variable name"));
  }
  for (const auto& c : cards) {
    vars.cardinalities.push_back(parse_int(c, "cardinality"));
  }
  vars.validate();
  return vars;
}

Rational parse_probability(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long long>());
  fail(ErrorCode::ParseError,
       "probabilities must be strings (\"n/d\" or decimal)");
}

}  // namespace

CausalStructure structure_from_json(const Json& j) {
  check_fields(j, {"visible", "latent", "edges"}, "structure file");
  auto visibles =
      parse_decls(require(j, "visible", "structure file"), true, "visible");
  auto latents =
      parse_decls(require(j, "latent", "structure file"), false, "latent");
  const Json& edges_json = require(j, "edges", "structure file");
  if (!edges_json.is_array()) {
    fail(ErrorCode::ParseError, "'edges' must be an array");
  }
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& e : edges_json) {
    if (!e.is_array() || e.size() != 2) {
      fail(ErrorCode::ParseError, "each edge must be a [from,to] pair");
    }
    edges.emplace_back(parse_string(e[0], "edge endpoint"),
                       parse_string(e[1], "edge endpoint"));
  }
  return CausalStructure::make(visibles, latents, edges);
}

Json structure_to_json(const CausalStructure& g) {
  Json j;
  j["visible"] = Json::array();
  for (int v : g.visible_set()) {
    j["visible"].push_back({{"name", g.name_of(v)},
                            {"cardinality", g.cardinality(v)}});
  }
  j["latent"] = Json::array();
  for (int l : g.latent_set()) {
    Json entry{{"name", g.name_of(l)}};
    if (g.cardinality(l) > 0) entry["cardinality"] = g.cardinality(l);
    j["latent"].push_back(std::move(entry));
  }
  j["edges"] = Json::array();
  for (const auto& [from, to] : g.graph().edge_list()) {
    j["edges"].push_back({from, to});
  }
  return j;
}

Distribution distribution_from_json(const Json& j) {
  check_fields(j, {"variables", "cardinalities", "events"},
               "distribution file");
  VariableList vars = parse_variable_list(j);
  const Json& events = require(j, "events", "distribution file");
  if (!events.is_array()) {
    fail(ErrorCode::ParseError, "'events' must be an array");
  }
  std::map<OutcomeTuple, Rational> probs;
  for (const auto& e : events) {
    check_fields(e, {"outcome", "p"}, "event");
    OutcomeTuple outcome =
        parse_tuple(require(e, "outcome", "event"), "outcome");
    if (probs.count(outcome)) {
      fail(ErrorCode::ParseError, "duplicate outcome in events");
    }
    probs[outcome] = parse_probability(require(e, "p", "event"));
  }
  return Distribution(vars, std::move(probs));
}

Json distribution_to_json(const Distribution& p) {
  Json j;
  j["variables"] = p.variables().names;
  j["cardinalities"] = p.variables().cardinalities;
  j["events"] = Json::array();
  for (const auto& [outcome, q] : p.entries()) {
    j["events"].push_back(
        {{"outcome", outcome}, {"p", format_rational(q)}});
  }
  return j;
}

SupportSet support_from_json(const Json& j) {
  check_fields(j, {"variables", "cardinalities", "events"}, "support file");
  VariableList vars = parse_variable_list(j);
  const Json& events = require(j, "events", "support file");
  if (!events.is_array()) {
    fail(ErrorCode::ParseError, "'events' must be an array");
  }
  std::vector<OutcomeTuple> outcomes;
  for (const auto& e : events) {
    check_fields(e, {"outcome"}, "support event");
    outcomes.push_back(parse_tuple(require(e, "outcome", "event"), "outcome"));
  }
  return SupportSet::make(std::move(vars), std::move(outcomes));
}

Json support_to_json(const SupportSet& s) {
  Json j;
  j["variables"] = s.vars.names;
  j["cardinalities"] = s.vars.cardinalities;
  j["events"] = Json::array();
  for (const auto& outcome : s.events) {
    j["events"].push_back({{"outcome", outcome}});
  }
  return j;
}

SupportSet support_or_distribution_from_json(const Json& j,
                                             bool* was_distribution) {
  const Json& events = require(j, "events", "support/distribution file");
  bool has_p = false;
  if (events.is_array()) {
    for (const auto& e : events) {
      if (e.is_object() && e.contains("p")) {
        has_p = true;
        break;
      }
    }
  }
  if (was_distribution) *was_distribution = has_p;
  if (has_p) return support(distribution_from_json(j));
  return support_from_json(j);
}

Certificate certificate_from_json(const Json& j, const CausalStructure& g) {
  check_fields(j, {"latents", "tables", "diagonal_events"},
               "certificate file");
  auto latents =
      parse_decls(require(j, "latents", "certificate file"), true, "latents");
  if (static_cast<int>(latents.size()) != g.latent_count()) {
    fail(ErrorCode::CardinalityMismatch,
         "certificate lists " + std::to_string(latents.size()) +
             " latents, structure has " + std::to_string(g.latent_count()));
  }
  std::vector<int> cards;
  for (size_t i = 0; i < latents.size(); ++i) {
    int vertex = g.latent_set()[i];
    if (latents[i].name != g.name_of(vertex)) {
      fail(ErrorCode::VariableMismatch,
           "certificate latent '" + latents[i].name +
               "' does not match structure latent '" + g.name_of(vertex) +
               "'");
    }
    if (latents[i].cardinality < 1) {
      fail(ErrorCode::CardinalityMismatch,
           "latent '" + latents[i].name + "' needs cardinality >= 1");
    }
    cards.push_back(latents[i].cardinality);
  }

  Certificate cert;
  cert.model.structure = std::make_shared<const CausalStructure>(g);
  cert.model.latent_cards = cards;
  TableShape shape = make_table_shape(g, cards);
  cert.model.table = FunctionTable::empty(shape);

  const Json& tables = require(j, "tables", "certificate file");
  if (!tables.is_array()) {
    fail(ErrorCode::ParseError, "'tables' must be an array");
  }
  for (const auto& t : tables) {
    check_fields(t, {"visible", "entries"}, "table");
    std::string name = parse_string(require(t, "visible", "table"), "visible");
    int row = g.index_of(name);
    if (!g.is_visible(row)) {
      fail(ErrorCode::VariableMismatch, "'" + name + "' is not visible");
    }
    const auto& r = shape.rows[row];
    const Json& entries = require(t, "entries", "table");
    if (!entries.is_array()) {
      fail(ErrorCode::ParseError, "'entries' must be an array");
    }
    for (const auto& entry : entries) {
      check_fields(entry, {"key", "value"}, "table entry");
      OutcomeTuple key = parse_tuple(require(entry, "key", "entry"), "key");
      int value = parse_int(require(entry, "value", "entry"), "value");
      if (key.size() != r.radices.size()) {
        fail(ErrorCode::CardinalityMismatch,
             "key arity for '" + name + "' must be " +
                 std::to_string(r.radices.size()));
      }
      for (size_t i = 0; i < key.size(); ++i) {
        if (key[i] < 0 || key[i] >= r.radices[i]) {
          fail(ErrorCode::CardinalityMismatch,
               "key component out of range for '" + name + "'");
        }
      }
      if (value < 0 || value >= g.cardinality(row)) {
        fail(ErrorCode::CardinalityMismatch,
             "value out of range for '" + name + "'");
      }
      int64_t packed = shape.pack_key(row, std::vector<int>(key.begin(), key.end()));
      if (cert.model.table.values[row][packed] >= 0) {
        fail(ErrorCode::ParseError, "duplicate key for '" + name + "'");
      }
      cert.model.table.values[row][packed] = static_cast<int16_t>(value);
    }
  }

  const Json& diag = require(j, "diagonal_events", "certificate file");
  if (!diag.is_array()) {
    fail(ErrorCode::ParseError, "'diagonal_events' must be an array");
  }
  for (const auto& e : diag) {
    OutcomeTuple outcome = parse_tuple(e, "diagonal event");
    if (static_cast<int>(outcome.size()) != g.visible_count()) {
      fail(ErrorCode::CardinalityMismatch, "diagonal event arity mismatch");
    }
    cert.diagonal_events.push_back(std::move(outcome));
  }
  return cert;
}

Json certificate_to_json(const Certificate& cert) {
  const CausalStructure& g = *cert.model.structure;
  TableShape shape = make_table_shape(g, cert.model.latent_cards);
  Json j;
  j["latents"] = Json::array();
  for (size_t i = 0; i < cert.model.latent_cards.size(); ++i) {
    j["latents"].push_back({{"name", g.name_of(g.latent_set()[i])},
                            {"cardinality", cert.model.latent_cards[i]}});
  }
  j["tables"] = Json::array();
  for (int v : g.visible_set()) {
    Json entries = Json::array();
    const auto& values = cert.model.table.values[v];
    for (int64_t key = 0; key < static_cast<int64_t>(values.size()); ++key) {
      if (values[key] < 0) continue;
      entries.push_back({{"key", shape.unpack_key(v, key)},
                         {"value", values[key]}});
    }
    j["tables"].push_back({{"visible", g.name_of(v)},
                           {"entries", std::move(entries)}});
  }
  j["diagonal_events"] = Json::array();
  for (const auto& e : cert.diagonal_events) j["diagonal_events"].push_back(e);
  return j;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, "'" + path + "': " + e.what());
  }
}

void save_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::ParseError, "cannot write '" + path + "'");
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

std::string dump_json_compact(const Json& j) { return j.dump(); }

}  // namespace pw
