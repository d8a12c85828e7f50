#pragma once

#include <string>

#include "json.hpp"
#include "pw/cnf.hpp"
#include "pw/hierarchy.hpp"

namespace pw {

using Json = nlohmann::ordered_json;

// Structure files:
//   {"visible": [{"name","cardinality"}...],
//    "latent":  [{"name","cardinality"?}...],
//    "edges":   [[from,to]...]}
// Unknown fields are rejected everywhere.
CausalStructure structure_from_json(const Json& j);
Json structure_to_json(const CausalStructure& g);

// Distribution files:
//   {"variables": [...], "cardinalities": [...],
//    "events": [{"outcome":[...], "p":"n/d"|decimal}...]}
// Support files are the same without "p".
Distribution distribution_from_json(const Json& j);
Json distribution_to_json(const Distribution& p);
SupportSet support_from_json(const Json& j);
Json support_to_json(const SupportSet& s);

// Accepts either file kind; distributions are reduced to their support.
SupportSet support_or_distribution_from_json(const Json& j,
                                             bool* was_distribution = nullptr);

// Certificate files:
//   {"latents": [{"name","cardinality"}...],
//    "tables": [{"visible", "entries":[{"key":[...],"value":int}...]}...],
//    "diagonal_events": [[...]...]}
// Keys list visible-parent values (topological order) followed by latent
// values (declaration order); the paired structure supplies the layout.
Certificate certificate_from_json(const Json& j, const CausalStructure& g);
Json certificate_to_json(const Certificate& cert);

Json load_json_file(const std::string& path);
void save_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Canonical dump: two-space indent plus trailing newline.
std::string dump_json(const Json& j);
// Single-line dump for streamed records.
std::string dump_json_compact(const Json& j);

}  // namespace pw
