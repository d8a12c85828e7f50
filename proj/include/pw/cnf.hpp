#pragma once

#include <string>
#include <vector>

#include "pw/possibilistic.hpp"

namespace pw {

struct CnfDocument {
  int variable_count = 0;
  std::vector<std::vector<int>> clauses;  // signed DIMACS literals
  std::vector<std::string> legend;        // legend[i] describes variable i+1
};

// Boolean-visible reduction of the support decision. Variables are the world
// observations O[v,lambda] (worlds lexicographic, visibles topological) and
// the table entries F[v,key]. Satisfiable iff decide_support is compatible.
CnfDocument export_cnf(const CausalStructure& g, const SupportSet& sigma);

// Bit-exact DIMACS: `c` legend lines in variable order, `p cnf <n> <m>`,
// then one space-separated zero-terminated clause per line.
std::string to_dimacs(const CnfDocument& doc);

struct SatResult {
  bool satisfiable = false;
  std::vector<bool> assignment;  // assignment[i] for variable i+1
};

// Complete unit-propagating depth-first decision procedure.
SatResult solve_cnf(const CnfDocument& doc);

}  // namespace pw
