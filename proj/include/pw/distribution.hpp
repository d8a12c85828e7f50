#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pw/errors.hpp"
#include "pw/rational.hpp"

namespace pw {

struct VariableList {
  std::vector<std::string> names;
  std::vector<int> cardinalities;

  bool operator==(const VariableList&) const = default;
  int arity() const { return static_cast<int>(names.size()); }
  int64_t outcome_space_size() const;
  void validate() const;
};

using OutcomeTuple = std::vector<int>;

void check_outcome(const VariableList& vars, const OutcomeTuple& outcome);

// Big-endian mixed-radix packing: numeric order equals lexicographic order.
int64_t pack_outcome(const VariableList& vars, const OutcomeTuple& outcome);
OutcomeTuple unpack_outcome(const VariableList& vars, int64_t index);

// Exact finite distribution. No zero-probability entries are stored and the
// total is exactly 1.
class Distribution {
 public:
  Distribution(VariableList vars, std::map<OutcomeTuple, Rational> probs);

  const VariableList& variables() const { return vars_; }
  const std::map<OutcomeTuple, Rational>& entries() const { return probs_; }
  Rational probability(const OutcomeTuple& outcome) const;

  bool operator==(const Distribution& other) const;

 private:
  VariableList vars_;
  std::map<OutcomeTuple, Rational> probs_;
};

struct SupportSet {
  VariableList vars;
  std::vector<OutcomeTuple> events;  // sorted, unique, nonempty

  static SupportSet make(VariableList vars, std::vector<OutcomeTuple> events);
  bool contains(const OutcomeTuple& outcome) const;
  int size() const { return static_cast<int>(events.size()); }
  bool operator==(const SupportSet&) const = default;
};

Distribution point_mass(const VariableList& vars, const OutcomeTuple& outcome);
Distribution mixture(
    const std::vector<std::pair<Rational, Distribution>>& components);
SupportSet support(const Distribution& p);

// L1 distance, exact.
Rational distance(const Distribution& p, const Distribution& q);

Distribution marginalize(const Distribution& p,
                         const std::vector<std::string>& keep);
Distribution condition(
    const Distribution& p,
    const std::vector<std::pair<std::string, int>>& evidence);

// Inverse uniform sampling of a distribution over the indices 0..|p|-1 by a
// uniform variable with sample_count values. With 0-based samples the rule is
// g(w) = min{ i : cum(i) * sample_count >= w + 1 }.
std::vector<int> inverse_sample_map(const std::vector<Rational>& dist,
                                    int sample_count);

// Induced approximation |g^-1(i)| / sample_count. The guarantee
// L1(p, approx) <= (|p| - 1) / sample_count is asserted internally.
std::vector<Rational> rational_approximation(const std::vector<Rational>& dist,
                                             int sample_count);

struct EpsilonBound {
  int latent_count = 0;
  BigInt max_model_cardinality;   // C
  BigInt min_uniform_cardinality; // K
  Rational epsilon;
};

// epsilon = sum_{n=1}^{L} (1/n!) * (L*(C-1)/K)^n, exact.
EpsilonBound epsilon_bound(int latent_count, const BigInt& max_model_cardinality,
                           const BigInt& min_uniform_cardinality);

// Dense exact distribution as integer counts over a common denominator.
struct CountVector {
  VariableList vars;
  int64_t denominator = 1;
  std::vector<int64_t> counts;

  Distribution to_distribution() const;
};

CountVector to_count_vector(const Distribution& p, int64_t denominator);

}  // namespace pw
