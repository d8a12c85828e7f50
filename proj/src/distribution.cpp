#include "pw/distribution.hpp"

#include <algorithm>

namespace pw {

namespace {
constexpr int64_t kMaxDenseCells = int64_t(1) << 24;
}

int64_t VariableList::outcome_space_size() const {
  int64_t n = 1;
  for (int c : cardinalities) {
    n *= c;
    if (n > kMaxDenseCells) {
      fail(ErrorCode::CardinalityMismatch, "outcome space too large");
    }
  }
  return n;
}

void VariableList::validate() const {
  if (names.size() != cardinalities.size()) {
    fail(ErrorCode::VariableMismatch, "names/cardinalities length mismatch");
  }
  for (size_t i = 0; i < names.size(); ++i) {
    if (cardinalities[i] < 1) {
      fail(ErrorCode::CardinalityMismatch,
           "variable '" + names[i] + "' needs cardinality >= 1");
    }
    for (size_t j = i + 1; j < names.size(); ++j) {
      if (names[i] == names[j]) {
        fail(ErrorCode::DuplicateVertex, "variable '" + names[i] + "'");
      }
    }
  }
}

void check_outcome(const VariableList& vars, const OutcomeTuple& outcome) {
  if (outcome.size() != vars.names.size()) {
    fail(ErrorCode::VariableMismatch,
         "outcome arity " + std::to_string(outcome.size()) + " != " +
             std::to_string(vars.names.size()));
  }
  for (size_t i = 0; i < outcome.size(); ++i) {
    if (outcome[i] < 0 || outcome[i] >= vars.cardinalities[i]) {
      fail(ErrorCode::CardinalityMismatch,
           "value " + std::to_string(outcome[i]) + " out of range for '" +
               vars.names[i] + "'");
    }
  }
}

int64_t pack_outcome(const VariableList& vars, const OutcomeTuple& outcome) {
  check_outcome(vars, outcome);
  int64_t idx = 0;
  for (size_t i = 0; i < outcome.size(); ++i) {
    idx = idx * vars.cardinalities[i] + outcome[i];
  }
  return idx;
}

OutcomeTuple unpack_outcome(const VariableList& vars, int64_t index) {
  OutcomeTuple out(vars.names.size());
  for (size_t i = vars.names.size(); i-- > 0;) {
    out[i] = static_cast<int>(index % vars.cardinalities[i]);
    index /= vars.cardinalities[i];
  }
  return out;
}

Distribution::Distribution(VariableList vars,
                           std::map<OutcomeTuple, Rational> probs)
    : vars_(std::move(vars)) {
  vars_.validate();
  Rational total = 0;
  for (auto& [outcome, p] : probs) {
    check_outcome(vars_, outcome);
    if (p < 0) {
      fail(ErrorCode::ParseError, "negative probability");
    }
    total += p;
    if (p > 0) probs_.emplace(outcome, p);
  }
  if (total != 1) {
    fail(ErrorCode::WeightSumNotOne,
         "probabilities sum to " + format_rational(total));
  }
}

Rational Distribution::probability(const OutcomeTuple& outcome) const {
  check_outcome(vars_, outcome);
  auto it = probs_.find(outcome);
  return it == probs_.end() ? Rational(0) : it->second;
}

bool Distribution::operator==(const Distribution& other) const {
  return vars_ == other.vars_ && probs_ == other.probs_;
}

SupportSet SupportSet::make(VariableList vars,
                            std::vector<OutcomeTuple> events) {
  vars.validate();
  if (events.empty()) fail(ErrorCode::EmptySupport, "support has no events");
  for (const auto& e : events) check_outcome(vars, e);
  std::sort(events.begin(), events.end());
  if (std::adjacent_find(events.begin(), events.end()) != events.end()) {
    fail(ErrorCode::ParseError, "duplicate outcome in support");
  }
  return SupportSet{std::move(vars), std::move(events)};
}

bool SupportSet::contains(const OutcomeTuple& outcome) const {
  return std::binary_search(events.begin(), events.end(), outcome);
}

Distribution point_mass(const VariableList& vars, const OutcomeTuple& outcome) {
  return Distribution(vars, {{outcome, Rational(1)}});
}

Distribution mixture(
    const std::vector<std::pair<Rational, Distribution>>& components) {
  if (components.empty()) {
    fail(ErrorCode::WeightSumNotOne, "empty mixture");
  }
  const VariableList& vars = components.front().second.variables();
  Rational total = 0;
  std::map<OutcomeTuple, Rational> probs;
  for (const auto& [w, p] : components) {
    if (w < 0) fail(ErrorCode::WeightSumNotOne, "negative mixture weight");
    if (!(p.variables() == vars)) {
      fail(ErrorCode::VariableMismatch, "mixture over different variables");
    }
    total += w;
    for (const auto& [outcome, q] : p.entries()) {
      probs[outcome] += w * q;
    }
  }
  if (total != 1) {
    fail(ErrorCode::WeightSumNotOne,
         "mixture weights sum to " + format_rational(total));
  }
  return Distribution(vars, std::move(probs));
}

SupportSet support(const Distribution& p) {
  std::vector<OutcomeTuple> events;
  events.reserve(p.entries().size());
  for (const auto& [outcome, q] : p.entries()) events.push_back(outcome);
  return SupportSet::make(p.variables(), std::move(events));
}

Rational distance(const Distribution& p, const Distribution& q) {
  if (!(p.variables() == q.variables())) {
    fail(ErrorCode::VariableMismatch, "distance over different variables");
  }
  Rational total = 0;
  auto it = p.entries().begin();
  auto jt = q.entries().begin();
  while (it != p.entries().end() || jt != q.entries().end()) {
    if (jt == q.entries().end() ||
        (it != p.entries().end() && it->first < jt->first)) {
      total += it->second;
      ++it;
    } else if (it == p.entries().end() || jt->first < it->first) {
      total += jt->second;
      ++jt;
    } else {
      total += rational_abs(it->second - jt->second);
      ++it;
      ++jt;
    }
  }
  return total;
}

namespace {

std::vector<size_t> positions_of(const VariableList& vars,
                                 const std::vector<std::string>& names) {
  std::vector<size_t> out;
  for (const auto& n : names) {
    auto it = std::find(vars.names.begin(), vars.names.end(), n);
    if (it == vars.names.end()) {
      fail(ErrorCode::VariableMismatch, "unknown variable '" + n + "'");
    }
    out.push_back(static_cast<size_t>(it - vars.names.begin()));
  }
  return out;
}

}  // namespace

Distribution marginalize(const Distribution& p,
                         const std::vector<std::string>& keep) {
  positions_of(p.variables(), keep);  // existence check
  // result keeps p's variable order
  std::vector<size_t> idx;
  VariableList vars;
  for (size_t i = 0; i < p.variables().names.size(); ++i) {
    if (std::find(keep.begin(), keep.end(), p.variables().names[i]) !=
        keep.end()) {
      idx.push_back(i);
      vars.names.push_back(p.variables().names[i]);
      vars.cardinalities.push_back(p.variables().cardinalities[i]);
    }
  }
  std::map<OutcomeTuple, Rational> probs;
  for (const auto& [outcome, q] : p.entries()) {
    OutcomeTuple proj;
    proj.reserve(idx.size());
    for (size_t i : idx) proj.push_back(outcome[i]);
    probs[proj] += q;
  }
  return Distribution(std::move(vars), std::move(probs));
}

Distribution condition(
    const Distribution& p,
    const std::vector<std::pair<std::string, int>>& evidence) {
  std::vector<std::string> names;
  for (const auto& [n, v] : evidence) names.push_back(n);
  std::vector<size_t> pos = positions_of(p.variables(), names);

  Rational mass = 0;
  for (const auto& [outcome, q] : p.entries()) {
    bool match = true;
    for (size_t i = 0; i < pos.size(); ++i) {
      if (outcome[pos[i]] != evidence[i].second) {
        match = false;
        break;
      }
    }
    if (match) mass += q;
  }
  if (mass == 0) {
    fail(ErrorCode::ZeroProbabilityEvidence, "conditioning event has mass 0");
  }

  std::vector<size_t> keep_idx;
  VariableList vars;
  for (size_t i = 0; i < p.variables().names.size(); ++i) {
    if (std::find(pos.begin(), pos.end(), i) == pos.end()) {
      keep_idx.push_back(i);
      vars.names.push_back(p.variables().names[i]);
      vars.cardinalities.push_back(p.variables().cardinalities[i]);
    }
  }
  std::map<OutcomeTuple, Rational> probs;
  for (const auto& [outcome, q] : p.entries()) {
    bool match = true;
    for (size_t i = 0; i < pos.size(); ++i) {
      if (outcome[pos[i]] != evidence[i].second) {
        match = false;
        break;
      }
    }
    if (!match) continue;
    OutcomeTuple proj;
    proj.reserve(keep_idx.size());
    for (size_t i : keep_idx) proj.push_back(outcome[i]);
    probs[proj] += q / mass;
  }
  return Distribution(std::move(vars), std::move(probs));
}

std::vector<int> inverse_sample_map(const std::vector<Rational>& dist,
                                    int sample_count) {
  if (sample_count < 1) {
    fail(ErrorCode::UsageError, "sample_count must be >= 1");
  }
  Rational total = 0;
  for (const auto& p : dist) {
    if (p < 0) fail(ErrorCode::ParseError, "negative probability");
    total += p;
  }
  if (total != 1 || dist.empty()) {
    fail(ErrorCode::WeightSumNotOne, "distribution must sum to 1");
  }

  std::vector<Rational> cum(dist.size());
  Rational running = 0;
  for (size_t i = 0; i < dist.size(); ++i) {
    running += dist[i];
    cum[i] = running;
  }
  // Nearest-boundary inverse sampling, ties rounding down: sample w maps to
  // the least lambda with 2*cum(lambda)*m > 2w+1. The plain ">= w+1" cutoff
  // can leave a whole unit of error at the first cell and break the
  // (|omega|-1)/m guarantee; anchoring boundaries at the nearest half keeps
  // the extreme cells within half a unit, which is what the bound needs.
  std::vector<int> g(sample_count);
  for (int w = 0; w < sample_count; ++w) {
    int pick = static_cast<int>(dist.size()) - 1;
    for (size_t i = 0; i < cum.size(); ++i) {
      if (cum[i] * (2 * sample_count) > 2 * w + 1) {
        pick = static_cast<int>(i);
        break;
      }
    }
    g[w] = pick;
  }
  return g;
}

std::vector<Rational> rational_approximation(const std::vector<Rational>& dist,
                                             int sample_count) {
  std::vector<int> g = inverse_sample_map(dist, sample_count);
  std::vector<Rational> approx(dist.size(), Rational(0));
  for (int image : g) {
    approx[image] += Rational(1, sample_count);
  }
  Rational delta = 0;
  for (size_t i = 0; i < dist.size(); ++i) {
    delta += rational_abs(dist[i] - approx[i]);
  }
  Rational bound(static_cast<int>(dist.size()) - 1, sample_count);
  if (delta > bound) {
    throw std::logic_error("approximation bound violated: " +
                           format_rational(delta) + " > " +
                           format_rational(bound));
  }
  return approx;
}

EpsilonBound epsilon_bound(int latent_count,
                           const BigInt& max_model_cardinality,
                           const BigInt& min_uniform_cardinality) {
  if (latent_count < 1 || max_model_cardinality < 1 ||
      min_uniform_cardinality < 1) {
    fail(ErrorCode::UsageError, "epsilon bound needs L, C, K >= 1");
  }
  Rational ratio(BigInt(latent_count) * (max_model_cardinality - 1),
                 min_uniform_cardinality);
  Rational epsilon = 0;
  Rational power = 1;
  BigInt fact = 1;
  for (int n = 1; n <= latent_count; ++n) {
    power *= ratio;
    fact *= n;
    epsilon += power / Rational(fact);
  }
  return EpsilonBound{latent_count, max_model_cardinality,
                      min_uniform_cardinality, epsilon};
}

Distribution CountVector::to_distribution() const {
  std::map<OutcomeTuple, Rational> probs;
  for (int64_t i = 0; i < static_cast<int64_t>(counts.size()); ++i) {
    if (counts[i] > 0) {
      probs[unpack_outcome(vars, i)] = Rational(counts[i], denominator);
    }
  }
  return Distribution(vars, std::move(probs));
}

CountVector to_count_vector(const Distribution& p, int64_t denom) {
  CountVector cv;
  cv.vars = p.variables();
  cv.denominator = denom;
  cv.counts.assign(cv.vars.outcome_space_size(), 0);
  for (const auto& [outcome, q] : p.entries()) {
    Rational scaled = q * denom;
    if (denominator(scaled) != 1) {
      fail(ErrorCode::CardinalityMismatch,
           "probability not representable over denominator " +
               std::to_string(denom));
    }
    cv.counts[pack_outcome(cv.vars, outcome)] =
        numerator(scaled).convert_to<int64_t>();
  }
  return cv;
}

}  // namespace pw
