#pragma once

#include <optional>

#include "pw/worlds.hpp"

namespace pw {

struct SearchStats {
  uint64_t nodes = 0;
  uint64_t backtracks = 0;
};

struct Certificate {
  Model model;  // normalized structure, latent cardinalities, total table
  std::vector<OutcomeTuple> diagonal_events;  // canonical support order
};

struct Verdict {
  bool compatible = false;
  std::optional<Certificate> certificate;
  // Statistics cover the exhausted search; they are the reported payload for
  // incompatible verdicts and are deterministic for any worker count.
  SearchStats stats;
};

struct SolveOptions {
  int threads = 1;
  // Exploratory override: search at this latent cardinality instead of the
  // support size W. Compatible verdicts stay sound; incompatible verdicts no
  // longer rule out larger cardinalities.
  std::optional<int> latent_cardinality;
};

// Decides whether some functional causal model on g realizes exactly the
// support sigma. Normalizes g first, fixes every latent cardinality to
// W = |sigma|, pins the i-th diagonal world to the i-th event of the
// canonically sorted support and completes the table depth-first.
Verdict decide_support(const CausalStructure& g, const SupportSet& sigma,
                       const SolveOptions& options = {});

// Replays the certificate: uniform-latent simulation must have support
// exactly sigma and the pinned diagonal worlds must reproduce their events.
bool verify_certificate(const CausalStructure& g, const Certificate& cert,
                        const SupportSet& sigma);

}  // namespace pw
