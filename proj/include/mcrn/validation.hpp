#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcrn/bm.hpp"
#include "mcrn/crn.hpp"

namespace mcrn {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Total-variation distance between the empirical law of Gibbs samples and the
/// enumerated Boltzmann pmf.
double gibbs_tv_distance(const Fvbm& bm, int n_samples, Rng& rng);

/// OFF <-> ON flip network: OFF -> ON at rate `on_rate`, ON -> OFF at `off_rate`.
struct FlipNetwork {
  Crn crn;
  SpeciesId on = 0;
  SpeciesId off = 0;
  CrnState initial;
};
FlipNetwork make_flip_network(double on_rate, double off_rate);

/// Fraction of [0, t_end] the flip network spends ON.
double time_fraction_on(const FlipNetwork& net, double t_end, Rng& rng);

/// The always-on invariant suite: X-hat conservation, reservoir conservation,
/// nonnegative counts, Gibbs vs enumeration, two-state stationary law and
/// seed determinism.
std::vector<CheckResult> run_core_invariants(std::uint64_t seed, int threads = 0);

}  // namespace mcrn
