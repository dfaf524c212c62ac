#pragma once

#include <span>
#include <vector>

#include "mcrn/channel.hpp"

namespace mcrn {

/// Binomial likelihoods of the bound-receptor count under each symbol.
/// Requires 0 <= p0 < p1 < 1 so the likelihood ratio increases in n.
struct LikelihoodModel {
  int n_receptors = 0;
  double p0 = 0.0;
  double p1 = 0.0;

  static LikelihoodModel from_channel(const ChannelParams& channel);

  void validate() const;
};

/// Decides 1 iff the bound-receptor count reaches nu. nu lies in [0, N_r + 1].
struct ThresholdDetector {
  int nu = 0;
};

/// Binomial(N, p) pmf, exact for p in {0, 1}.
double binomial_pmf(int n_trials, double p, int k);

/// Pr[N_rb = n | X = x]; throws std::domain_error for n outside [0, N_r].
double likelihood(const LikelihoodModel& model, int n, Symbol x);

/// Pr[X = 1 | N_rb = n] for prior Pr[X = 1] = prob_one.
/// Throws std::domain_error when both likelihoods vanish.
double posterior(const LikelihoodModel& model, int n, double prob_one = 0.5);

/// Smallest n with posterior >= 1/2 under equiprobable symbols (exact LLR sweep);
/// N_r + 1 if there is none.
ThresholdDetector optimal_threshold(const LikelihoodModel& model);

Symbol detect(const ThresholdDetector& d, int n_bound);

/// 1/2 Pr[N_rb >= nu | 0] + 1/2 Pr[N_rb < nu | 1].
double analytic_ber(const LikelihoodModel& model, const ThresholdDetector& d);

/// BER of an arbitrary deterministic count rule decide(n) under equiprobable symbols.
template <typename Decide>
double analytic_ber_of_rule(const LikelihoodModel& model, Decide&& decide) {
  double err = 0.0;
  for (int n = 0; n <= model.n_receptors; ++n) {
    if (decide(n) == Symbol::One)
      err += likelihood(model, n, Symbol::Zero);
    else
      err += likelihood(model, n, Symbol::One);
  }
  return 0.5 * err;
}

/// True iff surrogate(n) >= 1/2 exactly when posterior(n) >= 1/2, for every n.
/// `surrogate` has one entry per n in [0, N_r].
bool has_map_property(std::span<const double> surrogate, const LikelihoodModel& model);

/// True iff the pmf over n has a single local maximum (plateaus of two equal
/// neighbours at the peak are allowed).
bool is_unimodal(const LikelihoodModel& model, Symbol x);

}  // namespace mcrn
