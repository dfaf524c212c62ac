#include "mcrn/reference.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mcrn {

namespace {

double log_choose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// log L(n|1) - log L(n|0); +inf when only x = 1 can produce n.
double log_likelihood_ratio(const LikelihoodModel& m, int n) {
  double llr = 0.0;
  if (n > 0) llr += n * (std::log(m.p1) - std::log(m.p0));
  const int unbound = m.n_receptors - n;
  if (unbound > 0) llr += unbound * (std::log1p(-m.p1) - std::log1p(-m.p0));
  return llr;
}

}  // namespace

LikelihoodModel LikelihoodModel::from_channel(const ChannelParams& channel) {
  channel.validate();
  LikelihoodModel m{channel.n_receptors, binding_probability(channel, Symbol::Zero),
                    binding_probability(channel, Symbol::One)};
  m.validate();
  return m;
}

void LikelihoodModel::validate() const {
  if (n_receptors < 1) throw std::invalid_argument("likelihood model: n_receptors must be >= 1");
  if (!(p0 >= 0.0 && p0 < p1 && p1 < 1.0)) {
    throw std::invalid_argument("likelihood model: requires 0 <= p0 < p1 < 1");
  }
}

double binomial_pmf(int n_trials, double p, int k) {
  if (k < 0 || k > n_trials) return 0.0;
  if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return k == n_trials ? 1.0 : 0.0;
  return std::exp(log_choose(n_trials, k) + k * std::log(p) + (n_trials - k) * std::log1p(-p));
}

double likelihood(const LikelihoodModel& model, int n, Symbol x) {
  if (n < 0 || n > model.n_receptors) throw std::domain_error("likelihood: n out of range");
  return binomial_pmf(model.n_receptors, x == Symbol::One ? model.p1 : model.p0, n);
}

double posterior(const LikelihoodModel& model, int n, double prob_one) {
  const double l1 = prob_one * likelihood(model, n, Symbol::One);
  const double l0 = (1.0 - prob_one) * likelihood(model, n, Symbol::Zero);
  if (l0 + l1 <= 0.0) throw std::domain_error("posterior: both likelihoods are zero");
  return l1 / (l0 + l1);
}

ThresholdDetector optimal_threshold(const LikelihoodModel& model) {
  for (int n = 0; n <= model.n_receptors; ++n) {
    if (log_likelihood_ratio(model, n) >= 0.0) return {n};
  }
  return {model.n_receptors + 1};
}

Symbol detect(const ThresholdDetector& d, int n_bound) { return symbol_from_bit(n_bound >= d.nu); }

double analytic_ber(const LikelihoodModel& model, const ThresholdDetector& d) {
  return analytic_ber_of_rule(model, [&](int n) { return detect(d, n); });
}

bool has_map_property(std::span<const double> surrogate, const LikelihoodModel& model) {
  if (surrogate.size() != static_cast<std::size_t>(model.n_receptors + 1)) {
    throw std::invalid_argument("has_map_property: surrogate must cover n = 0..N_r");
  }
  for (int n = 0; n <= model.n_receptors; ++n) {
    const bool surrogate_one = surrogate[static_cast<std::size_t>(n)] >= 0.5;
    const bool map_one = posterior(model, n) >= 0.5;
    if (surrogate_one != map_one) return false;
  }
  return true;
}

bool is_unimodal(const LikelihoodModel& model, Symbol x) {
  bool descending = false;
  double prev = likelihood(model, 0, x);
  for (int n = 1; n <= model.n_receptors; ++n) {
    const double cur = likelihood(model, n, x);
    if (cur < prev) {
      descending = true;
    } else if (cur > prev && descending) {
      return false;
    }
    prev = cur;
  }
  return true;
}

}  // namespace mcrn
