#include "mcrn/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mcrn {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

Symbol sample_symbol(Rng& rng, double prob_one) { return symbol_from_bit(rng.bernoulli(prob_one)); }

void ChannelParams::validate() const {
  require(std::isfinite(c_noise) && c_noise >= 0.0, "channel.c_noise must be >= 0");
  require(std::isfinite(delta_c) && delta_c > 0.0, "channel.delta_c must be > 0");
  require(std::isfinite(k_plus) && k_plus > 0.0, "channel.k_plus must be > 0");
  require(std::isfinite(k_minus) && k_minus > 0.0, "channel.k_minus must be > 0");
  require(n_receptors >= 1, "channel.n_receptors must be >= 1");
}

void DiffusionParams::validate() const {
  require(gamma > 0.0, "diffusion.gamma must be > 0");
  require(diff_coeff > 0.0, "diffusion.diff_coeff must be > 0");
  require(distance > 0.0, "diffusion.distance must be > 0");
}

ReceptorObservation::ReceptorObservation(std::vector<std::uint8_t> states) : states_(std::move(states)) {
  for (auto& s : states_) {
    if (s > 1) throw std::invalid_argument("receptor state must be 0 or 1");
  }
  n_bound_ = std::accumulate(states_.begin(), states_.end(), 0);
}

ReceptorObservation ReceptorObservation::with_bound(int n_receptors, int n_bound) {
  if (n_bound < 0 || n_bound > n_receptors) throw std::invalid_argument("n_bound out of range");
  std::vector<std::uint8_t> s(static_cast<std::size_t>(n_receptors), 0);
  std::fill_n(s.begin(), n_bound, std::uint8_t{1});
  return ReceptorObservation(std::move(s));
}

void ReceptorObservation::resample(int n_receptors, double p, Rng& rng) {
  states_.resize(static_cast<std::size_t>(n_receptors));
  int count = 0;
  for (auto& s : states_) {
    s = rng.bernoulli(p) ? 1 : 0;
    count += s;
  }
  n_bound_ = count;
}

double concentration(const ChannelParams& params, Symbol x) {
  return params.c_noise + params.delta_c * bit(x);
}

double binding_probability(const ChannelParams& params, Symbol x) {
  const double c = concentration(params, x);
  return c / (c + params.k_minus / params.k_plus);
}

ReceptorObservation sample_observation(const ChannelParams& params, Symbol x, Rng& rng) {
  ReceptorObservation obs;
  obs.resample(params.n_receptors, binding_probability(params, x), rng);
  return obs;
}

double joint_pmf(const ChannelParams& params, const ReceptorObservation& y, Symbol x, double prob_one) {
  if (y.n_receptors() != params.n_receptors) {
    throw std::invalid_argument("observation length does not match n_receptors");
  }
  const double p = binding_probability(params, x);
  double prod = x == Symbol::One ? prob_one : 1.0 - prob_one;
  for (auto s : y.states()) prod *= s ? p : 1.0 - p;
  return prod;
}

double pulse_concentration(const DiffusionParams& dp, double tau) {
  if (!(tau > 0.0)) throw std::domain_error("pulse_concentration: tau must be > 0");
  const double spread = 4.0 * std::numbers::pi * dp.diff_coeff * tau;
  return dp.gamma / std::pow(spread, 1.5) *
         std::exp(-dp.distance * dp.distance / (4.0 * dp.diff_coeff * tau));
}

double pulse_peak_time(const DiffusionParams& dp) {
  return dp.distance * dp.distance / (6.0 * dp.diff_coeff);
}

}  // namespace mcrn
