#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mcrn/rng.hpp"

namespace mcrn {

/// Transmitted (or detected) binary symbol.
enum class Symbol : std::uint8_t { Zero = 0, One = 1 };

inline constexpr int bit(Symbol s) { return static_cast<int>(s); }
inline constexpr Symbol symbol_from_bit(bool b) { return b ? Symbol::One : Symbol::Zero; }

Symbol sample_symbol(Rng& rng, double prob_one = 0.5);

/// Ligand/receptor channel with binary concentration shift keying.
/// Concentrations are in molecules/m^3, k_plus in m^3/s, k_minus in 1/s.
struct ChannelParams {
  double c_noise = 0.0;
  double delta_c = 0.0;
  double k_plus = 0.0;
  double k_minus = 0.0;
  int n_receptors = 0;

  /// Throws std::invalid_argument naming the violated field.
  void validate() const;
};

/// Point release into unbounded 3-D space, used to size delta_c.
struct DiffusionParams {
  double gamma = 0.0;       // released molecules
  double diff_coeff = 0.0;  // m^2/s
  double distance = 0.0;    // m

  void validate() const;
};

/// Receptor states sampled once per symbol interval.
class ReceptorObservation {
 public:
  ReceptorObservation() = default;
  explicit ReceptorObservation(std::vector<std::uint8_t> states);

  /// Observation with the first `n_bound` of `n_receptors` receptors bound.
  static ReceptorObservation with_bound(int n_receptors, int n_bound);

  std::span<const std::uint8_t> states() const { return states_; }
  int n_receptors() const { return static_cast<int>(states_.size()); }
  int n_bound() const { return n_bound_; }
  bool bound(int i) const { return states_[static_cast<std::size_t>(i)] != 0; }

  /// Redraws every receptor as Bernoulli(p), reusing storage.
  void resample(int n_receptors, double p, Rng& rng);

 private:
  std::vector<std::uint8_t> states_;
  int n_bound_ = 0;
};

double concentration(const ChannelParams& params, Symbol x);

/// Pr[Y_i = 1 | X = x] = c_x / (c_x + k_minus/k_plus).
double binding_probability(const ChannelParams& params, Symbol x);

ReceptorObservation sample_observation(const ChannelParams& params, Symbol x, Rng& rng);

/// Joint pmf of (y, x); `prob_one` is the prior of x = 1.
double joint_pmf(const ChannelParams& params, const ReceptorObservation& y, Symbol x,
                 double prob_one = 0.5);

/// Concentration at distance d and time tau after an instantaneous release.
/// Throws std::domain_error for tau <= 0.
double pulse_concentration(const DiffusionParams& dp, double tau);

/// Time at which pulse_concentration peaks: d^2 / (6 D).
double pulse_peak_time(const DiffusionParams& dp);

}  // namespace mcrn
