#pragma once

#include <optional>
#include <vector>

#include "mcrn/bm.hpp"
#include "mcrn/channel.hpp"
#include "mcrn/crn.hpp"
#include "mcrn/reference.hpp"

namespace mcrn {

/// X-hat-restricted Taylor-mapping parameters. theta_x <= 0 and every weight >= 0.
struct TaylorCrnParams {
  double theta_x = 0.0;
  std::vector<double> weights_yx;  // one per receptor
  double k_scale = 1.0;

  /// Reads theta_x and the X-hat/receptor weights of a star machine.
  static TaylorCrnParams from_bm(const Fvbm& bm, double k_scale = 1.0);

  void validate() const;
};

/// Weight-molecule reservoir of the low-complexity detector.
struct LcDetectorState {
  int n_w_on = 0;
  int n_w_total = 0;
  double k_on = 1.0;
  double k_off = 1.0;

  int n_w_off() const { return n_w_total - n_w_on; }
  double rate_ratio() const { return k_off / k_on; }
  void validate() const;
};

struct PilotSymbol {
  Symbol value = Symbol::Zero;
  bool consumed = false;
};

/// A detector network plus the bookkeeping needed to sample it.
struct DetectorCrn {
  Crn crn;
  CrnState initial;
  SpeciesId x_on = 0;
  SpeciesId x_off = 0;
  /// Mean holding time of the slower X-hat transition that can occur; 1 when
  /// neither can.
  double slowest_holding_time = 1.0;
};

struct SamplingParams {
  double burn_in = 0.0;
  double interval = 1.0;
  int m = 401;
};

/// Sampling expressed in multiples of the slowest X-hat holding time.
struct SamplingPolicy {
  double burn_in_holding_times = 20.0;
  double interval_holding_times = 5.0;
  int m = 401;

  SamplingParams resolve(const DetectorCrn& d) const;
};

/// Reaction count of the unrestricted Taylor mapping for N_r receptors.
constexpr long taylor_full_reaction_count(long n_receptors) {
  return 2 * n_receptors * n_receptors + 4 * n_receptors + 2;
}

/// Flip pair X-hat OFF <-> ON (rates k, k(1+|theta_x|)) plus one activation per
/// bound receptor with rate k*W. Zero weights add no reaction.
/// Throws std::domain_error for negative weights or positive theta_x.
DetectorCrn build_taylor_crn(const TaylorCrnParams& p, const ReceptorObservation& y);

/// (1 + n w) / (2 + n w + |theta_x|).
double taylor_stationary_prob(double theta_x, double w_xy, int n_bound);

/// Y_ON + X_OFF -> Y_ON + X_ON (k_on) and W_ON + X_ON -> W_ON + X_OFF (k_off).
DetectorCrn build_lc_crn(int n_bound, const LcDetectorState& st);

/// n / (n + (k_off/k_on) n_w_on); nullopt when the network is quiescent
/// (n_bound = 0 and n_w_on = 0).
std::optional<double> lc_stationary_prob(int n_bound, const LcDetectorState& st);

/// Infinite-sample decision of the low-complexity detector. A quiescent
/// network keeps X-hat OFF and decides 0.
Symbol lc_decide(int n_bound, const LcDetectorState& st);

/// Samples X-hat ON in stationarity and returns 1 iff the mean is >= 1/2.
Symbol crn_detect(const DetectorCrn& d, const SamplingParams& sampling, Rng& rng);

/// Pilot-driven update of n_w_on, saturating at [0, n_w_total].
LcDetectorState lc_update(const LcDetectorState& st, Symbol x_hat, const PilotSymbol& pilot);

struct LearningRates {
  double k_u1 = 1.0;
  double k_u2 = 1.0;
};

/// Chemical realization of the update rule with X-hat latched at x_hat.
struct LearningCrn {
  Crn crn;
  CrnState initial;
  SpeciesId x_on = 0;
  SpeciesId x_off = 0;
  SpeciesId w_on = 0;
  SpeciesId w_off = 0;
  SpeciesId pilot_on = 0;
  SpeciesId pilot_off = 0;
  std::size_t activate_reaction = 0;    // X_ON + Xp_OFF + W_OFF -> X_ON + W_ON
  std::size_t deactivate_reaction = 0;  // X_OFF + Xp_ON + W_ON -> X_OFF + W_OFF
};

LearningCrn build_learning_crn(const LcDetectorState& st, const PilotSymbol& pilot, Symbol x_hat,
                               const LearningRates& rates = {});

/// Reservoir state and pilot status read back from a learning-network state.
LcDetectorState learning_outcome(const LearningCrn& net, const CrnState& s, const LcDetectorState& before);
PilotSymbol pilot_status(const LearningCrn& net, const CrnState& s, Symbol value);

/// ceil((k_off/k_on) N_r).
int min_reservoir(int n_receptors, double k_on, double k_off);

/// Exact BER of lc_decide under the channel's binomial law.
double lc_analytic_ber(const LikelihoodModel& model, const LcDetectorState& st);

struct OnlineOptions {
  SamplingPolicy sampling;
  /// Simulate the update reactions instead of applying lc_update directly.
  bool use_learning_crn = false;
  LearningRates rates;
  /// Simulated length of one pilot update interval, learning-network mode only.
  double update_interval = 20.0;
};

/// Pilot-by-pilot learner of the low-complexity detector.
class OnlineLearner {
 public:
  OnlineLearner(LcDetectorState initial, OnlineOptions options);

  const LcDetectorState& state() const { return state_; }

  /// Transmits one equiprobable pilot over `channel`, detects it with the
  /// detector network and updates the reservoir. Returns the detected symbol.
  Symbol step(const ChannelParams& channel, Rng& rng);

 private:
  LcDetectorState state_;
  OnlineOptions options_;
  ReceptorObservation obs_;
};

struct OnlineTrace {
  /// Entry l is the state after l pilots, l = 0..n_pilots.
  std::vector<int> n_w_on;
  std::vector<double> ber;
};

OnlineTrace online_train(const ChannelParams& channel, const LcDetectorState& st0, int n_pilots,
                         const OnlineOptions& options, Rng& rng);

}  // namespace mcrn
