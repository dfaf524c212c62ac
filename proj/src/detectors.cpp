#include "mcrn/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mcrn {

namespace {

double holding_time(double rate_off_to_on, double rate_on_to_off) {
  const double slow = std::min(rate_off_to_on > 0.0 ? rate_off_to_on : INFINITY,
                               rate_on_to_off > 0.0 ? rate_on_to_off : INFINITY);
  return std::isfinite(slow) ? 1.0 / slow : 1.0;
}

}  // namespace

TaylorCrnParams TaylorCrnParams::from_bm(const Fvbm& bm, double k_scale) {
  TaylorCrnParams p;
  p.theta_x = bm.bias(0);
  p.k_scale = k_scale;
  p.weights_yx.resize(static_cast<std::size_t>(bm.n_receptors()));
  for (int i = 1; i <= bm.n_receptors(); ++i) p.weights_yx[static_cast<std::size_t>(i - 1)] = bm.weight(0, i);
  return p;
}

void TaylorCrnParams::validate() const {
  if (!(k_scale > 0.0)) throw std::domain_error("taylor crn: k_scale must be > 0");
  if (theta_x > 0.0) throw std::domain_error("taylor crn: theta_x must be <= 0");
  for (double w : weights_yx) {
    if (!(w >= 0.0)) throw std::domain_error("taylor crn: receptor weights must be >= 0");
  }
}

void LcDetectorState::validate() const {
  if (n_w_total < 0) throw std::invalid_argument("lc detector: n_w_total must be >= 0");
  if (n_w_on < 0 || n_w_on > n_w_total) throw std::invalid_argument("lc detector: n_w_on out of [0, n_w_total]");
  if (!(k_on > 0.0) || !(k_off > 0.0)) throw std::invalid_argument("lc detector: k_on and k_off must be > 0");
}

SamplingParams SamplingPolicy::resolve(const DetectorCrn& d) const {
  return {burn_in_holding_times * d.slowest_holding_time, interval_holding_times * d.slowest_holding_time, m};
}

DetectorCrn build_taylor_crn(const TaylorCrnParams& p, const ReceptorObservation& y) {
  p.validate();
  if (static_cast<int>(p.weights_yx.size()) != y.n_receptors()) {
    throw std::invalid_argument("taylor crn: one weight per receptor required");
  }
  DetectorCrn d;
  d.x_on = d.crn.add_species("Xhat_ON");
  d.x_off = d.crn.add_species("Xhat_OFF");
  const double k = p.k_scale;
  d.crn.add_reaction({{{d.x_off, 1}}, {{d.x_on, 1}}, k, "Xhat_OFF -> Xhat_ON"});
  d.crn.add_reaction({{{d.x_on, 1}}, {{d.x_off, 1}}, k * (1.0 + std::abs(p.theta_x)), "Xhat_ON -> Xhat_OFF"});

  double activation = k;
  std::vector<SpeciesId> receptors;
  for (int i = 0; i < y.n_receptors(); ++i) {
    if (!y.bound(i)) continue;
    const std::string name = "Y_ON_" + std::to_string(i + 1);
    const SpeciesId yi = d.crn.add_species(name);
    receptors.push_back(yi);
    const double w = p.weights_yx[static_cast<std::size_t>(i)];
    if (w > 0.0) {
      d.crn.add_reaction({{{yi, 1}, {d.x_off, 1}}, {{yi, 1}, {d.x_on, 1}}, k * w, name + " + Xhat_OFF -> " + name + " + Xhat_ON"});
      activation += k * w;
    }
  }
  d.initial.counts.assign(d.crn.n_species(), 0);
  d.initial.counts[d.x_off] = 1;
  for (auto yi : receptors) d.initial.counts[yi] = 1;
  d.slowest_holding_time = holding_time(activation, k * (1.0 + std::abs(p.theta_x)));
  return d;
}

double taylor_stationary_prob(double theta_x, double w_xy, int n_bound) {
  const double drive = n_bound * w_xy;
  return (1.0 + drive) / (2.0 + drive + std::abs(theta_x));
}

DetectorCrn build_lc_crn(int n_bound, const LcDetectorState& st) {
  st.validate();
  if (n_bound < 0) throw std::invalid_argument("lc crn: n_bound must be >= 0");
  DetectorCrn d;
  const SpeciesId y_on = d.crn.add_species("Y_ON");
  const SpeciesId w_on = d.crn.add_species("W_ON");
  d.x_on = d.crn.add_species("Xhat_ON");
  d.x_off = d.crn.add_species("Xhat_OFF");
  d.crn.add_reaction({{{y_on, 1}, {d.x_off, 1}}, {{y_on, 1}, {d.x_on, 1}}, st.k_on, "Y_ON + Xhat_OFF -> Y_ON + Xhat_ON"});
  d.crn.add_reaction({{{w_on, 1}, {d.x_on, 1}}, {{w_on, 1}, {d.x_off, 1}}, st.k_off, "W_ON + Xhat_ON -> W_ON + Xhat_OFF"});
  d.initial.counts = {n_bound, st.n_w_on, 0, 1};
  d.slowest_holding_time = holding_time(n_bound * st.k_on, st.n_w_on * st.k_off);
  return d;
}

std::optional<double> lc_stationary_prob(int n_bound, const LcDetectorState& st) {
  if (n_bound == 0 && st.n_w_on == 0) return std::nullopt;
  return n_bound / (n_bound + st.rate_ratio() * st.n_w_on);
}

Symbol lc_decide(int n_bound, const LcDetectorState& st) {
  return symbol_from_bit(n_bound > 0 && static_cast<double>(n_bound) >= st.rate_ratio() * st.n_w_on);
}

Symbol crn_detect(const DetectorCrn& d, const SamplingParams& sampling, Rng& rng) {
  CrnState s = d.initial;
  const auto samples = sample_stationary(d.crn, s, d.x_on, sampling.burn_in, sampling.interval, sampling.m, rng);
  long ones = 0;
  for (auto v : samples) ones += v;
  return symbol_from_bit(2 * ones >= sampling.m);
}

LcDetectorState lc_update(const LcDetectorState& st, Symbol x_hat, const PilotSymbol& pilot) {
  LcDetectorState next = st;
  if (pilot.consumed) return next;
  if (x_hat == Symbol::One && pilot.value == Symbol::Zero && next.n_w_on < next.n_w_total) {
    ++next.n_w_on;
  } else if (x_hat == Symbol::Zero && pilot.value == Symbol::One && next.n_w_on > 0) {
    --next.n_w_on;
  }
  return next;
}

LearningCrn build_learning_crn(const LcDetectorState& st, const PilotSymbol& pilot, Symbol x_hat,
                               const LearningRates& rates) {
  st.validate();
  LearningCrn net;
  net.x_on = net.crn.add_species("Xhat_ON");
  net.x_off = net.crn.add_species("Xhat_OFF");
  net.w_on = net.crn.add_species("W_ON");
  net.w_off = net.crn.add_species("W_OFF");
  net.pilot_on = net.crn.add_species("Xpilot_ON");
  net.pilot_off = net.crn.add_species("Xpilot_OFF");
  net.activate_reaction = net.crn.add_reaction(
      {{{net.x_on, 1}, {net.pilot_off, 1}, {net.w_off, 1}}, {{net.x_on, 1}, {net.w_on, 1}}, rates.k_u1,
       "Xhat_ON + Xpilot_OFF + W_OFF -> Xhat_ON + W_ON"});
  net.deactivate_reaction = net.crn.add_reaction(
      {{{net.x_off, 1}, {net.pilot_on, 1}, {net.w_on, 1}}, {{net.x_off, 1}, {net.w_off, 1}}, rates.k_u2,
       "Xhat_OFF + Xpilot_ON + W_ON -> Xhat_OFF + W_OFF"});

  net.initial.counts.assign(net.crn.n_species(), 0);
  net.initial.counts[x_hat == Symbol::One ? net.x_on : net.x_off] = 1;
  net.initial.counts[net.w_on] = st.n_w_on;
  net.initial.counts[net.w_off] = st.n_w_off();
  if (!pilot.consumed) net.initial.counts[pilot.value == Symbol::One ? net.pilot_on : net.pilot_off] = 1;
  return net;
}

LcDetectorState learning_outcome(const LearningCrn& net, const CrnState& s, const LcDetectorState& before) {
  LcDetectorState after = before;
  after.n_w_on = static_cast<int>(s.counts[net.w_on]);
  return after;
}

PilotSymbol pilot_status(const LearningCrn& net, const CrnState& s, Symbol value) {
  return {value, s.counts[net.pilot_on] + s.counts[net.pilot_off] == 0};
}

int min_reservoir(int n_receptors, double k_on, double k_off) {
  if (!(k_on > 0.0) || !(k_off > 0.0)) throw std::invalid_argument("min_reservoir: rates must be > 0");
  return static_cast<int>(std::ceil(k_off / k_on * n_receptors));
}

double lc_analytic_ber(const LikelihoodModel& model, const LcDetectorState& st) {
  return analytic_ber_of_rule(model, [&](int n) { return lc_decide(n, st); });
}

OnlineLearner::OnlineLearner(LcDetectorState initial, OnlineOptions options)
    : state_(initial), options_(options) {
  state_.validate();
}

Symbol OnlineLearner::step(const ChannelParams& channel, Rng& rng) {
  const Symbol pilot = sample_symbol(rng);
  obs_.resample(channel.n_receptors, binding_probability(channel, pilot), rng);
  const DetectorCrn det = build_lc_crn(obs_.n_bound(), state_);
  const Symbol x_hat = crn_detect(det, options_.sampling.resolve(det), rng);

  if (options_.use_learning_crn) {
    const LearningCrn net = build_learning_crn(state_, {pilot, false}, x_hat, options_.rates);
    CrnState s = net.initial;
    simulate(net.crn, s, options_.update_interval, rng);
    state_ = learning_outcome(net, s, state_);
  } else {
    state_ = lc_update(state_, x_hat, {pilot, false});
  }
  return x_hat;
}

OnlineTrace online_train(const ChannelParams& channel, const LcDetectorState& st0, int n_pilots,
                         const OnlineOptions& options, Rng& rng) {
  if (n_pilots < 0) throw std::invalid_argument("online_train: n_pilots must be >= 0");
  const LikelihoodModel model = LikelihoodModel::from_channel(channel);
  OnlineLearner learner(st0, options);
  OnlineTrace trace;
  trace.n_w_on.reserve(static_cast<std::size_t>(n_pilots) + 1);
  trace.ber.reserve(static_cast<std::size_t>(n_pilots) + 1);
  trace.n_w_on.push_back(learner.state().n_w_on);
  trace.ber.push_back(lc_analytic_ber(model, learner.state()));
  for (int l = 0; l < n_pilots; ++l) {
    learner.step(channel, rng);
    trace.n_w_on.push_back(learner.state().n_w_on);
    trace.ber.push_back(lc_analytic_ber(model, learner.state()));
  }
  return trace;
}

}  // namespace mcrn
