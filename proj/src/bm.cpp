#include "mcrn/bm.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mcrn {

Fvbm::Fvbm(int n_nodes)
    : weights_(Eigen::MatrixXd::Zero(n_nodes, n_nodes)),
      biases_(Eigen::VectorXd::Zero(n_nodes)),
      mask_(BoolMatrix::Constant(n_nodes, n_nodes, true)) {
  if (n_nodes < 1) throw std::invalid_argument("Fvbm needs at least one node");
  mask_.diagonal().setConstant(false);
}

Fvbm Fvbm::star(int n_receptors) {
  if (n_receptors < 1) throw std::invalid_argument("Fvbm::star: n_receptors must be >= 1");
  Fvbm bm(n_receptors + 1);
  bm.mask_.setConstant(false);
  for (int i = 1; i <= n_receptors; ++i) {
    bm.mask_(0, i) = true;
    bm.mask_(i, 0) = true;
  }
  return bm;
}

void Fvbm::set_weight(int i, int j, double w) {
  if (i == j) throw std::invalid_argument("Fvbm::set_weight: diagonal must stay zero");
  if (!mask_(i, j)) throw std::invalid_argument("Fvbm::set_weight: entry is masked out");
  weights_(i, j) = w;
  weights_(j, i) = w;
}

void Fvbm::check_invariants() const {
  const int n = n_nodes();
  for (int i = 0; i < n; ++i) {
    if (weights_(i, i) != 0.0) throw std::logic_error("Fvbm: nonzero diagonal");
    for (int j = i + 1; j < n; ++j) {
      if (weights_(i, j) != weights_(j, i)) throw std::logic_error("Fvbm: weights not symmetric");
      if (mask_(i, j) != mask_(j, i)) throw std::logic_error("Fvbm: mask not symmetric");
      if (!mask_(i, j) && weights_(i, j) != 0.0) throw std::logic_error("Fvbm: masked weight nonzero");
    }
  }
}

LearningRateSchedule LearningRateSchedule::standard() { return {{{20, 1.0}, {50, 0.5}, {100, 0.1}}}; }

double LearningRateSchedule::rate(int step) const {
  for (const auto& piece : pieces) {
    if (step < piece.end_step) return piece.rate;
  }
  throw std::out_of_range("learning rate schedule does not cover step " + std::to_string(step));
}

void TrainingConfig::validate() const {
  if (n_data_samples < 1) throw std::invalid_argument("training.n_data_samples must be >= 1");
  if (n_gibbs_samples < 1) throw std::invalid_argument("training.n_gibbs_samples must be >= 1");
  if (n_steps < 0) throw std::invalid_argument("training.n_steps must be >= 0");
  if (schedule.defined_steps() < n_steps) {
    throw std::invalid_argument("training.lr_schedule does not cover every step");
  }
  int prev_end = 0;
  for (const auto& piece : schedule.pieces) {
    if (piece.end_step <= prev_end) throw std::invalid_argument("training.lr_schedule must be increasing");
    prev_end = piece.end_step;
  }
}

double sigmoid(double a) {
  if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return e / (1.0 + e);
}

double conditional_prob(const Fvbm& bm, int i, const Eigen::VectorXd& z) {
  // Diagonal is zero, so z(i) does not contribute.
  return sigmoid(bm.bias(i) + bm.weights().col(i).dot(z));
}

SampleMatrix gibbs_sample(const Fvbm& bm, int n_samples, Rng& rng, const std::vector<Clamp>& clamps) {
  if (n_samples < 1) throw std::invalid_argument("gibbs_sample: n_samples must be >= 1");
  const int n = bm.n_nodes();
  std::vector<bool> clamped(static_cast<std::size_t>(n), false);
  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i) z(i) = rng.bernoulli(0.5) ? 1.0 : 0.0;
  for (const auto& c : clamps) {
    if (c.node < 0 || c.node >= n) throw std::invalid_argument("gibbs_sample: clamp node out of range");
    clamped[static_cast<std::size_t>(c.node)] = true;
    z(c.node) = c.value ? 1.0 : 0.0;
  }

  SampleMatrix out(n_samples, n);
  for (int s = 0; s < n_samples; ++s) {
    for (int i = 0; i < n; ++i) {
      if (clamped[static_cast<std::size_t>(i)]) continue;
      z(i) = rng.bernoulli(conditional_prob(bm, i, z)) ? 1.0 : 0.0;
    }
    out.row(s) = z.transpose();
  }
  return out;
}

MomentEstimates estimate_moments(const SampleMatrix& samples) {
  if (samples.rows() == 0) throw std::domain_error("estimate_moments: no samples");
  const double inv = 1.0 / static_cast<double>(samples.rows());
  MomentEstimates m;
  m.first = samples.colwise().sum().transpose() * inv;
  m.second = (samples.transpose() * samples) * inv;
  return m;
}

Fvbm train_step(const Fvbm& bm, const MomentEstimates& data, const MomentEstimates& model, double eta) {
  const int n = bm.n_nodes();
  if (data.first.size() != n || model.first.size() != n || data.second.rows() != n ||
      model.second.rows() != n) {
    throw std::invalid_argument("train_step: moment shapes do not match the machine");
  }
  Fvbm next = bm;
  for (int i = 0; i < n; ++i) {
    next.set_bias(i, bm.bias(i) + eta * (data.first(i) - model.first(i)));
    for (int j = i + 1; j < n; ++j) {
      if (!bm.mask()(i, j)) continue;
      const double gap = 0.5 * ((data.second(i, j) - model.second(i, j)) +
                                (data.second(j, i) - model.second(j, i)));
      next.set_weight(i, j, bm.weight(i, j) + eta * gap);
    }
  }
  return next;
}

Fvbm init_weights(int n_receptors, Rng& rng) {
  if (n_receptors < 1) throw std::invalid_argument("init_weights: n_receptors must be >= 1");
  const int n = n_receptors + 1;
  const double sd = std::sqrt(1.0 / n);
  Eigen::MatrixXd v(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) v(i, j) = rng.normal(0.0, sd);
  const Eigen::MatrixXd sym = 0.5 * (v + v.transpose());

  Fvbm bm = Fvbm::star(n_receptors);
  for (int i = 1; i < n; ++i) bm.set_weight(0, i, sym(0, i));
  return bm;
}

Fvbm construct_map_bm(int n_receptors, int nu, double w_xy) {
  if (!(w_xy > 0.0)) throw std::domain_error("construct_map_bm: w_xy must be > 0");
  if (nu < 0 || nu > n_receptors + 1) throw std::domain_error("construct_map_bm: nu out of range");
  Fvbm bm = Fvbm::star(n_receptors);
  for (int i = 1; i <= n_receptors; ++i) bm.set_weight(0, i, w_xy);
  bm.set_bias(0, -(nu - 0.5) * w_xy);
  return bm;
}

double bm_posterior(const Fvbm& bm, const ReceptorObservation& y) {
  if (y.n_receptors() != bm.n_receptors()) {
    throw std::invalid_argument("bm_posterior: observation length does not match the machine");
  }
  double field = bm.bias(0);
  const auto states = y.states();
  for (int i = 0; i < y.n_receptors(); ++i) {
    if (states[static_cast<std::size_t>(i)]) field += bm.weight(0, i + 1);
  }
  return sigmoid(field);
}

Symbol bm_decide(const Fvbm& bm, const ReceptorObservation& y) {
  return symbol_from_bit(bm_posterior(bm, y) >= 0.5);
}

Symbol bm_detect(const Fvbm& bm, const ReceptorObservation& y, int m_samples, Rng& rng) {
  if (m_samples < 1) throw std::invalid_argument("bm_detect: m_samples must be >= 1");
  const double p = bm_posterior(bm, y);
  int ones = 0;
  for (int s = 0; s < m_samples; ++s) ones += rng.bernoulli(p) ? 1 : 0;
  return symbol_from_bit(2 * ones >= m_samples);
}

SampleMatrix draw_channel_samples(const ChannelParams& channel, int n_samples, Rng& rng) {
  channel.validate();
  const double p0 = binding_probability(channel, Symbol::Zero);
  const double p1 = binding_probability(channel, Symbol::One);
  SampleMatrix out(n_samples, channel.n_receptors + 1);
  for (int s = 0; s < n_samples; ++s) {
    const Symbol x = sample_symbol(rng);
    const double p = x == Symbol::One ? p1 : p0;
    out(s, 0) = bit(x);
    for (int i = 1; i <= channel.n_receptors; ++i) out(s, i) = rng.bernoulli(p) ? 1.0 : 0.0;
  }
  return out;
}

TrainingResult train_bm(const ChannelParams& channel, const TrainingConfig& cfg, Rng& rng) {
  cfg.validate();
  const MomentEstimates data = estimate_moments(draw_channel_samples(channel, cfg.n_data_samples, rng));

  TrainingResult result{init_weights(channel.n_receptors, rng), {}};
  result.snapshots.reserve(static_cast<std::size_t>(cfg.n_steps) + 1);
  result.snapshots.push_back(result.final_bm);
  for (int step = 0; step < cfg.n_steps; ++step) {
    const MomentEstimates model = estimate_moments(gibbs_sample(result.final_bm, cfg.n_gibbs_samples, rng));
    result.final_bm = train_step(result.final_bm, data, model, cfg.schedule.rate(step));
    result.snapshots.push_back(result.final_bm);
  }
  return result;
}

std::vector<double> enumerate_pmf(const Fvbm& bm) {
  const int n = bm.n_nodes();
  if (n > 20) throw std::invalid_argument("enumerate_pmf: too many nodes");
  const std::size_t states = std::size_t{1} << n;
  std::vector<double> logp(states);
  double max_log = -INFINITY;
  Eigen::VectorXd z(n);
  for (std::size_t s = 0; s < states; ++s) {
    for (int i = 0; i < n; ++i) z(i) = (s >> i) & 1U ? 1.0 : 0.0;
    logp[s] = 0.5 * z.dot(bm.weights() * z) + z.dot(bm.biases());
    max_log = std::max(max_log, logp[s]);
  }
  double total = 0.0;
  for (auto& v : logp) {
    v = std::exp(v - max_log);
    total += v;
  }
  for (auto& v : logp) v /= total;
  return logp;
}

}  // namespace mcrn
