#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <vector>

#include "mcrn/channel.hpp"
#include "mcrn/rng.hpp"

namespace mcrn {

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Binary samples, one row per sample, one column per node.
using SampleMatrix = Eigen::MatrixXd;

/// Empirical first and second moments of binary node vectors.
struct MomentEstimates {
  Eigen::VectorXd first;
  Eigen::MatrixXd second;
};

/// Fully-visible Boltzmann machine p(z) ~ exp(z'Wz/2 + z'theta).
///
/// In detector use node 0 is X-hat and nodes 1..N_r are the receptors. The mask
/// marks trainable weights; masked-out entries stay exactly zero.
class Fvbm {
 public:
  /// All off-diagonal weights trainable, everything zero.
  explicit Fvbm(int n_nodes);

  /// Detector layout: only X-hat/receptor weights are trainable.
  static Fvbm star(int n_receptors);

  int n_nodes() const { return static_cast<int>(biases_.size()); }
  int n_receptors() const { return n_nodes() - 1; }

  const Eigen::MatrixXd& weights() const { return weights_; }
  const Eigen::VectorXd& biases() const { return biases_; }
  const BoolMatrix& mask() const { return mask_; }

  double weight(int i, int j) const { return weights_(i, j); }
  double bias(int i) const { return biases_(i); }

  /// Sets W(i,j) = W(j,i). Throws std::invalid_argument on the diagonal or on a
  /// masked-out entry.
  void set_weight(int i, int j, double w);
  void set_bias(int i, double b) { biases_(i) = b; }

  /// Throws std::logic_error if symmetry, zero diagonal or mask are violated.
  void check_invariants() const;

 private:
  Eigen::MatrixXd weights_;
  Eigen::VectorXd biases_;
  BoolMatrix mask_;
};

/// Piecewise-constant learning rate: rate `pieces[k].rate` applies to steps
/// below `pieces[k].end_step` and at or above the previous piece's end.
struct LearningRateSchedule {
  struct Piece {
    int end_step;
    double rate;
  };
  std::vector<Piece> pieces;

  /// 1.0 for steps 0-19, 0.5 for 20-49, 0.1 for 50-99.
  static LearningRateSchedule standard();

  /// Throws std::out_of_range if `step` is past the last piece.
  double rate(int step) const;
  int defined_steps() const { return pieces.empty() ? 0 : pieces.back().end_step; }
};

struct TrainingConfig {
  int n_data_samples = 10000;
  int n_gibbs_samples = 10000;
  int n_steps = 100;
  LearningRateSchedule schedule = LearningRateSchedule::standard();

  void validate() const;
};

struct Clamp {
  int node;
  int value;
};

double sigmoid(double a);

/// Pr[Z_i = 1 | z_-i]. `z` is the full state; its entry i is ignored.
double conditional_prob(const Fvbm& bm, int i, const Eigen::VectorXd& z);

/// Sequential-sweep Gibbs sampler started from a uniform random state; one
/// recorded row per full sweep, no burn-in. Clamped nodes hold their value.
SampleMatrix gibbs_sample(const Fvbm& bm, int n_samples, Rng& rng,
                          const std::vector<Clamp>& clamps = {});

/// Throws std::domain_error for an empty sample set.
MomentEstimates estimate_moments(const SampleMatrix& samples);

/// One moment-matching ascent step on the masked weights and all biases.
Fvbm train_step(const Fvbm& bm, const MomentEstimates& data, const MomentEstimates& model,
                double eta);

/// Star-masked machine with W = (V + V')/2, V_ij ~ N(0, 1/(N_r+1)), zero biases.
Fvbm init_weights(int n_receptors, Rng& rng);

/// Shared X-hat/receptor weight w and X-hat bias -(nu - 1/2) w.
/// Throws std::domain_error unless w > 0 and 0 <= nu <= N_r + 1.
Fvbm construct_map_bm(int n_receptors, int nu, double w_xy);

/// Pr[X-hat = 1 | y] with the receptors clamped to y.
double bm_posterior(const Fvbm& bm, const ReceptorObservation& y);

/// Deterministic decision, posterior >= 1/2.
Symbol bm_decide(const Fvbm& bm, const ReceptorObservation& y);

/// Mean of m Bernoulli(posterior) draws compared against 1/2.
Symbol bm_detect(const Fvbm& bm, const ReceptorObservation& y, int m_samples, Rng& rng);

/// Rows (x, y_1..y_N) drawn from the equiprobable joint channel law.
SampleMatrix draw_channel_samples(const ChannelParams& channel, int n_samples, Rng& rng);

struct TrainingResult {
  Fvbm final_bm;
  /// snapshots[l] is the machine after l updates, l = 0..n_steps.
  std::vector<Fvbm> snapshots;
};

TrainingResult train_bm(const ChannelParams& channel, const TrainingConfig& cfg, Rng& rng);

/// Exact Boltzmann pmf by enumeration (index bit i = node i). Small machines only.
std::vector<double> enumerate_pmf(const Fvbm& bm);

/// Text format: "fvbm <N_r>", then the N_r+1 biases, then the upper-triangle
/// weights row by row. Values use shortest round-trip formatting.
void write_fvbm(std::ostream& out, const Fvbm& bm);

/// Inverse of write_fvbm. A machine whose receptor-receptor weights are all zero
/// reloads with the star mask, otherwise with a full mask. Throws
/// std::runtime_error on malformed input.
Fvbm read_fvbm(std::istream& in);

}  // namespace mcrn
