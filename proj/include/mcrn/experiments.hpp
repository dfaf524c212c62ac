#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "mcrn/bm.hpp"
#include "mcrn/config.hpp"
#include "mcrn/reference.hpp"

namespace mcrn {

struct BerResult {
  double ber = 0.0;
  long symbols = 0;
  long errors = 0;
  /// symbol_cap reached without a single error; `ber` = 0 is then only an
  /// upper-bound-style estimate.
  bool upper_bound = false;
};

using Detector = std::function<Symbol(const ReceptorObservation&, Rng&)>;

/// Simulates symbol -> observation -> decision until max_errors errors or
/// symbol_cap symbols.
template <typename Detect>
BerResult run_ber_with(Detect&& detect, const ChannelParams& channel, long max_errors, long symbol_cap,
                       Rng& rng) {
  const double p[2] = {binding_probability(channel, Symbol::Zero), binding_probability(channel, Symbol::One)};
  ReceptorObservation obs;
  BerResult res;
  while (res.errors < max_errors && res.symbols < symbol_cap) {
    const Symbol x = sample_symbol(rng);
    obs.resample(channel.n_receptors, p[bit(x)], rng);
    if (detect(obs, rng) != x) ++res.errors;
    ++res.symbols;
  }
  res.ber = static_cast<double>(res.errors) / static_cast<double>(res.symbols);
  res.upper_bound = res.errors == 0;
  return res;
}

BerResult run_ber(const Detector& detector, const ChannelParams& channel, long max_errors, long symbol_cap,
                  Rng& rng);

/// Detector of the given kind tuned to the scenario's oracle threshold.
/// Throws std::invalid_argument when an lc-crn reservoir cannot realize it.
Detector make_detector(const DetectorSpec& spec, const SamplingPolicy& sampling, const ChannelParams& channel);

struct MapReferenceRow {
  std::string scenario;
  int n_receptors;
  double c_noise;
  double p0;
  double p1;
  int nu;
  double map_ber;
};

std::vector<MapReferenceRow> map_reference(const ExperimentConfig& cfg);

struct RunBerRow {
  std::string scenario;
  std::string detector;
  BerResult result;
  double map_ber;
};

/// One BER run per scenario with cfg.detector.
std::vector<RunBerRow> run_ber_experiment(const ExperimentConfig& cfg);

struct CurveRow {
  std::string scenario;
  int index;  // training step or pilot count
  double mean_ber;
  double map_ber;
};

struct Fig2Result {
  std::vector<CurveRow> rows;
  /// final_bms[s][r]: trained machine of scenario s, replicate r.
  std::vector<std::vector<Fvbm>> final_bms;
  /// Evaluated steps (shared by every scenario).
  std::vector<int> steps;
  /// ber[s][r][k]: BER of replicate r at steps[k].
  std::vector<std::vector<std::vector<double>>> ber;
};

/// Evaluated training steps: multiples of eval_every, plus n_steps - 1 and n_steps.
std::vector<int> evaluation_steps(int n_steps, int eval_every);

/// Trains n_replicates machines per scenario and evaluates the deterministic
/// posterior decision at each evaluated training step.
Fig2Result fig2_experiment(const ExperimentConfig& cfg);

struct Fig3Result {
  std::vector<CurveRow> rows;
  /// Per scenario: mean n_w_on after l pilots, l = 0..n_pilots.
  std::vector<std::vector<double>> mean_n_w_on;
  std::vector<std::vector<double>> mean_ber;
  std::vector<int> nu;
  std::vector<double> map_ber;
};

Fig3Result fig3_experiment(const ExperimentConfig& cfg);

struct Fig4Row {
  int pilot;
  double mean_nw;
  int min_nw;
  int max_nw;
  int opt_nu;
};

std::vector<Fig4Row> fig4_experiment(const ExperimentConfig& cfg);

// CSV emitters; numbers use fixed formatting so identical inputs give
// byte-identical files.
void write_map_reference_csv(std::ostream& out, const std::vector<MapReferenceRow>& rows);
void write_run_ber_csv(std::ostream& out, const std::vector<RunBerRow>& rows);
/// Header "scenario,<index_name>,mean_ber,map_ber".
void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& rows, const std::string& index_name);
void write_fig4_csv(std::ostream& out, const std::vector<Fig4Row>& rows);
/// scenario,pilot,mean_nw
void write_nw_trajectory_csv(std::ostream& out, const std::vector<Scenario>& scenarios,
                             const std::vector<std::vector<double>>& mean_nw);

}  // namespace mcrn
