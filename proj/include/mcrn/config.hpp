#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcrn/bm.hpp"
#include "mcrn/channel.hpp"
#include "mcrn/detectors.hpp"

namespace mcrn {

/// Malformed configuration. `key()` is the JSON path of the offending entry,
/// e.g. "scenarios[1].channel.k_plus".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct Scenario {
  std::string name;
  ChannelParams channel;
};

enum class DetectorKind { Threshold, MapBm, TaylorCrn, LcCrn };

const char* to_string(DetectorKind kind);

/// Detector used by run-ber. All variants are parameterized by the scenario's
/// oracle threshold.
struct DetectorSpec {
  DetectorKind kind = DetectorKind::Threshold;
  double w_xy = 1.0;   // map-bm, taylor-crn
  int m_samples = 0;   // map-bm; 0 decides on the posterior directly
  double k_scale = 1.0;  // taylor-crn
  double k_on = 1.0;   // lc-crn
  double k_off = 1.0;  // lc-crn
};

struct OnlineConfig {
  int n_pilots = 10000;
  double k_on = 1.0;
  double k_off = 1.0;
  /// Reservoir size; the minimal sufficient reservoir when unset.
  std::optional<int> n_w_total;
  int initial_n_w_on = 0;
  OnlineOptions options;

  LcDetectorState initial_state(int n_receptors) const;
};

struct NoisePhase {
  int pilots = 0;
  double c_noise = 0.0;
};

struct NoiseSchedule {
  std::vector<NoisePhase> phases;

  int total_pilots() const;
  /// Phase index of the l-th transmitted pilot (1-based); pilot 0 maps to phase 0.
  std::size_t phase_of_pilot(int l) const;
  void validate() const;
};

struct TimeVariantConfig {
  ChannelParams channel;  // c_noise is overridden per phase
  NoiseSchedule schedule;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  int n_replicates = 20;
  long max_errors = 100;
  long symbol_cap = 10'000'000;
  int threads = 0;
  std::filesystem::path output_dir = "results";

  std::vector<Scenario> scenarios;
  DetectorSpec detector;
  SamplingPolicy sampling;
  TrainingConfig training;
  int eval_every = 1;
  OnlineConfig online;
  TimeVariantConfig time_variant;

  /// The four evaluation scenarios (N_r in {30, 50}, two noise levels) and the
  /// noise-switching schedule, with the standard training protocol.
  static ExperimentConfig paper_defaults();

  /// Reduced BM-training profile: N_r in {10, 20}, 5 replicates.
  static ExperimentConfig ci_profile();

  void validate() const;
};

/// Standard channel constants for (N_r, c_noise).
ChannelParams standard_channel(int n_receptors, double c_noise);

/// Parses a JSON document; keys not given keep paper_defaults() values.
/// Throws ConfigError naming the first offending key.
ExperimentConfig parse_config(const std::string& json_text);

/// Throws ConfigError with key "<path>" if the file cannot be read.
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace mcrn
